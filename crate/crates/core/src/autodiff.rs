//! Forward-mode automatic differentiation.
//!
//! A [`Dual`] carries a value together with the coefficient of an
//! infinitesimal `ε` where `ε² = 0`. Evaluating a functional on duals seeded
//! with `1` in one coordinate and `0` elsewhere yields that partial
//! derivative exactly (up to floating-point rounding). [`gradient`] does one
//! such pass per coordinate.
//!
//! Functionals are written once, against `&[Dual]`, and reused for both
//! differentiation and plain evaluation:
//!
//! ```
//! use delta_inference::autodiff::{gradient, Dual};
//!
//! let ratio = |m: &[Dual]| m[0] / m[1];
//! let g = gradient(ratio, &[3.0, 4.0]).unwrap();
//! assert_eq!(g.partials(), &[0.25, -0.1875]);
//! ```
//!
//! Comparisons look only at the value part, so a functional that branches
//! (`if t.value() > 0.0 { .. }`) is differentiated along whichever branch the
//! value selects. At a kink this gives a one-sided derivative.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A first-order dual number `value + derivative·ε`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Dual {
    value: f64,
    derivative: f64,
}

impl Dual {
    pub const fn new(value: f64, derivative: f64) -> Self {
        Self { value, derivative }
    }

    /// A constant: derivative zero.
    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    /// The active variable: derivative one.
    pub const fn variable(value: f64) -> Self {
        Self::new(value, 1.0)
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn derivative(self) -> f64 {
        self.derivative
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, e * self.derivative)
    }

    /// Natural logarithm. Non-positive arguments produce NaN, which
    /// [`gradient`] reports as a domain error.
    pub fn ln(self) -> Self {
        Self::new(self.value.ln(), self.derivative / self.value)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Self::new(s, self.derivative / (2.0 * s))
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::constant(1.0);
        }
        Self::new(
            self.value.powi(n),
            f64::from(n) * self.value.powi(n - 1) * self.derivative,
        )
    }

    pub fn powf(self, exponent: f64) -> Self {
        if exponent == 0.0 {
            return Self::constant(1.0);
        }
        Self::new(
            self.value.powf(exponent),
            exponent * self.value.powf(exponent - 1.0) * self.derivative,
        )
    }

    pub fn recip(self) -> Self {
        Self::new(
            1.0 / self.value,
            -self.derivative / (self.value * self.value),
        )
    }

    /// Logistic function `1 / (1 + e^{-x})`.
    pub fn expit(self) -> Self {
        (Self::constant(1.0) + (-self).exp()).recip()
    }

    fn is_finite(self) -> bool {
        self.value.is_finite() && self.derivative.is_finite()
    }
}

impl From<f64> for Dual {
    fn from(value: f64) -> Self {
        Self::constant(value)
    }
}

impl fmt::Display for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.value, self.derivative)
    }
}

impl PartialOrd for Dual {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.derivative)
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.derivative + rhs.derivative)
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.derivative - rhs.derivative)
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value,
            self.value * rhs.derivative + self.derivative * rhs.value,
        )
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(
            self.value / rhs.value,
            (self.derivative * rhs.value - self.value * rhs.derivative) / (rhs.value * rhs.value),
        )
    }
}

macro_rules! scalar_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<f64> for Dual {
            type Output = Dual;
            fn $method(self, rhs: f64) -> Dual {
                $trait::$method(self, Dual::constant(rhs))
            }
        }
        impl $trait<Dual> for f64 {
            type Output = Dual;
            fn $method(self, rhs: Dual) -> Dual {
                $trait::$method(Dual::constant(self), rhs)
            }
        }
    )*};
}

scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign for Dual {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl std::iter::Sum for Dual {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Dual::constant(0.0), Add::add)
    }
}

/// Partial derivatives of a scalar functional at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    partials: Vec<f64>,
}

impl Gradient {
    pub fn new(partials: Vec<f64>) -> Self {
        Self { partials }
    }

    pub fn partials(&self) -> &[f64] {
        &self.partials
    }

    pub fn len(&self) -> usize {
        self.partials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partials.is_empty()
    }

    /// `∇ᵀ v`, the derivative along direction `v`.
    pub fn dot(&self, v: &[f64]) -> Result<f64> {
        directional_derivative(self, v)
    }

    /// `∇ᵀ Σ ∇` for a square matrix given as rows.
    pub fn quadratic_form(&self, sigma: &[Vec<f64>]) -> Result<f64> {
        let k = self.partials.len();
        if sigma.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: sigma.len() });
        }
        let mut total = 0.0;
        for (gi, row) in self.partials.iter().zip(sigma) {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: row.len() });
            }
            let inner: f64 = row.iter().zip(&self.partials).map(|(s, gj)| s * gj).sum();
            total += gi * inner;
        }
        Ok(total)
    }
}

impl From<Gradient> for Vec<f64> {
    fn from(g: Gradient) -> Self {
        g.partials
    }
}

/// Evaluates `f` at `x` without tracking derivatives.
pub fn evaluate<F>(f: F, x: &[f64]) -> f64
where
    F: Fn(&[Dual]) -> Dual,
{
    let point: Vec<Dual> = x.iter().copied().map(Dual::constant).collect();
    f(&point).value()
}

/// Gradient of a scalar functional by one forward pass per coordinate.
pub fn gradient<F>(f: F, x: &[f64]) -> Result<Gradient>
where
    F: Fn(&[Dual]) -> Dual,
{
    if x.is_empty() {
        return Err(Error::EmptyPoint);
    }
    let mut point: Vec<Dual> = x.iter().copied().map(Dual::constant).collect();
    let mut partials = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        point[i] = Dual::variable(x[i]);
        let out = f(&point);
        point[i] = Dual::constant(x[i]);
        if !out.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite result {out} while differentiating coordinate {i} at {x:?}"
            )));
        }
        partials.push(out.derivative());
    }
    Ok(Gradient::new(partials))
}

/// Jacobian of a vector-valued map, one row per output.
pub fn jacobian<F>(f: F, x: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[Dual]) -> Vec<Dual>,
{
    if x.is_empty() {
        return Err(Error::EmptyPoint);
    }
    let mut point: Vec<Dual> = x.iter().copied().map(Dual::constant).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..x.len() {
        point[i] = Dual::variable(x[i]);
        let out = f(&point);
        point[i] = Dual::constant(x[i]);
        if rows.is_empty() {
            rows = vec![vec![0.0; x.len()]; out.len()];
        } else if out.len() != rows.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), found: out.len() });
        }
        for (row, o) in rows.iter_mut().zip(&out) {
            if !o.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite output {o} while differentiating coordinate {i}"
                )));
            }
            row[i] = o.derivative();
        }
    }
    Ok(rows)
}

pub fn directional_derivative(g: &Gradient, v: &[f64]) -> Result<f64> {
    if g.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), found: v.len() });
    }
    Ok(g.partials.iter().zip(v).map(|(a, b)| a * b).sum())
}

/// Default relative step for [`check_gradient`].
pub const DEFAULT_STEP: f64 = 1e-6;

/// Central-difference gradient with per-coordinate step `step·max(1, |x_i|)`.
pub fn central_difference<F>(f: F, x: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[Dual]) -> Dual,
{
    if x.is_empty() {
        return Err(Error::EmptyPoint);
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidOption(format!("difference step {step} must be positive")));
    }
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = step * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let up = evaluate(&f, &probe);
        probe[i] = x[i] - h;
        let down = evaluate(&f, &probe);
        probe[i] = x[i];
        let d = (up - down) / (2.0 * h);
        if !d.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite difference quotient in coordinate {i} at {x:?}"
            )));
        }
        out.push(d);
    }
    Ok(out)
}

/// Outcome of comparing forward-mode and central-difference gradients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientCheck {
    pub max_abs_diff: f64,
    pub per_coordinate: Vec<f64>,
    pub autodiff: Vec<f64>,
    pub numeric: Vec<f64>,
}

pub fn check_gradient<F>(f: F, x: &[f64], step: f64) -> Result<GradientCheck>
where
    F: Fn(&[Dual]) -> Dual,
{
    let autodiff: Vec<f64> = gradient(&f, x)?.into();
    let numeric = central_difference(&f, x, step)?;
    let per_coordinate: Vec<f64> = autodiff
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs())
        .collect();
    let max_abs_diff = per_coordinate.iter().copied().fold(0.0, f64::max);
    Ok(GradientCheck { max_abs_diff, per_coordinate, autodiff, numeric })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_derivative() {
        let g = gradient(|x: &[Dual]| x[0], &[5.0]).unwrap();
        assert_eq!(g.partials(), &[1.0]);
    }

    #[test]
    fn ratio_gradient() {
        let g = gradient(|m: &[Dual]| m[0] / m[1], &[3.0, 4.0]).unwrap();
        assert_eq!(g.partials(), &[0.25, -0.1875]);
    }

    #[test]
    fn relative_risk_gradient_at_origin() {
        let f = |b: &[Dual]| {
            (1.0 + (-b[0] - b[1] - b[2]).exp()) / (1.0 + (-b[0] - b[1]).exp())
        };
        let g = gradient(f, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.partials(), &[0.0, 0.0, -0.5]);
    }

    #[test]
    fn empty_point_is_an_error() {
        assert_eq!(gradient(|_: &[Dual]| Dual::constant(1.0), &[]), Err(Error::EmptyPoint));
    }

    #[test]
    fn log_of_negative_is_a_domain_error() {
        let err = gradient(|x: &[Dual]| x[0].ln(), &[-1.0]).unwrap_err();
        assert_eq!(err.category(), "domain");
        let err = gradient(|x: &[Dual]| x[0].sqrt(), &[-4.0]).unwrap_err();
        assert_eq!(err.category(), "domain");
    }

    #[test]
    fn directional_derivatives() {
        let g = Gradient::new(vec![1.0, 2.0]);
        assert_eq!(directional_derivative(&g, &[0.0, 0.0]).unwrap(), 0.0);
        let g = Gradient::new(vec![0.25, -0.1875]);
        assert_eq!(directional_derivative(&g, &[1.0, 1.0]).unwrap(), 0.0625);
        let g = Gradient::new(vec![1.0]);
        assert_eq!(directional_derivative(&g, &[3.0]).unwrap(), 3.0);
        assert_eq!(
            directional_derivative(&g, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn dual_product_rule_is_exact() {
        let a = Dual::new(1.5, -2.0);
        let b = Dual::new(0.25, 3.0);
        let p = a * b;
        assert_eq!(p.value(), 1.5 * 0.25);
        assert_eq!(p.derivative(), 1.5 * 3.0 + -2.0 * 0.25);
    }

    #[test]
    fn square_checks_against_differences() {
        let report = check_gradient(|x: &[Dual]| x[0] * x[0], &[1.0], 1e-5).unwrap();
        assert!(report.max_abs_diff < 1e-8, "{report:?}");
    }

    #[test]
    fn constant_checks_exactly() {
        let report = check_gradient(|_: &[Dual]| Dual::constant(7.0), &[3.0, -2.0], 1e-6).unwrap();
        assert_eq!(report.max_abs_diff, 0.0);
    }

    #[test]
    fn check_is_deterministic() {
        let f = |x: &[Dual]| (x[0] * x[1]).exp() / (1.0 + x[1] * x[1]);
        let a = check_gradient(f, &[0.3, -0.7], DEFAULT_STEP).unwrap();
        let b = check_gradient(f, &[0.3, -0.7], DEFAULT_STEP).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_step_rejected() {
        assert!(check_gradient(|x: &[Dual]| x[0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn powers_and_roots() {
        let g = gradient(|x: &[Dual]| x[0].powf(1.5) + x[0].powi(-2) + x[0].recip(), &[4.0]).unwrap();
        let expected = 1.5 * 2.0 - 2.0 / 64.0 - 1.0 / 16.0;
        assert!((g.partials()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn jacobian_of_polar_map() {
        let j = jacobian(|x: &[Dual]| vec![x[0] * x[1], x[0] + x[1].exp()], &[2.0, 0.0]).unwrap();
        assert_eq!(j, vec![vec![0.0, 2.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn quadratic_form_matches_hand_value() {
        let g = Gradient::new(vec![1.0, -2.0]);
        let s = vec![vec![2.0, 0.5], vec![0.5, 1.0]];
        // 2 - 2*0.5*2 + 4 = 4
        assert_eq!(g.quadratic_form(&s).unwrap(), 4.0);
    }

    fn smooth_f(x: &[Dual]) -> Dual {
        (x[0] * x[1]).exp() * 0.1 + x[2] * x[2] * x[0] - (1.0 + x[1] * x[1]).ln()
    }

    fn smooth_g(x: &[Dual]) -> Dual {
        x[0] / (1.0 + x[2] * x[2]) + (x[1] * 0.5).exp() * x[2]
    }

    proptest! {
        #[test]
        fn gradient_is_linear(
            x in prop::collection::vec(-1.5f64..1.5, 3),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let combined = gradient(|p: &[Dual]| alpha * smooth_f(p) + beta * smooth_g(p), &x).unwrap();
            let gf = gradient(smooth_f, &x).unwrap();
            let gg = gradient(smooth_g, &x).unwrap();
            for i in 0..3 {
                let expected = alpha * gf.partials()[i] + beta * gg.partials()[i];
                let scale = 1.0 + expected.abs();
                prop_assert!((combined.partials()[i] - expected).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn chain_rule_matches_jacobian_product(x in prop::collection::vec(-1.0f64..1.0, 2)) {
            // inner: R^2 -> R^3, outer: R^3 -> R
            let inner = |p: &[Dual]| vec![p[0] * p[1], (p[0] - p[1]).exp(), p[1] * p[1] + 1.0];
            let outer = |q: &[Dual]| q[0] * q[1] + q[2].ln() * q[1];
            let composed = gradient(|p: &[Dual]| outer(&inner(p)), &x).unwrap();
            let j = jacobian(inner, &x).unwrap();
            let mid: Vec<f64> = inner(&x.iter().map(|v| Dual::constant(*v)).collect::<Vec<_>>())
                .into_iter().map(Dual::value).collect();
            let go = gradient(outer, &mid).unwrap();
            for col in 0..2 {
                let product: f64 = (0..3).map(|r| go.partials()[r] * j[r][col]).sum();
                let got = composed.partials()[col];
                prop_assert!((got - product).abs() <= 1e-10 * (1.0 + product.abs()));
            }
        }

        #[test]
        fn directional_derivative_matches_line_derivative(
            x in prop::collection::vec(-1.0f64..1.0, 3),
            v in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let g = gradient(smooth_f, &x).unwrap();
            let along = gradient(|t: &[Dual]| {
                let p: Vec<Dual> = x.iter().zip(&v).map(|(xi, vi)| *xi + t[0] * *vi).collect();
                smooth_f(&p)
            }, &[0.0]).unwrap();
            let dd = directional_derivative(&g, &v).unwrap();
            prop_assert!((dd - along.partials()[0]).abs() <= 1e-12 * (1.0 + dd.abs()));
        }
    }
}
