//! The functionals `φ` themselves, written once over dual numbers.

use crate::autodiff::Dual;

/// `μ_X / μ_Y`.
pub fn ratio(m: &[Dual]) -> Dual {
    m[0] / m[1]
}

/// Pearson correlation in terms of raw moments
/// `(μ_XY, μ_X, μ_Y, μ_X², μ_Y²)`.
pub fn correlation(m: &[Dual]) -> Dual {
    let (mxy, mx, my, mx2, my2) = (m[0], m[1], m[2], m[3], m[4]);
    (mxy - mx * my) / ((mx2 - mx * mx).sqrt() * (my2 - my * my).sqrt())
}

/// `ln(p₁/p₂)`.
pub fn log_risk_ratio(p: &[Dual]) -> Dual {
    (p[0] / p[1]).ln()
}

/// `β ↦ expit(a·β) / expit(b·β)`.
pub fn relative_risk<'a>(profile_a: &'a [f64], profile_b: &'a [f64]) -> impl Fn(&[Dual]) -> Dual + 'a {
    move |beta: &[Dual]| {
        let eta = |profile: &[f64]| -> Dual { profile.iter().zip(beta).map(|(x, b)| *x * *b).sum() };
        eta(profile_a).expit() / eta(profile_b).expit()
    }
}

/// Attributable fraction among the exposed, `1 - e^{-x/θ}` for `θ > 0` and
/// `1` otherwise.
pub fn attributable_fraction(exposure: f64) -> impl Fn(&[Dual]) -> Dual {
    move |theta: &[Dual]| {
        let t = theta[0];
        if t.value() > 0.0 {
            1.0 - (-exposure / t).exp()
        } else {
            Dual::constant(1.0)
        }
    }
}
