//! Hand-derived gradients and variances.
//!
//! These are independent of the autodiff route and are used to cross-check
//! it, both at runtime (recorded in result diagnostics) and in tests.

/// `∇(μ_X/μ_Y) = (1/μ_Y, -μ_X/μ_Y²)`.
pub fn ratio_gradient(mean_x: f64, mean_y: f64) -> [f64; 2] {
    [1.0 / mean_y, -mean_x / (mean_y * mean_y)]
}

/// `(1/n)[Var X/μ_Y² + μ_X² Var Y/μ_Y⁴ - 2 (μ_X/μ_Y³) Cov(X,Y)]`.
pub fn ratio_variance(mean_x: f64, mean_y: f64, var_x: f64, var_y: f64, cov_xy: f64, n: usize) -> f64 {
    let my2 = mean_y * mean_y;
    (var_x / my2 + mean_x * mean_x * var_y / (my2 * my2) - 2.0 * mean_x / (my2 * mean_y) * cov_xy) / n as f64
}

/// Gradient of the correlation functional with respect to
/// `(μ_XY, μ_X, μ_Y, μ_X², μ_Y²)`.
pub fn correlation_gradient(m: [f64; 5]) -> [f64; 5] {
    let [mxy, mx, my, mx2, my2] = m;
    let vx = mx2 - mx * mx;
    let vy = my2 - my * my;
    let cov = mxy - mx * my;
    let sx = vx.sqrt();
    let sy = vy.sqrt();
    [
        1.0 / (sx * sy),
        mx * cov / (vx.powf(1.5) * sy) - my / (sx * sy),
        -mx / (sx * sy) + my * cov / (sx * vy.powf(1.5)),
        -cov / (2.0 * vx.powf(1.5) * sy),
        -cov / (2.0 * sx * vy.powf(1.5)),
    ]
}

/// Gradient of `β ↦ expit(a·β)/expit(b·β)`:
/// `RR · ((1 - p_a)·a - (1 - p_b)·b)`.
pub fn relative_risk_gradient(beta: &[f64], profile_a: &[f64], profile_b: &[f64]) -> Vec<f64> {
    let dot = |p: &[f64]| p.iter().zip(beta).map(|(x, b)| x * b).sum::<f64>();
    let pa = crate::logit::expit(dot(profile_a));
    let pb = crate::logit::expit(dot(profile_b));
    let rr = pa / pb;
    profile_a
        .iter()
        .zip(profile_b)
        .map(|(a, b)| rr * ((1.0 - pa) * a - (1.0 - pb) * b))
        .collect()
}

/// Gradient of `(1 + e^{-(β₀+β₁+β₂)}) / (1 + e^{-(β₀+β₁)})`, the risk of the
/// `(1, 1, 0)` profile relative to the `(1, 1, 1)` profile, in the factored
/// form `-e^{-β₂}/(e^{β₀+β₁}+1)² · [(1-e^{β₂})e^{β₀+β₁}, (1-e^{β₂})e^{β₀+β₁}, e^{β₀+β₁}+1]`.
pub fn age_treatment_rr_gradient(beta: [f64; 3]) -> [f64; 3] {
    let s = (beta[0] + beta[1]).exp();
    let factor = -(-beta[2]).exp() / ((s + 1.0) * (s + 1.0));
    let shared = (1.0 - beta[2].exp()) * s;
    [factor * shared, factor * shared, factor * (s + 1.0)]
}

/// Partial derivatives written out the way a two-profile risk-ratio
/// calculation is usually coded: with `e_a = e^{-a·β}`, `e_b = e^{-b·β}`,
/// `p_a = 1/(1+e_a)`, the ratio is `p_a·(1+e_b)` and
/// `∂/∂β_j = -b_j·e_b·p_a + (1+e_b)·a_j·p_a(1-p_a)`.
pub fn two_profile_rr_gradient(beta: &[f64], profile_a: &[f64], profile_b: &[f64]) -> Vec<f64> {
    let dot = |p: &[f64]| p.iter().zip(beta).map(|(x, b)| x * b).sum::<f64>();
    let ea = (-dot(profile_a)).exp();
    let eb = (-dot(profile_b)).exp();
    let pa = 1.0 / (1.0 + ea);
    profile_a
        .iter()
        .zip(profile_b)
        .map(|(a, b)| -b * eb * pa + (1.0 + eb) * a * pa * (1.0 - pa))
        .collect()
}

/// `(1/p₁²)·p₁(1-p₁)/n₁ + (1/p₂²)·p₂(1-p₂)/n₂`.
pub fn log_risk_ratio_variance(p1: f64, n1: usize, p2: f64, n2: usize) -> f64 {
    p1 * (1.0 - p1) / (p1 * p1 * n1 as f64) + p2 * (1.0 - p2) / (p2 * p2 * n2 as f64)
}

/// `dAF_e/dθ = -(x/θ²)·e^{-x/θ}` for `θ > 0`, zero otherwise.
pub fn attributable_fraction_derivative(theta: f64, exposure: f64) -> f64 {
    if theta > 0.0 {
        -(exposure / (theta * theta)) * (-exposure / theta).exp()
    } else {
        0.0
    }
}
