//! Ball and sphere measures, spherical caps, the random-polytope surface
//! deficit constant and the shrink-factor calibration.
//!
//! Caps are parameterized by the height `p` of the cutting hyperplane, the
//! radius `r = sqrt(1 - p^2)` of the cut and the normalized surface area `s`
//! of `∂B ∩ {⟨x, ξ⟩ ≥ p}`. Areas are obtained from
//! `s(θ) = ω_{n-1}/ω_n · ∫_0^θ sin^{n-2}(φ) dφ`, `θ = arccos p`, which is the
//! `(1 - t²)^{(n-3)/2}` density after substituting `t = cos φ`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;

/// Volume of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => (h * PI.ln() - libm::lgamma(h + 1.0)).exp(),
    }
}

/// (n-1)-dimensional measure of the unit sphere S^{n-1} ⊂ R^n.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::UnsupportedDimension { dim: n, min: 2, max: usize::MAX });
    }
    Ok(())
}

// ∫_0^θ sin^{n-2} φ dφ, to relative precision.
fn sine_power_integral(n: usize, theta: f64) -> f64 {
    match n {
        2 => theta,
        3 => 1.0 - theta.cos(),
        _ => {
            let k = (n - 2) as i32;
            quadrature::integrate(|x| x.sin().powi(k), 0.0, theta, 1e-300, 1e-15)
        }
    }
}

fn area_ratio(n: usize) -> f64 {
    sphere_area(n - 1) / sphere_area(n)
}

/// Normalized area of the cap of angular radius `theta ∈ [0, π]`.
pub fn cap_area_from_angle(n: usize, theta: f64) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    if theta >= PI {
        return 1.0;
    }
    if theta > PI / 2.0 {
        return 1.0 - cap_area_from_angle(n, PI - theta);
    }
    area_ratio(n) * sine_power_integral(n, theta)
}

/// Normalized surface area `s ∈ [0, 1]` of the cap cut off by a hyperplane at
/// signed height `p ∈ [-1, 1]`.
pub fn cap_area_from_height(n: usize, p: f64) -> Result<f64> {
    check_dim(n)?;
    if !(-1.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("cap height {p} outside [-1, 1]")));
    }
    Ok(cap_area_from_angle(n, p.acos()))
}

/// Angular radius of the cap with normalized area `s`, by bisection.
pub fn cap_angle_from_area(n: usize, s: f64) -> Result<f64> {
    check_dim(n)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("cap area {s} outside [0, 1]")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s == 1.0 {
        return Ok(PI);
    }
    if n == 2 {
        return Ok(s * PI);
    }
    if n == 3 {
        // s = (1 - cos θ)/2
        return Ok(2.0 * (s.sqrt()).asin());
    }
    let (mut lo, mut hi) = (0.0_f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cap_area_from_angle(n, mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse of [`cap_area_from_height`].
pub fn cap_height_from_area(n: usize, s: f64) -> Result<f64> {
    // invert the smaller cap; cos is flat near θ = π
    if s > 0.5 && s <= 1.0 {
        return cap_angle_from_area(n, 1.0 - s).map(|t| -t.cos());
    }
    cap_angle_from_area(n, s).map(f64::cos)
}

/// `dp/ds` for the unnormalized cap area `s`, i.e.
/// `-1 / ((1 - p²)^{(n-3)/2} vol_{n-2}(∂B^{n-1}))`.
pub fn cap_height_derivative(n: usize, p: f64) -> f64 {
    let e = (n as f64 - 3.0) / 2.0;
    -1.0 / ((1.0 - p * p).powf(e) * sphere_area(n - 1))
}

/// Height, radius and normalized area of a spherical cap of the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapGeometry {
    pub p: f64,
    pub r: f64,
    pub s: f64,
}

impl CapGeometry {
    pub fn from_height(n: usize, p: f64) -> Result<Self> {
        let s = cap_area_from_height(n, p)?;
        let theta = p.acos();
        Ok(Self { p, r: theta.sin(), s })
    }

    pub fn from_area(n: usize, s: f64) -> Result<Self> {
        let theta = cap_angle_from_area(n, s)?;
        Ok(Self { p: theta.cos(), r: theta.sin(), s })
    }
}

/// Two-sided cap-radius expansion around `(s / vol(B^{n-1}))^{1/(n-1)}` with
/// caller-supplied remainder constant `c`. `s` is the absolute cap area.
pub fn cap_radius_bounds(n: usize, s: f64, c: f64) -> Result<(f64, f64)> {
    check_dim(n)?;
    if s <= 0.0 || s.is_nan() {
        return Err(Error::InvalidArgument(format!("cap area {s} must be positive")));
    }
    let half = sphere_area(n) / 2.0;
    if s > half * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("cap area {s} exceeds a hemisphere ({half})")));
    }
    if c <= 0.0 {
        return Err(Error::InvalidArgument(format!("constant {c} must be positive")));
    }
    let (lead, rem) = cap_radius_expansion(n, s);
    Ok((lead - c * rem, lead + c * rem))
}

// (two-term expansion, remainder scale u^{5/(n-1)})
fn cap_radius_expansion(n: usize, s: f64) -> (f64, f64) {
    let u = s / ball_volume(n - 1);
    let e = 1.0 / (n as f64 - 1.0);
    let lead = u.powf(e) - u.powf(3.0 * e) / (2.0 * (n as f64 + 1.0));
    (lead, u.powf(5.0 * e))
}

/// Smallest remainder constant for which [`cap_radius_bounds`] brackets the
/// true cap radius at every absolute area in `areas`.
pub fn fit_cap_radius_constant(n: usize, areas: &[f64]) -> Result<f64> {
    let omega = sphere_area(n);
    let mut c: f64 = 0.0;
    for &s in areas {
        let cap = CapGeometry::from_area(n, (s / omega).min(1.0))?;
        let (lead, rem) = cap_radius_expansion(n, s);
        c = c.max((cap.r - lead).abs() / rem);
    }
    Ok(c)
}

/// Limit of `N^{2/(n-1)} (vol(S^{n-1}) - E vol(∂P_N))` for the convex hull of
/// `N` uniform points on the sphere. At `n = 2` the factorial `(n-2)!` is 1.
pub fn mueller_constant(n: usize) -> f64 {
    let nf = n as f64;
    let two_over = 2.0 / (nf - 1.0);
    let log_gamma_ratio = libm::lgamma(nf + two_over) - libm::lgamma(nf - 1.0);
    (nf - 1.0) / (nf + 1.0) * 0.5 * log_gamma_ratio.exp()
        * sphere_area(n).powf((nf + 1.0) / (nf - 1.0))
        / ball_volume(n - 1).powf(two_over)
}

/// Shrink factor solving `(1-γ)^{n-1} ω_n = ω_n - C(n) N^{-2/(n-1)}`, with the
/// linearized bracket `[γ_lo, γ_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub gamma: f64,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    pub shrunk_surface_area: f64,
}

impl CalibrationResult {
    pub fn in_bracket(&self) -> bool {
        self.gamma_lower <= self.gamma && self.gamma <= self.gamma_upper
    }
}

/// Analytic calibration of γ using the asymptotic surface deficit as the
/// stand-in for `E vol(∂P_N)`.
pub fn calibrate_gamma(n: usize, points: u64) -> Result<CalibrationResult> {
    check_dim(n)?;
    if points == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let nf = n as f64;
    let omega = sphere_area(n);
    let deficit = mueller_constant(n) * (points as f64).powf(-2.0 / (nf - 1.0));
    if deficit >= omega {
        return Err(Error::AsymptoticInvalid { dim: n, points, deficit, sphere_area: omega });
    }
    let rel = deficit / omega;
    let gamma = -(libm::log1p(-rel) / (nf - 1.0)).exp_m1();
    let gamma_lower = rel / (nf - 1.0);
    Ok(CalibrationResult {
        gamma,
        gamma_lower,
        gamma_upper: nf / (nf - 1.0) * gamma_lower,
        shrunk_surface_area: omega - deficit,
    })
}

/// γ with `(1-γ)^{n-1} ω_n = area`; the Monte Carlo counterpart of
/// [`calibrate_gamma`] when `area` is a sample mean of `vol(∂P_N)`.
pub fn gamma_for_surface_area(n: usize, area: f64) -> Result<f64> {
    check_dim(n)?;
    let omega = sphere_area(n);
    if !(area > 0.0 && area < omega) {
        return Err(Error::InvalidArgument(format!("surface area {area} outside (0, {omega})")));
    }
    Ok(-((area / omega).ln() / (n as f64 - 1.0)).exp_m1())
}

/// `{Γ(n + 2/(n-1)) / (n-1)!}^{(n-1)/2}` and whether it is at most `2n`.
pub fn gamma_ratio_bound(n: usize) -> (f64, bool) {
    let nf = n as f64;
    let log_ratio = libm::lgamma(nf + 2.0 / (nf - 1.0)) - libm::lgamma(nf);
    let value = ((nf - 1.0) / 2.0 * log_ratio).exp();
    (value, value <= 2.0 * nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_and_sphere_measures() {
        assert_eq!(ball_volume(1), 2.0);
        assert_relative_eq!(ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(ball_volume(4), PI * PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn cap_area_examples() {
        assert!((cap_area_from_height(3, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((cap_area_from_height(2, 0.0).unwrap() - 0.5).abs() < 1e-15);
        // mpmath: (2/π) ∫_{0.3}^1 sqrt(1-t²) dt
        assert!((cap_area_from_height(4, 0.3).unwrap() - 0.311_918_832_390_536_5).abs() < 1e-12);
        for n in 2..=8 {
            assert_eq!(cap_area_from_height(n, 1.0).unwrap(), 0.0);
            assert_eq!(cap_area_from_height(n, -1.0).unwrap(), 1.0);
            assert!((cap_area_from_height(n, 0.0).unwrap() - 0.5).abs() < 1e-13);
        }
        assert!(cap_area_from_height(3, 1.5).is_err());
    }

    #[test]
    fn cap_inverse_examples() {
        assert!((cap_height_from_area(3, 0.25).unwrap() - 0.5).abs() < 1e-12);
        assert!((cap_height_from_area(2, 1.0 / 3.0).unwrap() - 0.5).abs() < 1e-12);
        for n in 2..=8 {
            assert!(cap_height_from_area(n, 0.5).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn radius_bounds_examples() {
        // n=3, s = 0.1π  ->  p = 0.95
        let (lo, hi) = cap_radius_bounds(3, 0.1 * PI, 1.0).unwrap();
        let r = (1.0 - 0.95f64 * 0.95).sqrt();
        assert!(lo <= r && r <= hi);
        // n=2, arc length 0.2 -> r = sin(0.1)
        let (lo, hi) = cap_radius_bounds(2, 0.2, 1.0).unwrap();
        assert!(lo <= 0.1f64.sin() && 0.1f64.sin() <= hi);
        // tiny caps: both bounds collapse onto sqrt(s/π)
        let s = 1e-10;
        let (lo, hi) = cap_radius_bounds(3, s, 1.0).unwrap();
        let lead = (s / PI).sqrt();
        assert!((lo - lead).abs() / lead < 1e-9 && (hi - lead).abs() / lead < 1e-9);
        assert!(cap_radius_bounds(3, 0.0, 1.0).is_err());
        assert!(cap_radius_bounds(3, -1.0, 1.0).is_err());
    }

    #[test]
    fn mueller_examples() {
        assert_relative_eq!(mueller_constant(3), 24.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(mueller_constant(3) / sphere_area(3), 6.0, max_relative = 1e-13);
        // mpmath evaluation of the closed form at n = 4
        assert_relative_eq!(mueller_constant(4), 122.434_148_799_315_06, max_relative = 1e-12);
        assert_relative_eq!(mueller_constant(2), 2.0 * PI.powi(3), max_relative = 1e-13);
    }

    #[test]
    fn calibration_examples() {
        let c = calibrate_gamma(3, 1_000_000).unwrap();
        assert_relative_eq!(c.gamma, 3.000_004_500_013_5e-6, max_relative = 1e-9);
        assert!(c.in_bracket());
        let big = calibrate_gamma(3, 1_000_000_000_000).unwrap();
        assert_relative_eq!(big.gamma * 1e12, 3.0, max_relative = 1e-9);
        match calibrate_gamma(3, 1) {
            Err(Error::AsymptoticInvalid { .. }) => {}
            other => panic!("expected asymptotic-invalid, got {other:?}"),
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        let (v, ok) = gamma_ratio_bound(2);
        assert!((v - 6f64.sqrt()).abs() < 1e-12 && ok);
        let (v, ok) = gamma_ratio_bound(3);
        assert!((v - 3.0).abs() < 1e-12 && ok);
        let (v, ok) = gamma_ratio_bound(50);
        assert_relative_eq!(v, 49.521_248_112_686_52, max_relative = 1e-10);
        assert!(ok);
    }
}
