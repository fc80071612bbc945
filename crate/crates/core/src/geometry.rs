//! Two-ball geometry: the intersection volume `φ(r) = |B_R(0) ∩ B_R̃(x)|`
//! with `|x| = r`, its radial derivative, the boundary slope `Γ`, and the
//! scanned certificate for the two-sided bounds on `φ` around `r = R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{beta_reg_complement, unit_ball_volume};

/// The ball `E*` of radius `R` together with the kernel ball `B` of radius `R̃`,
/// both centred at the origin, and the admissibility margin `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPair {
    dim: usize,
    radius_e: f64,
    radius_b: f64,
    delta: f64,
}

impl BallPair {
    /// Builds a pair, enforcing `δ ≤ R̃/(2R) ≤ 1 - δ`.
    pub fn new(dim: usize, radius_e: f64, radius_b: f64, delta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(radius_e > 0.0 && radius_e.is_finite() && radius_b > 0.0 && radius_b.is_finite()) {
            return Err(Error::Parameter(format!(
                "radii must be positive and finite (R = {radius_e}, R̃ = {radius_b})"
            )));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Parameter(format!(
                "δ must lie in (0, 1/2], got {delta}"
            )));
        }
        let kappa = radius_b / (2.0 * radius_e);
        // Relative slack for radii recovered from a mass.
        let slack = 1e-12;
        if kappa < delta * (1.0 - slack) || kappa > (1.0 - delta) * (1.0 + slack) {
            return Err(Error::Admissibility(format!(
                "R̃/(2R) = {kappa} is outside [δ, 1-δ] = [{delta}, {}]",
                1.0 - delta
            )));
        }
        Ok(Self {
            dim,
            radius_e,
            radius_b,
            delta,
        })
    }

    /// Builds a pair with the largest `δ` for which it is admissible. Fails
    /// when `R̃ ≥ 2R`, since no `δ > 0` works then.
    pub fn with_implied_delta(dim: usize, radius_e: f64, radius_b: f64) -> Result<Self> {
        let kappa = radius_b / (2.0 * radius_e);
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::Admissibility(format!(
                "R̃/(2R) = {kappa} must lie strictly between 0 and 1"
            )));
        }
        Self::new(dim, radius_e, radius_b, kappa.min(1.0 - kappa).min(0.5))
    }

    /// Pair with `R = 1` and `R̃ = 2κ`.
    pub fn unit(dim: usize, kappa: f64, delta: f64) -> Result<Self> {
        Self::new(dim, 1.0, 2.0 * kappa, delta)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius_e(&self) -> f64 {
        self.radius_e
    }

    pub fn radius_b(&self) -> f64 {
        self.radius_b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `R̃ / (2R)`.
    pub fn kappa(&self) -> f64 {
        self.radius_b / (2.0 * self.radius_e)
    }

    /// Spectral parameter `a = R̃² / (2R²)`.
    pub fn spectral_a(&self) -> f64 {
        let q = self.radius_b / self.radius_e;
        0.5 * q * q
    }

    /// Same kernel-to-ball ratio with a different radius for `E*`.
    pub fn rescaled(&self, radius_e: f64) -> Self {
        let s = radius_e / self.radius_e;
        Self {
            radius_e,
            radius_b: self.radius_b * s,
            ..*self
        }
    }

    /// Volume `|E*|`.
    pub fn volume_e(&self) -> f64 {
        unit_ball_volume(self.dim) * self.radius_e.powi(self.dim as i32)
    }

    /// Intersection volume `φ(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        lens_volume(self.dim, self.radius_e, self.radius_b, r.abs())
    }

    /// Radial derivative `φ'(r)`, `r > 0`.
    ///
    /// Moving the centre of `B` outward sweeps the boundary of `E*`; only
    /// the part of `∂E*` inside `B` contributes, which reduces to
    /// `-R^{N-1} |S^{N-2}| ∫_{t₀}^1 t (1-t²)^{(N-3)/2} dt` with
    /// `t₀ = (r² + R² - R̃²)/(2rR)`. The `t` integral is elementary.
    pub fn phi_derivative(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!(
                "radial derivative of φ is undefined at r = {r}"
            )));
        }
        let (big, small) = (self.radius_e, self.radius_b);
        if r >= big + small || r <= (big - small).abs() {
            return Ok(0.0);
        }
        let t0 = (r * r + big * big - small * small) / (2.0 * r * big);
        let one_minus_t0sq = ((1.0 - t0) * (1.0 + t0)).max(0.0);
        let n = self.dim;
        // |S^{N-2}|/(N-1) = |B^{N-1}| (and 1 when N = 1).
        let chord_radius = big * one_minus_t0sq.sqrt();
        Ok(-unit_ball_volume(n - 1) * chord_radius.powi(n as i32 - 1))
    }

    /// `Γ = -R^{1-N} φ'(R)`.
    pub fn gamma_constant(&self) -> f64 {
        let d = self
            .phi_derivative(self.radius_e)
            .expect("R > 0 for a valid pair");
        -d / self.radius_e.powi(self.dim as i32 - 1)
    }

    /// Scans `[0, max(R + R̃, 3R/2)]` on a uniform grid and returns the
    /// largest lower constant `c` and smallest Taylor constant `C` that hold
    /// at every grid point, shrunk/inflated by the configured safety factors.
    pub fn certify_phi_bounds(&self, config: &PhiScanConfig) -> Result<PhiBoundCertificate> {
        if config.scan_points < 1000 {
            return Err(Error::Parameter(format!(
                "scan needs at least 1000 points, got {}",
                config.scan_points
            )));
        }
        let big = self.radius_e;
        let n = self.dim as i32;
        let gamma = self.gamma_constant();
        let phi_r = self.phi(big);
        let upper = (big + self.radius_b).max(1.5 * big);
        let step = upper / (config.scan_points - 1) as f64;
        let mono_tol = 1e-12 * self.phi(0.0).max(1.0);

        let mut raw_c = f64::INFINITY;
        let mut raw_taylor: f64 = 0.0;
        let mut prev = f64::INFINITY;
        for i in 0..config.scan_points {
            let r = i as f64 * step;
            let value = self.phi(r);
            if value > prev + mono_tol {
                return Err(Error::Consistency(format!(
                    "φ increases between r = {} and r = {r}: {prev} -> {value}",
                    r - step
                )));
            }
            prev = value;
            let dr = r - big;
            if dr.abs() <= 1e-12 * big {
                continue;
            }
            let gap = (value - phi_r).abs();
            let scale = lower_bound_profile(big, n, dr);
            raw_c = raw_c.min(gap / scale);
            if dr.abs() <= 0.5 * big {
                let rem = (value - phi_r + gamma * big.powi(n - 1) * dr).abs();
                raw_taylor = raw_taylor.max(rem / (big.powi(n - 2) * dr * dr));
            }
        }
        if !(raw_c > 0.0 && raw_c.is_finite()) {
            return Err(Error::Certification(format!(
                "lower constant for φ is not positive: {raw_c}"
            )));
        }
        Ok(PhiBoundCertificate {
            c_lower: raw_c * config.c_safety,
            c_taylor: raw_taylor * config.taylor_safety,
            gamma,
            scan_resolution: step,
            scan_points: config.scan_points,
            c_safety: config.c_safety,
            taylor_safety: config.taylor_safety,
            raw_c_lower: raw_c,
            raw_c_taylor: raw_taylor,
        })
    }
}

/// `R^{N-1}|r-R|` near the boundary and `R^N/2` away from it.
fn lower_bound_profile(big: f64, n: i32, dr: f64) -> f64 {
    if dr.abs() <= 0.5 * big {
        big.powi(n - 1) * dr.abs()
    } else {
        0.5 * big.powi(n)
    }
}

/// Volume of `{|y| < rho, y·e > c}` in `ℝ^n`.
pub fn cap_volume(n: usize, rho: f64, c: f64) -> f64 {
    let full = unit_ball_volume(n) * rho.powi(n as i32);
    if c >= rho {
        return 0.0;
    }
    if c <= -rho {
        return full;
    }
    let h = c.abs() / rho;
    // x = 1 - h², kept in factored form for accuracy near tangency.
    let x = (1.0 - h) * (1.0 + h);
    let upper = 0.5 * full * beta_reg_complement(0.5 * (n as f64 + 1.0), 0.5, x, h * h);
    if c >= 0.0 {
        upper
    } else {
        full - upper
    }
}

/// Volume of `B_big(0) ∩ B_small(x)` with `|x| = d`.
pub fn lens_volume(n: usize, big: f64, small: f64, d: f64) -> f64 {
    if d >= big + small {
        return 0.0;
    }
    if d <= (big - small).abs() {
        return unit_ball_volume(n) * big.min(small).powi(n as i32);
    }
    // Distance from the origin to the radical hyperplane.
    let c1 = (d * d + big * big - small * small) / (2.0 * d);
    let c2 = d - c1;
    cap_volume(n, big, c1) + cap_volume(n, small, c2)
}

/// Scan resolution and safety factors for [`BallPair::certify_phi_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiScanConfig {
    pub scan_points: usize,
    pub c_safety: f64,
    pub taylor_safety: f64,
}

impl Default for PhiScanConfig {
    fn default() -> Self {
        Self {
            scan_points: 4000,
            c_safety: 0.9,
            taylor_safety: 1.1,
        }
    }
}

/// Certified constants for the bounds
/// `|φ(r) - φ(R)| ≥ c·{R^{N-1}|r-R|, R^N/2}` and
/// `|φ(r) - φ(R) + Γ R^{N-1}(r-R)| ≤ C R^{N-2}(r-R)²` for `|r-R| ≤ R/2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhiBoundCertificate {
    pub c_lower: f64,
    pub c_taylor: f64,
    pub gamma: f64,
    pub scan_resolution: f64,
    pub scan_points: usize,
    pub c_safety: f64,
    pub taylor_safety: f64,
    pub raw_c_lower: f64,
    pub raw_c_taylor: f64,
}

impl PhiBoundCertificate {
    /// Re-checks both inequalities on an independent uniform grid with
    /// `points` nodes; returns the first violating radius, if any.
    pub fn first_violation(&self, pair: &BallPair, points: usize) -> Option<f64> {
        let big = pair.radius_e();
        let n = pair.dim() as i32;
        let phi_r = pair.phi(big);
        let upper = (big + pair.radius_b()).max(1.5 * big);
        let step = upper / (points - 1) as f64;
        (0..points).map(|i| i as f64 * step).find(|&r| {
            let dr = r - big;
            let value = pair.phi(r);
            let gap = (value - phi_r).abs();
            let lower_ok = gap >= self.c_lower * lower_bound_profile(big, n, dr) - 1e-14;
            let taylor_ok = dr.abs() > 0.5 * big || {
                let rem = (value - phi_r + self.gamma * big.powi(n - 1) * dr).abs();
                rem <= self.c_taylor * big.powi(n - 2) * dr * dr + 1e-14
            };
            !(lower_ok && taylor_ok)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn admissibility_is_enforced() {
        assert!(BallPair::new(2, 1.0, 1.0, 0.25).is_ok());
        assert!(matches!(
            BallPair::new(2, 1.0, 2.0, 0.1),
            Err(Error::Admissibility(_))
        ));
        assert!(matches!(
            BallPair::with_implied_delta(2, 1.0, 2.5),
            Err(Error::Admissibility(_))
        ));
        assert!(BallPair::new(0, 1.0, 1.0, 0.1).is_err());
        assert!(BallPair::new(2, 1.0, 1.0, 0.6).is_err());
        let pair = BallPair::with_implied_delta(3, 1.0, 1.0).unwrap();
        assert_relative_eq!(pair.delta(), 0.5);
        let a = pair.spectral_a();
        let d = pair.delta();
        assert!(a >= 2.0 * d * d && a <= 2.0 * (1.0 - d) * (1.0 - d));
    }

    #[test]
    fn phi_degenerate_branches() {
        let pair = BallPair::with_implied_delta(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(pair.phi(0.0), PI, max_relative = 1e-15);
        assert_eq!(pair.phi(2.0), 0.0);
        assert_eq!(pair.phi(7.5), 0.0);
        let pair = BallPair::with_implied_delta(3, 1.0, 0.4).unwrap();
        assert_relative_eq!(pair.phi(0.3), 4.0 / 3.0 * PI * 0.064, max_relative = 1e-14);
    }

    #[test]
    fn phi_one_dimensional_overlap() {
        let pair = BallPair::with_implied_delta(1, 1.0, 0.8).unwrap();
        // [-1, 1] ∩ [r - 0.8, r + 0.8]
        for &r in &[0.0, 0.1, 0.5, 1.2, 1.79, 2.0] {
            let expected = (1.0f64.min(r + 0.8) - (-1.0f64).max(r - 0.8)).max(0.0);
            assert_relative_eq!(pair.phi(r), expected, epsilon = 1e-14);
        }
        assert_relative_eq!(pair.phi_derivative(1.0).unwrap(), -1.0);
    }

    #[test]
    fn phi_circle_lens_closed_form() {
        // Two unit discs at distance d: 2 acos(d/2) - (d/2) sqrt(4 - d²).
        let pair = BallPair::with_implied_delta(2, 1.0, 1.0).unwrap();
        for &d in &[0.01, 0.3, 1.0, 1.7, 1.999] {
            // (2-d)(2+d) avoids cancelling 4 - d² near d = 2.
            let expected = 2.0 * (d / 2.0f64).acos() - 0.5 * d * ((2.0 - d) * (2.0 + d)).sqrt();
            assert_relative_eq!(pair.phi(d), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn phi_sphere_lens_closed_form() {
        // Equal unit balls in ℝ³: π(4 + d)(2 - d)²/12.
        let pair = BallPair::with_implied_delta(3, 1.0, 1.0).unwrap();
        for &d in &[0.05, 0.7, 1.3, 1.95] {
            let expected = PI * (4.0 + d) * (2.0 - d).powi(2) / 12.0;
            assert_relative_eq!(pair.phi(d), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn derivative_domain_and_disjoint_region() {
        let pair = BallPair::with_implied_delta(2, 1.0, 1.0).unwrap();
        assert!(matches!(pair.phi_derivative(0.0), Err(Error::Domain(_))));
        assert_eq!(pair.phi_derivative(1.0 + 1.0 + 1.0).unwrap(), 0.0);
        assert!(pair.phi_derivative(1.0).unwrap() < 0.0);
    }

    #[test]
    fn gamma_examples() {
        let pair = BallPair::with_implied_delta(2, 1.0, 2f64.sqrt()).unwrap();
        assert_relative_eq!(pair.spectral_a(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(pair.gamma_constant(), 2.0, max_relative = 1e-14);
        let pair = BallPair::with_implied_delta(3, 1.0, 1.0).unwrap();
        assert_relative_eq!(pair.gamma_constant(), 0.75 * PI, max_relative = 1e-14);
    }

    #[test]
    fn derivative_matches_central_difference_at_second_order() {
        for (n, rb, r) in [(2, 1.0, 0.83), (3, 1.0, 0.7), (4, 1.3, 1.1), (5, 0.6, 0.95)] {
            let pair = BallPair::with_implied_delta(n, 1.0, rb).unwrap();
            let exact = pair.phi_derivative(r).unwrap();
            let fd = |h: f64| (pair.phi(r + h) - pair.phi(r - h)) / (2.0 * h);
            let e1 = (fd(2e-2) - exact).abs();
            let e2 = (fd(1e-2) - exact).abs();
            let ratio = e1 / e2;
            assert!((3.5..=4.5).contains(&ratio), "N={n}: ratio {ratio}");
            assert_relative_eq!(fd(1e-5), exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn certificate_is_positive_and_zero_at_boundary() {
        let pair = BallPair::with_implied_delta(2, 1.0, 1.0).unwrap();
        let cert = pair.certify_phi_bounds(&PhiScanConfig::default()).unwrap();
        assert!(cert.c_lower > 0.0 && cert.c_taylor.is_finite());
        assert_eq!(pair.phi(1.0) - pair.phi(1.0), 0.0);
        assert!(cert.first_violation(&pair, 40_000).is_none());
        let too_coarse = PhiScanConfig {
            scan_points: 10,
            ..Default::default()
        };
        assert!(pair.certify_phi_bounds(&too_coarse).is_err());
    }
}
