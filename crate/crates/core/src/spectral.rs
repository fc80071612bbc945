//! Funk–Hecke spectrum of the zonal cap kernel `1{ω·ω' > 1 - a}` on
//! `S^{N-1}`: Gegenbauer evaluation, closed-form and quadrature eigenvalues,
//! harmonic multiplicities and the spectral gap constant `A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{beta_reg_complement, gauss_legendre, sphere_area, Rule};

/// Gegenbauer polynomial `C_n^{(α)}(t)` by the three-term recurrence.
///
/// For `α = 0` the Chebyshev limit `C_n^{(0)}(t) = (2/n) T_n(t)` (`n ≥ 1`) is
/// used, so that `C_n^{(0)}(1) = 2/n`.
pub fn gegenbauer(alpha: f64, n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if alpha == 0.0 {
        return 2.0 / n as f64 * chebyshev_t(n, t);
    }
    let mut c0 = 1.0;
    let mut c1 = 2.0 * alpha * t;
    for k in 2..=n {
        let kf = k as f64;
        let c2 = (2.0 * t * (kf + alpha - 1.0) * c1 - (kf + 2.0 * alpha - 2.0) * c0) / kf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

fn chebyshev_t(n: usize, t: f64) -> f64 {
    let mut t0 = 1.0;
    let mut t1 = t;
    for _ in 1..n {
        let t2 = 2.0 * t * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    if n == 0 {
        t0
    } else {
        t1
    }
}

/// `C_n^{(α)}(1) = (n + 2α - 1)! / (n! (2α - 1)!)` for `α > 0`, `2/n` for `α = 0`.
pub fn gegenbauer_at_one(alpha: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if alpha == 0.0 {
        return 2.0 / n as f64;
    }
    (1..=n).fold(1.0, |acc, k| {
        let kf = k as f64;
        acc * (kf + 2.0 * alpha - 1.0) / kf
    })
}

/// `C_n^{(α)}(t) / C_n^{(α)}(1)` via the recurrence on the normalized
/// sequence, which stays bounded by one on `[-1, 1]`.
pub fn gegenbauer_ratio(alpha: f64, n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if alpha == 0.0 {
        return chebyshev_t(n, t);
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=n {
        let kf = k as f64;
        let denom = kf + 2.0 * alpha - 1.0;
        let p2 = 2.0 * (kf + alpha - 1.0) / denom * t * p1 - (kf - 1.0) / denom * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Normalized zonal harmonic of degree `ell` on `S^{N-1}` as a function of
/// `t = ω·η`: equals 1 at `t = 1`.
pub fn zonal_harmonic(dim: usize, ell: usize, t: f64) -> f64 {
    match dim {
        1 => {
            // S^0 = {±1}: degree 0 is even, every other degree collapses to odd.
            if ell % 2 == 0 {
                1.0
            } else {
                t
            }
        }
        2 => chebyshev_t(ell, t),
        _ => gegenbauer_ratio(0.5 * (dim as f64 - 2.0), ell, t),
    }
}

/// Dimension of the space of degree-`ell` spherical harmonics on `S^{N-1}`.
pub fn harmonic_dimension(dim: usize, ell: usize) -> Result<u64> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "harmonic dimension requires N >= 2, got {dim}"
        )));
    }
    if ell == 0 {
        return Ok(1);
    }
    // binom(ℓ+N-1, N-1) - binom(ℓ+N-3, N-1)
    let hi = binomial((ell + dim - 1) as u64, (dim - 1) as u64)?;
    let lo = if ell >= 2 {
        binomial((ell + dim - 3) as u64, (dim - 1) as u64)?
    } else {
        0
    };
    Ok(hi - lo)
}

fn binomial(n: u64, k: u64) -> Result<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Parameter(format!("binomial({n}, {k}) overflows")));
        }
    }
    Ok(acc as u64)
}

/// `N` and the cap parameter `a = R̃²/(2R²) ∈ (0, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub dim: usize,
    pub a: f64,
    pub ell_max: usize,
}

impl SpectralParams {
    pub fn new(dim: usize, a: f64, ell_max: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!(
                "the spectral analysis assumes N >= 2, got N = {dim}"
            )));
        }
        if !(a > 0.0 && a < 2.0) {
            return Err(Error::Parameter(format!("a must lie in (0, 2), got {a}")));
        }
        Ok(Self { dim, a, ell_max })
    }

    fn cap_height_sq(&self) -> f64 {
        // 1 - (1-a)² = a(2-a), without cancellation.
        self.a * (2.0 - self.a)
    }
}

/// `λ_{N,ℓ}` in closed form.
///
/// `ℓ = 0` is half the measure of the cap `{t > 1 - a}`, written with the
/// regularized incomplete beta function (arccos for `N = 2`); `ℓ ≥ 1` uses
/// the normalized Gegenbauer ratio of index `N/2` and degree `ℓ - 1`.
pub fn eigenvalue_closed_form(params: &SpectralParams, ell: usize) -> f64 {
    let n = params.dim;
    let s_nm2 = sphere_area(n - 1);
    if ell == 0 {
        return lambda_zero(n, params.a);
    }
    let h2 = params.cap_height_sq();
    let ratio = gegenbauer_ratio(0.5 * n as f64, ell - 1, 1.0 - params.a);
    s_nm2 / (2.0 * (n as f64 - 1.0)) * ratio * h2.powf(0.5 * (n as f64 - 1.0))
}

/// `½ |S^{N-2}| ∫_{1-a}^1 (1-t²)^{(N-3)/2} dt`.
fn lambda_zero(n: usize, a: f64) -> f64 {
    let x = 1.0 - a;
    if n == 2 {
        return x.acos();
    }
    let s_nm2 = sphere_area(n - 1);
    let p = 0.5 * (n as f64 - 1.0);
    let half_beta = 0.5 * crate::special::beta(0.5, p);
    // ∫_{|x|}^1 (1-t²)^{p-1} dt = ½ B(½, p) (1 - I_{x²}(½, p))
    let xx = x * x;
    let tail = half_beta * (1.0 - beta_reg_complement(0.5, p, xx, a * (2.0 - a)));
    let integral = if x >= 0.0 {
        tail
    } else {
        2.0 * half_beta - tail
    };
    0.5 * s_nm2 * integral
}

/// Funk–Hecke integral evaluated by composite Gauss–Legendre quadrature in
/// the angle `θ` (`t = cos θ`), which removes the `t = 1` endpoint
/// singularity of the weight for even `N`. Two successive refinements must
/// agree to `rel_tol`, otherwise an error reports the achieved agreement.
pub fn eigenvalue_quadrature(params: &SpectralParams, ell: usize, rel_tol: f64) -> Result<f64> {
    let n = params.dim;
    let alpha = 0.5 * (n as f64 - 2.0);
    let theta_max = (1.0 - params.a).acos();
    let norm = if alpha == 0.0 && ell > 0 {
        1.0
    } else {
        gegenbauer_at_one(alpha, ell)
    };
    let integrand = |theta: f64| {
        let t = theta.cos();
        let c = if alpha == 0.0 && ell > 0 {
            // (2/ℓ)T_ℓ / (2/ℓ)
            (ell as f64 * theta).cos()
        } else {
            gegenbauer(alpha, ell, t)
        };
        c * theta.sin().powi(n as i32 - 2)
    };
    let base = ell + n + 8;
    let rule = gauss_legendre(base.min(64));
    let mut panels = (base / 32).max(1);
    let mut prev = f64::NAN;
    let mut achieved = f64::INFINITY;
    for _ in 0..12 {
        let value = crate::special::composite_gauss(&rule, 0.0, theta_max, panels, integrand);
        if prev.is_finite() {
            let scale = integrand_l1(&rule, theta_max, panels, &integrand).max(f64::MIN_POSITIVE);
            achieved = (value - prev).abs() / value.abs().max(1e-300);
            // Converged either relatively or at the round-off floor of the
            // oscillating integrand.
            if achieved <= rel_tol || (value - prev).abs() <= 4.0 * f64::EPSILON * scale {
                return Ok(0.5 * sphere_area(n - 1) * value / norm);
            }
        }
        prev = value;
        panels *= 2;
    }
    Err(Error::Quadrature {
        achieved,
        target: rel_tol,
    })
}

fn integrand_l1(rule: &Rule, theta_max: f64, panels: usize, f: &impl Fn(f64) -> f64) -> f64 {
    crate::special::composite_gauss(rule, 0.0, theta_max, panels, |x| f(x).abs())
}

/// Hilbert–Schmidt budget `Σ_n μ_n² = ½ |S^{N-1}| λ_{N,0}`.
pub fn hilbert_schmidt_total(params: &SpectralParams) -> f64 {
    0.5 * sphere_area(params.dim) * eigenvalue_closed_form(params, 0)
}

/// Eigenvalues up to `ell_max`, the gap constant, the cutoff rank and the
/// Hilbert–Schmidt bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: SpectralParams,
    pub lambdas: Vec<f64>,
    pub multiplicities: Vec<u64>,
    /// The constant `A < 1/2` with `λ_{N,ℓ} ≤ 2A λ_{N,1}` for all `ℓ ≥ 2`.
    pub gap_a: f64,
    /// Degree attaining `max_{ℓ≥2} λ_{N,ℓ}/λ_{N,1}`.
    pub argmax_ell: usize,
    pub max_ratio: f64,
    /// `n₀ = 2 |S^{N-1}| λ_{N,0} / λ_{N,1}²`.
    pub cutoff_n0: f64,
    pub hs_total: f64,
    /// `Σ_{ℓ ≤ ℓ_max} mult(ℓ) λ_{N,ℓ}²`.
    pub hs_partial: f64,
    /// Degree at which the Hilbert–Schmidt tail certificate closed, i.e. the
    /// remaining budget can no longer hold an eigenvalue above `λ_{N,1}/2`.
    pub certified_through: usize,
    /// Largest rank checked against `μ_n ≤ n^{-1/2} (HS)^{1/2}`.
    pub ranks_checked: usize,
}

impl Spectrum {
    /// `(HS - partial) / HS`.
    pub fn hs_relative_residual(&self) -> f64 {
        (self.hs_total - self.hs_partial) / self.hs_total
    }

    pub fn lambda(&self, ell: usize) -> f64 {
        self.lambdas[ell]
    }
}

/// Computes `A` from `2A = max{½, max_{ℓ ≥ 2} λ_ℓ/λ_1}`.
///
/// Degrees are enumerated in blocks until the unspent Hilbert–Schmidt
/// budget is smaller than `mult(ℓ+1) λ_1²/4`: beyond that point no degree
/// can carry an eigenvalue above `λ_1/2`, so the maximum is final. The
/// enumeration always reaches `params.ell_max`. Fails if some `ℓ ≥ 2` has
/// `λ_ℓ ≥ λ_1`.
pub fn gap_constant(params: &SpectralParams) -> Result<Spectrum> {
    let n = params.dim;
    let lambda0 = eigenvalue_closed_form(params, 0);
    let lambda1 = eigenvalue_closed_form(params, 1);
    if !(lambda0 > 0.0 && lambda1 > 0.0) {
        return Err(Error::Certification(format!(
            "λ_0 = {lambda0}, λ_1 = {lambda1} must be positive"
        )));
    }
    let hs_total = hilbert_schmidt_total(params);
    let cutoff_n0 = 2.0 * sphere_area(n) * lambda0 / (lambda1 * lambda1);

    let mut lambdas = Vec::new();
    let mut multiplicities = Vec::new();
    let mut hs_partial = 0.0;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax_ell = 2;
    let mut certified_through = None;
    // Absolute slack for the subtraction HS - partial.
    let hs_slack = 64.0 * f64::EPSILON * hs_total;
    let hard_limit = 1_000_000usize;
    let mut ell = 0;
    loop {
        let lam = eigenvalue_closed_form(params, ell);
        let mult = harmonic_dimension(n, ell)?;
        if ell >= 2 {
            if lam >= lambda1 {
                return Err(Error::Certification(format!(
                    "λ_{ell} = {lam} is not below λ_1 = {lambda1}"
                )));
            }
            let ratio = lam / lambda1;
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax_ell = ell;
            }
        }
        hs_partial += mult as f64 * lam * lam;
        lambdas.push(lam);
        multiplicities.push(mult);
        if ell >= 2 && certified_through.is_none() {
            let next_mult = harmonic_dimension(n, ell + 1)? as f64;
            let residual = hs_total - hs_partial + hs_slack;
            if residual < next_mult * lambda1 * lambda1 / 4.0 {
                certified_through = Some(ell);
            }
        }
        if certified_through.is_some() && ell >= params.ell_max {
            break;
        }
        ell += 1;
        if ell > hard_limit {
            return Err(Error::Certification(format!(
                "Hilbert–Schmidt tail did not close by degree {hard_limit}"
            )));
        }
    }
    if hs_partial > hs_total * (1.0 + 1e-12) {
        return Err(Error::Consistency(format!(
            "Hilbert–Schmidt partial sum {hs_partial} exceeds the budget {hs_total}"
        )));
    }

    // Ranked eigenvalues with multiplicity: verify μ_n ≤ n^{-1/2} HS^{1/2}.
    let mut ranked: Vec<(f64, u64)> = lambdas
        .iter()
        .copied()
        .zip(multiplicities.iter().copied())
        .collect();
    ranked.sort_by(|x, y| y.0.total_cmp(&x.0));
    let rank_limit = (cutoff_n0.ceil() as u64).max(1);
    let mut rank: u64 = 0;
    let bound_scale = hs_total.sqrt();
    'outer: for (value, mult) in ranked {
        for _ in 0..mult {
            rank += 1;
            if rank > rank_limit {
                break 'outer;
            }
            if value > bound_scale / (rank as f64).sqrt() * (1.0 + 1e-12) {
                return Err(Error::Certification(format!(
                    "rank bound violated at n = {rank}: μ_n = {value}"
                )));
            }
        }
    }

    let gap_a = 0.5 * max_ratio.max(0.5);
    Ok(Spectrum {
        params: *params,
        lambdas,
        multiplicities,
        gap_a,
        argmax_ell,
        max_ratio,
        cutoff_n0,
        hs_total,
        hs_partial,
        certified_through: certified_through.unwrap_or(ell),
        ranks_checked: rank.min(rank_limit) as usize,
    })
}

/// Partial Hilbert–Schmidt sum through degree `ell_last`.
pub fn hilbert_schmidt_partial(params: &SpectralParams, ell_last: usize) -> Result<f64> {
    let mut acc = 0.0;
    for ell in 0..=ell_last {
        let lam = eigenvalue_closed_form(params, ell);
        acc += harmonic_dimension(params.dim, ell)? as f64 * lam * lam;
    }
    Ok(acc)
}

/// `θ_a = arccos(1 - a)`, the angular radius of the kernel cap.
pub fn cap_angle(a: f64) -> f64 {
    (1.0 - a).acos()
}
