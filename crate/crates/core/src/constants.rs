//! The chain of constants leading to a numeric stability constant `c_{N,δ}`.
//!
//! Every quantity is computed for the unit ball `R = 1` (all constants are
//! scale free) and made uniform in the kernel radius by scanning
//! `κ = R̃/(2R)` over the admissible interval `[δ, 1-δ]`. Arithmetic is
//! `f64` with each step rounded one ulp toward the conservative side, so
//! lower bounds only move down and upper bounds only move up.
//!
//! The ledger is filled in stages. Each stage reads its inputs through
//! [`LedgerBuilder::get`], so a missing upstream entry is reported by name
//! instead of silently producing a number.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::centering_constants;
use crate::error::{Error, Result};
use crate::geometry::{BallPair, PhiScanConfig};
use crate::special::{gauss_legendre, sphere_area, unit_ball_volume};
use crate::spectral::{gap_constant, SpectralParams};

/// Relative error budget for transcendental inputs such as `|S^{N-1}|`.
const INPUT_REL: f64 = 1e-12;

fn lo(x: f64) -> f64 {
    x.next_down()
}

fn hi(x: f64) -> f64 {
    x.next_up()
}

fn lo_input(x: f64) -> f64 {
    lo(x * (1.0 - INPUT_REL))
}

fn hi_input(x: f64) -> f64 {
    hi(x * (1.0 + INPUT_REL))
}

fn pow_lo(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, _| lo(acc * x))
}

fn pow_hi(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, _| hi(acc * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// A lower bound, rounded toward `-∞`.
    Down,
    /// An upper bound, rounded toward `+∞`.
    Up,
    /// A grid count or an exact input.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub key: String,
    pub symbol: String,
    pub value: f64,
    pub formula: String,
    /// Which step of the argument produces the constant and how it was obtained.
    pub source: String,
    pub rounding: Rounding,
}

/// Tunable resolutions of the scans behind the ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerConfig {
    /// `κ` grid for `τ = min (½ - A)Γ`.
    pub tau_points: usize,
    /// `κ` grid for the constants of `φ` and the shell measure.
    pub kappa_points: usize,
    pub phi: PhiScanConfig,
    /// Grid on the auxiliary variable of the remainder scans.
    pub remainder_points: usize,
    /// Inflation applied to scanned suprema.
    pub scan_safety: f64,
    /// Deflation applied to the scanned minimum `τ`.
    pub tau_safety: f64,
    pub centering_points: usize,
    pub centering_safety: f64,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        Self {
            tau_points: 1000,
            kappa_points: 201,
            phi: PhiScanConfig::default(),
            remainder_points: 1000,
            scan_safety: 1.1,
            tau_safety: 0.99,
            centering_points: 400,
            centering_safety: 1.1,
        }
    }
}

/// Keys the finished ledger must contain, in emission order.
pub const REQUIRED_KEYS: [&str; 28] = [
    "c_phi",
    "C_phi",
    "gamma_min",
    "A_max",
    "n0_max",
    "tau",
    "C_int",
    "C_meas",
    "theta0",
    "C_shift",
    "C_sandwich",
    "C1",
    "C2",
    "C2_prime",
    "C_self",
    "theta_shell",
    "c_pert",
    "C_pert",
    "K",
    "K_eff",
    "alpha",
    "c_red",
    "c_sets",
    "b_min",
    "c_prime",
    "K1",
    "c_dprime",
    "c_final",
];

#[derive(Debug, Clone, Default)]
pub struct LedgerBuilder {
    dim: usize,
    delta: f64,
    entries: Vec<LedgerEntry>,
}

impl LedgerBuilder {
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!(
                "the constant chain needs N >= 2, got N = {dim}"
            )));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Parameter(format!(
                "δ must lie in (0, 1/2], got {delta}"
            )));
        }
        Ok(Self {
            dim,
            delta,
            entries: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value)
            .ok_or_else(|| Error::MissingEntry(key.to_string()))
    }

    pub fn insert(
        &mut self,
        key: &str,
        symbol: &str,
        value: f64,
        rounding: Rounding,
        formula: &str,
        source: &str,
    ) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Certification(format!(
                "ledger entry `{key}` = {value} is not positive and finite"
            )));
        }
        let entry = LedgerEntry {
            key: key.into(),
            symbol: symbol.into(),
            value,
            formula: formula.into(),
            source: source.into(),
            rounding,
        };
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(old) => *old = entry,
            None => self.entries.push(entry),
        }
        Ok(())
    }

    /// Drops an entry; used to exercise the completeness gate.
    pub fn remove(&mut self, key: &str) -> Option<LedgerEntry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }

    /// Completeness gate: every required key must be present.
    pub fn finish(self) -> Result<ConstantLedger> {
        let mut ordered = Vec::with_capacity(REQUIRED_KEYS.len());
        for key in REQUIRED_KEYS {
            let e = self
                .entries
                .iter()
                .find(|e| e.key == key)
                .ok_or_else(|| Error::MissingEntry(key.to_string()))?;
            ordered.push(e.clone());
        }
        let c_final = ordered.last().map(|e| e.value).unwrap_or(0.0);
        Ok(ConstantLedger {
            dim: self.dim,
            delta: self.delta,
            c_final,
            entries: ordered,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub dim: usize,
    pub delta: f64,
    pub c_final: f64,
    pub entries: Vec<LedgerEntry>,
}

impl ConstantLedger {
    pub fn get(&self, key: &str) -> Result<f64> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value)
            .ok_or_else(|| Error::MissingEntry(key.to_string()))
    }

    /// Fixed-width text table, one constant per row.
    pub fn to_table(&self) -> String {
        let mut out = format!("N = {}, δ = {}\n", self.dim, self.delta);
        out.push_str(&format!(
            "{:<12} {:<24} {:<5} {}\n",
            "key", "value", "round", "formula"
        ));
        for e in &self.entries {
            let r = match e.rounding {
                Rounding::Down => "down",
                Rounding::Up => "up",
                Rounding::Exact => "exact",
            };
            out.push_str(&format!(
                "{:<12} {:<24.16e} {:<5} {}\n",
                e.key, e.value, r, e.formula
            ));
        }
        out
    }
}

/// The admissible `κ = R̃/(2R) ∈ [δ, 1-δ]` on a uniform grid.
fn kappa_grid(delta: f64, points: usize) -> Vec<f64> {
    let (a, b) = (delta, 1.0 - delta);
    if points < 2 || a == b {
        return vec![a];
    }
    (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect()
}

/// `∫ |r-1| r^{N-1} dr` and `∫ (r-1)² r^{N-1} dr` between 1 and `to`,
/// exact by Gauss–Legendre on the polynomial.
fn shell_moments(dim: usize, to: f64) -> (f64, f64) {
    let from = 1.0;
    let rule = gauss_legendre(dim.div_ceil(2) + 2);
    let n = dim as i32;
    let (a, b) = if from <= to { (from, to) } else { (to, from) };
    let m1 = rule.integrate(a, b, |r| (r - 1.0).abs() * r.powi(n - 1));
    let m2 = rule.integrate(a, b, |r| (r - 1.0).powi(2) * r.powi(n - 1));
    (m1, m2)
}

/// `sup_F (½ΓF² - L(F))/F³` over the profile masses `F` reachable with a
/// shell of width ½, where `L(F) = Γ m₁ - C m₂` is the Taylor lower bound
/// for `∫ |φ - φ(1)| r^{N-1} dr` across the filled interval. Both the outer
/// (`R⁺ = (1 + NF)^{1/N}`) and inner (`R⁻ = (1 - NF)^{1/N}`) sides count.
fn interaction_remainder(dim: usize, gamma: f64, c_taylor: f64, points: usize) -> f64 {
    let nf = dim as f64;
    let f_plus = (1.5f64.powi(dim as i32) - 1.0) / nf;
    let f_minus = (1.0 - 0.5f64.powi(dim as i32)) / nf;
    let mut sup: f64 = 0.0;
    for (f_max, sign) in [(f_plus, 1.0), (f_minus, -1.0)] {
        for k in 1..=points {
            let f = f_max * k as f64 / points as f64;
            let edge = (1.0 + sign * nf * f).max(0.0).powf(1.0 / nf);
            let (m1, m2) = shell_moments(dim, edge);
            let lower = gamma * m1 - c_taylor * m2;
            sup = sup.max((0.5 * gamma * f * f - lower) / (f * f * f));
        }
    }
    sup
}

/// `|{(ω, ω') : ||ω - ω'| - q| < 2θ}| / θ` on `S^{N-1} × S^{N-1}`, with
/// `q = R̃/R`.
fn shell_pair_measure_ratio(dim: usize, q: f64, theta: f64) -> f64 {
    let psi = |d: f64| 2.0 * (0.5 * d.clamp(0.0, 2.0)).asin();
    let (p1, p2) = (psi(q - 2.0 * theta), psi(q + 2.0 * theta));
    if p2 <= p1 {
        return 0.0;
    }
    let rule = gauss_legendre(24);
    let inner = crate::special::composite_gauss(&rule, p1, p2, 8, |p| p.sin().powi(dim as i32 - 2));
    sphere_area(dim) * sphere_area(dim - 1) * inner / theta
}

/// Upstream certificates: the bounds on `φ`, the spectral gap `τ`, the two
/// remainder constants of the perturbative expansion and the centering
/// constants.
pub fn certify_inputs(dim: usize, delta: f64, cfg: &LedgerConfig) -> Result<LedgerBuilder> {
    let mut b = LedgerBuilder::new(dim, delta)?;

    let kappas = kappa_grid(delta, cfg.kappa_points);
    let per_kappa: Vec<(f64, f64, f64, f64)> = kappas
        .par_iter()
        .map(|&kappa| -> Result<(f64, f64, f64, f64)> {
            let pair = BallPair::unit(dim, kappa, delta)?;
            let cert = pair.certify_phi_bounds(&cfg.phi)?;
            let c_int = interaction_remainder(dim, cert.gamma, cert.c_taylor, cfg.remainder_points);
            let mut meas: f64 = 0.0;
            for k in 1..=cfg.remainder_points {
                let theta = 0.5 * k as f64 / cfg.remainder_points as f64;
                meas = meas.max(shell_pair_measure_ratio(dim, 2.0 * kappa, theta));
            }
            Ok((cert.c_lower, cert.c_taylor, c_int, meas))
        })
        .collect::<Result<_>>()?;
    let c_phi = per_kappa.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let c_taylor = per_kappa.iter().map(|t| t.1).fold(0.0, f64::max);
    let c_int = per_kappa.iter().map(|t| t.2).fold(0.0, f64::max);
    let c_meas = per_kappa.iter().map(|t| t.3).fold(0.0, f64::max);

    b.insert(
        "c_phi",
        "c",
        lo(c_phi),
        Rounding::Down,
        "min_κ (0.9 · min_r |φ(r) - φ(R)| / {R^{N-1}|r-R|, R^N/2})",
        "lower bound on φ away from the boundary sphere; grid scan per κ",
    )?;
    b.insert(
        "C_phi",
        "C",
        hi(c_taylor),
        Rounding::Up,
        "max_κ (1.1 · max_{|r-R|≤R/2} |φ(r) - φ(R) + Γ R^{N-1}(r-R)| / (R^{N-2}(r-R)²))",
        "second-order Taylor bound on φ at the boundary; grid scan per κ",
    )?;

    let tau_grid = kappa_grid(delta, cfg.tau_points);
    let spectra: Vec<(f64, f64, f64)> = tau_grid
        .par_iter()
        .map(|&kappa| -> Result<(f64, f64, f64)> {
            let pair = BallPair::unit(dim, kappa, delta)?;
            let spec = gap_constant(&SpectralParams::new(dim, pair.spectral_a(), 2)?)?;
            let gamma = pair.gamma_constant();
            Ok(((0.5 - spec.gap_a) * gamma, spec.gap_a, gamma))
        })
        .collect::<Result<_>>()?;
    let tau = spectra.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let a_max = spectra.iter().map(|t| t.1).fold(0.0, f64::max);
    let gamma_min = spectra.iter().map(|t| t.2).fold(f64::INFINITY, f64::min);
    let n0_max = tau_grid
        .iter()
        .map(|&k| {
            let a = 2.0 * k * k;
            let p = SpectralParams::new(dim, a, 2).expect("a in (0, 2)");
            let l0 = crate::spectral::eigenvalue_closed_form(&p, 0);
            let l1 = crate::spectral::eigenvalue_closed_form(&p, 1);
            2.0 * sphere_area(dim) * l0 / (l1 * l1)
        })
        .fold(0.0, f64::max);
    if !(tau > 0.0) {
        return Err(Error::Certification(format!(
            "(½ - A)Γ is not positive: τ = {tau}"
        )));
    }
    b.insert(
        "gamma_min",
        "Γ_min",
        lo(gamma_min),
        Rounding::Down,
        "min_κ (-R^{1-N} φ'(R))",
        "boundary slope of φ; κ scan",
    )?;
    b.insert(
        "A_max",
        "A",
        hi(a_max),
        Rounding::Up,
        "max_κ ½ max{½, max_{ℓ≥2} λ_ℓ/λ_1}",
        "spectral gap of the boundary Hessian; κ scan",
    )?;
    b.insert(
        "n0_max",
        "n₀",
        hi(n0_max),
        Rounding::Up,
        "max_κ 2|S^{N-1}| λ_0 / λ_1²",
        "Hilbert–Schmidt rank cutoff; κ scan",
    )?;
    b.insert(
        "tau",
        "τ",
        lo(cfg.tau_safety * tau),
        Rounding::Down,
        "0.99 · min_κ (½ - A(κ)) Γ(κ)",
        "coercivity of the quadratic term; dense κ scan",
    )?;
    b.insert(
        "C_int",
        "C_int",
        hi(cfg.scan_safety * c_int),
        Rounding::Up,
        "1.1 · max_κ sup_F (½ΓF² - Γm₁(F) + C m₂(F)) / F³",
        "cubic remainder of the boundary interaction term; scan over κ and profile mass",
    )?;
    b.insert(
        "C_meas",
        "C_meas",
        hi(cfg.scan_safety * c_meas),
        Rounding::Up,
        "1.1 · max_κ sup_{θ≤½} |{||ω-ω'| - 2κ| < 2θ}| / θ",
        "measure of direction pairs where the shell kernel differs from the sphere kernel",
    )?;

    let cc = centering_constants(dim, cfg.centering_points, cfg.centering_safety)?;
    b.insert(
        "theta0",
        "θ₀",
        lo(cc.theta0),
        Rounding::Down,
        "min(c₀, 1/(2C₀)) / (2^N V_N), c₀ = 1/(C'C₀²), C₀ = 2N/|S^{N-1}|",
        "largest shell width for which the centering shift exists",
    )?;
    b.insert(
        "C_shift",
        "C_com",
        hi(cc.c_shift),
        Rounding::Up,
        "2^{N+1} / V_N^{1/N}",
        "size of the centering shift relative to ‖ρ‖₁^{1/N} θ",
    )?;
    b.insert(
        "C_sandwich",
        "C_sand",
        hi(cc.c_sandwich),
        Rounding::Up,
        "1 + 2^{N+1}",
        "shell width after centering relative to the width before",
    )?;
    Ok(b)
}

/// Constants of the expansion around the ball for centered densities in a
/// thin shell.
pub fn perturbative_constants(b: &mut LedgerBuilder) -> Result<()> {
    let n = b.dim();
    let area_lo = lo_input(sphere_area(n));
    let area_hi = hi_input(sphere_area(n));
    let two_n_minus_1 = (2u64.pow(n as u32) - 1) as f64;

    let c1 = hi((area_hi / 2.0).sqrt());
    b.insert(
        "C1",
        "C₁",
        c1,
        Rounding::Up,
        "(|S^{N-1}|/2)^{1/2}",
        "‖ρ‖₁A[ρ] ≤ C₁ (‖F⁺‖₂² + ‖F⁻‖₂²)^{1/2}, via Cauchy–Schwarz on the sphere",
    )?;
    b.insert(
        "C2",
        "C₂",
        hi(two_n_minus_1 / area_lo),
        Rounding::Up,
        "(2^N - 1)/|S^{N-1}|",
        "‖F^±‖_∞ ≤ C₂ ‖ρ‖₁ θ",
    )?;
    let c2p = hi(two_n_minus_1 / n as f64);
    b.insert(
        "C2_prime",
        "C₂'",
        c2p,
        Rounding::Up,
        "(2^N - 1)/N",
        "C₂‖ρ‖₁ = C₂' R^N",
    )?;
    let c_meas = b.get("C_meas")?;
    let c_self = hi(2.0 * c_meas);
    b.insert(
        "C_self",
        "C_self",
        c_self,
        Rounding::Up,
        "2 C_meas",
        "self-interaction remainder: ½ · measure · (F⁺+F⁻)(ω)(F⁺+F⁻)(ω') ≤ 2 C_meas θ M²",
    )?;

    let tau = b.get("tau")?;
    let c_int = b.get("C_int")?;
    let theta = lo(0.5f64.min(lo(tau / hi(2.0 * hi(c_int * c2p)))));
    b.insert(
        "theta_shell",
        "θ_{N,δ}",
        theta,
        Rounding::Down,
        "min(½, τ / (2 C_int C₂'))",
        "largest shell width for the expansion around the ball",
    )?;
    let c_pert = lo(lo(tau / 2.0) / hi(c1 * c1));
    b.insert(
        "c_pert",
        "c_{N,δ}",
        c_pert,
        Rounding::Down,
        "τ / (2 C₁²)",
        "coefficient of ‖ρ‖₁²A² for centered shell densities",
    )?;
    let c2 = b.get("C2")?;
    b.insert(
        "C_pert",
        "C_{N,δ}",
        hi(hi(c_self * hi(c2 * c2)) / c_pert),
        Rounding::Up,
        "C_self C₂² / c_{N,δ}",
        "coefficient of θ³ for centered shell densities",
    )?;
    Ok(())
}

/// Constants of the reduction from small asymmetry to the shell case.
pub fn reduction_constants(b: &mut LedgerBuilder) -> Result<()> {
    let n = b.dim() as f64;
    let area_hi = hi_input(sphere_area(b.dim()));
    let c = b.get("c_phi")?;
    let k = hi(hi(12.0 * area_hi) / lo(n * c));
    b.insert(
        "K",
        "K",
        k,
        Rounding::Up,
        "12|S^{N-1}| / (N c)",
        "shell width of the competitor per unit asymmetry",
    )?;
    let k_eff = hi(b.get("C_sandwich")? * k);
    b.insert(
        "K_eff",
        "C_sand K",
        k_eff,
        Rounding::Up,
        "C_sand · K",
        "shell width after centering per unit asymmetry",
    )?;
    let theta0 = b.get("theta0")?;
    let theta = b.get("theta_shell")?;
    let c_big = b.get("C_pert")?;
    let caps = [
        lo(lo(n * c) / hi(12.0 * area_hi)),
        lo(lo(2.0 * theta0) / hi(3.0 * k)),
        lo(lo(2.0 * theta) / hi(3.0 * k_eff)),
        lo(2.0 / hi(3.0 * hi(2.0 * hi(c_big * pow_hi(k_eff, 3))))),
    ];
    let alpha = caps.iter().copied().fold(f64::INFINITY, f64::min);
    b.insert(
        "alpha",
        "α_{N,δ}",
        alpha,
        Rounding::Down,
        "min{Nc/(12|S^{N-1}|), 2θ₀/(3K), 2θ_{N,δ}/(3C_sand K), 2/(3·2C_{N,δ}(C_sand K)³)}",
        "asymmetry below which the reduction applies",
    )?;
    let c_pert = b.get("c_pert")?;
    b.insert(
        "c_red",
        "c_red",
        lo(1.0f64.min(lo(c_pert / 8.0))),
        Rounding::Down,
        "min(1, c_{N,δ}/8)",
        "small-asymmetry constant; 1 covers the branch where the competitor moves much mass",
    )?;
    Ok(())
}

/// `inf_{0≤t≤1} (t² + b(1-t))`.
pub fn step_minimum(b: f64) -> f64 {
    if b >= 2.0 {
        1.0
    } else {
        b * (1.0 - b / 4.0)
    }
}

/// Constants of the global argument and the final `c_{N,δ}`.
pub fn theorem_constants(b: &mut LedgerBuilder) -> Result<()> {
    let dim = b.dim();
    let area_hi = hi_input(sphere_area(dim));
    let c_red = b.get("c_red")?;
    let alpha = b.get("alpha")?;
    let c = b.get("c_phi")?;

    let c_sets = lo(c_red * lo(alpha * alpha));
    b.insert(
        "c_sets",
        "c_sets",
        c_sets,
        Rounding::Down,
        "c_red α²",
        "characteristic functions, by continuation to asymmetry α",
    )?;

    let p2 = pow_lo(2.0, dim as u32 - 1);
    let p3_lo = pow_lo(3.0, dim as u32 - 1);
    let p3_hi = pow_hi(3.0, dim as u32 - 1);
    let b_min = lo(lo(p3_lo * dim as f64) / p2);
    b.insert(
        "b_min",
        "b_min",
        b_min,
        Rounding::Down,
        "3^{N-1} N / 2^{N-1}",
        "lower bound on the ratio of the far-field to the near-field term",
    )?;
    let prefactor = lo(lo(p2 * c) / hi(4.0 * hi(p3_hi * area_hi)));
    let c_prime = lo(prefactor * lo(step_minimum(b_min)));
    b.insert(
        "c_prime",
        "c'_{N,δ}",
        c_prime,
        Rounding::Down,
        "2^{N-1}c / (4·3^{N-1}|S^{N-1}|) · inf_t(t² + b_min(1-t))",
        "deficit against the distance to the nearest set, via the bathtub principle",
    )?;

    let inv_sqrt_cp = hi(1.0 / lo(c_prime.sqrt()));
    let inv_sqrt_c1 = hi(1.0 / lo(c_sets.sqrt()));
    let k1 = hi(hi(0.5 * inv_sqrt_cp) + hi(inv_sqrt_c1 * hi(hi(1.0 + inv_sqrt_cp).sqrt())));
    b.insert(
        "K1",
        "K₁",
        k1,
        Rounding::Up,
        "½ c'^{-1/2} + c_sets^{-1/2} (1 + c'^{-1/2})^{1/2}",
        "A[ρ]‖ρ‖₁ ≤ K₁ 𝓓^{1/2} or K₁ ‖ρ‖₁^{1/2} 𝓓^{1/4}",
    )?;
    let c_dprime = lo(1.0 / hi(k1 * k1));
    b.insert(
        "c_dprime",
        "c''_{N,δ}",
        c_dprime,
        Rounding::Down,
        "1/K₁²",
        "large-asymmetry constant",
    )?;
    let c_final = [
        c_red,
        c_dprime,
        lo(lo(c_dprime * c_dprime) * lo(alpha * alpha)),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    b.insert(
        "c_final",
        "c_{N,δ}",
        c_final,
        Rounding::Down,
        "min(c_red, c'', c''² α²)",
        "stability constant: 𝓓[ρ] ≥ c_{N,δ} ‖ρ‖₁² A[ρ]²",
    )?;
    Ok(())
}

/// Runs every stage and the completeness gate.
pub fn build_ledger(dim: usize, delta: f64, cfg: &LedgerConfig) -> Result<ConstantLedger> {
    let mut b = certify_inputs(dim, delta, cfg)?;
    assemble(&mut b)?;
    b.finish()
}

/// The derived stages on top of certified inputs.
pub fn assemble(b: &mut LedgerBuilder) -> Result<()> {
    perturbative_constants(b)?;
    reduction_constants(b)?;
    theorem_constants(b)
}

/// One ledger per `(N, δ)`, in the order given.
pub fn ledger_sweep(
    dims: &[usize],
    deltas: &[f64],
    cfg: &LedgerConfig,
) -> Vec<Result<ConstantLedger>> {
    let points: Vec<(usize, f64)> = dims
        .iter()
        .flat_map(|&n| deltas.iter().map(move |&d| (n, d)))
        .collect();
    points
        .into_iter()
        .map(|(n, d)| build_ledger(n, d, cfg))
        .collect()
}

/// `V_N (1 + θ)^N - V_N (1 - θ)^N`, the largest `‖ρ - 1_{E*}‖₁` under a
/// shell sandwich of width `θ` around the unit ball.
pub fn shell_mass_bound(dim: usize, theta: f64) -> f64 {
    let n = dim as i32;
    unit_ball_volume(dim) * ((1.0 + theta).powi(n) - (1.0 - theta).max(0.0).powi(n))
}
