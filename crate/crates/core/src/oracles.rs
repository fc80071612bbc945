//! Brute-force references: Monte Carlo volumes and interactions, direct
//! Funk–Hecke quadrature and harmonic dimensions by linear algebra.
//!
//! Nothing here calls the closed forms it is meant to check.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::derive_seed;
use crate::density::Shape;
use crate::error::{Error, Result};
use crate::geometry::BallPair;
use crate::special::{gauss_legendre, Rule};
use crate::spectral::SpectralParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    /// Zero for deterministic oracles.
    pub std_error: f64,
    pub samples_or_nodes: u64,
    pub seed: Option<u64>,
}

impl OracleEstimate {
    /// `|value - other| ≤ k σ`.
    pub fn agrees_with(&self, other: f64, k: f64) -> bool {
        (self.value - other).abs() <= k * self.std_error
    }
}

const BATCH: u64 = 1 << 16;

/// Sums `(x, x²)` of per-sample values over `n` samples split into
/// fixed-size batches with derived seeds, so the result does not depend on
/// how batches are scheduled.
fn batched_moments(
    n: u64,
    seed: u64,
    sample: impl Fn(&mut ChaCha8Rng) -> f64 + Sync,
) -> (f64, f64) {
    let batches = n.div_ceil(BATCH);
    let parts: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, b));
            let count = BATCH.min(n - b * BATCH);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let v = sample(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    parts
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d))
}

fn estimate(n: u64, seed: u64, scale: f64, (s, s2): (f64, f64)) -> OracleEstimate {
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    OracleEstimate {
        value: scale * mean,
        std_error: scale * (var / (nf - 1.0).max(1.0)).sqrt(),
        samples_or_nodes: n,
        seed: Some(seed),
    }
}

/// `|B_R(0) ∩ B_{R̃}(r e_1)|` by rejection sampling in the bounding box of
/// the intersection.
pub fn mc_intersection_volume(
    pair: &BallPair,
    r: f64,
    n_samples: u64,
    seed: u64,
) -> OracleEstimate {
    let dim = pair.dim();
    let (big, small) = (pair.radius_e(), pair.radius_b());
    let lo0 = (-big).max(r - small);
    let hi0 = big.min(r + small);
    let half = big.min(small);
    if hi0 <= lo0 || n_samples == 0 {
        return OracleEstimate {
            value: 0.0,
            std_error: 0.0,
            samples_or_nodes: n_samples,
            seed: Some(seed),
        };
    }
    let box_volume = (hi0 - lo0) * (2.0 * half).powi(dim as i32 - 1);
    let moments = batched_moments(n_samples, seed, |rng| {
        let x0 = lo0 + (hi0 - lo0) * rng.random::<f64>();
        let mut d_e = x0 * x0;
        let mut d_b = (x0 - r) * (x0 - r);
        for _ in 1..dim {
            let y = half * (2.0 * rng.random::<f64>() - 1.0);
            d_e += y * y;
            d_b += y * y;
        }
        (d_e <= big * big && d_b <= small * small) as u8 as f64
    });
    estimate(n_samples, seed, box_volume, moments)
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, dim: usize, out: &mut [f64]) {
    let mut norm2 = 0.0;
    for o in out.iter_mut() {
        *o = rng.sample(StandardNormal);
        norm2 += *o * *o;
    }
    let radius = rng.random::<f64>().powf(1.0 / dim as f64) / norm2.sqrt();
    for o in out.iter_mut() {
        *o *= radius;
    }
}

/// `𝓘[g, h] = ½ |B_{R̃}| ∫ g(x) ⟨h⟩_{B_{R̃}(x)} dx`: `x` uniform in the box
/// around the support of `g`, the partner point uniform in `B_{R̃}(x)`.
pub fn mc_interaction(
    g: &Shape,
    h: &Shape,
    pair: &BallPair,
    n_samples: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    let dim = pair.dim();
    if g.dim != dim || h.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if g.dim != dim { g.dim } else { h.dim },
        });
    }
    let rb = pair.radius_b();
    let bound = g.bounding_radius();
    let box_volume = (2.0 * bound).powi(dim as i32);
    let ball_volume = crate::special::unit_ball_volume(dim) * rb.powi(dim as i32);
    let moments = batched_moments(n_samples, seed, |rng| {
        let x: Vec<f64> = (0..dim)
            .map(|_| bound * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let gx = g.value(&x);
        let mut z = vec![0.0; dim];
        uniform_in_ball(rng, dim, &mut z);
        if gx == 0.0 {
            return 0.0;
        }
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + rb * b).collect();
        gx * h.value(&y)
    });
    Ok(estimate(
        n_samples,
        seed,
        0.5 * box_volume * ball_volume,
        moments,
    ))
}

/// `C_n^{(α)}(cos θ) = Σ_k (α)_k (α)_{n-k} / (k! (n-k)!) cos((n-2k)θ)`,
/// a positive-coefficient expansion independent of the recurrence; `α = 0`
/// is the normalized Chebyshev case `cos(nθ)`.
fn gegenbauer_trig(alpha: f64, n: usize, theta: f64, coef: &[f64]) -> f64 {
    if alpha == 0.0 {
        return (n as f64 * theta).cos();
    }
    coef.iter()
        .enumerate()
        .map(|(k, c)| c * ((n as f64 - 2.0 * k as f64) * theta).cos())
        .sum()
}

fn trig_coefficients(alpha: f64, n: usize) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    for k in 1..=n {
        p[k] = p[k - 1] * (alpha + k as f64 - 1.0) / k as f64;
    }
    (0..=n).map(|k| p[k] * p[n - k]).collect()
}

fn funk_hecke_rule(params: &SpectralParams, ell: usize, rule: &Rule, panels: usize) -> f64 {
    let n = params.dim;
    let alpha = 0.5 * (n as f64 - 2.0);
    let coef = trig_coefficients(alpha, ell);
    let at_one: f64 = if alpha == 0.0 { 1.0 } else { coef.iter().sum() };
    let theta_a = (1.0 - params.a).acos();
    let step = theta_a / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let a = k as f64 * step;
        acc += rule.integrate(a, a + step, |th| {
            gegenbauer_trig(alpha, ell, th, &coef) * th.sin().powi(n as i32 - 2)
        });
    }
    // ½ |S^{N-2}|, with |S^{N-2}| from the recursion |S^{k}| = 2π/(k-1) |S^{k-2}|.
    0.5 * sphere_area_by_recursion(n - 1) * acc / at_one
}

fn sphere_area_by_recursion(ambient: usize) -> f64 {
    let tau = std::f64::consts::TAU;
    match ambient {
        1 => 2.0,
        2 => tau,
        k => tau / (k as f64 - 2.0) * sphere_area_by_recursion(k - 2),
    }
}

/// `½ |S^{N-2}| ∫_{1-a}^1 C_ℓ(t)/C_ℓ(1) (1-t²)^{(N-3)/2} dt` in the angle
/// variable with Gauss–Legendre on `panels`, then `2 × panels`, until the
/// two agree to `rel_tol` (with an absolute floor at the round-off level of
/// `λ_{N,0}`).
pub fn funk_hecke_direct(
    params: &SpectralParams,
    ell: usize,
    nodes: usize,
    rel_tol: f64,
) -> Result<OracleEstimate> {
    let rule = gauss_legendre(nodes.max(2));
    let floor = 1e-15 * funk_hecke_rule(params, 0, &rule, 4).abs();
    let mut panels = (ell / nodes.max(1)).max(1);
    let mut prev = funk_hecke_rule(params, ell, &rule, panels);
    let mut achieved = f64::INFINITY;
    for _ in 0..14 {
        panels *= 2;
        let next = funk_hecke_rule(params, ell, &rule, panels);
        achieved = (next - prev).abs();
        if achieved <= rel_tol * next.abs() || achieved <= floor {
            return Ok(OracleEstimate {
                value: next,
                std_error: 0.0,
                samples_or_nodes: (panels * rule.len()) as u64,
                seed: None,
            });
        }
        prev = next;
    }
    Err(Error::Quadrature {
        achieved: achieved / prev.abs().max(f64::MIN_POSITIVE),
        target: rel_tol,
    })
}

const PRIME: u64 = 2_147_483_647;

fn monomials(dim: usize, degree: usize) -> Vec<Vec<u32>> {
    if dim == 1 {
        return vec![vec![degree as u32]];
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials(dim - 1, degree - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= PRIME;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    r
}

fn rank_mod_p(mut m: Vec<Vec<u64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][c], PRIME - 2);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * inv % PRIME;
                for k in c..cols {
                    let sub = f * m[rank][k] % PRIME;
                    m[r][k] = (m[r][k] + PRIME - sub) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of degree-`ell` harmonic polynomials in `N` variables as the
/// nullity of the Laplacian on homogeneous polynomials (exact rank mod p).
pub fn harmonic_dimension_by_rank(dim: usize, ell: usize) -> u64 {
    let source = monomials(dim, ell);
    if ell < 2 {
        return source.len() as u64;
    }
    let target = monomials(dim, ell - 2);
    let index: HashMap<&Vec<u32>, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    // Columns: source monomials; rows: target monomials.
    let mut mat = vec![vec![0u64; source.len()]; target.len()];
    for (j, m) in source.iter().enumerate() {
        for k in 0..dim {
            if m[k] >= 2 {
                let mut t = m.clone();
                t[k] -= 2;
                let coeff = (m[k] as u64) * (m[k] as u64 - 1);
                mat[index[&t]][j] = (mat[index[&t]][j] + coeff) % PRIME;
            }
        }
    }
    source.len() as u64 - rank_mod_p(mat) as u64
}
