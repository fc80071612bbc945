//! Interaction, deficit, asymmetry and shell quantities on ray-model
//! densities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Density, RayField};
use crate::error::{Error, Result};
use crate::geometry::BallPair;
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::special::{gauss_legendre, unit_ball_volume, Rule};
use crate::sphere::dot;

/// Radial quadrature settings for the interaction functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per radial panel.
    pub gl_nodes: usize,
    /// Radial panels per `min(R, R̃)`.
    pub panels_per_radius: usize,
    /// Declared relative accuracy of `𝓘`; `ε_quad = rel_tol · 𝓘[1_{E*}]`.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            gl_nodes: 6,
            panels_per_radius: 8,
            rel_tol: 2e-3,
        }
    }
}

impl QuadratureConfig {
    pub fn epsilon_quad(&self, pair: &BallPair) -> f64 {
        self.rel_tol * interaction_ball_ball(pair)
    }
}

/// `(1_B * h)(x) = ∫ h(y) 1{|x - y| ≤ R̃} dy`, exact along each ray of `h`.
fn convolve_ball_at(h: &RayField, x: &[f64], rb: f64) -> f64 {
    let xx = dot(x, x);
    let mut acc = 0.0;
    for (i, (omega, w)) in h.directions().iter().enumerate() {
        let p = dot(omega, x);
        let disc = p * p - xx + rb * rb;
        if disc <= 0.0 {
            continue;
        }
        let s = disc.sqrt();
        let hi = p + s;
        if hi <= 0.0 {
            continue;
        }
        acc += w * h.ray_integral(i, (p - s).max(0.0), hi);
    }
    acc
}

fn panels(lo: f64, hi: f64, width: f64) -> usize {
    (((hi - lo) / width).ceil() as usize).max(1)
}

/// `𝓘[g, h] = ½ ∬ g(x) 1{|x - y| ≤ R̃} h(y) dx dy` for signed ray fields.
pub(crate) fn field_interaction(
    g: &RayField,
    h: &RayField,
    rb: f64,
    width: f64,
    rule: &Rule,
) -> f64 {
    let n = g.dim() as i32;
    let mut total = 0.0;
    let mut x = vec![0.0; g.dim()];
    for (i, (omega, w)) in g.directions().iter().enumerate() {
        let mut ray_acc = 0.0;
        for (lo, hi, v) in g.ray(i).cells() {
            if v == 0.0 {
                continue;
            }
            let np = panels(lo, hi, width);
            let step = (hi - lo) / np as f64;
            let mut cell_acc = 0.0;
            for k in 0..np {
                let a = lo + k as f64 * step;
                for (r, wr) in rule.mapped(a, a + step) {
                    for (xc, oc) in x.iter_mut().zip(omega) {
                        *xc = r * oc;
                    }
                    cell_acc += wr * r.powi(n - 1) * convolve_ball_at(h, &x, rb);
                }
            }
            ray_acc += v * cell_acc;
        }
        total += w * ray_acc;
    }
    0.5 * total
}

fn check_dims(g: usize, h: usize) -> Result<()> {
    if g != h {
        return Err(Error::DimensionMismatch {
            expected: g,
            found: h,
        });
    }
    Ok(())
}

/// `𝓘[g, h]` by nested ray quadrature: the inner convolution with the ball
/// is exact along each ray of `h`, the outer radial integral uses composite
/// Gauss–Legendre panels.
pub fn interaction(
    g: &Density,
    h: &Density,
    pair: &BallPair,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_dims(g.dim(), h.dim())?;
    check_dims(pair.dim(), g.dim())?;
    let width = pair.radius_e().min(pair.radius_b()) / cfg.panels_per_radius as f64;
    Ok(field_interaction(
        g.field(),
        h.field(),
        pair.radius_b(),
        width,
        &gauss_legendre(cfg.gl_nodes),
    ))
}

/// `∫_{lo}^{hi} φ(r) r^{N-1} dr`, split where `φ` is not smooth.
fn phi_radial_moment(pair: &BallPair, lo: f64, hi: f64, rule: &Rule) -> f64 {
    let n = pair.dim() as i32;
    let r = pair.radius_e();
    let rb = pair.radius_b();
    let contained = (r - rb).abs();
    let far = r + rb;
    let mut acc = 0.0;
    let mut a = lo;
    for &b in &[contained, far, hi] {
        let b = b.min(hi);
        if b <= a {
            continue;
        }
        if b <= contained {
            // φ is the constant volume of the smaller ball here.
            acc += pair.phi(0.0) * (b.powi(n) - a.powi(n)) / n as f64;
        } else if a < far {
            let np = panels(a, b, 0.125 * rb.min(r));
            let step = (b - a) / np as f64;
            for k in 0..np {
                let s = a + k as f64 * step;
                acc += rule.integrate(s, s + step, |t| pair.phi(t) * t.powi(n - 1));
            }
        }
        a = b;
    }
    acc
}

/// `∫ φ(|x|) f(x) dx` with `φ` evaluated exactly.
fn phi_pairing(f: &RayField, pair: &BallPair) -> f64 {
    let rule = gauss_legendre(12);
    f.directions()
        .iter()
        .enumerate()
        .map(|(i, (_, w))| {
            w * f
                .ray(i)
                .cells()
                .filter(|c| c.2 != 0.0)
                .map(|(lo, hi, v)| v * phi_radial_moment(pair, lo, hi, &rule))
                .sum::<f64>()
        })
        .sum()
}

/// `𝓘[1_{E*}] = ½ ∫_{E*} φ(|x|) dx`.
pub fn interaction_ball_ball(pair: &BallPair) -> f64 {
    let rule = gauss_legendre(20);
    0.5 * crate::special::sphere_area(pair.dim())
        * phi_radial_moment(pair, 0.0, pair.radius_e(), &rule)
}

/// `𝓘[ρ] = 𝓘[1_{E*}] + ∫ φ f + 𝓘[f]` with `f = ρ - 1_{E*}`: the ball part and
/// the pairing with `φ` are radial and evaluated exactly, so only the small
/// remainder `𝓘[f]` carries angular quadrature error.
pub fn self_interaction(rho: &Density, pair: &BallPair, cfg: &QuadratureConfig) -> Result<f64> {
    let (pairing, remainder) = deficit_parts(rho, pair, cfg)?;
    Ok(interaction_ball_ball(pair) + pairing + remainder)
}

fn deficit_parts(rho: &Density, pair: &BallPair, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_dims(pair.dim(), rho.dim())?;
    let ball = RayField::ball(rho.directions(), pair.radius_e())?;
    let f = rho.field().difference(&ball)?;
    let width = pair.radius_e().min(pair.radius_b()) / cfg.panels_per_radius as f64;
    let remainder = field_interaction(
        &f,
        &f,
        pair.radius_b(),
        width,
        &gauss_legendre(cfg.gl_nodes),
    );
    Ok((phi_pairing(&f, pair), remainder))
}

/// `𝓓[ρ] = 𝓘[1_{E*}] - 𝓘[ρ]`; the mass of `ρ` must equal `|E*|`.
pub fn deficit(rho: &Density, pair: &BallPair, cfg: &QuadratureConfig) -> Result<f64> {
    let ball = pair.volume_e();
    let rel = (rho.mass() - ball).abs() / ball;
    if rel > 1e-8 {
        return Err(Error::MassMismatch {
            mass: rho.mass(),
            ball,
            rel,
        });
    }
    let (pairing, remainder) = deficit_parts(rho, pair, cfg)?;
    Ok(-pairing - remainder)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryConfig {
    pub random_starts: usize,
    pub seed: u64,
    /// Coordinate nudge and initial simplex size, in units of `R`.
    pub nudge: f64,
    pub max_evaluations: usize,
}

impl Default for AsymmetryConfig {
    fn default() -> Self {
        Self {
            random_starts: 2,
            seed: 0x5eed,
            nudge: 0.1,
            max_evaluations: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryResult {
    /// `A[ρ] ∈ [0, 1]`.
    pub value: f64,
    pub shift: Vec<f64>,
    /// `‖ρ - 1_{E*+a}‖₁` at the returned shift.
    pub l1_distance: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// `‖ρ - 1_{E*+a}‖₁ = ‖ρ‖₁ + |E*+a| - 2 ∫_{E*+a} ρ`, exact along each ray.
fn shifted_ball_distance(rho: &Density, radius: f64, a: &[f64]) -> f64 {
    let field = rho.field();
    let n = rho.dim() as i32;
    let aa = dot(a, a);
    let mut vol = 0.0;
    let mut overlap = 0.0;
    for (i, (omega, w)) in field.directions().iter().enumerate() {
        let p = dot(omega, a);
        let disc = p * p - aa + radius * radius;
        if disc <= 0.0 {
            continue;
        }
        let s = disc.sqrt();
        let hi = p + s;
        if hi <= 0.0 {
            continue;
        }
        let lo = (p - s).max(0.0);
        vol += w * (hi.powi(n) - lo.powi(n)) / n as f64;
        overlap += w * field.ray_integral(i, lo, hi);
    }
    (rho.mass() + vol - 2.0 * overlap).max(0.0)
}

/// `A[ρ] = (2‖ρ‖₁)^{-1} inf_a ‖ρ - 1_{E*+a}‖₁` with `|E*| = ‖ρ‖₁`, by
/// multi-start Nelder–Mead over the shift. Starts: origin, centroid,
/// `±` coordinate nudges and seeded random points.
pub fn asymmetry(rho: &Density, cfg: &AsymmetryConfig) -> AsymmetryResult {
    let dim = rho.dim();
    let radius = (rho.mass() / unit_ball_volume(dim)).powf(1.0 / dim as f64);
    let objective = |a: &[f64]| shifted_ball_distance(rho, radius, a);

    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim], rho.centroid()];
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let mut s = vec![0.0; dim];
            s[k] = sign * cfg.nudge * radius;
            starts.push(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_starts {
        starts.push(
            (0..dim)
                .map(|_| (rng.random::<f64>() - 0.5) * radius)
                .collect(),
        );
    }

    let nm = NelderMeadConfig {
        initial_step: cfg.nudge * radius,
        x_tol: 1e-10 * radius,
        f_tol: 1e-13 * rho.mass(),
        max_evaluations: cfg.max_evaluations,
    };
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut evaluations = 0;
    for s in &starts {
        let out = nelder_mead(objective, s, &nm);
        evaluations += out.evaluations;
        let better = match &best {
            None => true,
            Some((_, f, _)) => out.value < *f,
        };
        if better {
            best = Some((out.point, out.value, out.converged));
        }
    }
    let (shift, l1, converged) = best.expect("at least one start");
    AsymmetryResult {
        value: (l1 / (2.0 * rho.mass())).clamp(0.0, 1.0),
        shift,
        l1_distance: l1,
        converged,
        evaluations,
    }
}

/// `F⁺(ω) = ∫_R^∞ ρ(rω) r^{N-1} dr` and `F⁻(ω) = ∫_0^R (1 - ρ(rω)) r^{N-1} dr`
/// on the density's directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellProfiles {
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
    pub weights: Vec<f64>,
    pub reference_radius: f64,
}

impl ShellProfiles {
    fn lp(&self, values: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// `‖F⁺‖_p` on `S^{N-1}`; `p = ∞` gives the maximum.
    pub fn norm_plus(&self, p: f64) -> f64 {
        self.lp(&self.f_plus, p)
    }

    pub fn norm_minus(&self, p: f64) -> f64 {
        self.lp(&self.f_minus, p)
    }

    /// `∫ (F⁺ - F⁻) dω = ‖ρ‖₁ - |E*|`.
    pub fn mass_balance(&self) -> f64 {
        self.f_plus
            .iter()
            .zip(&self.f_minus)
            .zip(&self.weights)
            .map(|((p, m), w)| w * (p - m))
            .sum()
    }
}

pub fn shell_profiles(rho: &Density, pair: &BallPair) -> ShellProfiles {
    let field = rho.field();
    let r = pair.radius_e();
    let n = rho.dim() as i32;
    let inner_volume = r.powi(n) / n as f64;
    let mut f_plus = Vec::with_capacity(field.rays().len());
    let mut f_minus = Vec::with_capacity(field.rays().len());
    for (i, ray) in field.rays().iter().enumerate() {
        let outer = ray.outer_radius();
        f_plus.push(field.ray_integral(i, r, outer.max(r)));
        f_minus.push((inner_volume - field.ray_integral(i, 0.0, r)).max(0.0));
    }
    ShellProfiles {
        f_plus,
        f_minus,
        weights: rho.directions().weights().to_vec(),
        reference_radius: r,
    }
}

/// Smallest `θ ≥ 0` with `1_{(1-θ)E*} ≤ ρ ≤ 1_{(1+θ)E*}` on the ray model.
pub fn check_shell_condition(rho: &Density, pair: &BallPair) -> f64 {
    check_shell_condition_about(rho, pair.radius_e(), &vec![0.0; rho.dim()])
}

/// Same as [`check_shell_condition`] for the ball of radius `radius`
/// centered at `center`.
pub fn check_shell_condition_about(rho: &Density, radius: f64, center: &[f64]) -> f64 {
    let field = rho.field();
    let cc = dot(center, center);
    let mut theta: f64 = 0.0;
    for (i, (omega, _)) in field.directions().iter().enumerate() {
        let p = dot(omega, center);
        // Distance from the center to the point rω.
        let dist = |r: f64| (r * r - 2.0 * p * r + cc).max(0.0).sqrt();
        // Distance from the center to the segment {rω : lo ≤ r ≤ hi}.
        let seg_dist = |lo: f64, hi: f64| dist(p.clamp(lo, hi));
        let ray = field.ray(i);
        for (lo, hi, v) in ray.cells() {
            if v < 1.0 {
                theta = theta.max(1.0 - seg_dist(lo, hi) / radius);
            }
            if v > 0.0 {
                theta = theta.max(dist(lo).max(dist(hi)) / radius - 1.0);
            }
        }
        // Beyond the last edge ρ = 0.
        theta = theta.max(1.0 - seg_dist(ray.outer_radius(), f64::INFINITY) / radius);
    }
    theta.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{annulus, make_ball_density, perturbed_ball, translated_ball};
    use crate::sphere::DirectionSet;
    use approx::assert_relative_eq;

    fn setup(dim: usize, order: usize) -> (BallPair, DirectionSet) {
        (
            BallPair::with_implied_delta(dim, 1.0, 1.0).unwrap(),
            DirectionSet::gauss_product(dim, order).unwrap(),
        )
    }

    #[test]
    fn one_dimensional_interval_interaction() {
        let (pair, dirs) = setup(1, 1);
        let rho = make_ball_density(&pair, &dirs).unwrap();
        let cfg = QuadratureConfig::default();
        let v = interaction(&rho, &rho, &pair, &cfg).unwrap();
        assert_relative_eq!(v, 1.5, max_relative = 1e-12);
        assert_relative_eq!(interaction_ball_ball(&pair), 1.5, max_relative = 1e-13);
    }

    #[test]
    fn ball_deficit_vanishes_and_direct_path_agrees() {
        let (pair, dirs) = setup(3, 8);
        let rho = make_ball_density(&pair, &dirs).unwrap();
        let cfg = QuadratureConfig::default();
        assert_eq!(deficit(&rho, &pair, &cfg).unwrap(), 0.0);
        let direct = interaction(&rho, &rho, &pair, &cfg).unwrap();
        assert_relative_eq!(
            direct,
            interaction_ball_ball(&pair),
            max_relative = cfg.rel_tol
        );
    }

    #[test]
    fn deficit_positive_for_perturbation() {
        let (pair, dirs) = setup(3, 10);
        let cfg = QuadratureConfig::default();
        let shape = perturbed_ball(1.0, 2, 0.05, &[0.0, 0.0, 1.0]).unwrap();
        let raw = shape.discretize(&dirs, 1).unwrap();
        let (_, rho) = raw.with_mass(pair.volume_e()).unwrap();
        assert!(deficit(&rho, &pair, &cfg).unwrap() > 0.0);
    }

    #[test]
    fn mass_mismatch_is_reported() {
        let (pair, dirs) = setup(2, 8);
        let rho = annulus(2, 0.2, 1.0).unwrap().discretize(&dirs, 1).unwrap();
        assert!(matches!(
            deficit(&rho, &pair, &QuadratureConfig::default()),
            Err(Error::MassMismatch { .. })
        ));
    }

    #[test]
    fn translate_has_zero_asymmetry() {
        let (_, dirs) = setup(2, 16);
        let b = [0.2, -0.1];
        let rho = translated_ball(1.0, &b)
            .unwrap()
            .discretize(&dirs, 1)
            .unwrap();
        let out = asymmetry(&rho, &AsymmetryConfig::default());
        assert!(out.value < 1e-9, "A = {}", out.value);
        assert!((out.shift[0] - b[0]).abs() < 1e-6 && (out.shift[1] - b[1]).abs() < 1e-6);
    }

    #[test]
    fn shell_condition_examples() {
        let (pair, dirs) = setup(3, 6);
        let rho = make_ball_density(&pair, &dirs).unwrap();
        assert_eq!(check_shell_condition(&rho, &pair), 0.0);
        let ann = annulus(3, 0.3, 1.1).unwrap().discretize(&dirs, 1).unwrap();
        assert!(check_shell_condition(&ann, &pair) >= 1.0);
        let prof = shell_profiles(&rho, &pair);
        assert_eq!(prof.norm_plus(f64::INFINITY), 0.0);
        assert!(prof.norm_minus(1.0) < 1e-15);
    }
}
