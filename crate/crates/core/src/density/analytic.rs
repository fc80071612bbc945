//! Interaction and deficit of analytic shapes.
//!
//! The inner convolution `(1_B * h)(x) = ∫_{B(x, R̃)} h` is integrated in
//! polar coordinates about `x` itself, so its accuracy does not depend on
//! how `R̃` compares with the spacing of the outer directions. Indicator
//! shapes are exact along every ray, inner and outer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AsymmetryConfig, AsymmetryResult, Shape, ShapeKind};
use crate::error::{Error, Result};
use crate::geometry::{lens_volume, BallPair};
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::special::{gauss_legendre, unit_ball_volume, Rule};
use crate::sphere::DirectionSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeQuadrature {
    /// Product-rule order of the outer directions about the origin.
    pub outer_order: usize,
    /// Product-rule order of the directions about each outer node.
    pub local_order: usize,
    /// Outer and local orders used when both factors are soft shapes.
    pub soft_orders: (usize, usize),
    pub gl_nodes: usize,
    /// Radial panel width in units of `R̃`.
    pub panel_width: f64,
    /// Declared accuracy: `ε_quad = rel_tol · 𝓘[1_{E*}]`.
    pub rel_tol: f64,
}

impl ShapeQuadrature {
    pub fn for_dim(dim: usize) -> Self {
        let (outer_order, local_order, soft_orders) = match dim {
            1 => (1, 1, (1, 1)),
            2 => (48, 24, (16, 8)),
            3 => (10, 8, (8, 6)),
            _ => (6, 5, (6, 5)),
        };
        Self {
            outer_order,
            local_order,
            soft_orders,
            gl_nodes: 6,
            panel_width: 0.5,
            rel_tol: 1e-3,
        }
    }

    pub fn epsilon_quad(&self, pair: &BallPair) -> f64 {
        self.rel_tol * super::interaction_ball_ball(pair)
    }
}

/// `∫_{B(x, radius)} h` from lens volumes, for annuli and unions of
/// disjoint balls. Local rays converge slowly there: the chord length has a
/// square-root singularity where a ray grazes a strongly curved boundary.
fn lens_integral(h: &Shape, x: &[f64], radius: f64) -> Option<f64> {
    let s = h.scale;
    let dist = |c: &[f64]| {
        x.iter()
            .zip(c)
            .map(|(a, b)| (a - s * b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    match &h.kind {
        ShapeKind::Annulus { inner, outer } => {
            let d = dist(&vec![0.0; h.dim]);
            Some(
                lens_volume(h.dim, s * outer, radius, d) - lens_volume(h.dim, s * inner, radius, d),
            )
        }
        ShapeKind::Union { balls } => {
            for (i, (ci, ri)) in balls.iter().enumerate() {
                for (cj, rj) in &balls[i + 1..] {
                    let gap: f64 = ci
                        .iter()
                        .zip(cj)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    if gap < ri + rj {
                        return None;
                    }
                }
            }
            Some(
                balls
                    .iter()
                    .map(|(c, r)| lens_volume(h.dim, s * r, radius, dist(c)))
                    .sum(),
            )
        }
        _ => None,
    }
}

/// `∫_{B(x, radius)} h`.
fn ball_integral(h: &Shape, x: &[f64], radius: f64, local: &DirectionSet, rule: &Rule) -> f64 {
    let dim = h.dim;
    let n = dim as i32;
    if h.contains_ball(x, radius) {
        return unit_ball_volume(dim) * radius.powi(n);
    }
    if let Some(v) = lens_integral(h, x, radius) {
        return v;
    }
    let mut y = vec![0.0; dim];
    local
        .iter()
        .map(|(omega, w)| {
            let m = match h.intervals_from(x, omega, radius) {
                Some(iv) => iv
                    .iter()
                    .map(|(a, b)| (b.powi(n) - a.powi(n)) / dim as f64)
                    .sum(),
                None => {
                    let scale = h.smoothness_scale().unwrap_or(radius);
                    let panels = ((4.0 * radius / scale).ceil() as usize).clamp(1, 4);
                    let step = radius / panels as f64;
                    let mut acc = 0.0;
                    for k in 0..panels {
                        let a = step * k as f64;
                        for (t, wt) in rule.mapped(a, a + step) {
                            for ((yc, xc), oc) in y.iter_mut().zip(x).zip(omega) {
                                *yc = xc + t * oc;
                            }
                            acc += wt * h.value(&y) * t.powi(n - 1);
                        }
                    }
                    acc
                }
            };
            w * m
        })
        .sum()
}

/// `𝓘[g, h]` for analytic shapes.
pub fn shape_interaction(
    g: &Shape,
    h: &Shape,
    pair: &BallPair,
    cfg: &ShapeQuadrature,
) -> Result<f64> {
    let dim = pair.dim();
    for d in [g.dim, h.dim] {
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d,
            });
        }
    }
    let (outer_order, local_order) = if g.is_indicator() || h.is_indicator() {
        (cfg.outer_order, cfg.local_order)
    } else {
        cfg.soft_orders
    };
    let outer = DirectionSet::gauss_product(dim, outer_order)?;
    let local = DirectionSet::gauss_product(dim, local_order)?;
    let rule = gauss_legendre(cfg.gl_nodes);
    let rb = pair.radius_b();
    // Soft shapes are resolved on their own length scale, not only on `R̃`.
    let smooth = [g.smoothness_scale(), h.smoothness_scale()]
        .into_iter()
        .map(|s| s.unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    let width = cfg.panel_width * rb.max(smooth);
    let n = dim as i32;
    let frames = g.frames();
    let tasks: Vec<(usize, usize)> = (0..frames.len())
        .flat_map(|k| (0..outer.len()).map(move |i| (k, i)))
        .collect();
    let per_ray: Vec<f64> = tasks
        .into_par_iter()
        .map(|(k, i)| {
            let omega = outer.direction(i);
            let origin = &frames[k];
            let segments = g
                .frame_intervals(k, omega)
                .unwrap_or_else(|| vec![(0.0, g.bounding_radius())]);
            // The inner integral has kinks where the kernel ball touches a
            // boundary, i.e. near `s ± R̃` for the section endpoints `s`.
            let ends: Vec<f64> = segments.iter().flat_map(|&(a, b)| [a, b]).collect();
            let mut x = vec![0.0; dim];
            let mut acc = 0.0;
            for &(lo, hi) in &segments {
                let mut cuts = vec![lo, hi];
                for s in &ends {
                    cuts.extend([s - rb, s + rb].into_iter().filter(|c| *c > lo && *c < hi));
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                for piece in cuts.windows(2) {
                    let (lo, hi) = (piece[0], piece[1]);
                    let panels = (((hi - lo) / width).ceil() as usize).max(1);
                    let step = (hi - lo) / panels as f64;
                    for p in 0..panels {
                        let a = lo + p as f64 * step;
                        for (r, wr) in rule.mapped(a, a + step) {
                            for ((xc, oc), c) in x.iter_mut().zip(omega).zip(origin) {
                                *xc = c + r * oc;
                            }
                            let gv = if g.is_indicator() { 1.0 } else { g.value(&x) };
                            if gv != 0.0 {
                                acc += wr
                                    * gv
                                    * r.powi(n - 1)
                                    * ball_integral(h, &x, rb, &local, &rule);
                            }
                        }
                    }
                }
            }
            outer.weight(i) * acc
        })
        .collect();
    Ok(0.5 * per_ray.iter().sum::<f64>())
}

/// Deficits against one ball pair, with `𝓘[1_{E*}]` computed once by the
/// same quadrature as every `𝓘[ρ]` so the bias of the inner rule cancels to
/// leading order.
#[derive(Debug, Clone)]
pub struct DeficitEvaluator {
    pair: BallPair,
    cfg: ShapeQuadrature,
    ball_value: f64,
}

impl DeficitEvaluator {
    pub fn new(pair: &BallPair, cfg: &ShapeQuadrature) -> Result<Self> {
        let e = Shape::new(
            pair.dim(),
            super::ShapeKind::Ball {
                center: vec![0.0; pair.dim()],
                radius: pair.radius_e(),
            },
        )?;
        Ok(Self {
            pair: *pair,
            cfg: *cfg,
            ball_value: shape_interaction(&e, &e, pair, cfg)?,
        })
    }

    pub fn epsilon_quad(&self) -> f64 {
        self.cfg.epsilon_quad(&self.pair)
    }

    /// `𝓘[1_{E*}]` under this quadrature.
    pub fn ball_value(&self) -> f64 {
        self.ball_value
    }

    /// `𝓓[ρ]`; the mass of the shape must equal `|E*|` to 1e-8.
    pub fn deficit(&self, shape: &Shape) -> Result<f64> {
        let ball = self.pair.volume_e();
        let mass = shape.mass();
        let rel = (mass - ball).abs() / ball;
        if rel > 1e-8 {
            return Err(Error::MassMismatch { mass, ball, rel });
        }
        Ok(self.ball_value - shape_interaction(shape, shape, &self.pair, &self.cfg)?)
    }
}

pub fn shape_deficit(shape: &Shape, pair: &BallPair, cfg: &ShapeQuadrature) -> Result<f64> {
    DeficitEvaluator::new(pair, cfg)?.deficit(shape)
}

/// `A` of an analytic shape. The overlap `∫_{E*+a} ρ` is integrated along
/// rays cast from `a`, exact per ray for indicator shapes, so small or
/// distant components are never missed. `local_order` is the product-rule
/// order of those rays.
pub fn shape_asymmetry(
    shape: &Shape,
    local_order: usize,
    cfg: &AsymmetryConfig,
) -> Result<AsymmetryResult> {
    let dim = shape.dim;
    let mass = shape.mass();
    if !(mass > 0.0) {
        return Err(Error::Parameter("asymmetry needs a positive mass".into()));
    }
    let radius = (mass / unit_ball_volume(dim)).powf(1.0 / dim as f64);
    let local = DirectionSet::gauss_product(dim, local_order)?;
    let rule = gauss_legendre(8);
    let objective =
        |a: &[f64]| (2.0 * mass - 2.0 * ball_integral(shape, a, radius, &local, &rule)).max(0.0);

    // A search that stops early can only overstate `A`.
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    starts.extend(
        shape
            .frames()
            .into_iter()
            .filter(|c| c.iter().any(|x| *x != 0.0)),
    );
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
        x_tol: 1e-7 * radius,
        f_tol: 1e-10 * mass,
        max_evaluations: cfg.max_evaluations,
    };
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut evaluations = 0;
    for s in &starts {
        let out = nelder_mead(objective, s, &nm);
        evaluations += out.evaluations;
        if best.as_ref().is_none_or(|(_, f, _)| out.value < *f) {
            best = Some((out.point, out.value, out.converged));
        }
    }
    let (shift, l1, converged) = best.expect("at least one start");
    Ok(AsymmetryResult {
        value: (l1 / (2.0 * mass)).clamp(0.0, 1.0),
        shift,
        l1_distance: l1,
        converged,
        evaluations,
    })
}
