//! Analytic shapes behind the test corpus and their discretization onto a
//! direction set.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::Density;
use crate::error::{Error, Result};
use crate::geometry::{lens_volume, BallPair};
use crate::special::{gauss_legendre, unit_ball_volume};
use crate::spectral::zonal_harmonic;
use crate::sphere::{dot, norm, DirectionSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub height: f64,
}

impl Bump {
    /// Value at `x / scale`.
    fn value_scaled(&self, x: &[f64], scale: f64) -> f64 {
        let d2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a / scale - b).powi(2))
            .sum();
        let u = 1.0 - d2 / (self.width * self.width);
        if u <= 0.0 {
            0.0
        } else {
            self.height * u * u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Star-shaped set `{rω : r ≤ R(1 + ε Y(ω·axis))}` with `Y` the
    /// normalized zonal harmonic of degree `ell`.
    PerturbedBall {
        radius: f64,
        ell: usize,
        amplitude: f64,
        axis: Vec<f64>,
    },
    Union {
        balls: Vec<(Vec<f64>, f64)>,
    },
    Annulus {
        inner: f64,
        outer: f64,
    },
    /// `1 - Π_k (1 - h_k g_k)` with `g_k = (1 - |x - c_k|²/w_k²)_+²`.
    SoftBumps {
        bumps: Vec<Bump>,
    },
}

/// An analytic density `x ↦ kind(x / scale)`.
/// Build through [`Shape::new`]; the unscaled mass of a soft shape is
/// computed once and shared by every rescaled copy, so `kind` must not be
/// edited afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Shape {
    pub dim: usize,
    pub kind: ShapeKind,
    pub scale: f64,
    #[serde(skip)]
    unscaled_mass: OnceLock<f64>,
}

impl PartialEq for Shape {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind && self.scale == other.scale
    }
}

fn ray_ball(omega: &[f64], center: &[f64], radius: f64) -> Option<(f64, f64)> {
    let p = dot(omega, center);
    let disc = p * p - dot(center, center) + radius * radius;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let hi = p + s;
    if hi <= 0.0 {
        return None;
    }
    Some(((p - s).max(0.0), hi))
}

fn merge(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn subtract(outer: (f64, f64), hole: (f64, f64)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(2);
    if hole.0 > outer.0 {
        out.push((outer.0, hole.0.min(outer.1)));
    }
    if hole.1 < outer.1 {
        out.push((hole.1.max(outer.0), outer.1));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// Root of a sign-changing `h` on `[a, b]` by the Illinois variant of
/// regula falsi.
fn refine_root(
    h: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut ha: f64,
    mut hb: f64,
    tol: f64,
) -> f64 {
    let mut side = 0;
    for _ in 0..100 {
        if (b - a).abs() <= tol {
            break;
        }
        let c = (a * hb - b * ha) / (hb - ha);
        let hc = h(c);
        if hc == 0.0 {
            return c;
        }
        if (hc < 0.0) == (hb < 0.0) {
            b = c;
            hb = hc;
            if side == -1 {
                ha *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            ha = hc;
            if side == 1 {
                hb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Sections of `{|y| ≤ R(1 + ε Y(ŷ·axis))}` along `y = o + tω`, `0 ≤ t ≤ t_max`.
/// Inside `|y| ≤ R(1 - |ε|)` and outside `|y| > R(1 + |ε|)` the answer is
/// known; in between the boundary crossings are bracketed on a sample grid
/// and refined.
#[allow(clippy::too_many_arguments)]
fn perturbed_intervals(
    dim: usize,
    o: &[f64],
    omega: &[f64],
    t_max: f64,
    radius: f64,
    ell: usize,
    amplitude: f64,
    axis: &[f64],
) -> Vec<(f64, f64)> {
    let neg: Vec<f64> = o.iter().map(|v| -v).collect();
    let clip = |iv: Option<(f64, f64)>| {
        iv.map(|(a, b)| (a.max(0.0), b.min(t_max)))
            .filter(|(a, b)| b > a)
    };
    let Some(reach) = clip(ray_ball(omega, &neg, radius * (1.0 + amplitude.abs()))) else {
        return Vec::new();
    };
    let core = clip(ray_ball(omega, &neg, radius * (1.0 - amplitude.abs())));
    // |o + tω|² and (o + tω)·axis are quadratic and affine in t.
    let (oo, ow) = (dot(o, o), dot(o, omega));
    let (oa, wa) = (dot(o, axis), dot(omega, axis));
    let h = |t: f64| {
        let r = (oo + 2.0 * t * ow + t * t).max(0.0).sqrt();
        if r == 0.0 {
            return -radius;
        }
        let c = ((oa + t * wa) / r).clamp(-1.0, 1.0);
        r - radius * (1.0 + amplitude * zonal_harmonic(dim, ell, c))
    };
    let uncertain = match core {
        Some(c) => subtract(reach, c),
        None => vec![reach],
    };
    let mut pieces: Vec<(f64, f64)> = core.into_iter().collect();
    let tol = 1e-14 * radius;
    for (a, b) in uncertain {
        const SAMPLES: usize = 8;
        let mut t0 = a;
        let mut h0 = h(a);
        let mut start = if h0 <= 0.0 { Some(a) } else { None };
        for k in 1..=SAMPLES {
            let t1 = a + (b - a) * k as f64 / SAMPLES as f64;
            let h1 = h(t1);
            if (h0 <= 0.0) != (h1 <= 0.0) {
                let root = refine_root(h, t0, t1, h0, h1, tol);
                match start.take() {
                    Some(s) => pieces.push((s, root)),
                    None => start = Some(root),
                }
            }
            t0 = t1;
            h0 = h1;
        }
        if let Some(s) = start {
            pieces.push((s, b));
        }
    }
    merge(pieces.into_iter().filter(|(a, b)| b > a).collect())
}

impl Shape {
    pub fn new(dim: usize, kind: ShapeKind) -> Result<Self> {
        let shape = Self {
            dim,
            kind,
            scale: 1.0,
            unscaled_mass: OnceLock::new(),
        };
        shape.validate()?;
        Ok(shape)
    }

    fn validate(&self) -> Result<()> {
        let check_vec = |v: &[f64]| {
            if v.len() != self.dim {
                Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: v.len(),
                })
            } else {
                Ok(())
            }
        };
        if self.dim == 0 {
            return Err(Error::Domain("shapes need N >= 1".into()));
        }
        match &self.kind {
            ShapeKind::Ball { center, radius } => {
                check_vec(center)?;
                if !(*radius > 0.0) {
                    return Err(Error::Parameter(format!(
                        "ball radius {radius} must be positive"
                    )));
                }
            }
            ShapeKind::PerturbedBall {
                radius,
                amplitude,
                axis,
                ..
            } => {
                check_vec(axis)?;
                if !(*radius > 0.0) {
                    return Err(Error::Parameter(
                        "perturbed ball radius must be positive".into(),
                    ));
                }
                if !(amplitude.abs() < 1.0) {
                    return Err(Error::Parameter(format!(
                        "amplitude {amplitude} would give a negative boundary radius"
                    )));
                }
                if (norm(axis) - 1.0).abs() > 1e-12 {
                    return Err(Error::Parameter(
                        "perturbation axis must be a unit vector".into(),
                    ));
                }
            }
            ShapeKind::Union { balls } => {
                if balls.is_empty() {
                    return Err(Error::Parameter("union of no balls".into()));
                }
                for (c, r) in balls {
                    check_vec(c)?;
                    if !(*r > 0.0) {
                        return Err(Error::Parameter("ball radius must be positive".into()));
                    }
                }
            }
            ShapeKind::Annulus { inner, outer } => {
                if !(*inner >= 0.0 && outer > inner) {
                    return Err(Error::Parameter(format!(
                        "annulus radii ({inner}, {outer}) are not increasing"
                    )));
                }
            }
            ShapeKind::SoftBumps { bumps } => {
                if bumps.is_empty() {
                    return Err(Error::Parameter("mixture of no bumps".into()));
                }
                for b in bumps {
                    check_vec(&b.center)?;
                    if !(0.0..=1.0).contains(&b.height) {
                        return Err(Error::Parameter(format!(
                            "bump height {} leaves [0, 1]",
                            b.height
                        )));
                    }
                    if !(b.width > 0.0) {
                        return Err(Error::Parameter("bump width must be positive".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            scale: self.scale * s,
            ..self.clone()
        }
    }

    /// Value at a point of `ℝ^N`.
    pub fn value(&self, x: &[f64]) -> f64 {
        if let ShapeKind::SoftBumps { bumps } = &self.kind {
            return 1.0
                - bumps
                    .iter()
                    .map(|b| 1.0 - b.value_scaled(x, self.scale))
                    .product::<f64>();
        }
        let y: Vec<f64> = x.iter().map(|v| v / self.scale).collect();
        match &self.kind {
            ShapeKind::SoftBumps { .. } => unreachable!("handled above"),
            _ => {
                let r = norm(&y);
                let omega: Vec<f64> = if r > 0.0 {
                    y.iter().map(|v| v / r).collect()
                } else {
                    let mut e = vec![0.0; self.dim];
                    e[0] = 1.0;
                    e
                };
                let inside = self
                    .unscaled_intervals(&omega)
                    .expect("indicator shape")
                    .iter()
                    .any(|&(lo, hi)| lo <= r && r < hi);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn unscaled_intervals(&self, omega: &[f64]) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            ShapeKind::Ball { center, radius } => {
                Some(ray_ball(omega, center, *radius).into_iter().collect())
            }
            ShapeKind::PerturbedBall {
                radius,
                ell,
                amplitude,
                axis,
            } => {
                let y = zonal_harmonic(self.dim, *ell, dot(omega, axis));
                Some(vec![(0.0, radius * (1.0 + amplitude * y))])
            }
            ShapeKind::Union { balls } => Some(merge(
                balls
                    .iter()
                    .filter_map(|(c, r)| ray_ball(omega, c, *r))
                    .collect(),
            )),
            ShapeKind::Annulus { inner, outer } => Some(vec![(*inner, *outer)]),
            ShapeKind::SoftBumps { .. } => None,
        }
    }

    /// For indicator shapes, the sorted disjoint intervals `{r ≥ 0 : rω ∈ set}`.
    pub fn ray_intervals(&self, omega: &[f64]) -> Option<Vec<(f64, f64)>> {
        self.unscaled_intervals(omega).map(|v| {
            v.into_iter()
                .map(|(a, b)| (a * self.scale, b * self.scale))
                .collect()
        })
    }

    /// For indicator shapes, the sorted disjoint intervals
    /// `{t ∈ [0, t_max] : origin + tω ∈ set}`.
    pub fn intervals_from(
        &self,
        origin: &[f64],
        omega: &[f64],
        t_max: f64,
    ) -> Option<Vec<(f64, f64)>> {
        let o: Vec<f64> = origin.iter().map(|v| v / self.scale).collect();
        let t_max = t_max / self.scale;
        let neg: Vec<f64> = o.iter().map(|v| -v).collect();
        let raw = match &self.kind {
            ShapeKind::Ball { center, radius } => {
                let c: Vec<f64> = center.iter().zip(&o).map(|(c, o)| c - o).collect();
                ray_ball(omega, &c, *radius).into_iter().collect()
            }
            ShapeKind::Union { balls } => merge(
                balls
                    .iter()
                    .filter_map(|(c, r)| {
                        let c: Vec<f64> = c.iter().zip(&o).map(|(c, o)| c - o).collect();
                        ray_ball(omega, &c, *r)
                    })
                    .collect(),
            ),
            ShapeKind::Annulus { inner, outer } => match ray_ball(omega, &neg, *outer) {
                None => Vec::new(),
                Some(out) => match ray_ball(omega, &neg, *inner) {
                    None => vec![out],
                    Some(hole) => subtract(out, hole),
                },
            },
            ShapeKind::PerturbedBall {
                radius,
                ell,
                amplitude,
                axis,
            } => perturbed_intervals(self.dim, &o, omega, t_max, *radius, *ell, *amplitude, axis),
            ShapeKind::SoftBumps { .. } => return None,
        };
        Some(
            raw.into_iter()
                .filter_map(|(a, b)| {
                    let (a, b) = (a.max(0.0), b.min(t_max));
                    (b > a).then_some((a * self.scale, b * self.scale))
                })
                .collect(),
        )
    }

    /// Centers of polar frames whose pieces partition the shape; the outer
    /// integral of an interaction is taken piece by piece so each ray sees a
    /// boundary that varies smoothly with its direction.
    pub fn frames(&self) -> Vec<Vec<f64>> {
        let scaled = |c: &Vec<f64>| c.iter().map(|v| v * self.scale).collect();
        match &self.kind {
            ShapeKind::Ball { center, .. } => vec![scaled(center)],
            ShapeKind::Union { balls } => balls.iter().map(|(c, _)| scaled(c)).collect(),
            _ => vec![vec![0.0; self.dim]],
        }
    }

    /// Sections `{t ≥ 0 : frame_k + tω ∈ piece_k}` for indicator shapes.
    pub fn frame_intervals(&self, k: usize, omega: &[f64]) -> Option<Vec<(f64, f64)>> {
        let raw = match &self.kind {
            ShapeKind::Ball { radius, .. } => vec![(0.0, *radius)],
            ShapeKind::Union { balls } => {
                let (ck, rk) = &balls[k];
                let mut pieces = vec![(0.0, *rk)];
                for (cj, rj) in &balls[..k] {
                    let c: Vec<f64> = cj.iter().zip(ck).map(|(a, b)| a - b).collect();
                    if let Some(hole) = ray_ball(omega, &c, *rj) {
                        pieces = pieces.into_iter().flat_map(|p| subtract(p, hole)).collect();
                    }
                }
                pieces
            }
            _ => return self.ray_intervals(omega),
        };
        Some(
            raw.into_iter()
                .map(|(a, b)| (a * self.scale, b * self.scale))
                .collect(),
        )
    }

    /// Conservative test for `B(center, radius) ⊂ set` (indicator shapes).
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        let x: Vec<f64> = center.iter().map(|v| v / self.scale).collect();
        let r = radius / self.scale;
        let dist = |c: &[f64]| {
            c.iter()
                .zip(&x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
        match &self.kind {
            ShapeKind::Ball { center, radius } => dist(center) + r <= *radius,
            ShapeKind::Union { balls } => balls.iter().any(|(c, rb)| dist(c) + r <= *rb),
            ShapeKind::Annulus { inner, outer } => {
                let d = norm(&x);
                d - r >= *inner && d + r <= *outer
            }
            ShapeKind::PerturbedBall {
                radius, amplitude, ..
            } => norm(&x) + r <= radius * (1.0 - amplitude.abs()),
            ShapeKind::SoftBumps { .. } => false,
        }
    }

    /// `∫ value dx`: closed forms where available, a rule exact for the
    /// boundary polynomial for perturbed balls, fine quadrature otherwise.
    pub fn mass(&self) -> f64 {
        let n = self.dim as i32;
        let vn = unit_ball_volume(self.dim);
        let unscaled = match &self.kind {
            ShapeKind::Ball { radius, .. } => vn * radius.powi(n),
            ShapeKind::Annulus { inner, outer } => vn * (outer.powi(n) - inner.powi(n)),
            ShapeKind::Union { balls } if balls.len() == 2 => {
                let (c1, r1) = &balls[0];
                let (c2, r2) = &balls[1];
                let d = c1
                    .iter()
                    .zip(c2)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                vn * (r1.powi(n) + r2.powi(n)) - lens_volume(self.dim, *r1, *r2, d)
            }
            ShapeKind::PerturbedBall {
                radius,
                ell,
                amplitude,
                axis,
            } => {
                let dirs = DirectionSet::gauss_product(self.dim, ell * self.dim / 2 + 2)
                    .expect("valid order");
                dirs.integrate(|w| {
                    (radius * (1.0 + amplitude * zonal_harmonic(self.dim, *ell, dot(w, axis))))
                        .powi(n)
                }) / self.dim as f64
            }
            _ => *self
                .unscaled_mass
                .get_or_init(|| self.mass_by_quadrature() / self.scale.powi(n)),
        };
        unscaled * self.scale.powi(n)
    }

    fn mass_by_quadrature(&self) -> f64 {
        let order = if self.dim <= 3 { 48 } else { 12 };
        let dirs = DirectionSet::gauss_product(self.dim, order).expect("valid order");
        let rule = gauss_legendre(12);
        let bound = self.bounding_radius();
        let n = self.dim as i32;
        let supports: Vec<(Vec<f64>, f64)> = match &self.kind {
            ShapeKind::SoftBumps { bumps } => bumps
                .iter()
                .map(|b| {
                    (
                        b.center.iter().map(|c| c * self.scale).collect(),
                        b.width * self.scale,
                    )
                })
                .collect(),
            _ => Vec::new(),
        };
        dirs.integrate(|w| match self.ray_intervals(w) {
            Some(iv) => iv
                .iter()
                .map(|(a, b)| (b.powi(n) - a.powi(n)) / n as f64)
                .sum(),
            None => {
                // Between support crossings the integrand is a polynomial in
                // r of degree at most 4K + N - 1, integrated exactly.
                let mut cuts = vec![0.0, bound];
                for (c, width) in &supports {
                    if let Some((a, b)) = ray_ball(w, c, *width) {
                        cuts.extend([a, b]);
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let mut x = vec![0.0; w.len()];
                let mut acc = 0.0;
                for p in cuts.windows(2) {
                    for (r, wr) in rule.mapped(p[0], p[1]) {
                        for (xc, wc) in x.iter_mut().zip(w) {
                            *xc = wc * r;
                        }
                        acc += wr * self.value(&x) * r.powi(n - 1);
                    }
                }
                acc
            }
        })
    }

    /// Length scale on which a soft shape varies; `None` for indicators.
    pub fn smoothness_scale(&self) -> Option<f64> {
        match &self.kind {
            ShapeKind::SoftBumps { bumps } => {
                Some(self.scale * bumps.iter().map(|b| b.width).fold(f64::INFINITY, f64::min))
            }
            _ => None,
        }
    }

    pub fn is_indicator(&self) -> bool {
        !matches!(self.kind, ShapeKind::SoftBumps { .. })
    }

    /// Radius of a centered ball containing the support.
    pub fn bounding_radius(&self) -> f64 {
        let r = match &self.kind {
            ShapeKind::Ball { center, radius } => norm(center) + radius,
            ShapeKind::PerturbedBall {
                radius, amplitude, ..
            } => radius * (1.0 + amplitude.abs()),
            ShapeKind::Union { balls } => {
                balls.iter().map(|(c, r)| norm(c) + r).fold(0.0, f64::max)
            }
            ShapeKind::Annulus { outer, .. } => *outer,
            ShapeKind::SoftBumps { bumps } => bumps
                .iter()
                .map(|b| norm(&b.center) + b.width)
                .fold(0.0, f64::max),
        };
        r * self.scale
    }

    /// Ray-model discretization. Indicator shapes are exact along each ray;
    /// soft shapes use `radial_cells` uniform cells with midpoint values.
    pub fn discretize(&self, directions: &DirectionSet, radial_cells: usize) -> Result<Density> {
        if directions.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: directions.dim(),
            });
        }
        let bound = self.bounding_radius();
        let mut rays = Vec::with_capacity(directions.len());
        for (omega, _) in directions.iter() {
            let ray = match self.ray_intervals(omega) {
                Some(intervals) => {
                    let mut edges = vec![0.0];
                    let mut values = Vec::new();
                    for (lo, hi) in intervals {
                        if hi <= lo {
                            continue;
                        }
                        if lo > *edges.last().unwrap() {
                            edges.push(lo);
                            values.push(0.0);
                        }
                        edges.push(hi);
                        values.push(1.0);
                    }
                    if values.is_empty() {
                        // Empty ray: a single zero cell keeps the layout uniform.
                        edges.push(bound.max(f64::MIN_POSITIVE));
                        values.push(0.0);
                    }
                    (edges, values)
                }
                None => {
                    let cells = radial_cells.max(1);
                    let edges: Vec<f64> = (0..=cells)
                        .map(|j| bound * j as f64 / cells as f64)
                        .collect();
                    let values = edges
                        .windows(2)
                        .map(|e| {
                            let mid = 0.5 * (e[0] + e[1]);
                            let x: Vec<f64> = omega.iter().map(|c| c * mid).collect();
                            self.value(&x).clamp(0.0, 1.0)
                        })
                        .collect();
                    (edges, values)
                }
            };
            rays.push(ray);
        }
        Density::new(directions.clone(), rays)
    }
}

/// Indicator of the centered ball `E*` of the pair.
pub fn make_ball_density(pair: &BallPair, directions: &DirectionSet) -> Result<Density> {
    let shape = Shape::new(
        pair.dim(),
        ShapeKind::Ball {
            center: vec![0.0; pair.dim()],
            radius: pair.radius_e(),
        },
    )?;
    shape.discretize(directions, 1)
}

pub fn translated_ball(radius: f64, shift: &[f64]) -> Result<Shape> {
    Shape::new(
        shift.len(),
        ShapeKind::Ball {
            center: shift.to_vec(),
            radius,
        },
    )
}

/// Boundary radius `R(1 + ε Y(ω·axis))`; `|ε| < 1` is required.
pub fn perturbed_ball(radius: f64, ell: usize, amplitude: f64, axis: &[f64]) -> Result<Shape> {
    Shape::new(
        axis.len(),
        ShapeKind::PerturbedBall {
            radius,
            ell,
            amplitude,
            axis: axis.to_vec(),
        },
    )
}

pub fn two_ball_union(first: (&[f64], f64), second: (&[f64], f64)) -> Result<Shape> {
    Shape::new(
        first.0.len(),
        ShapeKind::Union {
            balls: vec![(first.0.to_vec(), first.1), (second.0.to_vec(), second.1)],
        },
    )
}

pub fn annulus(dim: usize, inner: f64, outer: f64) -> Result<Shape> {
    Shape::new(dim, ShapeKind::Annulus { inner, outer })
}

pub fn soft_bump_mixture(dim: usize, bumps: Vec<Bump>) -> Result<Shape> {
    Shape::new(dim, ShapeKind::SoftBumps { bumps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_amplitude_is_the_ball() {
        let pair = BallPair::unit(3, 0.5, 0.1).unwrap();
        let dirs = DirectionSet::gauss_product(3, 4).unwrap();
        let ball = make_ball_density(&pair, &dirs).unwrap();
        let pert = perturbed_ball(1.0, 2, 0.0, &[0.0, 0.0, 1.0])
            .unwrap()
            .discretize(&dirs, 8)
            .unwrap();
        assert_eq!(ball, pert);
    }

    #[test]
    fn amplitude_out_of_range_is_rejected() {
        assert!(matches!(
            perturbed_ball(1.0, 2, 1.0, &[1.0, 0.0]),
            Err(Error::Parameter(_))
        ));
        let bad = Bump {
            center: vec![0.0, 0.0],
            width: 1.0,
            height: 1.2,
        };
        assert!(soft_bump_mixture(2, vec![bad]).is_err());
    }

    #[test]
    fn union_of_disjoint_balls_has_both_volumes() {
        let dirs = DirectionSet::gauss_product(2, 64).unwrap();
        let u = two_ball_union((&[0.5, 0.0], 0.3), (&[-0.5, 0.1], 0.2)).unwrap();
        let d = u.discretize(&dirs, 1).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(d.mass(), pi * (0.09 + 0.04), max_relative = 1e-3);
    }

    #[test]
    fn point_values_match_ray_sections() {
        let s = translated_ball(1.0, &[0.3, -0.2, 0.1]).unwrap().scaled(1.5);
        assert_eq!(s.value(&[0.45, -0.3, 0.15]), 1.0);
        assert_eq!(s.value(&[3.0, 0.0, 0.0]), 0.0);
        assert_eq!(s.value(&[0.0, 0.0, 0.0]), 1.0);
    }
}
