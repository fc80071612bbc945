//! The shell competitor and the centering shift.

use serde::{Deserialize, Serialize};

use crate::density::{check_shell_condition_about, Density, RayField};
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::special::{sphere_area, tanh_sinh, unit_ball_volume};
use crate::sphere::{dot, DirectionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `m_i ≥ m_o`: the outer tail beyond `r_o` is moved inside `(1-θ)E*`.
    Inner,
    /// `m_i < m_o`: the inner hole below `r_i` is filled from outside `(1+θ)E*`.
    Outer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompetitorResult {
    pub rho_tilde: Density,
    pub m_inner: f64,
    pub m_outer: f64,
    /// `r_o` on the inner branch, `r_i` on the outer one.
    pub cut_radius: f64,
    pub branch: Branch,
    pub theta: f64,
    pub radius: f64,
}

impl CompetitorResult {
    /// `ρ̃ = 1 on |x| ≤ r_in, ρ on r_in < |x| ≤ r_out, 0 beyond`.
    pub fn cut_radii(&self) -> (f64, f64) {
        match self.branch {
            Branch::Inner => ((1.0 - self.theta) * self.radius, self.cut_radius),
            Branch::Outer => (self.cut_radius, (1.0 + self.theta) * self.radius),
        }
    }
}

fn radius_of_mass(dim: usize, mass: f64) -> f64 {
    (mass / unit_ball_volume(dim)).powf(1.0 / dim as f64)
}

fn shell_volume(dim: usize, lo: f64, hi: f64) -> f64 {
    let n = dim as i32;
    (hi.powi(n) - lo.powi(n)) / dim as f64
}

/// Solves `G(s) = target` for a monotone `G` that is affine in `u = s^N/N`
/// between consecutive `breaks`. Among solutions, the one closest to
/// `prefer` is returned.
fn solve_piecewise(
    dim: usize,
    breaks: &[f64],
    g: impl Fn(f64) -> f64,
    target: f64,
    prefer: f64,
) -> f64 {
    let n = dim as f64;
    let u = |s: f64| s.powi(dim as i32) / n;
    let s_of = |u: f64| (n * u).max(0.0).powf(1.0 / n);
    let values: Vec<f64> = breaks.iter().map(|&s| g(s)).collect();
    let increasing = values.last() >= values.first();
    let below = |v: f64| if increasing { v < target } else { v > target };
    let above = |v: f64| if increasing { v > target } else { v < target };
    // Solution set is [first point reaching target, last point before leaving].
    let first = values.iter().position(|&v| !below(v));
    let last = values.iter().rposition(|&v| !above(v));
    let (Some(first), Some(last)) = (first, last) else {
        return if values.iter().all(|&v| below(v)) {
            *breaks.last().unwrap()
        } else {
            breaks[0]
        };
    };
    let crossing = |j: usize| {
        // Target lies between values[j-1] and values[j].
        if j == 0 {
            return breaks[0];
        }
        let (v0, v1) = (values[j - 1], values[j]);
        if v1 == v0 {
            return breaks[j];
        }
        let (u0, u1) = (u(breaks[j - 1]), u(breaks[j]));
        let t = ((target - v0) / (v1 - v0)).clamp(0.0, 1.0);
        s_of(u0 + t * (u1 - u0)).clamp(breaks[j - 1], breaks[j])
    };
    let lo = crossing(first);
    let hi = if last + 1 < breaks.len() {
        crossing(last + 1)
    } else {
        breaks[last]
    };
    prefer.clamp(lo.min(hi), hi.max(lo))
}

fn breakpoints(field: &RayField, lo: f64, hi: f64) -> Vec<f64> {
    let mut b: Vec<f64> = field
        .rays()
        .iter()
        .flat_map(|r| r.edges().iter().copied())
        .filter(|&e| e > lo && e < hi)
        .collect();
    b.push(lo);
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn outer_mass(field: &RayField, s: f64) -> f64 {
    (0..field.rays().len())
        .map(|i| {
            let top = field.ray(i).outer_radius();
            field.directions().weight(i) * field.ray_integral(i, s, top.max(s))
        })
        .sum()
}

fn inner_hole(field: &RayField, s: f64) -> f64 {
    let vol = shell_volume(field.dim(), 0.0, s);
    (0..field.rays().len())
        .map(|i| field.directions().weight(i) * (vol - field.ray_integral(i, 0.0, s)))
        .sum()
}

/// The competitor `ρ̃` for the ball of mass `‖ρ‖₁` centered at the origin and
/// shell width `θ ∈ [0, 1]`. The cut radius is found exactly: both mass
/// functions are affine in `r^N` between the breakpoints of the rays.
pub fn competitor(rho: &Density, theta: f64) -> Result<CompetitorResult> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Parameter(format!(
            "shell width θ = {theta} must lie in [0, 1]"
        )));
    }
    let dim = rho.dim();
    let radius = radius_of_mass(dim, rho.mass());
    let field = rho.field();
    let r_in0 = (1.0 - theta) * radius;
    let r_out0 = (1.0 + theta) * radius;
    let m_inner = inner_hole(field, r_in0).max(0.0);
    let m_outer = outer_mass(field, r_out0).max(0.0);

    let (branch, cut_radius, r_in, r_out) = if m_inner >= m_outer {
        let breaks = breakpoints(field, radius, r_out0);
        let r_o = solve_piecewise(dim, &breaks, |s| outer_mass(field, s), m_inner, radius);
        (Branch::Inner, r_o, r_in0, r_o)
    } else {
        let breaks = breakpoints(field, r_in0, radius);
        let r_i = solve_piecewise(dim, &breaks, |s| inner_hole(field, s), m_outer, radius);
        (Branch::Outer, r_i, r_i, r_out0)
    };

    let rays = field
        .rays()
        .iter()
        .map(|ray| {
            let mut edges = vec![0.0];
            let mut values = Vec::new();
            if r_in > 0.0 {
                edges.push(r_in);
                values.push(1.0);
            }
            for (lo, hi, v) in ray.cells() {
                let (a, b) = (lo.max(r_in), hi.min(r_out));
                if b <= a {
                    continue;
                }
                if a > *edges.last().unwrap() {
                    edges.push(a);
                    values.push(0.0);
                }
                edges.push(b);
                values.push(v);
            }
            if values.is_empty() {
                edges.push(r_out.max(f64::MIN_POSITIVE));
                values.push(0.0);
            }
            (edges, values)
        })
        .collect();
    let rho_tilde = Density::new(rho.directions().clone(), rays)?;
    let rel = (rho_tilde.mass() - rho.mass()).abs() / rho.mass();
    if rel > 1e-8 {
        return Err(Error::Solver {
            iterations: 0,
            residual: rel,
            reason: "competitor mass equation has no solution in the shell".into(),
        });
    }
    Ok(CompetitorResult {
        rho_tilde,
        m_inner,
        m_outer,
        cut_radius,
        branch,
        theta,
        radius,
    })
}

/// Amounts by which each competitor property fails (all zero when it holds
/// exactly), recomputed from the two densities only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompetitorCheck {
    /// `|‖ρ̃‖₁ - ‖ρ‖₁| / ‖ρ‖₁`.
    pub mass_rel: f64,
    /// Sandwich excess: measured `θ` of `ρ̃` minus the requested one.
    pub sandwich: f64,
    /// `∫_{E*} (ρ - ρ̃)_+ + ∫_{E*ᶜ} (ρ̃ - ρ)_+`.
    pub ordering: f64,
    /// `(‖ρ̃ - 1_{E*}‖₁ - ‖ρ - 1_{E*}‖₁)_+`.
    pub distance: f64,
    /// `(∫_{shell} |ρ̃ - ρ| - ∫_{outside shell} |ρ̃ - ρ|)_+`.
    pub shell_share: f64,
}

impl CompetitorCheck {
    /// Each mass-type entry within `tol · ‖ρ‖₁`, the sandwich within `tol`.
    pub fn passes(&self, tol: f64, mass: f64) -> bool {
        self.mass_rel <= tol
            && self.sandwich <= tol
            && self.ordering <= tol * mass
            && self.distance <= tol * mass
            && self.shell_share <= tol * mass
    }
}

/// `∫ |v|` over `lo ≤ |x| < hi` and over its complement.
fn band_split(field: &RayField, lo: f64, hi: f64) -> (f64, f64) {
    let dim = field.dim();
    let mut inside = 0.0;
    let mut total = 0.0;
    for (i, ray) in field.rays().iter().enumerate() {
        let w = field.directions().weight(i);
        for (a, b, v) in ray.cells() {
            total += w * v.abs() * shell_volume(dim, a, b);
            let (c, d) = (a.max(lo), b.min(hi));
            if d > c {
                inside += w * v.abs() * shell_volume(dim, c, d);
            }
        }
    }
    (inside, (total - inside).max(0.0))
}

/// `∫_{|x|<r} v_-` and `∫_{|x|≥r} v_+`.
fn wrong_sign_mass(field: &RayField, r: f64) -> f64 {
    let dim = field.dim();
    let mut acc = 0.0;
    for (i, ray) in field.rays().iter().enumerate() {
        let w = field.directions().weight(i);
        for (a, b, v) in ray.cells() {
            if v < 0.0 && a < r {
                acc += w * (-v) * shell_volume(dim, a, b.min(r));
            }
            if v > 0.0 && b > r {
                acc += w * v * shell_volume(dim, a.max(r), b);
            }
        }
    }
    acc
}

pub fn verify_competitor(rho: &Density, out: &CompetitorResult) -> Result<CompetitorCheck> {
    let rt = &out.rho_tilde;
    let radius = out.radius;
    let mass_rel = (rt.mass() - rho.mass()).abs() / rho.mass();
    let measured = check_shell_condition_about(rt, radius, &vec![0.0; rho.dim()]);
    let diff = rt.field().difference(rho.field())?;
    let ordering = wrong_sign_mass(&diff, radius);
    let distance = (rt.distance_to_ball(radius)? - rho.distance_to_ball(radius)?).max(0.0);
    let (shell, rest) = band_split(
        &diff,
        (1.0 - out.theta) * radius,
        (1.0 + out.theta) * radius,
    );
    Ok(CompetitorCheck {
        mass_rel,
        sandwich: (measured - out.theta).max(0.0),
        ordering,
        distance,
        shell_share: (shell - rest).max(0.0),
    })
}

/// `∫ (rω - a)/|rω - a| r^{N-1} dr` over `[lo, hi]` along direction `ω`.
///
/// With `Q = r² - 2pr + q`, `p = ω·a`, `q = |a|²`, the integrand splits as
/// `ω r^N/√Q - a r^{N-1}/√Q`; `∫ r^k/√Q` follows from the recursion
/// `k J_k = r^{k-1}√Q + (2k-1) p J_{k-1} - (k-1) q J_{k-2}`.
fn unit_vector_moment(omega: &[f64], a: &[f64], lo: f64, hi: f64, out: &mut [f64]) {
    let dim = omega.len();
    let p = dot(omega, a);
    let q = dot(a, a);
    let d2 = (q - p * p).max(0.0);
    let scale = hi.max(q.sqrt()).max(f64::MIN_POSITIVE);
    if d2.sqrt() <= 1e-9 * scale {
        // Ray through `a`: the unit vector is ±ω.
        let n = dim as i32;
        let m = |x: f64, y: f64| {
            if y > x {
                (y.powi(n) - x.powi(n)) / dim as f64
            } else {
                0.0
            }
        };
        let forward = m(lo.max(p), hi);
        let backward = m(lo, hi.min(p));
        for (o, w) in out.iter_mut().zip(omega) {
            *o += w * (forward - backward);
        }
        return;
    }
    let d = d2.sqrt();
    let js = |r: f64| -> Vec<f64> {
        let sq = (r * r - 2.0 * p * r + q).max(0.0).sqrt();
        let mut j = Vec::with_capacity(dim + 1);
        j.push(((r - p) / d).asinh());
        j.push(sq + p * j[0]);
        for k in 2..=dim {
            let kf = k as f64;
            let v = (r.powi(k as i32 - 1) * sq + (2.0 * kf - 1.0) * p * j[k - 1]
                - (kf - 1.0) * q * j[k - 2])
                / kf;
            j.push(v);
        }
        j
    };
    let (jh, jl) = (js(hi), js(lo));
    let k_n = jh[dim] - jl[dim];
    let k_n1 = jh[dim - 1] - jl[dim - 1];
    for ((o, w), ac) in out.iter_mut().zip(omega).zip(a) {
        *o += w * k_n - ac * k_n1;
    }
}

/// `F(a) = -∫ (x/|x|) ρ(x + a) dx = -∫ (y - a)/|y - a| ρ(y) dy`, exact on
/// each ray.
pub fn centering_field(rho: &Density, a: &[f64]) -> Vec<f64> {
    let field = rho.field();
    let dim = rho.dim();
    let mut total = vec![0.0; dim];
    let mut ray_acc = vec![0.0; dim];
    for (i, (omega, w)) in field.directions().iter().enumerate() {
        for (lo, hi, v) in field.ray(i).cells() {
            if v == 0.0 {
                continue;
            }
            ray_acc.iter_mut().for_each(|x| *x = 0.0);
            unit_vector_moment(omega, a, lo, hi, &mut ray_acc);
            for (t, r) in total.iter_mut().zip(&ray_acc) {
                *t -= w * v * r;
            }
        }
    }
    total
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringConfig {
    /// Target residual relative to `‖ρ‖₁^{(N-1)/N}`.
    pub rel_residual: f64,
    pub max_iterations: usize,
    pub fallback_evaluations: usize,
}

impl Default for CenteringConfig {
    fn default() -> Self {
        Self {
            rel_residual: 1e-8,
            max_iterations: 200,
            fallback_evaluations: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringResult {
    pub shift: Vec<f64>,
    /// `max_n |∫ (x_n/|x|) ρ(x + a) dx|`.
    pub residual: f64,
    /// The residual target `rel_residual · ‖ρ‖₁^{(N-1)/N}`.
    pub tolerance: f64,
    pub iterations: usize,
    pub used_fallback: bool,
}

/// Zero of [`centering_field`] by the damped iteration `a ← a - t F(a)/κ`
/// with `κ = |S^{N-1}| R^{N-1}/N`, the leading Jacobian of `F` at a ball of
/// radius `R`. The step `t` starts at 1 and is halved whenever the residual
/// would grow. Nelder–Mead on `‖F‖` takes over if the iteration stalls.
pub fn center(rho: &Density, cfg: &CenteringConfig) -> Result<CenteringResult> {
    center_from(rho, &vec![0.0; rho.dim()], 0, cfg)
}

/// Same as [`center`] started at `start`, taking at least `min_steps`
/// iterations.
pub fn center_from(
    rho: &Density,
    start: &[f64],
    min_steps: usize,
    cfg: &CenteringConfig,
) -> Result<CenteringResult> {
    let dim = rho.dim();
    if start.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: start.len(),
        });
    }
    let radius = radius_of_mass(dim, rho.mass());
    let kappa = sphere_area(dim) * radius.powi(dim as i32 - 1) / dim as f64;
    let tolerance = cfg.rel_residual * rho.mass().powf((dim as f64 - 1.0) / dim as f64);
    // Iterate well past the target so a restart from the result barely moves.
    let goal = 1e-3 * tolerance;

    let mut a = start.to_vec();
    let mut f = centering_field(rho, &a);
    let mut res = max_abs(&f);
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < cfg.max_iterations && (res > goal || iterations < min_steps) {
        iterations += 1;
        let trial: Vec<f64> = a
            .iter()
            .zip(&f)
            .map(|(x, g)| x - step * g / kappa)
            .collect();
        let ft = centering_field(rho, &trial);
        let rt = max_abs(&ft);
        if rt <= res || iterations <= min_steps {
            a = trial;
            f = ft;
            res = rt;
            step = (2.0 * step).min(1.0);
        } else {
            step *= 0.5;
            if step < 1e-6 {
                break;
            }
        }
    }
    let mut used_fallback = false;
    if res > tolerance {
        used_fallback = true;
        let nm = NelderMeadConfig {
            initial_step: 0.01 * radius,
            x_tol: 1e-14 * radius,
            f_tol: 0.0,
            max_evaluations: cfg.fallback_evaluations,
        };
        let out = nelder_mead(|x: &[f64]| max_abs(&centering_field(rho, x)), &a, &nm);
        iterations += out.evaluations;
        if out.value < res {
            a = out.point;
            res = out.value;
        }
    }
    if res > tolerance {
        return Err(Error::Solver {
            iterations,
            residual: res,
            reason: "centering field has no zero within the iteration budget".into(),
        });
    }
    Ok(CenteringResult {
        shift: a,
        residual: res,
        tolerance,
        iterations,
        used_fallback,
    })
}

/// `g(s) = a·F_ball(a)/s` for the unit ball and `|a| = s`:
/// `V_{N-1} ∫_{|1-s|}^{1+s} r^{N-1} (1 - τ²)^{(N-1)/2} dr`,
/// `τ = (1 - r² - s²)/(2rs)`.
pub fn ball_centering_profile(dim: usize, s: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::Domain("centering profile needs N >= 2".into()));
    }
    if s <= 0.0 {
        return Ok(0.0);
    }
    let lo = (1.0 - s).abs();
    let hi = 1.0 + s;
    let expo = 0.5 * (dim as f64 - 1.0);
    let value = tanh_sinh(lo, hi, 1e-13, |node| {
        let r = node.x;
        // 1 - τ² = ((2rs)² - (1 - r² - s²)²)/(2rs)², factored to keep the
        // endpoint zeros exact.
        let num = (2.0 * r * s - (1.0 - r * r - s * s)) * (2.0 * r * s + (1.0 - r * r - s * s));
        let one_minus = (num / (4.0 * r * r * s * s)).max(0.0);
        r.powi(dim as i32 - 1) * one_minus.powf(expo)
    })?;
    Ok(unit_ball_volume(dim - 1) * value)
}

/// Certified constants of the centering lemma for radius-1 balls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringConstants {
    /// `sup_{0<s≤½} ((|S|/N) s - g(s))/s²`, inflated by the safety factor.
    pub c_prime: f64,
    /// `2N/|S^{N-1}|`.
    pub c0_big: f64,
    /// `(C' C₀²)^{-1}`.
    pub c0_small: f64,
    /// Largest admissible sandwich width.
    pub theta0: f64,
    /// `|a| ≤ c_shift ‖ρ‖₁^{1/N} θ`.
    pub c_shift: f64,
    /// `1_{(1-Cθ)E*} ≤ ρ(· + a) ≤ 1_{(1+Cθ)E*}`.
    pub c_sandwich: f64,
    pub scan_points: usize,
}

/// Scans the remainder of `g` on `(0, ½]` and derives the lemma's constants.
/// `‖ρ - 1_{E*}‖₁ ≤ 2^N V_N θ` for `θ ≤ 1` converts the mass condition into
/// one on `θ`; the cap `C₀ ‖f‖₁ ≤ ½` keeps the scanned range valid.
pub fn centering_constants(
    dim: usize,
    scan_points: usize,
    safety: f64,
) -> Result<CenteringConstants> {
    let area = sphere_area(dim);
    let slope = area / dim as f64;
    let mut sup: f64 = 0.0;
    for k in 1..=scan_points {
        let s = 0.5 * k as f64 / scan_points as f64;
        sup = sup.max((slope * s - ball_centering_profile(dim, s)?) / (s * s));
    }
    let c_prime = safety * sup;
    let c0_big = 2.0 * dim as f64 / area;
    let c0_small = if c_prime > 0.0 {
        1.0 / (c_prime * c0_big * c0_big)
    } else {
        f64::INFINITY
    };
    let vn = unit_ball_volume(dim);
    let two_n = 2f64.powi(dim as i32);
    let f_max = c0_small.min(0.5 / c0_big);
    let theta0 = (f_max / (two_n * vn)).min(1.0);
    let c_shift = 2.0 * two_n / vn.powf(1.0 / dim as f64);
    Ok(CenteringConstants {
        c_prime,
        c0_big,
        c0_small,
        theta0,
        c_shift,
        c_sandwich: 1.0 + 2.0 * two_n,
        scan_points,
    })
}

/// `min a·F(a)` over `|a| = C₀ ‖ρ - 1_{E*}‖₁ / R^{N-1}` along the given
/// directions (nonnegative when the Brouwer argument applies).
pub fn brouwer_margin(
    rho: &Density,
    consts: &CenteringConstants,
    probe: &DirectionSet,
) -> Result<f64> {
    let dim = rho.dim();
    let radius = radius_of_mass(dim, rho.mass());
    let f1 = rho.distance_to_ball(radius)?;
    let s = consts.c0_big * f1 / radius.powi(dim as i32 - 1);
    Ok(probe
        .iter()
        .map(|(omega, _)| {
            let a: Vec<f64> = omega.iter().map(|w| w * s).collect();
            dot(&a, &centering_field(rho, &a))
        })
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{make_ball_density, perturbed_ball, translated_ball};
    use crate::geometry::BallPair;
    use crate::special::gauss_legendre;

    fn dirs(dim: usize) -> DirectionSet {
        DirectionSet::gauss_product(dim, 8).unwrap()
    }

    #[test]
    fn ball_is_a_fixed_point() {
        for theta in [0.0, 0.3, 1.0] {
            let pair = BallPair::unit(3, 0.5, 0.1).unwrap();
            let rho = make_ball_density(&pair, &dirs(3)).unwrap();
            let out = competitor(&rho, theta).unwrap();
            assert!(
                out.m_inner.abs() < 1e-13 && out.m_outer.abs() < 1e-13,
                "{out:?}"
            );
            assert!(
                out.rho_tilde
                    .field()
                    .difference(rho.field())
                    .unwrap()
                    .l1_norm()
                    < 1e-14
            );
        }
    }

    #[test]
    fn perturbed_ball_properties() {
        let d = dirs(3);
        let raw = perturbed_ball(1.0, 3, 0.1, &[0.0, 0.0, 1.0])
            .unwrap()
            .discretize(&d, 1)
            .unwrap();
        for theta in [0.02, 0.2, 1.0] {
            let out = competitor(&raw, theta).unwrap();
            let check = verify_competitor(&raw, &out).unwrap();
            assert!(check.passes(1e-11, raw.mass()), "{check:?}");
        }
    }

    #[test]
    fn field_matches_radial_quadrature() {
        let d = DirectionSet::gauss_product(2, 6).unwrap();
        let rho = translated_ball(1.0, &[0.1, 0.0])
            .unwrap()
            .discretize(&d, 1)
            .unwrap();
        let a = [0.03, -0.02];
        let exact = centering_field(&rho, &a);
        let gl = gauss_legendre(40);
        let mut quad = [0.0; 2];
        for (i, (omega, w)) in d.iter().enumerate() {
            for (lo, hi, v) in rho.field().ray(i).cells() {
                for k in 0..40 {
                    let (x0, x1) = (
                        lo + (hi - lo) * k as f64 / 40.0,
                        lo + (hi - lo) * (k + 1) as f64 / 40.0,
                    );
                    for (r, wr) in gl.mapped(x0, x1) {
                        let y = [r * omega[0] - a[0], r * omega[1] - a[1]];
                        let n = (y[0] * y[0] + y[1] * y[1]).sqrt();
                        quad[0] -= w * v * wr * r * y[0] / n;
                        quad[1] -= w * v * wr * r * y[1] / n;
                    }
                }
            }
        }
        assert!(
            (exact[0] - quad[0]).abs() < 1e-9 && (exact[1] - quad[1]).abs() < 1e-9,
            "{exact:?} {quad:?}"
        );
    }

    #[test]
    fn symmetric_density_is_centered() {
        let pair = BallPair::unit(3, 0.5, 0.1).unwrap();
        let rho = make_ball_density(&pair, &dirs(3)).unwrap();
        let out = center(&rho, &CenteringConfig::default()).unwrap();
        assert!(out.shift.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn translate_is_recentered() {
        let b = [0.02, -0.01, 0.015];
        let rho = translated_ball(1.0, &b)
            .unwrap()
            .discretize(&dirs(3), 1)
            .unwrap();
        let out = center(&rho, &CenteringConfig::default()).unwrap();
        assert!(out.residual <= out.tolerance);
        // The ray model is not exactly a translate, so compare loosely.
        for (x, y) in out.shift.iter().zip(&b) {
            assert!((x - y).abs() < 2e-3, "{:?}", out.shift);
        }
    }

    #[test]
    fn profile_has_unit_slope_and_constants_are_positive() {
        for dim in 2..=4 {
            let s = 1e-4;
            let slope = ball_centering_profile(dim, s).unwrap() / s;
            assert!((slope / (sphere_area(dim) / dim as f64) - 1.0).abs() < 1e-3);
            let c = centering_constants(dim, 200, 1.1).unwrap();
            assert!(c.theta0 > 0.0 && c.c_shift.is_finite());
        }
    }
}
