//! Special functions and quadrature rules.
//!
//! Everything here is plain `f64` arithmetic: a Lanczos gamma function, the
//! regularized incomplete beta function, sphere measures, Gauss rules and a
//! tanh-sinh integrator for endpoint-singular integrands.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

// Stirling series coefficients B_{2k} / (2k (2k-1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(x)` for `x ≥ 15` by the Stirling series.
fn ln_gamma_large(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Natural logarithm of `|Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let s = (PI * x).sin().abs();
        return PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    if let Some(g) = gamma_exact(x) {
        return g.ln();
    }
    let mut shift = 1.0;
    let mut y = x;
    while y < 15.0 {
        shift *= y;
        y += 1.0;
    }
    ln_gamma_large(y) - shift.ln()
}

/// Γ at positive integers and half-integers by the exact recurrence.
fn gamma_exact(x: f64) -> Option<f64> {
    if !(x > 0.0 && x <= 160.0) || (2.0 * x).fract() != 0.0 {
        return None;
    }
    let (mut g, mut k) = if x.fract() == 0.0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while k < x {
        g *= k;
        k += 1.0;
    }
    Some(g)
}

/// The gamma function.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if let Some(g) = gamma_exact(x) {
        return g;
    }
    ln_gamma(x).exp()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub fn beta(a: f64, b: f64) -> f64 {
    if a + b < 160.0 {
        gamma(a) * gamma(b) / gamma(a + b)
    } else {
        ln_beta(a, b).exp()
    }
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`, `x ∈ [0, 1]`.
///
/// Continued fraction (modified Lentz), using the symmetry
/// `I_x(a,b) = 1 - I_{1-x}(b,a)` on the side where the fraction converges fast.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - beta_reg_cf(b, a, 1.0 - x, x);
    }
    beta_reg_cf(a, b, x, 1.0 - x)
}

/// Same as [`beta_reg`] but takes `1 - x` explicitly, which keeps full
/// relative precision when `x` is close to one.
pub fn beta_reg_complement(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if one_minus_x <= 0.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - beta_reg_cf(b, a, one_minus_x, x);
    }
    beta_reg_cf(a, b, x, one_minus_x)
}

fn beta_reg_cf(a: f64, b: f64, x: f64, y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let front = (a * x.ln() + b * y.ln() - ln_beta(a, b)).exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    front * h
}

/// Surface measure `|S^{n-1}| = 2π^{n/2} / Γ(n/2)` of the unit sphere in `ℝ^n`.
pub fn unit_sphere_area(n: i64) -> Result<f64> {
    if n <= 0 {
        return Err(Error::Domain(format!(
            "sphere area needs ambient dimension >= 1, got {n}"
        )));
    }
    let h = n as f64 / 2.0;
    Ok(2.0 * PI.powf(h) / gamma(h))
}

/// `|S^{n-1}|` for a dimension already known to be valid.
pub(crate) fn sphere_area(n: usize) -> f64 {
    unit_sphere_area(n as i64).expect("dimension >= 1")
}

/// Volume of the unit ball in `ℝ^n`; `n = 0` gives 1.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// A quadrature rule: nodes with positive weights.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Affinely maps a rule on `[-1, 1]` to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre rule on `[-1, 1]` with `n` nodes (Newton on the
/// three-term recurrence).
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule for the weight `(1 - t²)^{λ - 1/2}` on `[-1, 1]`, `λ > 0`
/// (Golub–Welsch on the Gegenbauer Jacobi matrix).
pub fn gauss_gegenbauer(n: usize, lambda: f64) -> Rule {
    assert!(n >= 1 && lambda > 0.0);
    if (lambda - 0.5).abs() < 1e-15 {
        return gauss_legendre(n);
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0));
        jac[(k, k - 1)] = beta.sqrt();
        jac[(k - 1, k)] = beta.sqrt();
    }
    let mu0 = beta(0.5, lambda + 0.5);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrize: the exact rule is symmetric about zero.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[j].1 + pairs[i].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// A node of a tanh-sinh rule on `[a, b]`, carrying the distances to both
/// endpoints so singular weights can be evaluated without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinhNode {
    pub x: f64,
    pub from_a: f64,
    pub from_b: f64,
    pub weight: f64,
}

/// Tanh-sinh (double exponential) nodes on `[a, b]` with step `h` and
/// `2 * half_count + 1` points.
pub fn tanh_sinh_nodes(a: f64, b: f64, h: f64, half_count: usize) -> Vec<TanhSinhNode> {
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(2 * half_count + 1);
    for k in -(half_count as i64)..=(half_count as i64) {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        let w = half * h * 0.5 * PI * t.cosh() / (cu * cu);
        // 1 - tanh(u) = e^{-u} / cosh(u), 1 + tanh(u) = e^{u} / cosh(u)
        let to_b = half * (-u).exp() / cu;
        let to_a = half * u.exp() / cu;
        if !(w.is_finite() && w > 0.0) || to_a <= 0.0 || to_b <= 0.0 {
            continue;
        }
        let x = if to_a < to_b { a + to_a } else { b - to_b };
        out.push(TanhSinhNode {
            x,
            from_a: to_a,
            from_b: to_b,
            weight: w,
        });
    }
    out
}

/// Integrates `f` over `[a, b]` by tanh-sinh quadrature, halving the step
/// until two successive levels agree to `rel_tol`.
pub fn tanh_sinh(a: f64, b: f64, rel_tol: f64, f: impl Fn(&TanhSinhNode) -> f64) -> Result<f64> {
    let mut h: f64 = 0.5;
    let mut prev = f64::NAN;
    for _ in 0..8 {
        let count = (4.0 / h).ceil() as usize;
        let value: f64 = tanh_sinh_nodes(a, b, h, count)
            .iter()
            .map(|n| n.weight * f(n))
            .sum();
        if prev.is_finite() && (value - prev).abs() <= rel_tol * value.abs().max(f64::MIN_POSITIVE)
        {
            return Ok(value);
        }
        prev = value;
        h *= 0.5;
    }
    Err(Error::Quadrature {
        achieved: f64::NAN,
        target: rel_tol,
    })
}

/// Composite Gauss–Legendre integration with `panels` equal panels.
pub fn composite_gauss(rule: &Rule, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * width;
            rule.integrate(lo, lo + width, &f)
        })
        .sum()
}
