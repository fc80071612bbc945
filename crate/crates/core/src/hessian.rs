//! Direct evaluation of the boundary Hessian form
//! `𝓠[F] = ½ ∬ F(ω) 1{|ω - ω'| < R̃/R} F(ω') dω dω'`.
//!
//! The inner integral over the cap `{ω'·ω > 1 - a}` is taken in polar
//! coordinates about `ω` (Gauss–Legendre in the polar angle, a product rule
//! on the orthogonal `S^{N-2}`), so the indicator never cuts through a
//! quadrature cell. For `F` a polynomial of degree `≤ L` both rules are
//! exact up to the polar-angle integration, which is smooth.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::{composite_gauss, gauss_legendre};
use crate::spectral::SpectralParams;
use crate::sphere::DirectionSet;

/// Quadrature for `𝓠` on fields of degree at most `degree`.
#[derive(Debug, Clone)]
pub struct HessianForm {
    params: SpectralParams,
    degree: usize,
    outer: DirectionSet,
    /// `(cos ψ, sin ψ, weight)` for the polar angle of the cap.
    polar: Vec<(f64, f64, f64)>,
    /// Directions on `S^{N-2}` with weights.
    sub: DirectionSet,
}

impl HessianForm {
    pub fn new(params: &SpectralParams, degree: usize) -> Result<Self> {
        let dim = params.dim;
        let outer = DirectionSet::gauss_product(dim, degree + 1)?;
        let sub = DirectionSet::gauss_product(dim - 1, degree / 2 + 1)?;
        let psi_max = (1.0 - params.a).acos();
        let rule = gauss_legendre(24);
        let panels = 2;
        let mut polar = Vec::with_capacity(panels * rule.len());
        let h = psi_max / panels as f64;
        for p in 0..panels {
            for (psi, w) in rule.mapped(p as f64 * h, (p + 1) as f64 * h) {
                polar.push((psi.cos(), psi.sin(), w * psi.sin().powi(dim as i32 - 2)));
            }
        }
        Ok(Self {
            params: *params,
            degree,
            outer,
            polar,
            sub,
        })
    }

    pub fn params(&self) -> &SpectralParams {
        &self.params
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.outer
    }

    /// Calls `visit(ω', w)` for every node of the cap rule about `omega`.
    fn for_cap_nodes(&self, omega: &[f64], mut visit: impl FnMut(&[f64], f64)) {
        let dim = omega.len();
        let frame = complement_frame(omega);
        let mut y = vec![0.0; dim];
        for &(c, s, wp) in &self.polar {
            for (eta, we) in self.sub.iter() {
                for (k, yk) in y.iter_mut().enumerate() {
                    let mut v = c * omega[k];
                    for (j, ej) in eta.iter().enumerate() {
                        v += s * frame[j][k] * ej;
                    }
                    *yk = v;
                }
                visit(&y, wp * we);
            }
        }
    }

    /// `∫_{ω'·ω > 1-a} f(ω') dω'`.
    pub fn cap_integral(&self, f: &impl Fn(&[f64]) -> f64, omega: &[f64]) -> f64 {
        let mut acc = 0.0;
        self.for_cap_nodes(omega, |y, w| acc += w * f(y));
        acc
    }

    /// `𝓠[F]` by the nested rule.
    pub fn apply(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let n = self.outer.len();
        let total: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let omega = self.outer.direction(i);
                self.outer.weight(i) * f(omega) * self.cap_integral(&f, omega)
            })
            .sum();
        0.5 * total
    }

    pub fn norm_sq(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.outer.integrate(|w| f(w).powi(2))
    }

    /// `(∫ F, max_n |∫ ω_n F|)`.
    pub fn low_moments(&self, f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
        let mass = self.outer.integrate(&f);
        let first = (0..self.params.dim)
            .map(|n| self.outer.integrate(|w| w[n] * f(w)).abs())
            .fold(0.0, f64::max);
        (mass, first)
    }

    /// Matrices `(Q, W)` of `𝓠` and of the `L²` inner product on the span of
    /// `basis`, so that `𝓠[Σ c_k b_k] = cᵀQc` and `‖Σ c_k b_k‖² = cᵀWc`.
    pub fn basis_matrices(&self, basis: &ZonalBasis) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if basis.dim != self.params.dim {
            return Err(Error::DimensionMismatch {
                expected: self.params.dim,
                found: basis.dim,
            });
        }
        if basis.max_degree > self.degree {
            return Err(Error::Parameter(format!(
                "basis degree {} exceeds the rule degree {}",
                basis.max_degree, self.degree
            )));
        }
        let m = basis.len();
        let parts: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..self.outer.len())
            .into_par_iter()
            .fold(
                || (DMatrix::zeros(m, m), DMatrix::zeros(m, m)),
                |(mut q, mut w), i| {
                    let omega = self.outer.direction(i);
                    let wi = self.outer.weight(i);
                    let b = basis.values(omega);
                    let mut g = DVector::zeros(m);
                    self.for_cap_nodes(omega, |y, wy| g.axpy(wy, &basis.values(y), 1.0));
                    q.ger(0.5 * wi, &b, &g, 1.0);
                    w.ger(wi, &b, &b, 1.0);
                    (q, w)
                },
            )
            .collect();
        let (mut q, mut w) = (DMatrix::zeros(m, m), DMatrix::zeros(m, m));
        for (qi, wi) in parts {
            q += qi;
            w += wi;
        }
        let q = 0.5 * (&q + q.transpose());
        Ok((q, w))
    }
}

/// Orthonormal vectors spanning `ω^⊥`, from the Householder reflection
/// that maps `e₁` to `ω`.
fn complement_frame(omega: &[f64]) -> Vec<Vec<f64>> {
    let dim = omega.len();
    let mut v: Vec<f64> = omega.iter().map(|x| -x).collect();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    (1..dim)
        .map(|j| {
            (0..dim)
                .map(|k| {
                    let id = if j == k { 1.0 } else { 0.0 };
                    if vv < 1e-30 {
                        id
                    } else {
                        id - 2.0 * v[j] * v[k] / vv
                    }
                })
                .collect()
        })
        .collect()
}

/// Zonal polynomials `Z_ℓ(ω·η_j)` for `ℓ` in a degree range and a fixed set
/// of axes, normalized to `Z_ℓ(1) = 1`.
#[derive(Debug, Clone)]
pub struct ZonalBasis {
    dim: usize,
    min_degree: usize,
    max_degree: usize,
    axes: Vec<Vec<f64>>,
    at_one: Vec<f64>,
}

impl ZonalBasis {
    pub fn new(
        dim: usize,
        min_degree: usize,
        max_degree: usize,
        axes: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if dim < 2 || min_degree > max_degree || axes.is_empty() {
            return Err(Error::Parameter(
                "zonal basis needs N >= 2, a degree range and axes".into(),
            ));
        }
        if axes.iter().any(|a| a.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: axes.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(dim),
            });
        }
        let mut at_one = vec![0.0; max_degree + 1];
        raw_zonal(dim, 1.0, &mut at_one);
        Ok(Self {
            dim,
            min_degree,
            max_degree,
            axes,
            at_one,
        })
    }

    /// Random unit axes drawn from `rng`.
    pub fn random(
        dim: usize,
        min_degree: usize,
        max_degree: usize,
        axes: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let axes = (0..axes)
            .map(|_| loop {
                let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-8 {
                    break v.into_iter().map(|x| x / n).collect();
                }
            })
            .collect();
        Self::new(dim, min_degree, max_degree, axes)
    }

    pub fn len(&self) -> usize {
        self.axes.len() * (self.max_degree - self.min_degree + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All basis values at `omega`, axis-major.
    pub fn values(&self, omega: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.len());
        let mut buf = vec![0.0; self.max_degree + 1];
        let per_axis = self.max_degree - self.min_degree + 1;
        for (j, axis) in self.axes.iter().enumerate() {
            let t: f64 = axis.iter().zip(omega).map(|(a, b)| a * b).sum();
            raw_zonal(self.dim, t.clamp(-1.0, 1.0), &mut buf);
            for l in self.min_degree..=self.max_degree {
                out[j * per_axis + l - self.min_degree] = buf[l] / self.at_one[l];
            }
        }
        out
    }

    /// `Σ_k c_k b_k(ω)`.
    pub fn field<'a>(&'a self, coefficients: &'a [f64]) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
        move |omega| {
            self.values(omega)
                .iter()
                .zip(coefficients)
                .map(|(b, c)| b * c)
                .sum()
        }
    }
}

/// Gegenbauer `C_ℓ^{(N-2)/2}(t)` for all `ℓ < out.len()`; Chebyshev `T_ℓ` for `N = 2`.
fn raw_zonal(dim: usize, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    let alpha = 0.5 * (dim as f64 - 2.0);
    if dim == 2 {
        out[1] = t;
        for n in 1..out.len() - 1 {
            out[n + 1] = 2.0 * t * out[n] - out[n - 1];
        }
    } else {
        out[1] = 2.0 * alpha * t;
        for n in 1..out.len() - 1 {
            let nf = n as f64;
            out[n + 1] = (2.0 * t * (nf + alpha) * out[n] - (nf + 2.0 * alpha - 1.0) * out[n - 1])
                / (nf + 1.0);
        }
    }
}

/// `max 𝓠[F]/‖F‖²` over the span is the top generalized eigenvalue of
/// `(Q, W)`; returned for diagnostics.
pub fn rayleigh_ratio(q: &DMatrix<f64>, w: &DMatrix<f64>, c: &[f64]) -> f64 {
    let c = DVector::from_column_slice(c);
    (c.transpose() * q * &c)[(0, 0)] / (c.transpose() * w * &c)[(0, 0)]
}

/// `∫_0^{ψ_max} sin^{N-2}ψ dψ · |S^{N-2}|`, the cap area, for checks.
pub fn cap_area(params: &SpectralParams) -> f64 {
    let psi_max = (1.0 - params.a).acos();
    let rule = gauss_legendre(32);
    composite_gauss(&rule, 0.0, psi_max, 4, |p| {
        p.sin().powi(params.dim as i32 - 2)
    }) * crate::special::sphere_area(params.dim - 1)
}
