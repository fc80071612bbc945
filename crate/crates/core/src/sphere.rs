//! Weighted direction sets on `S^{N-1}`.
//!
//! `N = 1` is the two-point sphere, `N = 2` uses equispaced angles and
//! `N ≥ 3` a recursive product rule: Gauss–Gegenbauer nodes in the polar
//! cosine times a rule on `S^{N-2}`. With `n` polar nodes the product rule
//! integrates every polynomial of degree `≤ 2n - 1` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gauss_gegenbauer, sphere_area};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    dim: usize,
    /// Row-major `len × dim` unit vectors.
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DirectionSet {
    /// Product rule exact for polynomials of degree `2 * order - 1`.
    pub fn gauss_product(dim: usize, order: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("direction sets need N >= 1".into()));
        }
        if order == 0 {
            return Err(Error::Parameter(
                "direction rule order must be positive".into(),
            ));
        }
        let (points, weights) = product_rule(dim, order);
        let mut set = Self {
            dim,
            points,
            weights,
        };
        set.normalize();
        Ok(set)
    }

    /// Builds a set from explicit unit vectors and positive weights, which
    /// must total `|S^{N-1}|` to 1e-10 relative.
    pub fn from_parts(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() != weights.len() * dim || weights.is_empty() {
            return Err(Error::Format(
                "direction table shape does not match weights".into(),
            ));
        }
        for (i, w) in weights.iter().enumerate() {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::Format(format!(
                    "direction weight {i} is not positive"
                )));
            }
            let norm: f64 = points[i * dim..(i + 1) * dim].iter().map(|x| x * x).sum();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::Format(format!("direction {i} is not a unit vector")));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total / sphere_area(dim) - 1.0).abs() > 1e-10 {
            return Err(Error::Format(format!(
                "direction weights total {total}, expected the sphere area"
            )));
        }
        Ok(Self {
            dim,
            points,
            weights,
        })
    }

    fn normalize(&mut self) {
        let total: f64 = self.weights.iter().sum();
        let scale = sphere_area(self.dim) / total;
        for w in &mut self.weights {
            *w *= scale;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    /// `∫_{S^{N-1}} f dω` by the rule.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(w_dir, w)| w * f(w_dir)).sum()
    }
}

fn product_rule(dim: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    match dim {
        1 => (vec![1.0, -1.0], vec![1.0, 1.0]),
        2 => {
            let m = 2 * order;
            let mut pts = Vec::with_capacity(2 * m);
            for k in 0..m {
                // Half-step offset keeps the set symmetric under x ↦ -x.
                let t = std::f64::consts::TAU * (k as f64 + 0.5) / m as f64;
                pts.push(t.cos());
                pts.push(t.sin());
            }
            (pts, vec![std::f64::consts::TAU / m as f64; m])
        }
        _ => {
            // ω = (t, √(1-t²) η), dω = (1-t²)^{(N-3)/2} dt dη.
            let polar = gauss_gegenbauer(order, 0.5 * (dim as f64 - 2.0));
            let (sub_pts, sub_w) = product_rule(dim - 1, order);
            let sub_len = sub_w.len();
            let mut pts = Vec::with_capacity(polar.len() * sub_len * dim);
            let mut wts = Vec::with_capacity(polar.len() * sub_len);
            for (&t, &wt) in polar.nodes.iter().zip(&polar.weights) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for j in 0..sub_len {
                    pts.push(t);
                    for &c in &sub_pts[j * (dim - 1)..(j + 1) * (dim - 1)] {
                        pts.push(s * c);
                    }
                    wts.push(wt * sub_w[j]);
                }
            }
            (pts, wts)
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_sphere_area() {
        for dim in 1..=5 {
            let s = DirectionSet::gauss_product(dim, 4).unwrap();
            let total: f64 = s.weights().iter().sum();
            assert_relative_eq!(total, sphere_area(dim), max_relative = 1e-13);
            for (p, _) in s.iter() {
                assert_relative_eq!(norm(p), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn second_moments_are_isotropic() {
        // ∫ ω_i ω_j dω = δ_ij |S^{N-1}|/N
        for dim in 2..=5 {
            let s = DirectionSet::gauss_product(dim, 3).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    let v = s.integrate(|w| w[i] * w[j]);
                    let expected = if i == j {
                        sphere_area(dim) / dim as f64
                    } else {
                        0.0
                    };
                    assert!((v - expected).abs() < 1e-12, "N={dim} ({i},{j}): {v}");
                }
            }
        }
    }

    #[test]
    fn quartic_moment_in_three_dimensions() {
        // ∫_{S²} x⁴ = 4π/5
        let s = DirectionSet::gauss_product(3, 3).unwrap();
        assert_relative_eq!(
            s.integrate(|w| w[0].powi(4)),
            4.0 * std::f64::consts::PI / 5.0,
            max_relative = 1e-13
        );
    }
}
