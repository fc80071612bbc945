//! Densities `0 ≤ ρ ≤ 1` in a ray model.
//!
//! A density is stored along the directions of a [`DirectionSet`]: each ray
//! carries its own increasing radial breakpoints `0 = e_0 < … < e_m` and a
//! value per cell, and vanishes beyond `e_m`. Integrals along a ray are exact
//! (cell volumes `(e_{j+1}^N - e_j^N)/N`); the angular direction is handled
//! by the quadrature weights. Indicator sets whose ray sections are unions
//! of intervals are therefore represented without radial error.

mod analytic;
mod functionals;
mod serial;
mod shape;

pub use analytic::{
    shape_asymmetry, shape_deficit, shape_interaction, DeficitEvaluator, ShapeQuadrature,
};
pub use functionals::{
    asymmetry, check_shell_condition, check_shell_condition_about, deficit, interaction,
    interaction_ball_ball, self_interaction, shell_profiles, AsymmetryConfig, AsymmetryResult,
    QuadratureConfig, ShellProfiles,
};
pub use serial::{DensityFile, FORMAT_VERSION};
pub use shape::{
    annulus, make_ball_density, perturbed_ball, soft_bump_mixture, translated_ball, two_ball_union,
    Bump, Shape, ShapeKind,
};

use crate::error::{Error, Result};
use crate::sphere::DirectionSet;

/// One ray of a radial field.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    edges: Vec<f64>,
    values: Vec<f64>,
    /// `prefix[j] = ∫_0^{e_j} v r^{N-1} dr`.
    prefix: Vec<f64>,
}

impl Ray {
    fn new(dim: usize, edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 {
            return Err(Error::Format(format!(
                "ray has {} edges for {} cells",
                edges.len(),
                values.len()
            )));
        }
        if edges[0] != 0.0 {
            return Err(Error::Format("ray edges must start at 0".into()));
        }
        if edges
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::Format(
                "ray edges must be finite and strictly increasing".into(),
            ));
        }
        let n = dim as i32;
        let mut prefix = Vec::with_capacity(edges.len());
        prefix.push(0.0);
        let mut acc = 0.0;
        for (j, v) in values.iter().enumerate() {
            acc += v * (edges[j + 1].powi(n) - edges[j].powi(n)) / dim as f64;
            prefix.push(acc);
        }
        Ok(Self {
            edges,
            values,
            prefix,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn outer_radius(&self) -> f64 {
        *self.edges.last().expect("edges are non-empty")
    }

    /// Value at radius `r` (zero beyond the last edge).
    pub fn value_at(&self, r: f64) -> f64 {
        if r < 0.0 || r >= self.outer_radius() {
            return 0.0;
        }
        let j = self.edges.partition_point(|&e| e <= r) - 1;
        self.values[j]
    }

    /// `∫_0^s v(r) r^{N-1} dr`.
    fn cumulative(&self, dim: usize, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let m = self.values.len();
        if s >= self.edges[m] {
            return self.prefix[m];
        }
        let j = self.edges.partition_point(|&e| e <= s) - 1;
        let n = dim as i32;
        self.prefix[j] + self.values[j] * (s.powi(n) - self.edges[j].powi(n)) / dim as f64
    }

    /// Cells as `(lo, hi, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.edges
            .windows(2)
            .zip(&self.values)
            .map(|(e, &v)| (e[0], e[1], v))
    }
}

/// A signed ray-model field; [`Density`] adds the `[0, 1]` range and
/// positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct RayField {
    directions: DirectionSet,
    rays: Vec<Ray>,
}

impl RayField {
    pub fn new(directions: DirectionSet, rays: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if rays.len() != directions.len() {
            return Err(Error::Format(format!(
                "{} rays for {} directions",
                rays.len(),
                directions.len()
            )));
        }
        let dim = directions.dim();
        let rays = rays
            .into_iter()
            .map(|(e, v)| Ray::new(dim, e, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { directions, rays })
    }

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &Ray {
        &self.rays[i]
    }

    /// `∫_{lo}^{hi} v(r ω_i) r^{N-1} dr`.
    pub fn ray_integral(&self, i: usize, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let dim = self.dim();
        self.rays[i].cumulative(dim, hi) - self.rays[i].cumulative(dim, lo)
    }

    /// `∫ v dx`.
    pub fn integral(&self) -> f64 {
        self.rays
            .iter()
            .zip(self.directions.weights())
            .map(|(ray, w)| w * ray.prefix[ray.values.len()])
            .sum()
    }

    /// `∫ |v| dx`.
    pub fn l1_norm(&self) -> f64 {
        let n = self.dim() as i32;
        self.rays
            .iter()
            .zip(self.directions.weights())
            .map(|(ray, w)| {
                w * ray
                    .cells()
                    .map(|(lo, hi, v)| v.abs() * (hi.powi(n) - lo.powi(n)))
                    .sum::<f64>()
                    / n as f64
            })
            .sum()
    }

    /// `∫ x v dx`.
    pub fn first_moment(&self) -> Vec<f64> {
        let dim = self.dim();
        let n1 = dim as i32 + 1;
        let mut out = vec![0.0; dim];
        for (i, ray) in self.rays.iter().enumerate() {
            let radial: f64 = ray
                .cells()
                .map(|(lo, hi, v)| v * (hi.powi(n1) - lo.powi(n1)))
                .sum::<f64>()
                / n1 as f64;
            let w = self.directions.weight(i);
            for (o, c) in out.iter_mut().zip(self.directions.direction(i)) {
                *o += w * c * radial;
            }
        }
        out
    }

    /// Pointwise difference `self - other` on a shared direction set;
    /// breakpoints are merged per ray.
    pub fn difference(&self, other: &RayField) -> Result<RayField> {
        if self.directions != other.directions {
            return Err(Error::Parameter(
                "field difference needs identical direction sets".into(),
            ));
        }
        let rays = self
            .rays
            .iter()
            .zip(&other.rays)
            .map(|(a, b)| {
                let mut edges: Vec<f64> = a.edges.iter().chain(&b.edges).copied().collect();
                edges.sort_by(f64::total_cmp);
                edges.dedup();
                let values = edges
                    .windows(2)
                    .map(|e| {
                        let mid = 0.5 * (e[0] + e[1]);
                        a.value_at(mid) - b.value_at(mid)
                    })
                    .collect();
                (edges, values)
            })
            .collect();
        RayField::new(self.directions.clone(), rays)
    }

    /// The indicator of the centered ball of radius `radius` on these rays.
    pub fn ball(directions: &DirectionSet, radius: f64) -> Result<RayField> {
        let rays = (0..directions.len())
            .map(|_| (vec![0.0, radius], vec![1.0]))
            .collect();
        RayField::new(directions.clone(), rays)
    }
}

/// A density `0 ≤ ρ ≤ 1` with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    field: RayField,
    mass: f64,
}

impl Density {
    pub fn new(directions: DirectionSet, rays: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        Self::from_field(RayField::new(directions, rays)?)
    }

    pub fn from_field(field: RayField) -> Result<Self> {
        for (i, ray) in field.rays.iter().enumerate() {
            if let Some(v) = ray.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Parameter(format!(
                    "density value {v} on ray {i} lies outside [0, 1]"
                )));
            }
        }
        let mass = field.integral();
        if !(mass > 0.0) {
            return Err(Error::Parameter("density has no mass".into()));
        }
        Ok(Self { field, mass })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn field(&self) -> &RayField {
        &self.field
    }

    pub fn directions(&self) -> &DirectionSet {
        self.field.directions()
    }

    /// Centroid `∫ x ρ / ∫ ρ`.
    pub fn centroid(&self) -> Vec<f64> {
        self.field
            .first_moment()
            .into_iter()
            .map(|m| m / self.mass)
            .collect()
    }

    /// `ρ(x / s)`: radial dilation by `s > 0`.
    pub fn dilated(&self, s: f64) -> Result<Density> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Parameter(format!(
                "dilation factor {s} must be positive"
            )));
        }
        let rays = self
            .field
            .rays
            .iter()
            .map(|r| (r.edges.iter().map(|e| e * s).collect(), r.values.clone()))
            .collect();
        Density::new(self.field.directions.clone(), rays)
    }

    /// Dilation factor that brings the mass to `target`, and the dilated
    /// density.
    pub fn with_mass(&self, target: f64) -> Result<(f64, Density)> {
        let s = (target / self.mass).powf(1.0 / self.dim() as f64);
        Ok((s, self.dilated(s)?))
    }

    /// `‖ρ - 1_{E*}‖₁` with `E*` the centered ball of radius `radius`.
    pub fn distance_to_ball(&self, radius: f64) -> Result<f64> {
        let ball = RayField::ball(self.directions(), radius)?;
        Ok(self.field.difference(&ball)?.l1_norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::unit_ball_volume;
    use approx::assert_relative_eq;

    #[test]
    fn ball_mass_is_exact() {
        for dim in 1..=4 {
            let dirs = DirectionSet::gauss_product(dim, 3).unwrap();
            let rho = Density::from_field(RayField::ball(&dirs, 1.3).unwrap()).unwrap();
            assert_relative_eq!(
                rho.mass(),
                unit_ball_volume(dim) * 1.3f64.powi(dim as i32),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn rejects_out_of_range_values() {
        let dirs = DirectionSet::gauss_product(2, 2).unwrap();
        let rays = (0..dirs.len())
            .map(|_| (vec![0.0, 1.0], vec![1.5]))
            .collect();
        assert!(matches!(
            Density::new(dirs.clone(), rays),
            Err(Error::Parameter(_))
        ));
        let rays = (0..dirs.len())
            .map(|_| (vec![0.0, 1.0], vec![0.0]))
            .collect();
        assert!(Density::new(dirs, rays).is_err());
    }

    #[test]
    fn ray_integral_splits_cells() {
        let dirs = DirectionSet::gauss_product(3, 1).unwrap();
        let rays = (0..dirs.len())
            .map(|_| (vec![0.0, 1.0, 2.0], vec![1.0, 0.5]))
            .collect();
        let f = RayField::new(dirs, rays).unwrap();
        // ∫_{0.5}^{1.5}: (1 - 1/8)/3 + 0.5 (3.375 - 1)/3
        let expected = (1.0 - 0.125) / 3.0 + 0.5 * (3.375 - 1.0) / 3.0;
        assert_relative_eq!(f.ray_integral(0, 0.5, 1.5), expected, max_relative = 1e-14);
        assert_eq!(f.ray_integral(0, 3.0, 4.0), 0.0);
    }

    #[test]
    fn dilation_rescales_mass() {
        let dirs = DirectionSet::gauss_product(2, 4).unwrap();
        let rho = Density::from_field(RayField::ball(&dirs, 1.0).unwrap()).unwrap();
        let (s, big) = rho.with_mass(2.0 * rho.mass()).unwrap();
        assert_relative_eq!(s, 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(big.mass(), 2.0 * rho.mass(), max_relative = 1e-14);
    }
}
