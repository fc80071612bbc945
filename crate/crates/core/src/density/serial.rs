//! JSON container and flat binary payload for densities.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::Density;
use crate::error::{Error, Result};
use crate::sphere::DirectionSet;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"RZD1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayRecord {
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
}

/// Self-describing density container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub format_version: u32,
    pub dim: usize,
    /// Row-major `len × dim` unit vectors.
    pub directions: Vec<f64>,
    pub weights: Vec<f64>,
    pub rays: Vec<RayRecord>,
    pub mass: f64,
}

impl From<&Density> for DensityFile {
    fn from(d: &Density) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dim: d.dim(),
            directions: d.directions().points().to_vec(),
            weights: d.directions().weights().to_vec(),
            rays: d
                .field()
                .rays()
                .iter()
                .map(|r| RayRecord {
                    edges: r.edges().to_vec(),
                    values: r.values().to_vec(),
                })
                .collect(),
            mass: d.mass(),
        }
    }
}

impl DensityFile {
    pub fn into_density(self) -> Result<Density> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported density format version {}",
                self.format_version
            )));
        }
        let dirs = DirectionSet::from_parts(self.dim, self.directions, self.weights)?;
        let rays = self.rays.into_iter().map(|r| (r.edges, r.values)).collect();
        let density = Density::new(dirs, rays)?;
        let rel = (density.mass() - self.mass).abs() / self.mass.abs().max(f64::MIN_POSITIVE);
        if rel > 1e-12 {
            return Err(Error::Format(format!(
                "stored mass {} disagrees with recomputed mass {}",
                self.mass,
                density.mass()
            )));
        }
        Ok(density)
    }
}

impl Density {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DensityFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Density> {
        serde_json::from_str::<DensityFile>(text)?.into_density()
    }

    /// Little-endian layout: magic, version, dim, direction count, then per
    /// direction the vector and weight, then per ray the cell count, edges
    /// and values.
    pub fn write_binary(&self, mut out: impl Write) -> Result<()> {
        let file = DensityFile::from(self);
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(file.dim as u64).to_le_bytes())?;
        out.write_all(&(file.weights.len() as u64).to_le_bytes())?;
        for (i, w) in file.weights.iter().enumerate() {
            for c in &file.directions[i * file.dim..(i + 1) * file.dim] {
                out.write_all(&c.to_le_bytes())?;
            }
            out.write_all(&w.to_le_bytes())?;
        }
        for ray in &file.rays {
            out.write_all(&(ray.values.len() as u64).to_le_bytes())?;
            for x in ray.edges.iter().chain(&ray.values) {
                out.write_all(&x.to_le_bytes())?;
            }
        }
        out.write_all(&file.mass.to_le_bytes())?;
        Ok(())
    }

    pub fn read_binary(mut input: impl Read) -> Result<Density> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a density payload".into()));
        }
        let mut b4 = [0u8; 4];
        input.read_exact(&mut b4)?;
        let format_version = u32::from_le_bytes(b4);
        let read_u64 = |input: &mut dyn Read| -> Result<u64> {
            let mut b = [0u8; 8];
            input.read_exact(&mut b)?;
            Ok(u64::from_le_bytes(b))
        };
        let dim = read_u64(&mut input)? as usize;
        let count = read_u64(&mut input)? as usize;
        if dim == 0 || dim > 64 || count > 1 << 26 {
            return Err(Error::Format("implausible density header".into()));
        }
        let read_f64 = |input: &mut dyn Read| -> Result<f64> {
            let mut b = [0u8; 8];
            input.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let mut directions = Vec::with_capacity(count * dim);
        let mut weights = Vec::with_capacity(count);
        for _ in 0..count {
            for _ in 0..dim {
                directions.push(read_f64(&mut input)?);
            }
            weights.push(read_f64(&mut input)?);
        }
        let mut rays = Vec::with_capacity(count);
        for _ in 0..count {
            let cells = read_u64(&mut input)? as usize;
            if cells > 1 << 24 {
                return Err(Error::Format("implausible cell count".into()));
            }
            let edges = (0..=cells)
                .map(|_| read_f64(&mut input))
                .collect::<Result<Vec<_>>>()?;
            let values = (0..cells)
                .map(|_| read_f64(&mut input))
                .collect::<Result<Vec<_>>>()?;
            rays.push(RayRecord { edges, values });
        }
        let mass = read_f64(&mut input)?;
        DensityFile {
            format_version,
            dim,
            directions,
            weights,
            rays,
            mass,
        }
        .into_density()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::perturbed_ball;

    fn sample() -> Density {
        let dirs = DirectionSet::gauss_product(3, 3).unwrap();
        perturbed_ball(1.0, 3, 0.1, &[0.0, 0.6, 0.8])
            .unwrap()
            .discretize(&dirs, 4)
            .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let d = sample();
        let back = Density::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn binary_round_trip() {
        let d = sample();
        let mut buf = Vec::new();
        d.write_binary(&mut buf).unwrap();
        assert_eq!(Density::read_binary(buf.as_slice()).unwrap(), d);
        buf[0] = b'X';
        assert!(Density::read_binary(buf.as_slice()).is_err());
    }

    #[test]
    fn version_is_checked() {
        let mut f = DensityFile::from(&sample());
        f.format_version = 99;
        assert!(matches!(f.into_density(), Err(Error::Format(_))));
    }
}
