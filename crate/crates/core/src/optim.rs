//! Nelder–Mead simplex minimization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    pub initial_step: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
    /// ... and the spread of values falls below this.
    pub f_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            x_tol: 1e-10,
            f_tol: 1e-14,
            max_evaluations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Standard coefficients (1, 2, 1/2, 1/2) on an axis-aligned start simplex.
/// After convergence the search restarts from the best point with a fresh
/// simplex until a restart no longer improves, which unsticks collapsed
/// simplices on non-smooth objectives.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    cfg: &NelderMeadConfig,
) -> NelderMeadResult {
    let mut out = simplex_search(&f, start, cfg, cfg.max_evaluations);
    let mut step = cfg.initial_step;
    for _ in 0..8 {
        let left = cfg.max_evaluations.saturating_sub(out.evaluations);
        if !out.converged || left == 0 {
            break;
        }
        step *= 0.5;
        let local = NelderMeadConfig {
            initial_step: step.max(10.0 * cfg.x_tol),
            ..*cfg
        };
        let next = simplex_search(&f, &out.point, &local, left);
        let improved = next.value < out.value - cfg.f_tol;
        let evaluations = out.evaluations + next.evaluations;
        if next.value <= out.value {
            out = NelderMeadResult {
                evaluations,
                ..next
            };
        } else {
            out.evaluations = evaluations;
        }
        if !improved {
            break;
        }
    }
    out
}

fn simplex_search(
    f: &impl Fn(&[f64]) -> f64,
    start: &[f64],
    cfg: &NelderMeadConfig,
    budget: usize,
) -> NelderMeadResult {
    let n = start.len();
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(start);
    simplex.push((start.to_vec(), v0));
    for k in 0..n {
        let mut x = start.to_vec();
        x[k] += cfg.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&best.0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if diameter <= cfg.x_tol && spread <= cfg.f_tol {
            converged = true;
            break;
        }
        if evaluations.get() >= budget {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let x = along(-0.5);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x);
            (x, v)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            let v = eval(&x);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    NelderMeadResult {
        point,
        value,
        evaluations: evaluations.get(),
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let cfg = NelderMeadConfig {
            max_evaluations: 10_000,
            ..Default::default()
        };
        let out = nelder_mead(f, &[-1.2, 1.0], &cfg);
        assert!(out.converged);
        assert!((out.point[0] - 1.0).abs() < 1e-6 && (out.point[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nonsmooth_l1_bowl() {
        let f = |x: &[f64]| (x[0] - 0.3).abs() + 2.0 * (x[1] + 0.1).abs() + (x[2]).abs();
        let out = nelder_mead(f, &[1.0, 1.0, 1.0], &NelderMeadConfig::default());
        assert!(out.value < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let cfg = NelderMeadConfig {
            max_evaluations: 5,
            ..Default::default()
        };
        assert!(!nelder_mead(f, &[3.0, 3.0], &cfg).converged);
    }
}
