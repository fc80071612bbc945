//! Corpus audit of the stability inequality `𝓓[ρ] + ε_quad ≥ c ‖ρ‖₁² A[ρ]²`.
//!
//! Deficits and asymmetries are both evaluated on the analytic shape of
//! each corpus entry. Entry `k` is evaluated against the kernel
//! radius `kappas[k % kappas.len()]`, with `R = 1`.

use serde::{Deserialize, Serialize};

use crate::corpus::{corpus_shape, CorpusConfig, Family};
use crate::density::{shape_asymmetry, AsymmetryConfig, DeficitEvaluator, ShapeQuadrature};
use crate::error::{Error, Result};
use crate::geometry::BallPair;
use crate::oracles::{mc_interaction, OracleEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub dim: usize,
    pub delta: f64,
    pub corpus: CorpusConfig,
    /// Values of `R̃/(2R)`; each must lie in `[δ, 1-δ]`.
    pub kappas: Vec<f64>,
    /// Product-rule order of the rays cast from a trial center in `A`.
    pub asymmetry_order: usize,
    pub quadrature: ShapeQuadrature,
    pub asymmetry: AsymmetryConfig,
    /// Ratios are reported only when `‖ρ‖₁² A² ≥ ratio_floor · ε_quad`, so
    /// that quadrature noise in `𝓓` cannot dominate them.
    pub ratio_floor: f64,
    /// Monte Carlo samples per density for the interaction cross-check.
    pub oracle_samples: Option<u64>,
}

impl AuditConfig {
    pub fn new(dim: usize, delta: f64, count: usize, seed: u64) -> Self {
        let asymmetry_order = match dim {
            2 => 32,
            3 => 8,
            _ => 6,
        };
        Self {
            dim,
            delta,
            corpus: CorpusConfig::new(count, seed),
            kappas: vec![delta, 0.5, 1.0 - delta],
            asymmetry_order,
            quadrature: ShapeQuadrature::for_dim(dim),
            asymmetry: AsymmetryConfig {
                random_starts: 2,
                max_evaluations: 600,
                ..AsymmetryConfig::default()
            },
            ratio_floor: 10.0,
            oracle_samples: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub quadrature: f64,
    pub estimate: OracleEstimate,
    /// `|MC - quadrature| ≤ 3σ + ε_quad`.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub index: usize,
    pub family: Family,
    pub kappa: f64,
    pub mass: f64,
    pub deficit: f64,
    pub epsilon_quad: f64,
    pub asymmetry: f64,
    /// `𝓓 / (‖ρ‖₁² A²)`, absent below the ratio floor (always for `A = 0`).
    pub ratio: Option<f64>,
    /// `𝓓 + ε_quad - c ‖ρ‖₁² A²`.
    pub margin: f64,
    pub oracle: Option<OracleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub dim: usize,
    pub delta: f64,
    pub c_final: f64,
    pub count: usize,
    /// Smallest `𝓓 / ε_quad`.
    pub min_deficit_over_epsilon: f64,
    pub min_ratio: Option<f64>,
    pub min_ratio_index: Option<usize>,
    /// Entries with `𝓓 + ε_quad < c ‖ρ‖₁² A²`.
    pub stability_violations: Vec<usize>,
    /// Entries with `𝓓 < -ε_quad`.
    pub riesz_violations: Vec<usize>,
    pub oracle_disagreements: Vec<usize>,
    pub records: Vec<AuditRecord>,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.stability_violations.is_empty()
            && self.riesz_violations.is_empty()
            && self.oracle_disagreements.is_empty()
    }

    fn from_records(cfg: &AuditConfig, c_final: f64, records: Vec<AuditRecord>) -> Self {
        let mut min_ratio: Option<(usize, f64)> = None;
        for r in &records {
            if let Some(v) = r.ratio {
                if min_ratio.is_none_or(|(_, m)| v < m) {
                    min_ratio = Some((r.index, v));
                }
            }
        }
        let pick = |f: &dyn Fn(&AuditRecord) -> bool| {
            records.iter().filter(|r| f(r)).map(|r| r.index).collect()
        };
        Self {
            dim: cfg.dim,
            delta: cfg.delta,
            c_final,
            count: records.len(),
            min_deficit_over_epsilon: records
                .iter()
                .map(|r| r.deficit / r.epsilon_quad)
                .fold(f64::INFINITY, f64::min),
            min_ratio: min_ratio.map(|(_, v)| v),
            min_ratio_index: min_ratio.map(|(i, _)| i),
            stability_violations: pick(&|r| r.margin < 0.0),
            riesz_violations: pick(&|r| r.deficit < -r.epsilon_quad),
            oracle_disagreements: pick(&|r| r.oracle.is_some_and(|o| !o.agrees)),
            records,
        }
    }
}

fn evaluators(cfg: &AuditConfig) -> Result<Vec<(BallPair, DeficitEvaluator)>> {
    if cfg.kappas.is_empty() {
        return Err(Error::Parameter(
            "audit needs at least one kernel radius".into(),
        ));
    }
    cfg.kappas
        .iter()
        .map(|&k| {
            let pair = BallPair::unit(cfg.dim, k, cfg.delta)?;
            Ok((pair, DeficitEvaluator::new(&pair, &cfg.quadrature)?))
        })
        .collect()
}

/// Audits `cfg.corpus.count` generated densities against `c_final`.
pub fn audit_corpus(cfg: &AuditConfig, c_final: f64) -> Result<AuditSummary> {
    let evals = evaluators(cfg)?;
    let mut records = Vec::with_capacity(cfg.corpus.count);
    for index in 0..cfg.corpus.count {
        let (pair, eval) = &evals[index % evals.len()];
        let (family, shape) = corpus_shape(pair, &cfg.corpus, index)?;
        let deficit = eval.deficit(&shape)?;
        let eps = eval.epsilon_quad();
        let a = shape_asymmetry(&shape, cfg.asymmetry_order, &cfg.asymmetry)?.value;
        let mass = pair.volume_e();
        let scale = mass * mass * a * a;
        let oracle = match cfg.oracle_samples {
            Some(n) => {
                let quadrature = eval.ball_value() - deficit;
                let seed = crate::corpus::derive_seed(cfg.corpus.seed ^ 0x0_9ac1e, index as u64);
                let estimate = mc_interaction(&shape, &shape, pair, n, seed)?;
                let agrees = (estimate.value - quadrature).abs() <= 3.0 * estimate.std_error + eps;
                Some(OracleCheck {
                    quadrature,
                    estimate,
                    agrees,
                })
            }
            None => None,
        };
        records.push(AuditRecord {
            index,
            family,
            kappa: pair.kappa(),
            mass,
            deficit,
            epsilon_quad: eps,
            asymmetry: a,
            ratio: (a > 0.0 && scale >= cfg.ratio_floor * eps).then(|| deficit / scale),
            margin: deficit + eps - c_final * scale,
            oracle,
        });
    }
    Ok(AuditSummary::from_records(cfg, c_final, records))
}

/// The audit of `1_{E*}` itself, once per kernel radius.
pub fn audit_ball(cfg: &AuditConfig, c_final: f64) -> Result<AuditSummary> {
    let evals = evaluators(cfg)?;
    let mut records = Vec::with_capacity(evals.len());
    for (index, (pair, eval)) in evals.iter().enumerate() {
        let ball = crate::density::translated_ball(pair.radius_e(), &vec![0.0; cfg.dim])?;
        let deficit = eval.deficit(&ball)?;
        let oracle = match cfg.oracle_samples {
            Some(n) => {
                let seed = crate::corpus::derive_seed(cfg.corpus.seed ^ 0x0_9ac1e, index as u64);
                let estimate = mc_interaction(&ball, &ball, pair, n, seed)?;
                let quadrature = eval.ball_value();
                let agrees = (estimate.value - quadrature).abs()
                    <= 3.0 * estimate.std_error + eval.epsilon_quad();
                Some(OracleCheck {
                    quadrature,
                    estimate,
                    agrees,
                })
            }
            None => None,
        };
        records.push(AuditRecord {
            index,
            family: Family::Translate,
            kappa: pair.kappa(),
            mass: pair.volume_e(),
            deficit,
            epsilon_quad: eval.epsilon_quad(),
            asymmetry: 0.0,
            ratio: None,
            margin: deficit + eval.epsilon_quad(),
            oracle,
        });
    }
    Ok(AuditSummary::from_records(cfg, c_final, records))
}
