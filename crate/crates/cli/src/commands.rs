use serde::Serialize;

use riesz_core::constants::{assemble, certify_inputs};
use riesz_core::spectral::{eigenvalue_closed_form, gap_constant, SpectralParams};
use riesz_core::{
    audit_ball, audit_corpus, build_ledger, ledger_sweep, AuditConfig, AuditSummary, BallPair,
    ConstantLedger, LedgerConfig, PhiScanConfig,
};

use crate::args::{ConstantArgs, Format, PhiArgs, RhoSource, SpectrumArgs, VerifyArgs};
use crate::report::{Report, Sink};
use crate::CliError;

fn no_table(out: &Sink, command: &str) -> Result<(), CliError> {
    if out.format == Format::Table {
        return Err(CliError::Config(format!(
            "`--format table` is only available for `constant`, not `{command}`"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct PhiRow {
    r: f64,
    phi: f64,
    /// One-sided (`r → 0⁺`) at `r = 0`.
    dphi: f64,
}

#[derive(Debug, Serialize)]
struct PhiResult {
    delta: f64,
    kappa: f64,
    gamma: f64,
    certificate: riesz_core::PhiBoundCertificate,
    recheck_points: usize,
    rows: Vec<PhiRow>,
}

pub fn phi(args: &PhiArgs, out: &Sink) -> Result<(), CliError> {
    no_table(out, "phi")?;
    if args.points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let pair = match args.delta {
        Some(d) => BallPair::new(args.dim, args.radius_e, args.radius_b, d)?,
        None => BallPair::with_implied_delta(args.dim, args.radius_e, args.radius_b)?,
    };
    let scan = PhiScanConfig {
        scan_points: args.scan_points,
        ..PhiScanConfig::default()
    };
    let certificate = pair.certify_phi_bounds(&scan)?;
    let upper = (args.radius_e + args.radius_b).max(1.5 * args.radius_e);
    let step = upper / (args.points - 1) as f64;
    let rows = (0..args.points)
        .map(|i| {
            let r = i as f64 * step;
            let dphi = pair.phi_derivative(r.max(f64::MIN_POSITIVE))?;
            Ok(PhiRow {
                r,
                phi: pair.phi(r),
                dphi,
            })
        })
        .collect::<Result<Vec<_>, riesz_core::Error>>()?;
    let recheck_points = 4 * args.points;
    if let Some(r) = certificate.first_violation(&pair, recheck_points) {
        return Err(CliError::Certification(format!("φ bounds fail at r = {r}")));
    }
    if out.format == Format::Csv {
        return out.csv("phi", &rows);
    }
    let result = PhiResult {
        delta: pair.delta(),
        kappa: pair.kappa(),
        gamma: pair.gamma_constant(),
        certificate,
        recheck_points,
        rows,
    };
    out.json("phi", &Report::new("phi", args, scan, result))
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    ell: usize,
    multiplicity: u64,
    lambda: f64,
    /// `λ_ℓ / λ_1`.
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct SpectrumResult {
    gap_a: f64,
    argmax_ell: usize,
    max_ratio: f64,
    cutoff_n0: f64,
    hs_total: f64,
    hs_partial: f64,
    hs_relative_residual: f64,
    certified_through: usize,
    ranks_checked: usize,
    rows: Vec<SpectrumRow>,
}

#[derive(Debug, Serialize)]
struct SpectrumTolerances {
    /// `A` must lie strictly below this.
    gap_bound: f64,
}

pub fn spectrum(args: &SpectrumArgs, out: &Sink) -> Result<(), CliError> {
    no_table(out, "spectrum")?;
    if args.lmax < 2 {
        return Err(CliError::Config("--lmax must be at least 2".into()));
    }
    let params = SpectralParams::new(args.dim, args.a, args.lmax)?;
    let spec = gap_constant(&params)?;
    let lambda1 = eigenvalue_closed_form(&params, 1);
    let rows: Vec<SpectrumRow> = (0..=args.lmax)
        .map(|ell| SpectrumRow {
            ell,
            multiplicity: spec.multiplicities[ell],
            lambda: spec.lambdas[ell],
            ratio: spec.lambdas[ell] / lambda1,
        })
        .collect();
    if !(spec.gap_a < 0.5) {
        return Err(CliError::Certification(format!(
            "A = {} is not below 1/2",
            spec.gap_a
        )));
    }
    if out.format == Format::Csv {
        return out.csv("spectrum", &rows);
    }
    let result = SpectrumResult {
        gap_a: spec.gap_a,
        argmax_ell: spec.argmax_ell,
        max_ratio: spec.max_ratio,
        cutoff_n0: spec.cutoff_n0,
        hs_total: spec.hs_total,
        hs_partial: spec.hs_partial,
        hs_relative_residual: spec.hs_relative_residual(),
        certified_through: spec.certified_through,
        ranks_checked: spec.ranks_checked,
        rows,
    };
    out.json(
        "spectrum",
        &Report::new(
            "spectrum",
            args,
            SpectrumTolerances { gap_bound: 0.5 },
            result,
        ),
    )
}

#[derive(Debug, Serialize)]
struct LedgerRow<'a> {
    key: &'a str,
    symbol: &'a str,
    value: f64,
    rounding: riesz_core::constants::Rounding,
    formula: &'a str,
    source: &'a str,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    dim: usize,
    delta: f64,
    c_final: f64,
}

fn single_ledger(
    dim: usize,
    delta: f64,
    skip: Option<&str>,
    cfg: &LedgerConfig,
) -> Result<ConstantLedger, CliError> {
    let Some(key) = skip else {
        return Ok(build_ledger(dim, delta, cfg)?);
    };
    let mut b = certify_inputs(dim, delta, cfg)?;
    b.remove(key);
    assemble(&mut b)?;
    b.remove(key);
    Ok(b.finish()?)
}

pub fn constant(args: &ConstantArgs, out: &Sink) -> Result<(), CliError> {
    let cfg = LedgerConfig::default();
    if !args.dims.is_empty() {
        let ledgers = ledger_sweep(&args.dims, &args.deltas, &cfg)
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        return match out.format {
            Format::Csv => {
                let rows: Vec<SweepRow> = ledgers
                    .iter()
                    .map(|l| SweepRow {
                        dim: l.dim,
                        delta: l.delta,
                        c_final: l.c_final,
                    })
                    .collect();
                out.csv("constant", &rows)
            }
            Format::Table => {
                let text: String = ledgers.iter().map(|l| l.to_table() + "\n").collect();
                out.text("constant", &text)
            }
            Format::Json => out.json("constant", &Report::new("constant", args, cfg, ledgers)),
        };
    }
    let (Some(dim), Some(delta)) = (args.dim, args.delta) else {
        return Err(CliError::Config(
            "give --dim and --delta, or --dims and --deltas".into(),
        ));
    };
    let ledger = single_ledger(dim, delta, args.skip.as_deref(), &cfg)?;
    match out.format {
        Format::Csv => {
            let rows: Vec<LedgerRow> = ledger
                .entries
                .iter()
                .map(|e| LedgerRow {
                    key: &e.key,
                    symbol: &e.symbol,
                    value: e.value,
                    rounding: e.rounding,
                    formula: &e.formula,
                    source: &e.source,
                })
                .collect();
            out.csv("constant", &rows)
        }
        Format::Table => out.text("constant", &ledger.to_table()),
        Format::Json => out.json("constant", &Report::new("constant", args, cfg, ledger)),
    }
}

#[derive(Debug, Serialize)]
struct VerifyTolerances {
    shape_quadrature: riesz_core::ShapeQuadrature,
    asymmetry: riesz_core::density::AsymmetryConfig,
    asymmetry_order: usize,
    ratio_floor: f64,
    oracle_sigmas: f64,
    ledger: LedgerConfig,
}

#[derive(Debug, Serialize)]
struct VerifyResult {
    /// `not_applicable` when no entry has a resolvable `A > 0`.
    ratio_status: &'static str,
    summary: AuditSummary,
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    index: usize,
    family: riesz_core::Family,
    kappa: f64,
    mass: f64,
    deficit: f64,
    epsilon_quad: f64,
    asymmetry: f64,
    ratio: String,
    margin: f64,
    mc_value: Option<f64>,
    mc_std_error: Option<f64>,
}

pub fn verify(args: &VerifyArgs, out: &Sink) -> Result<(), CliError> {
    no_table(out, "verify")?;
    let ledger_cfg = LedgerConfig::default();
    let mut cfg = AuditConfig::new(args.dim, args.delta, args.count, args.seed);
    if !args.kappas.is_empty() {
        cfg.kappas = args.kappas.clone();
    }
    if args.oracle {
        cfg.oracle_samples = Some(args.oracle_samples);
    }
    // Admissibility is checked before the (slower) ledger is built.
    for &k in &cfg.kappas {
        BallPair::unit(args.dim, k, args.delta)?;
    }
    let ledger = build_ledger(args.dim, args.delta, &ledger_cfg)?;
    let summary = match args.rho {
        RhoSource::Corpus => audit_corpus(&cfg, ledger.c_final)?,
        RhoSource::Ball => audit_ball(&cfg, ledger.c_final)?,
    };
    let passed = summary.passed();
    let failure = format!(
        "{} stability violations, {} Riesz violations, {} oracle disagreements",
        summary.stability_violations.len(),
        summary.riesz_violations.len(),
        summary.oracle_disagreements.len()
    );
    if out.format == Format::Csv {
        let rows: Vec<VerifyRow> = summary
            .records
            .iter()
            .map(|r| VerifyRow {
                index: r.index,
                family: r.family,
                kappa: r.kappa,
                mass: r.mass,
                deficit: r.deficit,
                epsilon_quad: r.epsilon_quad,
                asymmetry: r.asymmetry,
                ratio: r.ratio.map_or_else(|| "n/a".to_string(), |v| v.to_string()),
                margin: r.margin,
                mc_value: r.oracle.map(|o| o.estimate.value),
                mc_std_error: r.oracle.map(|o| o.estimate.std_error),
            })
            .collect();
        out.csv("verify", &rows)?;
    } else {
        let tolerances = VerifyTolerances {
            shape_quadrature: cfg.quadrature,
            asymmetry: cfg.asymmetry,
            asymmetry_order: cfg.asymmetry_order,
            ratio_floor: cfg.ratio_floor,
            oracle_sigmas: 3.0,
            ledger: ledger_cfg,
        };
        let result = VerifyResult {
            ratio_status: if summary.min_ratio.is_some() {
                "reported"
            } else {
                "not_applicable"
            },
            summary,
        };
        out.json("verify", &Report::new("verify", args, tolerances, result))?;
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Certification(failure))
    }
}
