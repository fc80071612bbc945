//! Acceptance suite: one PASS/FAIL line per criterion, each with its
//! runtime budget. Exits non-zero if any criterion fails.

use std::fmt::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use riesz_core::constants::REQUIRED_KEYS;
use riesz_core::constructions::{center_from, centering_field, verify_competitor, CenteringConfig};
use riesz_core::corpus::generate;
use riesz_core::density::check_shell_condition;
use riesz_core::hessian::{rayleigh_ratio, HessianForm, ZonalBasis};
use riesz_core::oracles::{funk_hecke_direct, mc_intersection_volume};
use riesz_core::special::unit_ball_volume;
use riesz_core::spectral::{eigenvalue_closed_form, hilbert_schmidt_partial};
use riesz_core::{
    audit_corpus, center, competitor, gap_constant, ledger_sweep, AuditConfig, BallPair,
    CorpusConfig, DirectionSet, LedgerConfig, SpectralParams,
};

const DIMS: [usize; 5] = [2, 3, 4, 5, 6];
const A_VALUES: [f64; 5] = [0.1, 0.5, 1.0, 1.5, 1.9];
const ELL_MAX: usize = 50;

const SPECTRAL_REL_TOL: f64 = 1e-10;
const GAMMA_REL_TOL: f64 = 1e-10;
const HS_RESIDUAL_N2: f64 = 1e-3;
const HS_RESIDUAL_HIGHER: f64 = 1e-6;
const HS_DEGREE: usize = 200;
const HESSIAN_SLACK: f64 = 1e-6;
const HESSIAN_FIELDS: usize = 200;
const MC_SAMPLES: u64 = 10_000_000;
const MC_RADII: usize = 20;
const MC_SIGMAS: f64 = 3.0;
const COMPETITOR_DENSITIES: usize = 200;
const COMPETITOR_MASS_TOL: f64 = 1e-8;
/// Ten times the round-off level at which the ray model is exact.
const COMPETITOR_PROPERTY_TOL: f64 = 10.0 * 1e-11;
const CENTERING_DENSITIES: usize = 100;
const CENTERING_REL_RESIDUAL: f64 = 1e-8;
const LEDGER_DIMS: [usize; 2] = [2, 3];
const LEDGER_DELTAS: [f64; 3] = [0.05, 0.1, 0.25];
const AUDIT_COUNT: usize = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn pair_for_a(dim: usize, a: f64) -> riesz_core::Result<BallPair> {
    BallPair::with_implied_delta(dim, 1.0, (2.0 * a).sqrt())
}

/// Eigenvalues below this fraction of `λ_0` are exact zeros (odd parity at
/// `a = 1`, `sin(ℓθ_a) = 0` for `N = 2`); their error is taken relative to
/// `λ_0`.
const VANISHING: f64 = 1e-12;

fn spectral_closed_form() -> riesz_core::Result<Outcome> {
    let mut worst = (0.0, 0, 0, 0.0);
    let mut vanishing = 0;
    for dim in DIMS {
        for a in A_VALUES {
            let p = SpectralParams::new(dim, a, ELL_MAX)?;
            let lambda0 = eigenvalue_closed_form(&p, 0);
            for ell in 0..=ELL_MAX {
                let closed = eigenvalue_closed_form(&p, ell);
                let oracle = funk_hecke_direct(&p, ell, 32, 1e-14)?.value;
                let scale = if oracle.abs() < VANISHING * lambda0 {
                    vanishing += 1;
                    lambda0
                } else {
                    oracle.abs()
                };
                let err = (closed - oracle).abs() / scale;
                if err > worst.0 {
                    worst = (err, dim, ell, a);
                }
            }
        }
    }
    Ok(Outcome {
        pass: worst.0 <= SPECTRAL_REL_TOL,
        detail: format!(
            "max rel err {:.2e} (N={}, l={}, a={}), {vanishing} vanishing eigenvalues compared to l=0",
            worst.0, worst.1, worst.2, worst.3
        ),
    })
}

fn gamma_identity() -> riesz_core::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for dim in DIMS {
        for a in A_VALUES {
            let p = SpectralParams::new(dim, a, 1)?;
            let gamma = pair_for_a(dim, a)?.gamma_constant();
            let lambda1 = eigenvalue_closed_form(&p, 1);
            worst = worst.max((0.5 * gamma - lambda1).abs() / lambda1);
        }
    }
    Ok(Outcome {
        pass: worst <= GAMMA_REL_TOL,
        detail: format!("max rel err {worst:.2e}"),
    })
}

fn spectral_gap() -> riesz_core::Result<Outcome> {
    let mut max_a: f64 = 0.0;
    let mut failures = Vec::new();
    let mut worst_residual = (0.0, 0, 0.0);
    for dim in DIMS {
        for a in A_VALUES {
            let p = SpectralParams::new(dim, a, HS_DEGREE)?;
            let spec = match gap_constant(&p) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("N={dim} a={a}: {e}"));
                    continue;
                }
            };
            max_a = max_a.max(spec.gap_a);
            let lambda1 = spec.lambda(1);
            let rank = spec.cutoff_n0.ceil() as usize;
            // Degrees whose eigenvalues occupy ranks up to n₀ all have ℓ ≤ n₀.
            let top = rank.min(spec.lambdas.len() - 1);
            if let Some(ell) = (2..=top).find(|&l| spec.lambda(l) >= lambda1) {
                failures.push(format!("N={dim} a={a}: l={ell} not below l=1"));
            }
            if !(spec.gap_a < 0.5) {
                failures.push(format!("N={dim} a={a}: A={}", spec.gap_a));
            }
            let total = 0.5 * sphere_area(dim) * eigenvalue_closed_form(&p, 0);
            let partial = hilbert_schmidt_partial(&p, HS_DEGREE)?;
            if partial > total * (1.0 + 1e-12) {
                failures.push(format!("N={dim} a={a}: partial sum above budget"));
            }
            let residual = (total - partial) / total;
            let limit = if dim == 2 {
                HS_RESIDUAL_N2
            } else {
                HS_RESIDUAL_HIGHER
            };
            if residual > limit {
                failures.push(format!(
                    "N={dim} a={a}: HS residual {residual:.2e} > {limit:.0e}"
                ));
            }
            if residual / limit > worst_residual.0 {
                worst_residual = (residual / limit, dim, a);
            }
        }
    }
    let mut detail = format!(
        "max A {max_a:.6}, worst HS residual/limit {:.2e} (N={}, a={})",
        worst_residual.0, worst_residual.1, worst_residual.2
    );
    if !failures.is_empty() {
        let _ = write!(
            detail,
            "; {} failures, first: {}",
            failures.len(),
            failures[0]
        );
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        detail,
    })
}

/// Top degree of the random fields; the nested cap rule grows like
/// `degree^(2N-3)`.
fn hessian_degree(dim: usize) -> usize {
    match dim {
        2 | 3 => 12,
        4 => 8,
        5 => 6,
        _ => 4,
    }
}

fn hessian_bound() -> riesz_core::Result<Outcome> {
    let mut worst = (0.0, 0, 0.0);
    let mut orthogonality: f64 = 0.0;
    let mut violations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e55);
    for dim in DIMS {
        let degree = hessian_degree(dim);
        for a in A_VALUES {
            let p = SpectralParams::new(dim, a, degree)?;
            let spec = gap_constant(&p)?;
            let gamma = pair_for_a(dim, a)?.gamma_constant();
            let bound = spec.gap_a * gamma;
            let form = HessianForm::new(&p, degree)?;
            let basis = ZonalBasis::random(dim, 2, degree, 3, &mut rng)?;
            let (q, w) = form.basis_matrices(&basis)?;
            for k in 0..HESSIAN_FIELDS {
                let c: Vec<f64> = (0..basis.len())
                    .map(|_| rng.sample(StandardNormal))
                    .collect();
                let ratio = rayleigh_ratio(&q, &w, &c);
                if ratio > bound * (1.0 + HESSIAN_SLACK) {
                    violations += 1;
                }
                if ratio / bound > worst.0 {
                    worst = (ratio / bound, dim, a);
                }
                if k == 0 {
                    let f = basis.field(&c);
                    let norm = form.norm_sq(&f).sqrt();
                    let (mass, first) = form.low_moments(&f);
                    orthogonality = orthogonality.max(mass.abs().max(first) / norm);
                }
            }
        }
    }
    Ok(Outcome {
        pass: violations == 0 && orthogonality < 1e-10,
        detail: format!(
            "{violations} violations, max Q/(A Gamma |F|^2) {:.4} (N={}, a={}), orthogonality {orthogonality:.1e}",
            worst.0, worst.1, worst.2
        ),
    })
}

fn phi_monte_carlo() -> riesz_core::Result<Outcome> {
    let configs = [(2, 1.0, 0.5), (3, 1.0, 1.0), (4, 1.0, 1.5)];
    let mut disagreements = 0;
    let mut max_z: f64 = 0.0;
    let mut structural = Vec::new();
    for (ci, &(dim, r_e, r_b)) in configs.iter().enumerate() {
        let pair = BallPair::with_implied_delta(dim, r_e, r_b)?;
        let reach = r_e + r_b;
        for k in 0..MC_RADII {
            let r = reach * (k as f64 + 0.5) / MC_RADII as f64;
            let est = mc_intersection_volume(&pair, r, MC_SAMPLES, (ci * MC_RADII + k) as u64);
            let exact = pair.phi(r);
            if !est.agrees_with(exact, MC_SIGMAS) {
                disagreements += 1;
            }
            if est.std_error > 0.0 {
                max_z = max_z.max((est.value - exact).abs() / est.std_error);
            }
        }
        let grid = 2000;
        let values: Vec<f64> = (0..=grid)
            .map(|i| pair.phi(1.25 * reach * i as f64 / grid as f64))
            .collect();
        if values.windows(2).any(|w| w[1] > w[0]) {
            structural.push(format!("N={dim}: not monotone"));
        }
        for (i, v) in values.iter().enumerate() {
            let r = 1.25 * reach * i as f64 / grid as f64;
            if (r >= reach) != (*v == 0.0) {
                structural.push(format!("N={dim}: support wrong at r={r}"));
                break;
            }
        }
        let small = unit_ball_volume(dim) * r_e.min(r_b).powi(dim as i32);
        if (values[0] - small).abs() > 1e-13 * small {
            structural.push(format!("N={dim}: phi(0) = {} vs {small}", values[0]));
        }
    }
    let mut detail = format!(
        "{disagreements}/{} radii outside {MC_SIGMAS} sigma, max |z| {max_z:.2}",
        configs.len() * MC_RADII
    );
    if !structural.is_empty() {
        let _ = write!(detail, "; {}", structural.join(", "));
    }
    Ok(Outcome {
        pass: disagreements == 0 && structural.is_empty(),
        detail,
    })
}

fn competitor_properties() -> riesz_core::Result<Outcome> {
    let thetas = [0.05, 0.2, 0.5, 1.0];
    let mut failures = 0;
    let mut worst_mass: f64 = 0.0;
    let mut worst_property: f64 = 0.0;
    let mut total = 0;
    for dim in [2, 3] {
        let pair = BallPair::unit(dim, 0.5, 0.1)?;
        let dirs = DirectionSet::gauss_product(dim, 12)?;
        let corpus = generate(
            &pair,
            &dirs,
            &CorpusConfig::new(COMPETITOR_DENSITIES / 2, 6),
        )?;
        for (k, entry) in corpus.iter().enumerate() {
            let rho = &entry.density;
            let theta = thetas[k % thetas.len()];
            let out = competitor(rho, theta)?;
            let check = verify_competitor(rho, &out)?;
            let mass = rho.mass();
            worst_mass = worst_mass.max(check.mass_rel);
            worst_property = worst_property
                .max(check.sandwich)
                .max(check.ordering.max(check.distance).max(check.shell_share) / mass);
            if check.mass_rel > COMPETITOR_MASS_TOL || !check.passes(COMPETITOR_PROPERTY_TOL, mass)
            {
                failures += 1;
            }
            total += 1;
        }
    }
    Ok(Outcome {
        pass: failures == 0,
        detail: format!(
            "{failures}/{total} densities fail, max mass rel {worst_mass:.1e}, max property excess {worst_property:.1e}"
        ),
    })
}

fn centering() -> riesz_core::Result<Outcome> {
    let cfg = CenteringConfig {
        rel_residual: CENTERING_REL_RESIDUAL,
        ..CenteringConfig::default()
    };
    let mut failures = Vec::new();
    let mut worst_shift: f64 = 0.0;
    let mut worst_idem: f64 = 0.0;
    let mut total = 0;
    for dim in [2, 3] {
        let pair = BallPair::unit(dim, 0.5, 0.1)?;
        let ledger = riesz_core::build_ledger(dim, 0.1, &LedgerConfig::default())?;
        let c_shift = ledger.get("C_shift")?;
        let theta0 = ledger.get("theta0")?;
        let dirs = DirectionSet::gauss_product(dim, 12)?;
        let corpus_cfg = CorpusConfig::near_ball(CENTERING_DENSITIES / 2, 11, 0.2 * theta0);
        for entry in generate(&pair, &dirs, &corpus_cfg)? {
            total += 1;
            let rho = &entry.density;
            let theta = check_shell_condition(rho, &pair);
            let out = center(rho, &cfg)?;
            let mass = rho.mass();
            if out.residual > CENTERING_REL_RESIDUAL * mass.powf((dim as f64 - 1.0) / dim as f64) {
                failures.push(format!(
                    "N={dim} #{}: residual {:.1e}",
                    entry.index, out.residual
                ));
            }
            // A second solve from the shift must stay within the residual
            // tolerance, converted to a length by the Jacobian scale.
            let again = center_from(rho, &out.shift, 3, &cfg)?;
            let radius = (mass / unit_ball_volume(dim)).powf(1.0 / dim as f64);
            let jacobian = sphere_area(dim) * radius.powi(dim as i32 - 1) / dim as f64;
            let moved = dist(&again.shift, &out.shift);
            worst_idem = worst_idem.max(moved / (out.tolerance / jacobian));
            if moved > out.tolerance / jacobian {
                failures.push(format!(
                    "N={dim} #{}: restart moved {moved:.1e}",
                    entry.index
                ));
            }
            let field = centering_field(rho, &again.shift);
            if field.iter().any(|x| x.abs() > out.tolerance) {
                failures.push(format!("N={dim} #{}: restart residual", entry.index));
            }
            let shift = dist(&out.shift, &vec![0.0; dim]);
            let bound = c_shift * mass.powf(1.0 / dim as f64) * theta;
            if theta > 0.0 {
                worst_shift = worst_shift.max(shift / bound);
            }
            if shift > bound {
                failures.push(format!(
                    "N={dim} #{}: |a| {shift:.2e} > {bound:.2e}",
                    entry.index
                ));
            }
        }
    }
    let mut detail = format!(
        "{}/{total} fail, max |a|/bound {worst_shift:.3}, max restart move/tol {worst_idem:.2e}",
        failures.len()
    );
    if let Some(f) = failures.first() {
        let _ = write!(detail, "; first: {f}");
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        detail,
    })
}

/// `|S^{N-1}| = N |B^N|`.
fn sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn pipeline() -> riesz_core::Result<(Outcome, Outcome)> {
    let cfg = LedgerConfig::default();
    let mut ledger_failures = Vec::new();
    let mut stability = 0;
    let mut riesz = 0;
    let mut min_d_over_eps = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut lines = Vec::new();
    let ledgers = ledger_sweep(&LEDGER_DIMS, &LEDGER_DELTAS, &cfg);
    for ledger in ledgers {
        let ledger = match ledger {
            Ok(l) => l,
            Err(e) => {
                ledger_failures.push(e.to_string());
                continue;
            }
        };
        let complete = REQUIRED_KEYS.iter().all(|k| {
            ledger.entries.iter().any(|e| {
                e.key == *k && !e.formula.is_empty() && !e.source.is_empty() && e.value > 0.0
            })
        });
        if !(ledger.c_final > 0.0) || !complete {
            ledger_failures.push(format!("N={} delta={}", ledger.dim, ledger.delta));
        }
        let audit = AuditConfig::new(ledger.dim, ledger.delta, AUDIT_COUNT, 0);
        let summary = audit_corpus(&audit, ledger.c_final)?;
        stability += summary.stability_violations.len();
        riesz += summary.riesz_violations.len();
        min_d_over_eps = min_d_over_eps.min(summary.min_deficit_over_epsilon);
        if let Some(r) = summary.min_ratio {
            min_ratio = min_ratio.min(r);
        }
        lines.push(format!(
            "N={} d={}: c={:.2e}",
            ledger.dim, ledger.delta, ledger.c_final
        ));
    }
    let eight = Outcome {
        pass: ledger_failures.is_empty() && stability == 0,
        detail: format!(
            "{} ledgers incomplete, {stability} violations, min D/(|rho|^2 A^2) {min_ratio:.3e} [{}]",
            ledger_failures.len(),
            lines.join("; ")
        ),
    };
    let nine = Outcome {
        pass: riesz == 0,
        detail: format!("{riesz} entries below -eps_quad, min D/eps_quad {min_d_over_eps:.3}"),
    };
    Ok((eight, nine))
}

fn determinism() -> Result<Outcome, String> {
    let bin = env!("CARGO_BIN_EXE_riesz");
    let base = std::env::temp_dir().join(format!("riesz-acceptance-{}", std::process::id()));
    let run = |tag: &str, format: &str| -> Result<Vec<u8>, String> {
        let dir = base.join(tag);
        let status = Command::new(bin)
            .args(["--format", format, "--out-dir"])
            .arg(&dir)
            .args([
                "verify", "--dim", "2", "--delta", "0.1", "--count", "25", "--seed", "7",
            ])
            .args(["--oracle", "--oracle-samples", "20000"])
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("verify exited with {status}"));
        }
        std::fs::read(dir.join(format!("verify.{format}"))).map_err(|e| e.to_string())
    };
    let mut same = true;
    let mut sizes = Vec::new();
    for format in ["json", "csv"] {
        let first = run(&format!("{format}-1"), format)?;
        let second = run(&format!("{format}-2"), format)?;
        same &= first == second;
        sizes.push(first.len());
    }
    let _ = std::fs::remove_dir_all(&base);
    Ok(Outcome {
        pass: same,
        detail: format!(
            "json {} bytes, csv {} bytes, identical: {same}",
            sizes[0], sizes[1]
        ),
    })
}

fn report(
    id: usize,
    name: &str,
    budget: Option<Duration>,
    elapsed: Duration,
    outcome: Result<Outcome, String>,
) -> bool {
    let (pass, detail) = match outcome {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let ok = pass && budget.is_none_or(|b| elapsed <= b);
    let budget = budget.map_or_else(
        || "no budget".to_string(),
        |b| format!("{} s budget", b.as_secs()),
    );
    println!(
        "criterion {id:>2} {} {name}: {detail} [{:.1} s / {budget}]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
    );
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() {
    // Ignore libtest flags such as `--nocapture` or a name filter.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let selected = |id: usize| filter.as_deref().is_none_or(|f| f == id.to_string());
    let s = |secs| Some(Duration::from_secs(secs));
    let mut all = true;
    let core = |r: riesz_core::Result<Outcome>| r.map_err(|e| e.to_string());

    if selected(1) {
        let (o, t) = timed(spectral_closed_form);
        all &= report(
            1,
            "closed-form eigenvalues vs quadrature",
            s(30),
            t,
            core(o),
        );
    }
    if selected(2) {
        let (o, t) = timed(gamma_identity);
        all &= report(2, "Gamma/2 equals lambda_1", s(10), t, core(o));
    }
    if selected(3) {
        let (o, t) = timed(spectral_gap);
        all &= report(
            3,
            "spectral gap and Hilbert-Schmidt budget",
            s(60),
            t,
            core(o),
        );
    }
    if selected(4) {
        let (o, t) = timed(hessian_bound);
        all &= report(4, "Hessian form bound", s(120), t, core(o));
    }
    if selected(5) {
        let (o, t) = timed(phi_monte_carlo);
        all &= report(5, "phi vs Monte Carlo", s(120), t, core(o));
    }
    if selected(6) {
        let (o, t) = timed(competitor_properties);
        all &= report(6, "competitor properties", s(120), t, core(o));
    }
    if selected(7) {
        let (o, t) = timed(centering);
        all &= report(7, "centering", s(60), t, core(o));
    }
    if selected(8) || selected(9) {
        let (o, t) = timed(pipeline);
        match o {
            Ok((eight, nine)) => {
                all &= report(
                    8,
                    "constant pipeline and stability audit",
                    s(900),
                    t,
                    Ok(eight),
                );
                all &= report(9, "Riesz deficit sign", None, t, Ok(nine));
            }
            Err(e) => {
                all &= report(
                    8,
                    "constant pipeline and stability audit",
                    s(900),
                    t,
                    Err(e.to_string()),
                );
                all &= report(9, "Riesz deficit sign", None, t, Err(e.to_string()));
            }
        }
    }
    if selected(10) {
        let (o, t) = timed(determinism);
        all &= report(10, "byte-identical verify reports", None, t, o);
    }
    if !all {
        std::process::exit(1);
    }
}
