use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "riesz",
    version,
    about = "Stability constants for the Riesz rearrangement inequality with a ball kernel"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write `<command>.<ext>` here instead of to stdout.
    #[arg(long, env = "RIESZ_OUTPUT_DIR", global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    /// Human-readable table (`constant` only).
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate `φ(r) = |B_R(0) ∩ B_R̃(r e₁)|` and certify its bounds.
    Phi(PhiArgs),
    /// Funk–Hecke eigenvalues of the Hessian form and the gap constant `A`.
    Spectrum(SpectrumArgs),
    /// Assemble the ledger of constants ending in `c_{N,δ}`.
    Constant(ConstantArgs),
    /// Audit the stability inequality on a generated corpus.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PhiArgs {
    #[arg(long)]
    pub dim: usize,
    /// Radius of `E*`.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub radius_e: f64,
    /// Radius of the kernel ball `B`.
    #[arg(long = "Rb")]
    #[serde(rename = "Rb")]
    pub radius_b: f64,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    /// Defaults to the largest admissible value, `min(κ, 1 - κ)`.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 4000)]
    pub scan_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub dim: usize,
    /// `a = R̃²/(2R²)` in `(0, 2)`.
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 100)]
    pub lmax: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantArgs {
    /// Single-point mode.
    #[arg(long, conflicts_with = "dims")]
    pub dim: Option<usize>,
    #[arg(long, conflicts_with = "deltas")]
    pub delta: Option<f64>,
    /// Sweep mode: comma-separated dimensions.
    #[arg(long, value_delimiter = ',', requires = "deltas")]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', requires = "dims")]
    pub deltas: Vec<f64>,
    /// Drop an upstream entry before assembly (exercises the completeness gate).
    #[arg(long, hide = true)]
    pub skip: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoSource {
    Corpus,
    Ball,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = RhoSource::Corpus)]
    pub rho: RhoSource,
    /// Values of `R̃/(2R)`; defaults to `δ, 1/2, 1 - δ`.
    #[arg(long, value_delimiter = ',')]
    pub kappas: Vec<f64>,
    /// Cross-check every interaction against Monte Carlo.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub oracle_samples: u64,
}
