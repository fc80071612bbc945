//! Quantitative stability of the Riesz rearrangement inequality with a
//! ball kernel: two-ball geometry, the interaction functional on densities
//! `0 ≤ ρ ≤ 1`, the Funk–Hecke spectrum of the boundary Hessian, the
//! competitor and centering constructions, and the chain of constants that
//! yields a numeric stability constant `c_{N,δ}`.

pub mod audit;
pub mod constants;
pub mod constructions;
pub mod corpus;
pub mod density;
pub mod error;
pub mod geometry;
pub mod hessian;
pub mod optim;
pub mod oracles;
pub mod special;
pub mod spectral;
pub mod sphere;

pub use audit::{audit_ball, audit_corpus, AuditConfig, AuditRecord, AuditSummary};
pub use constants::{build_ledger, ledger_sweep, ConstantLedger, LedgerConfig, LedgerEntry};
pub use constructions::{center, competitor, CenteringResult, CompetitorResult};
pub use corpus::{CorpusConfig, Family};
pub use density::{asymmetry, Density, Shape, ShapeQuadrature};
pub use error::{Error, Result};
pub use geometry::{BallPair, PhiBoundCertificate, PhiScanConfig};
pub use oracles::OracleEstimate;
pub use spectral::{gap_constant, SpectralParams, Spectrum};
pub use sphere::DirectionSet;
