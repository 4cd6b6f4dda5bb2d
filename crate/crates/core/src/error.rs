use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("site {site} out of range for {n_spins} spins")]
    SiteOutOfRange { site: usize, n_spins: usize },
    #[error("invalid Pauli term: {0}")]
    InvalidTerm(String),
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("expectation has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("operator is not symmetric")]
    NotSymmetric,
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("parameter vector has length {got}, ansatz expects {expected}")]
    ParameterLength { expected: usize, got: usize },
    #[error("term {term} is not diagonal in the {basis} basis")]
    BasisMismatch { term: String, basis: String },
    #[error("{what}: expected {expected} estimates, got {got}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("no stored parameter record for h = {0}")]
    MissingRecord(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("no grid points inside window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("missing series: {0}")]
    MissingSeries(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("missing input file {0}")]
    MissingInput(PathBuf),
    #[error("malformed record in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } | Error::ImaginaryResidue(_) | Error::Numerical(_) => 2,
            Error::MissingInput(_) | Error::MissingRecord(_) | Error::MissingSeries(_) => 3,
            Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => 3,
            _ => 1,
        }
    }
}
