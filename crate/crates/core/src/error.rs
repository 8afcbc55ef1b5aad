use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A†| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),

    #[error("copy count {0} outside the supported range")]
    CopyCountOutOfRange(usize),

    #[error("site {site} outside 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("prior table needs at least two rows")]
    EmptyTable,

    #[error("prior table abscissa not strictly increasing within [0,1] at row {row}")]
    NonMonotonicAbscissa { row: usize },

    #[error("prior table has negative density at row {row}")]
    NegativeDensity { row: usize },

    #[error("prior density integrates to zero and cannot be normalized")]
    NormalizationImpossible,

    #[error("point-mass radius {0} outside [0,1]")]
    RadiusOutOfRange(f64),

    #[error("POVM elements do not resolve the identity (residual {residual:e})")]
    IncompletePovm { residual: f64 },

    #[error("POVM element '{label}' is not positive (min eigenvalue {min_eigenvalue:e})")]
    NonPositiveElement { label: String, min_eigenvalue: f64 },

    #[error("POVM element '{label}' has rank {rank}, expected rank one")]
    RankNotOne { label: String, rank: usize },

    #[error("outcome '{label}' has vanishing a-priori probability {p_ap:e}")]
    NullOutcome { label: String, p_ap: f64 },

    #[error("Schmidt parameter {0} outside [0,1]")]
    SchmidtParamOutOfRange(f64),

    #[error("spin block labels {0} occur more than once")]
    DuplicateSpinLabels(String),

    #[error("eigenvalue {0} is not of the form s(s+1)")]
    NotACasimirValue(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
