use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },

    #[error("dimension {dim} exceeds configured cap {cap}")]
    SizeOverflow { dim: usize, cap: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: relative deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("eigen iteration did not converge within {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("ambiguous rank: spectral gap {gap:e} below required {required:e}")]
    AmbiguousRank { gap: f64, required: f64 },

    #[error("commutant dimension unstable under extra samples: observed {observed:?}")]
    UnstableDimension { observed: Vec<usize> },

    #[error("basis element {element} fails invariance on fresh samples: residual {residual:e}")]
    InvarianceViolated { element: usize, residual: f64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("variable `{0}` has no dimension")]
    DimMissing(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("library Gram matrix is singular: `{operator}` is dependent on earlier operators")]
    SingularGram { operator: String },

    #[error("block structure violated: {}", format_offenders(.offenders))]
    StructureViolation { offenders: Vec<BlockOffense> },

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix has zero trace")]
    ZeroTrace,

    #[error("word `{0}` is not supported by this operation")]
    UnsupportedWord(String),
}

/// One offending block found by the block-structure verifier.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BlockOffense {
    pub element: usize,
    pub check: String,
    /// 1-based block coordinates `(i, j)`.
    pub block: (usize, usize),
    pub magnitude: f64,
}

fn format_offenders(offenders: &[BlockOffense]) -> String {
    offenders
        .iter()
        .map(|o| format!("element {} {} block ({},{}) |dev|={:e}", o.element, o.check, o.block.0, o.block.1, o.magnitude))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
