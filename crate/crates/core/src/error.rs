use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("subsystem `{label}` has invalid dimension {dim}")]
    InvalidDimension { label: String, dim: usize },

    #[error("layout has {labels} labels but {dims} dimensions")]
    LayoutArity { labels: usize, dims: usize },

    #[error("matrix is {rows}x{cols} but layout requires {expected}x{expected}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("subsystem order {0:?} is not a permutation of the layout labels")]
    NotPermutation(Vec<String>),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dimension {0} is below the supported minimum of 2")]
    DimensionTooSmall(usize),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("unknown Pauli `{0}` (expected one of I, X, Y, Z)")]
    UnknownPauli(String),

    #[error("invalid process: {0}")]
    InvalidProcess(String),

    #[error("operator is not wire-covariant (residual {0:.3e})")]
    NonCovariant(f64),

    #[error("coefficients lie outside the feasible polygon: {0}")]
    OutsidePolygon(String),

    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("malformed operator JSON: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
