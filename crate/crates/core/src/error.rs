use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HmlError {
    #[error("degree exceeds 2n (got degree {degree} on n = {n})")]
    DegreeOverflow { degree: usize, n: usize },

    #[error("bidegree ({p}, {q}) out of range for n = {n}")]
    BidegreeOutOfRange { p: usize, q: usize, n: usize },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("inner product defined on primitive forms")]
    NotPrimitive,

    #[error("model not polarized: {0}")]
    NotPolarized(String),

    #[error("series recursion breaks down at index {index}: indicial polynomial vanishes")]
    IndicialObstruction { index: usize },

    #[error("path too close to singularity near {point}")]
    PathTooClose { point: String },

    #[error("frame degenerate at t = {0}")]
    DegenerateFrame(String),

    #[error("polarization sign violated in block p = {p} (min eigenvalue {min_eig:e})")]
    PolarizationSign { p: usize, min_eig: f64 },

    #[error("transversality violated: residual {residual:e} in block p = {p}")]
    Transversality { p: usize, residual: f64 },

    #[error("WP route mismatch: relative difference {0:e}")]
    WpRouteMismatch(f64),

    #[error("Chern route mismatch for degree {k}: relative difference {residual:e}")]
    ChernRouteMismatch { k: usize, residual: f64 },

    #[error("primitivity route mismatch: relative difference {0:e}")]
    PrimitivityRouteMismatch(f64),

    #[error("semidefiniteness violated: min eigenvalue {min_eig:e} (k = {k})")]
    Semidefiniteness { k: usize, min_eig: f64 },

    #[error("matrix not Hermitian: anti-Hermitian part norm {0:e}")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("point outside chart domain: {0}")]
    OutsideChart(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),
}

pub type Result<T, E = HmlError> = std::result::Result<T, E>;

impl HmlError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        HmlError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
