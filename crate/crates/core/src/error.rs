use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("toroidal metric requested but no torus extents were given")]
    MissingTorusExtents,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("simplex face index {index} out of range for dimension {dim}")]
    FaceOutOfRange { index: usize, dim: isize },
    #[error("face {face:?} of simplex {simplex:?} is missing from the filtration")]
    MissingFace {
        simplex: Vec<usize>,
        face: Vec<usize>,
    },
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),
    #[error("contour inputs must be nonnegative (v = {v}, eps = {eps})")]
    NegativeContourInput { v: f64, eps: f64 },
    #[error("malformed axiom sample: {0}")]
    MalformedSample(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("cannot normalize a function whose value at 0 is zero")]
    ZeroNormalization,
    #[error("step function is not normalized: value at 0 is {0}")]
    NotNormalized(f64),
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("sample size {requested} exceeds point count {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("class `{label}` has {available} rank pairs, need more than {train}")]
    ClassTooSmall {
        label: String,
        available: usize,
        train: usize,
    },
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
