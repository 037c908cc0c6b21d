use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function '{name}' at byte {offset} takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("domain error in '{node}': {reason}")]
    Domain { node: String, reason: String },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("degenerate metric at {point:?}")]
    DegenerateMetric { point: Vec<f64> },
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("metric is not symmetric: g[{i}][{j}] and g[{j}][{i}] differ")]
    Asymmetric { i: usize, j: usize },
    #[error("singular frame at {point:?}")]
    SingularFrame { point: Vec<f64> },
    #[error("matrix is not decomposable: {0}")]
    NotDecomposable(String),
    #[error("not a group element: {0}")]
    NotInGroup(String),
    #[error("element does not have the required shape: {0}")]
    Shape(String),
    #[error("flavor mismatch: {0}")]
    Flavor(String),
    #[error("truncation order {have} is too low, {need} required")]
    Order { have: usize, need: usize },
    #[error("invalid metric spec: {0}")]
    Spec(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
