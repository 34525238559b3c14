use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate segment: endpoints coincide at ({0}, {1})")]
    DegenerateSegment(f64, f64),
    #[error("collinear segments overlap in their interiors")]
    CollinearOverlap,
    #[error("invalid rectangle [{x0}, {x1}) x [{y0}, {y1})")]
    InvalidRect { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("window has zero area")]
    EmptyWindow,
    #[error("invalid intensity {0}: must be positive and finite")]
    InvalidIntensity(f64),
    #[error("point ({0}, {1}) lies outside the domain window")]
    OutsideWindow(f64, f64),
    #[error("size mismatch: {reds} reds vs {blues} blues")]
    SizeMismatch { reds: usize, blues: usize },
    #[error("instance too large for exhaustive search: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("no feasible assignment exists")]
    Infeasible,
    #[error("duplicate x-coordinate {0} in walk input")]
    DuplicateCoordinate(f64),
    #[error("operation requires a {expected} domain, got {found}")]
    WrongDomain { expected: &'static str, found: &'static str },
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed file: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
