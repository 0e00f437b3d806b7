use thiserror::Error;

/// Errors raised by the core library.
///
/// Frequency-local degeneracies are not errors; they travel as per-point
/// [`PointStatus`](crate::PointStatus) flags instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error(
        "frequency grids differ: {left_len} vs {right_len} points, first difference at index {index} ({left_hz} Hz vs {right_hz} Hz)"
    )]
    GridMismatch {
        left_len: usize,
        right_len: usize,
        index: usize,
        left_hz: f64,
        right_hz: f64,
    },

    #[error("trace `{name}`: {source}")]
    InTrace { name: String, source: Box<Error> },

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid element{}: {msg}", label_suffix(.label))]
    InvalidElement { label: Option<String>, msg: String },

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("cannot extrapolate: {freq_hz} Hz lies outside the source span [{lo_hz}, {hi_hz}] Hz")]
    Extrapolation {
        freq_hz: f64,
        lo_hz: f64,
        hi_hz: f64,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema error at `{path}`: {msg}")]
    Schema { path: String, msg: String },

    #[error("calibration file: {0}")]
    CalibrationFile(String),
}

fn label_suffix(label: &Option<String>) -> String {
    match label {
        Some(l) => format!(" `{l}`"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Attach the name of the offending trace.
    pub fn in_trace(self, name: impl Into<String>) -> Self {
        Error::InTrace {
            name: name.into(),
            source: Box::new(self),
        }
    }

    /// Line number for parse errors, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Parse { line, .. } => Some(*line),
            Error::InTrace { source, .. } => source.line(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
