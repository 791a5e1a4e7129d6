use thiserror::Error;

/// Errors produced by the signal-processing and control primitives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AncError {
    #[error("empty signal")]
    EmptySignal,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample rate must be positive and finite, got {0}")]
    InvalidSampleRate(f64),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("fir path must have at least one coefficient")]
    EmptyPath,

    #[error("path is all zeros")]
    ZeroPath,

    #[error("signal of length {len} is shorter than order {order}")]
    SignalTooShort { len: usize, order: usize },

    #[error("matrix is not symmetric within tolerance {tol} (asymmetry {asymmetry})")]
    NotSymmetric { tol: f64, asymmetry: f64 },

    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    BadMatrixShape { rows: usize, cols: usize },

    #[error("frequency {freq_hz} Hz violates the Nyquist limit {nyquist_hz} Hz")]
    Nyquist { freq_hz: f64, nyquist_hz: f64 },

    #[error("singular system")]
    Singular,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("silent disturbance")]
    SilentDisturbance,

    #[error("malformed csv at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl AncError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        AncError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for AncError {
    fn from(err: std::io::Error) -> Self {
        AncError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, AncError>;
