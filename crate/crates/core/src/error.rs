use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not fit together.
    DimensionMismatch {
        op: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// Operation requires a square matrix.
    NotSquare { op: &'static str, rows: usize, cols: usize },
    /// Elimination hit a pivot below the singularity tolerance.
    Singular { op: &'static str, pivot: f64 },
    /// Cholesky hit a non-positive diagonal pivot.
    NotPositiveDefinite { pivot: f64, index: usize },
    /// A constructor was handed NaN or an infinity.
    NonFinite { op: &'static str },
    /// A scalar or count argument is outside its admissible range.
    InvalidArgument { name: &'static str, reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, expected, found } => write!(
                f,
                "{op}: dimension mismatch, expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::NotSquare { op, rows, cols } => {
                write!(f, "{op}: expected a square matrix, got {rows}x{cols}")
            }
            Error::Singular { op, pivot } => {
                write!(f, "{op}: matrix is singular (pivot magnitude {pivot:e})")
            }
            Error::NotPositiveDefinite { pivot, index } => write!(
                f,
                "cholesky: matrix is not positive definite (pivot {pivot:e} at {index})"
            ),
            Error::NonFinite { op } => write!(f, "{op}: non-finite entry"),
            Error::InvalidArgument { name, reason } => write!(f, "invalid {name}: {reason}"),
        }
    }
}

impl core::error::Error for Error {}
