use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A dimension or party count is outside the supported range.
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    /// Matrix shape does not match the declared local dimensions.
    #[error("shape mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    Shape { expected: usize, rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("trace is {trace:.12} instead of 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    /// A party index or partition is malformed.
    #[error("invalid partition: {0}")]
    Partition(String),

    /// A parameter is outside its admissible domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The second moment exceeds the largest value reachable at the given Schmidt number.
    #[error("second moment {y} exceeds the cap {cap} for x = {x}")]
    AboveCap { x: usize, y: f64, cap: f64 },

    /// Overlap denominator vanishes for the chosen observable parameters.
    #[error("degenerate observable parameters: {0}")]
    Degenerate(String),

    /// A requested item is not part of the catalog.
    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    #[error("i/o: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
