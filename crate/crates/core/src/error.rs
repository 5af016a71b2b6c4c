use thiserror::Error;

/// Errors raised while reading a disk description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiskError {
    #[error("disk has no cells")]
    Empty,
    #[error("disk is unbalanced: {white} white vs {black} black cells")]
    Unbalanced { white: usize, black: usize },
    #[error("disk is not edge-connected ({components} components)")]
    Disconnected { components: usize },
    #[error("disk is not simply connected (euler characteristic {euler}, pinch points {pinches})")]
    NotSimplyConnected { euler: i64, pinches: usize },
    #[error("unexpected character {ch:?} at line {line}, column {column}")]
    BadCharacter {
        ch: char,
        line: usize,
        column: usize,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Disk(#[from] DiskError),
    #[error("plug table has {size} entries, above the configured bound {bound}")]
    TableTooLarge { size: u128, bound: u128 },
    #[error("disk has {cells} cells and {edges} edges; at most 64 of each are supported")]
    DiskTooLarge { cells: usize, edges: usize },
    #[error("enumeration would produce {count} tilings, above the configured bound {bound}")]
    EnumerationTooLarge { count: String, bound: u64 },
    #[error("evaluation point {re} + {im}i is not on the unit circle")]
    NotOnUnitCircle { re: f64, im: f64 },
    #[error("cocycle is not closed: exponent {exponent} of the empty-plug entry is not a multiple of {m}")]
    CocycleNotClosed { exponent: i64, m: i64 },
    #[error("twist sum {quarters}/4 is not an integer")]
    IntegralityViolation { quarters: i64 },
    #[error("no connector tiling of height {height} reaches plug {plug:#x}")]
    ConnectorNotFound { plug: u64, height: usize },
    #[error("no kernel candidate passed calibration")]
    NoKernelPasses,
    #[error("{count} kernel candidates passed calibration")]
    MultipleKernelsPass { count: usize },
    #[error("transfer matrix is not primitive: {reason}")]
    NotPrimitive { reason: String },
    #[error("eta curvature at zero is not negative ({second_derivative})")]
    CurvatureNonNegative { second_derivative: f64 },
    #[error("tiling is not valid: {0}")]
    InvalidTiling(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Disk(_)
            | Error::InvalidInput(_)
            | Error::NotOnUnitCircle { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidTiling(_)
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::TableTooLarge { .. }
            | Error::DiskTooLarge { .. }
            | Error::EnumerationTooLarge { .. } => 2,
            Error::CocycleNotClosed { .. }
            | Error::IntegralityViolation { .. }
            | Error::ConnectorNotFound { .. }
            | Error::NoKernelPasses
            | Error::MultipleKernelsPass { .. }
            | Error::NotPrimitive { .. }
            | Error::CurvatureNonNegative { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
