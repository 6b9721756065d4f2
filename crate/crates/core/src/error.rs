use thiserror::Error;

/// Failures raised by grid construction, transforms and operator assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    GridSize(usize),
    #[error("degenerate interval [{min}, {max}]")]
    DegenerateInterval { min: f64, max: f64 },
    #[error("incompatible grids: {0}")]
    GridMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },
    #[error("mollifier width {sigma} is under-resolved on spacing {dx}; need at least {min_cells} cells")]
    UnderResolved { sigma: f64, dx: f64, min_cells: usize },
    #[error("{0} lies outside the grid")]
    OutOfGrid(String),
    #[error("operator is not Hermitian (residual {residual})")]
    NotHermitian { residual: f64 },
    #[error("weight must be non-negative (minimum {min})")]
    NegativeWeight { min: f64 },
    #[error("kernel route is not available: {0}")]
    KernelPathUnavailable(String),
    #[error("initial state leaks outside the interval (mass {mass:e} beyond tolerance)")]
    SupportViolation { mass: f64 },
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("empty table: {0}")]
    EmptyTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
