use thiserror::Error;

/// Errors produced by the library. Every variant carries enough context to
/// locate the failing input without re-running the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BmxError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{op} requires a cubic hypermatrix, got shape {shape:?}")]
    NotCubic { op: &'static str, shape: [usize; 3] },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare { op: &'static str, rows: usize, cols: usize },

    #[error("singular fiber system at fiber {fiber:?} (condition estimate {cond:.3e})")]
    SingularFiber { fiber: (usize, usize), cond: f64 },

    #[error("degenerate {family} family: {detail}")]
    DegenerateFamily { family: &'static str, detail: String },

    #[error("singular linear system ({context}): condition estimate {cond:.3e}")]
    SingularSystem { context: String, cond: f64 },

    #[error("no branch satisfies the constraints: best residual {best:.3e} exceeds {tol:.3e}")]
    NoBranch { best: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("document error in field `{field}`: {message}")]
    Document { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, BmxError>;
