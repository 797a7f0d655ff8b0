use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A function was evaluated outside its domain (e.g. `log|z_j|` at `z_j = 0`).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("sampling failure: {0}")]
    Sampling(String),

    /// Component discovery disagreed with itself (grid vs. labeler, or a face lookup failed).
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("expression is not a monomial: {0}")]
    Shape(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("cocycle condition violated: {0}")]
    CocycleViolation(String),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("isomorphism validation failed: {0}")]
    IsoValidation(String),

    #[error("cover set name collision: {0}")]
    NameCollision(String),

    #[error("restriction is empty: no cover set meets the subregion")]
    EmptyRestriction,

    #[error("chart violation: {0}")]
    ChartViolation(String),

    #[error("rounding residual {residual:.3e} exceeds {tol:.1e} at simplex {simplex:?} component {label}")]
    Rounding {
        simplex: Vec<usize>,
        label: u32,
        residual: f64,
        tol: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
