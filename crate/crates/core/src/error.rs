use thiserror::Error;

/// Errors raised by the library. Verification outcomes (an estimate that
/// fails to hold) are report content, not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("imbalance beta = {0} is not bistable (need |beta| < 1)")]
    NotBistable(f64),

    #[error("state u = {u} lies outside the working range [{lo}, {hi}]")]
    OutOfRange { u: f64, lo: f64, hi: f64 },

    #[error("potential is negative: F({u}) = {value}")]
    NegativePotential { u: f64, value: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("quadrature base point u0 = {0} is a zero of F")]
    SingularBasePoint(f64),

    #[error("value u = {u} is outside the quadrature interval ({lo}, {hi})")]
    OutsideQuadrature { u: f64, lo: f64, hi: f64 },

    #[error("direction vector has norm {0}, expected 1")]
    NonUnitDirection(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("time step dt = {dt} exceeds the stability bound {max}")]
    CflViolation { dt: f64, max: f64 },

    #[error("implicit solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("degenerate profile: phi'({s}) = {value} <= 0")]
    DegenerateProfile { s: f64, value: f64 },

    #[error("non-finite value at node {node} (t = {time})")]
    NonFinite { node: usize, time: f64 },

    #[error("snapshot interval must be positive, got {0}")]
    NonPositiveInterval(f64),

    #[error("bisection bracket for the wave speed not found on c in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("wave tail not converged at {side} end: |u - well| = {gap:e}")]
    TailNotConverged { side: &'static str, gap: f64 },

    #[error("profile residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error("missing file: {0}")]
    MissingFile(String),

    #[error("series file {0} has no data rows")]
    EmptySeries(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
