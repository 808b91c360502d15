use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inadmissible configuration (m={m}, k={k}): l={l} gives m2 = l-m-1 = {m2} < 1")]
    Inadmissible { m: usize, k: usize, l: usize, m2: i64 },

    #[error("no skew generator construction for m={m}: {reason}")]
    Unsupported { m: usize, reason: String },

    #[error("projection did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("constraint Jacobian is singular (condition estimate {condition:e}); restart from a new point")]
    Singular { condition: f64 },

    #[error("point failed certification: constraint residual {constraints:e}, sphere residual {sphere:e}")]
    Uncertified { constraints: f64, sphere: f64 },

    #[error("sampling failed for {failures} of {requested} points after retries")]
    Sampling { failures: usize, requested: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("eigenvalue {eigenvalue} is farther than {radius:e} from every principal curvature in {{0, 1, -1}}")]
    Spectrum { eigenvalue: f64, radius: f64 },

    #[error("principal multiplicities {got:?} differ from expected {expected:?}")]
    LemmaViolation { expected: [usize; 3], got: [usize; 3] },

    #[error("parse error: {0}")]
    Parse(String),
}
