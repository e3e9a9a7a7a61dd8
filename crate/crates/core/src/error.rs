use thiserror::Error;

/// Errors raised by the measurement toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("dimension spec {factors:?} does not match matrix dimension {dim}")]
    InconsistentDims { factors: Vec<usize>, dim: usize },

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("state is not normalized: norm^2 = {norm_sq:.12}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("projector is not idempotent: ||P^2 - P|| = {0:.3e}")]
    NotProjector(f64),

    #[error("probabilities must be non-negative and sum to 1 (sum = {sum:.12})")]
    BadProbabilities { sum: f64 },

    #[error("probability {0:.3e} is negative beyond rounding")]
    NegativeProbability(f64),

    #[error("outcome has probability {prob:.3e}: impossible outcome")]
    ImpossibleOutcome { prob: f64 },

    #[error("outcome index {index} out of range for {count} outcomes")]
    OutcomeIndex { index: usize, count: usize },

    #[error("measurement model is incomplete: ||sum M^dag M - I|| = {deviation:.3e}")]
    Incomplete { deviation: f64 },

    #[error("invalid measurement model: {0}")]
    InvalidModel(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("contradiction: every hypothesis has zero posterior mass")]
    Contradiction,

    #[error("invalid coin data: {heads} heads in {tosses} tosses")]
    InvalidCoinData { heads: u64, tosses: u64 },

    #[error("expected {expected} states, got {got}")]
    WrongStateCount { expected: String, got: usize },

    #[error("unequal priors are not supported for {0}")]
    UnequalPriors(&'static str),

    #[error("states are linearly dependent (Gram min eigenvalue {min_eig:.3e}): unambiguous discrimination impossible")]
    LinearlyDependent { min_eig: f64 },

    #[error("phase grid has {0} samples; at least 8 required")]
    PhaseGridTooSmall(usize),

    #[error("orthogonal pre/post-selection: |<f|i>| = {overlap:.3e}, |<f|A|i>| = {numerator:.3e}")]
    OrthogonalSelection { overlap: f64, numerator: f64 },

    #[error("pointer grid too small: {leaked:.3e} of the norm leaks out of range")]
    GridTooSmall { leaked: f64 },

    #[error("basis is not complete and orthonormal: deviation {0:.3e}")]
    IncompleteBasis(f64),

    #[error("post-selection probability {0:.3e} is zero")]
    ZeroPostselection(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
