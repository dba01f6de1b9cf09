use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rational function has a pole at the evaluation point")]
    PoleAtPoint,

    #[error("off-diagonal entry a_{index} = {value} is not positive")]
    NonPositiveOffDiagonal { index: usize, value: f64 },

    #[error("exact rational coefficients are not available for this operator")]
    ExactUnavailable,

    #[error("lambda = {0} is not an elliptic point of the periodic operator")]
    NotElliptic(f64),

    #[error("|m_12(lambda)| < 1e-13; the Floquet normalization phi_0 = 1 degenerates")]
    DegenerateNormalization,

    #[error("band structure is already non-degenerate; nothing to split")]
    NothingToSplit,

    #[error("no splitting perturbation found within {0} shrink steps")]
    SplitSearchFailed(u32),

    #[error("C(lambda; T) = 0 at lambda = {0}: the embedding construction fails here")]
    EmbeddingObstruction(f64),

    #[error("tail tolerance {tol} requires cutoff {required} beyond the budget {budget}")]
    TailBudgetExceeded { tol: f64, required: u64, budget: u64 },

    #[error("the Wigner-von Neumann construction requires b = 0 on the diagonal")]
    UnsupportedDiagonal,

    #[error("u_2 = u_3 = 0 at the start of the candidate eigenvector")]
    DegenerateStart,

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
