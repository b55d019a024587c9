use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator `{label}` is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { label: String, row: usize, pivot: f64 },

    #[error("generalized eigensolve did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNonConvergence { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lemma hypothesis violated: {0}")]
    LemmaHypothesis(String),

    #[error("initial displacement is zero")]
    ZeroDisplacement,

    #[error("{0}")]
    KindMismatch(String),

    #[error("no finite lower bound on [{lo}, {hi}]: f(s)s - 2(1+2a)F(s) keeps decreasing towards s = {edge}")]
    UnboundedBelow { lo: f64, hi: f64, edge: f64 },

    #[error("no sign change of H(c0) within {doublings} doublings (last c0 = {c0:e}, H = {value:e})")]
    NoSignChange { doublings: usize, c0: f64, value: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
