use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ratio vector undefined: |g_LT| = {0:e} is below the degeneracy cutoff")]
    DegenerateDenominator(f64),
    #[error("boundary asymptote hit at S' = {0}")]
    AsymptoteHit(f64),
    #[error("degenerate shock: {0}")]
    DegenerateShock(String),
    #[error("vector line is tangent to or misses the boundary (discriminant {0:e})")]
    TangentOrComplexRoots(f64),
    #[error("degenerate shares: {0}")]
    DegenerateShares(String),
    #[error("no Rybczynski sign pattern is mapped for {0}")]
    Unmapped(String),
    #[error("linear system is singular or ill-conditioned (pivot ratio {0:e})")]
    SingularSystem(f64),
    #[error("relative price change must be positive (P = {0}); enable time reversal to accept P < 0")]
    NegativePriceChange(f64),
    #[error("ambiguous sign: {0}")]
    AmbiguousSign(String),
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("equilibrium is specialized: outputs {0:?}")]
    Specialization([f64; 2]),
    #[error("rejection sampler exhausted after {0} draws")]
    ExhaustedRejection(usize),
    #[error("unsupported factor-intensity ranking: {0}")]
    UnsupportedRanking(String),
    #[error("relative price change is zero")]
    ZeroP,
    #[error("degenerate observation: {0}")]
    DegenerateObservation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
