use thiserror::Error;

use crate::potential::Family;
use crate::propagate::EvolutionResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: {n_points} points (need at least {min})")]
    TooCoarse { n_points: usize, min: usize },

    #[error("domain must have positive extent (got {lower} .. {upper})")]
    NonPositiveDomain { lower: f64, upper: f64 },

    #[error("periodic grids need an even number of points (got {0})")]
    OddPeriodic(usize),

    #[error("spectral differentiation requires a periodic grid")]
    MethodGridMismatch,

    #[error("cosine differentiation requires a non-periodic grid")]
    CosineOnPeriodic,

    #[error("spectral differentiation of a masked field is undefined")]
    MaskedSpectral,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has {got} samples but grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {0} in an unmasked field")]
    NonFinite(usize),

    #[error("parity operations require a symmetric grid")]
    AsymmetricGrid,

    #[error("singular sample: x = {x} lies within {tolerance:e} of the pole at {pole}")]
    SingularSample { x: f64, pole: f64, tolerance: f64 },

    #[error("grid interval [{lower}, {upper}] contains the pole at {pole}")]
    PoleInInterval { lower: f64, upper: f64, pole: f64 },

    #[error("x = {0} is outside the domain of the phase profile")]
    DomainViolation(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation not defined for family {0}")]
    WrongFamily(Family),

    #[error("collocation basis is ill-conditioned (condition number {0:e})")]
    IllConditionedBasis(f64),

    #[error("no sample exceeds the local-eigenvalue threshold")]
    AllSamplesBelowThreshold,

    #[error("family {0} cannot be propagated on a periodic grid")]
    UnsupportedFamily(Family),

    #[error("evolution became unstable at t = {time} (|psi| exceeded {limit:e})")]
    UnstableRun {
        time: f64,
        limit: f64,
        partial: Box<EvolutionResult>,
    },
}
