use thiserror::Error;

/// Guard band on radical arguments. Vector-field evaluations whose radical
/// argument is below this raise [`Error::Singular`] instead of returning a
/// near-infinite phase rate.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// Errors raised by model evaluation and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `|z|` exceeds 1; the state is off the phase-space cylinder.
    #[error("population imbalance z = {0} lies outside [-1, 1]")]
    OutOfRange(f64),
    /// The excitation constraint `k - z >= 0` is violated.
    #[error("inaccessible state: k - z = {0} < 0")]
    Inaccessible(f64),
    /// A radical argument entered the singularity guard band.
    #[error("radical argument {0:e} inside the singularity guard band")]
    Singular(f64),
    /// A parameter reduction divided by a vanishing quantity.
    #[error("degenerate reduction: {0} vanishes")]
    DegenerateReduction(&'static str),
    /// A supplied parameter violates a model invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    /// The excitation-ratio curve has no real value at this point.
    #[error("no real excitation ratio: {0}")]
    NoRealExcitation(&'static str),
    /// An operation needed more recorded samples than the trajectory holds.
    #[error("trajectory holds {0} samples, need at least {1}")]
    TooFewSamples(usize, usize),
    /// A transition detector found the same fixed-point count across its
    /// whole search range.
    #[error("no transition detected: stationary-state count is constant over the range")]
    NoTransition,
}
