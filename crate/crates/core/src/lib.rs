//! Semiclassical dynamics of a two-species Bose-Einstein condensate coupled
//! to a quantized cavity mode with Kerr and second-order nonlinearities.
//!
//! The phase space is the cylinder `(z, Φ)` where `z ∈ [-1, 1]` is the
//! fractional population imbalance and `Φ` the total (field + spin) phase.
//! Three mean-field Hamiltonians are provided:
//!
//! * [`DoubleWellModel`] — the nonrigid pendulum of a BEC in a symmetric
//!   double well, `H = (Λ/2) z² - √(1-z²) cos Φ`;
//! * [`AsymmetricDoubleWellModel`] — the same with a detuning tilt and a
//!   phase π-shift, `H = (Δ + Λz/2) z - √(1-z²) cos Φ`;
//! * [`WeakRegimeModel`] — the cavity-driven junction with conserved
//!   excitation ratio `k`, `H = (Δ + Λz/2) z + √(2(k-z)(1-z²)) cos Φ`,
//!   a pendulum whose effective mass changes with `k`.
//!
//! On top of the models sit a conservative integrator ([`dynamics`]),
//! stationary-state analysis ([`stationary`]) and parameter sweeps with
//! pitchfork detection ([`bifurcation`]). Everything is deterministic and
//! free of shared mutable state; grids and sweeps parallelize internally
//! with ordered merges.

pub mod bifurcation;
pub mod dynamics;
mod error;
pub mod models;
pub mod stationary;

pub use error::{Error, SINGULARITY_GUARD};
pub use models::{
    AsymmetricDoubleWellModel, DoubleWellModel, EffectiveReduction, Model, PhaseState,
    PhysicalParams, RateForm, Reduction, ReductionWarning, SmallParameter, WeakRegimeModel,
    WEAK_REGIME_THRESHOLD,
};

/// Canonicalize an angle to the interval `(-π, π]`.
///
/// Phases are stored unwrapped for trajectory continuity; comparisons go
/// through this.
pub fn wrap_angle(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = phi % TAU;
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}
