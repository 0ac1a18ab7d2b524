//! Mean-field Hamiltonians, their vector fields, and the physical-to-effective
//! parameter reduction.
//!
//! All three models share the canonical structure `ż = -∂H/∂Φ`,
//! `Φ̇ = +∂H/∂z`; the analytic vector fields below are those gradients and
//! the test suite checks them against central finite differences.

use crate::error::{Error, SINGULARITY_GUARD};

/// A point `(z, Φ)` on the cylinder phase space.
///
/// `z` is the fractional population imbalance, `Φ` the total phase in
/// radians. `phi` is stored unwrapped so trajectories stay continuous across
/// branch cuts; compare phases with [`crate::wrap_angle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub z: f64,
    pub phi: f64,
}

impl PhaseState {
    pub fn new(z: f64, phi: f64) -> Self {
        Self { z, phi }
    }
}

/// Form of the weak-regime phase-rate numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateForm {
    /// `1 + 2kz - 3z²`, the z-derivative of the radical squared. This is the
    /// form consistent with `Φ̇ = +∂H/∂z`, so energy is conserved along
    /// integrated orbits and stationary states coincide with the
    /// excitation-ratio curve.
    #[default]
    GradientConsistent,
    /// `1 + 2kz + 3z²`: the sign of the curvature term flipped. Kept for
    /// comparison runs; it is not the gradient of the energy and conserves
    /// nothing.
    FlippedCurvature,
}

/// A conservative two-dimensional phase-space model on the cylinder.
pub trait Model {
    /// Dimensionless energy at `state`.
    fn energy(&self, state: PhaseState) -> Result<f64, Error>;

    /// Vector field `(dz/dt, dΦ/dt)` at `state`.
    fn velocity(&self, state: PhaseState) -> Result<(f64, f64), Error>;

    /// Analytic Jacobian of the vector field, rows `(ż, Φ̇)`, columns `(z, Φ)`.
    fn velocity_jacobian(&self, state: PhaseState) -> Result<[[f64; 2]; 2], Error>;

    /// Whether `state` lies in the model's accessible region.
    fn accessible(&self, state: PhaseState) -> bool {
        state.z.abs() <= 1.0
    }

    /// Open z-interval containing all evaluable states.
    fn z_interval(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    /// Distance from `state` to the nearest phase-space boundary, measured by
    /// the smallest of the model's constraint expressions.
    fn boundary_clearance(&self, state: PhaseState) -> f64 {
        (1.0 - state.z) * (1.0 + state.z)
    }
}

/// Symmetric double well: `H = (Λ/2) z² - √(1-z²) cos Φ`.
///
/// `coupling_ratio` is the on-site interaction over the tunnelling matrix
/// element; the pitchfork sits at `Λ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellModel {
    pub coupling_ratio: f64,
}

impl DoubleWellModel {
    pub fn new(coupling_ratio: f64) -> Self {
        Self { coupling_ratio }
    }
}

// 1 - z^2 in the factored form; exact near |z| = 1 where the naive square
// cancels.
fn one_minus_z2(z: f64) -> f64 {
    (1.0 - z) * (1.0 + z)
}

fn check_on_cylinder(z: f64) -> Result<(), Error> {
    if z.abs() > 1.0 {
        Err(Error::OutOfRange(z))
    } else {
        Ok(())
    }
}

impl Model for DoubleWellModel {
    fn energy(&self, state: PhaseState) -> Result<f64, Error> {
        check_on_cylinder(state.z)?;
        let radical = one_minus_z2(state.z).sqrt();
        Ok(0.5 * self.coupling_ratio * state.z * state.z - radical * state.phi.cos())
    }

    fn velocity(&self, state: PhaseState) -> Result<(f64, f64), Error> {
        check_on_cylinder(state.z)?;
        let omz2 = one_minus_z2(state.z);
        if omz2 < SINGULARITY_GUARD {
            return Err(Error::Singular(omz2));
        }
        let s = omz2.sqrt();
        let z_dot = -s * state.phi.sin();
        let phi_dot = self.coupling_ratio * state.z + state.z * state.phi.cos() / s;
        Ok((z_dot, phi_dot))
    }

    fn velocity_jacobian(&self, state: PhaseState) -> Result<[[f64; 2]; 2], Error> {
        check_on_cylinder(state.z)?;
        let omz2 = one_minus_z2(state.z);
        if omz2 < SINGULARITY_GUARD {
            return Err(Error::Singular(omz2));
        }
        let s = omz2.sqrt();
        let (sin, cos) = state.phi.sin_cos();
        Ok([
            [state.z * sin / s, -s * cos],
            [self.coupling_ratio + cos / (omz2 * s), -state.z * sin / s],
        ])
    }
}

/// Asymmetric double well: `H = (Δ + Λz/2) z - √(1-z²) cos Φ`.
///
/// With `Δ = 0` this is exactly [`DoubleWellModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricDoubleWellModel {
    pub detuning: f64,
    pub coupling_ratio: f64,
}

impl AsymmetricDoubleWellModel {
    pub fn new(detuning: f64, coupling_ratio: f64) -> Self {
        Self {
            detuning,
            coupling_ratio,
        }
    }
}

impl Model for AsymmetricDoubleWellModel {
    fn energy(&self, state: PhaseState) -> Result<f64, Error> {
        check_on_cylinder(state.z)?;
        let radical = one_minus_z2(state.z).sqrt();
        Ok((self.detuning + 0.5 * self.coupling_ratio * state.z) * state.z
            - radical * state.phi.cos())
    }

    fn velocity(&self, state: PhaseState) -> Result<(f64, f64), Error> {
        check_on_cylinder(state.z)?;
        let omz2 = one_minus_z2(state.z);
        if omz2 < SINGULARITY_GUARD {
            return Err(Error::Singular(omz2));
        }
        let s = omz2.sqrt();
        let z_dot = -s * state.phi.sin();
        let phi_dot =
            self.detuning + self.coupling_ratio * state.z + state.z * state.phi.cos() / s;
        Ok((z_dot, phi_dot))
    }

    fn velocity_jacobian(&self, state: PhaseState) -> Result<[[f64; 2]; 2], Error> {
        check_on_cylinder(state.z)?;
        let omz2 = one_minus_z2(state.z);
        if omz2 < SINGULARITY_GUARD {
            return Err(Error::Singular(omz2));
        }
        let s = omz2.sqrt();
        let (sin, cos) = state.phi.sin_cos();
        Ok([
            [state.z * sin / s, -s * cos],
            [self.coupling_ratio + cos / (omz2 * s), -state.z * sin / s],
        ])
    }
}

/// Cavity-driven junction in the weak regime:
/// `H = (Δ + Λz/2) z + √(2(k-z)(1-z²)) cos Φ`, in units of `ħNλ/2`.
///
/// `detuning` is `Δ = (δ + κ)/λ`, `coupling_ratio` is `Λ = ξ/λ`, and
/// `excitation_ratio` is `k = 2𝒩/N`, twice the conserved mean excitation
/// number per atom. States with `k - z < 0` are inaccessible (the energy
/// would be complex).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRegimeModel {
    pub detuning: f64,
    pub coupling_ratio: f64,
    pub excitation_ratio: f64,
    pub rate_form: RateForm,
}

impl WeakRegimeModel {
    pub fn new(detuning: f64, coupling_ratio: f64, excitation_ratio: f64) -> Self {
        Self {
            detuning,
            coupling_ratio,
            excitation_ratio,
            rate_form: RateForm::GradientConsistent,
        }
    }

    pub fn with_rate_form(mut self, rate_form: RateForm) -> Self {
        self.rate_form = rate_form;
        self
    }

    /// Build from a completed parameter reduction plus the conserved
    /// excitation ratio (set by the initial condition, not the reduction).
    pub fn from_reduction(reduction: &Reduction, excitation_ratio: f64) -> Self {
        Self::new(reduction.detuning, reduction.coupling_ratio, excitation_ratio)
    }

    /// Squared radical `2(k - z)(1 - z²)`.
    fn radical_sq(&self, z: f64) -> f64 {
        2.0 * (self.excitation_ratio - z) * one_minus_z2(z)
    }

    fn check_accessible(&self, z: f64) -> Result<(), Error> {
        check_on_cylinder(z)?;
        let deficit = self.excitation_ratio - z;
        if deficit < 0.0 {
            Err(Error::Inaccessible(deficit))
        } else {
            Ok(())
        }
    }

    /// Mean photon number `n = N (k - z) / 2` for an ensemble of `N` atoms.
    pub fn photon_number(&self, state: PhaseState, ensemble_size: u64) -> Result<f64, Error> {
        self.check_accessible(state.z)?;
        Ok(ensemble_size as f64 * (self.excitation_ratio - state.z) / 2.0)
    }

    // Numerator of the phase-rate fraction, plus the radical-derivative
    // numerator used in the Jacobian (they coincide for the
    // gradient-consistent form).
    fn rate_numerators(&self, z: f64) -> (f64, f64) {
        let grad = 1.0 + 2.0 * self.excitation_ratio * z - 3.0 * z * z;
        let used = match self.rate_form {
            RateForm::GradientConsistent => grad,
            RateForm::FlippedCurvature => 1.0 + 2.0 * self.excitation_ratio * z + 3.0 * z * z,
        };
        (used, grad)
    }
}

impl Model for WeakRegimeModel {
    fn energy(&self, state: PhaseState) -> Result<f64, Error> {
        self.check_accessible(state.z)?;
        Ok((self.detuning + 0.5 * self.coupling_ratio * state.z) * state.z
            + self.radical_sq(state.z).sqrt() * state.phi.cos())
    }

    fn velocity(&self, state: PhaseState) -> Result<(f64, f64), Error> {
        self.check_accessible(state.z)?;
        let r2 = self.radical_sq(state.z);
        if r2 < SINGULARITY_GUARD {
            return Err(Error::Singular(r2));
        }
        let s = r2.sqrt();
        let (u, _) = self.rate_numerators(state.z);
        let z_dot = s * state.phi.sin();
        let phi_dot =
            self.detuning + self.coupling_ratio * state.z - u * state.phi.cos() / s;
        Ok((z_dot, phi_dot))
    }

    fn velocity_jacobian(&self, state: PhaseState) -> Result<[[f64; 2]; 2], Error> {
        self.check_accessible(state.z)?;
        let r2 = self.radical_sq(state.z);
        if r2 < SINGULARITY_GUARD {
            return Err(Error::Singular(r2));
        }
        let s = r2.sqrt();
        let (sin, cos) = state.phi.sin_cos();
        let (u, u_grad) = self.rate_numerators(state.z);
        let du = match self.rate_form {
            RateForm::GradientConsistent => 2.0 * self.excitation_ratio - 6.0 * state.z,
            RateForm::FlippedCurvature => 2.0 * self.excitation_ratio + 6.0 * state.z,
        };
        // d(√r2)/dz = -u_grad/√r2, so d(u/√r2)/dz = du/√r2 + u·u_grad/r2^{3/2}.
        Ok([
            [-u_grad * sin / s, s * cos],
            [
                self.coupling_ratio - cos * (du / s + u * u_grad / (r2 * s)),
                u * sin / s,
            ],
        ])
    }

    fn accessible(&self, state: PhaseState) -> bool {
        state.z.abs() <= 1.0 && self.excitation_ratio - state.z >= 0.0
    }

    fn z_interval(&self) -> (f64, f64) {
        (-1.0, self.excitation_ratio.min(1.0))
    }

    fn boundary_clearance(&self, state: PhaseState) -> f64 {
        one_minus_z2(state.z).min(self.excitation_ratio - state.z)
    }
}

/// Default threshold above which the small parameters of the reduction
/// trigger a weak-regime warning.
pub const WEAK_REGIME_THRESHOLD: f64 = 0.01;

/// Raw constants of the full cavity-condensate Hamiltonian.
///
/// `field_frequency` is the (already shifted) cavity frequency ω₀,
/// `atom_frequency` the hyperfine transition ω_a, `coupling` the
/// field-ensemble coupling g, `kerr` the third-order field coefficient κ,
/// `parametric` the two-photon coefficient χ, and `intra_ensemble` the
/// collective atom-atom interaction ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub field_frequency: f64,
    pub atom_frequency: f64,
    pub coupling: f64,
    pub kerr: f64,
    pub parametric: f64,
    pub intra_ensemble: f64,
    pub ensemble_size: u64,
}

impl PhysicalParams {
    fn validate(&self) -> Result<(), Error> {
        if self.ensemble_size < 1 {
            return Err(Error::InvalidParameter("ensemble size must be at least 1"));
        }
        if !(self.field_frequency > 0.0) {
            return Err(Error::InvalidParameter("field frequency must be positive"));
        }
        if !(self.atom_frequency > 0.0) {
            return Err(Error::InvalidParameter("atom frequency must be positive"));
        }
        Ok(())
    }
}

/// Which small parameter a [`ReductionWarning`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallParameter {
    Eta,
    Nu,
}

impl std::fmt::Display for SmallParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmallParameter::Eta => write!(f, "eta"),
            SmallParameter::Nu => write!(f, "nu"),
        }
    }
}

/// Emitted (not raised) when a small parameter exceeds the weak-regime
/// threshold; the reduction is still returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionWarning {
    pub parameter: SmallParameter,
    pub value: f64,
    pub threshold: f64,
}

impl std::fmt::Display for ReductionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "small parameter {} = {:.6e} exceeds weak-regime threshold {:.6e}",
            self.parameter, self.value, self.threshold
        )
    }
}

/// The intermediate quantities of the two-transformation reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveReduction {
    /// Squeezing parameter `η = χ/ω₀`.
    pub eta: f64,
    /// Polariton parameter `ν = g(1 - 2η)/(ω_a + ω₀ - 4χη)`.
    pub nu: f64,
    /// Rotating-frame frequency `ω = ω₀ - 4χη`.
    pub omega: f64,
    /// Frequency detuning `δ = ω_a - ω`.
    pub delta: f64,
    /// Effective ensemble-field coupling `λ = ων`.
    pub lambda: f64,
}

/// Result of [`reduce_physical`]: the effective quantities plus the two
/// dimensionless weak-regime parameters they determine.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub effective: EffectiveReduction,
    /// `Δ = (δ + κ)/λ`.
    pub detuning: f64,
    /// `Λ = ξ/λ`.
    pub coupling_ratio: f64,
    pub warnings: Vec<ReductionWarning>,
}

/// Reduce raw model constants to the effective weak-regime parameters.
///
/// Warnings (not errors) are attached when `|η|` or `|ν|` exceeds
/// `threshold`; the excitation ratio `k` is not part of the reduction, it is
/// fixed by initial conditions.
pub fn reduce_physical(params: &PhysicalParams, threshold: f64) -> Result<Reduction, Error> {
    params.validate()?;
    let eta = params.parametric / params.field_frequency;
    let omega = params.field_frequency - 4.0 * params.parametric * eta;
    let nu_denominator = params.atom_frequency + params.field_frequency - 4.0 * params.parametric * eta;
    if nu_denominator == 0.0 {
        return Err(Error::DegenerateReduction("polariton denominator"));
    }
    let nu = params.coupling * (1.0 - 2.0 * eta) / nu_denominator;
    let delta = params.atom_frequency - omega;
    let lambda = omega * nu;
    if lambda == 0.0 {
        return Err(Error::DegenerateReduction("effective coupling lambda"));
    }
    let detuning = (delta + params.kerr) / lambda;
    let coupling_ratio = params.intra_ensemble / lambda;
    let effective = EffectiveReduction {
        eta,
        nu,
        omega,
        delta,
        lambda,
    };
    if ![eta, nu, omega, delta, lambda, detuning, coupling_ratio]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(Error::InvalidParameter("reduction is not finite"));
    }
    let mut warnings = Vec::new();
    for (parameter, value) in [(SmallParameter::Eta, eta), (SmallParameter::Nu, nu)] {
        if value.abs() > threshold {
            warnings.push(ReductionWarning {
                parameter,
                value,
                threshold,
            });
        }
    }
    Ok(Reduction {
        effective,
        detuning,
        coupling_ratio,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn st(z: f64, phi: f64) -> PhaseState {
        PhaseState::new(z, phi)
    }

    #[test]
    fn double_well_energy_values() {
        let m = DoubleWellModel::new(0.5);
        assert!((m.energy(st(0.0, PI)).unwrap() - 1.0).abs() < 1e-15);
        let m7 = DoubleWellModel::new(7.0);
        assert!((m7.energy(st(0.0, 0.0)).unwrap() + 1.0).abs() < 1e-15);
        // 0.0625 + sqrt(0.75), checked independently
        let e = m.energy(st(0.5, PI)).unwrap();
        assert!((e - 0.928_525_403_784_438_6).abs() < 1e-14);
    }

    #[test]
    fn double_well_energy_domain_error() {
        let m = DoubleWellModel::new(1.0);
        assert!(matches!(m.energy(st(1.2, 0.0)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn double_well_velocity_values() {
        let m = DoubleWellModel::new(3.0);
        // sin(pi) is ~1e-16 in floats, not exactly zero
        let (zd, _) = m.velocity(st(0.5, PI)).unwrap();
        assert!(zd.abs() < 1e-15);
        let (zd, pd) = m.velocity(st(0.0, PI)).unwrap();
        assert!(zd.abs() < 1e-15 && pd.abs() < 1e-15);
        let (zd, pd) = m.velocity(st(0.0, PI / 2.0)).unwrap();
        assert!((zd + 1.0).abs() < 1e-15);
        assert!(pd.abs() < 1e-15);
    }

    #[test]
    fn double_well_velocity_singularity_guard() {
        let m = DoubleWellModel::new(1.0);
        assert!(matches!(
            m.velocity(st(1.0 - 1e-12, 0.0)),
            Err(Error::Singular(_))
        ));
        assert!(matches!(m.velocity(st(-1.0, 0.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn weak_energy_values() {
        let m = WeakRegimeModel::new(-0.3, 2.0, 10.0);
        // -(2*10)^(1/2) at z=0, phi=pi
        assert!((m.energy(st(0.0, PI)).unwrap() + 20.0f64.sqrt()).abs() < 1e-14);
        let m = WeakRegimeModel::new(-0.5, 1.0, 0.1);
        assert!((m.energy(st(0.1, 0.3)).unwrap() + 0.045).abs() < 1e-15);
        let m = WeakRegimeModel::new(0.5, 8.0, 10.0);
        assert!((m.energy(st(1.0, 1.7)).unwrap() - 4.5).abs() < 1e-15);
    }

    #[test]
    fn weak_energy_real_iff_accessible() {
        let m = WeakRegimeModel::new(0.2, 1.0, 0.5);
        for i in 0..200 {
            let z = -1.0 + 2.0 * i as f64 / 199.0;
            let s = st(z, 0.7);
            match m.energy(s) {
                Ok(e) => {
                    assert!(m.accessible(s));
                    assert!(e.is_finite());
                }
                Err(Error::Inaccessible(_)) => assert!(!m.accessible(s)),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn weak_velocity_values() {
        let m = WeakRegimeModel::new(-0.5, 1.0, 10.0);
        let (zd, pd) = m.velocity(st(0.0, 0.0)).unwrap();
        assert!(zd.abs() < 1e-15);
        assert!((pd - (-0.5 - 1.0 / 20.0f64.sqrt())).abs() < 1e-15);
        // on the stationary-phase lines z-dot vanishes
        for &phi in &[0.0, PI] {
            for i in 0..50 {
                let z = -0.9 + 1.7 * i as f64 / 49.0;
                let (zd, _) = m.velocity(st(z, phi)).unwrap();
                assert!(zd.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn weak_velocity_guards() {
        let m = WeakRegimeModel::new(0.0, 1.0, 0.5);
        assert!(matches!(
            m.velocity(st(0.6, 0.0)),
            Err(Error::Inaccessible(_))
        ));
        assert!(matches!(
            m.velocity(st(0.5 - 1e-12, 0.0)),
            Err(Error::Singular(_))
        ));
        assert!(matches!(m.velocity(st(-1.5, 0.0)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn accessibility_boundary_inclusive() {
        let m = WeakRegimeModel::new(0.0, 1.0, 0.1);
        assert!(!m.accessible(st(0.5, 0.0)));
        assert!(m.accessible(st(0.1, 0.0)));
        let big = WeakRegimeModel::new(0.0, 1.0, 10.0);
        assert!(big.accessible(st(0.5, 0.0)));
        let edge = WeakRegimeModel::new(0.0, 1.0, 0.3);
        assert!(edge.accessible(st(0.3, 0.0)));
    }

    #[test]
    fn photon_number_values() {
        let m = WeakRegimeModel::new(0.0, 0.0, 10.0);
        assert_eq!(m.photon_number(st(1.0, 0.0), 7).unwrap(), 31.5);
        assert_eq!(m.photon_number(st(0.0, 0.0), 100).unwrap(), 500.0);
        let m = WeakRegimeModel::new(0.0, 0.0, 0.1);
        assert_eq!(m.photon_number(st(0.1, 0.0), 64).unwrap(), 0.0);
        assert_eq!(m.photon_number(st(-1.0, 0.0), 1000).unwrap(), 550.0);
        assert!(matches!(
            m.photon_number(st(0.2, 0.0), 10),
            Err(Error::Inaccessible(_))
        ));
    }

    #[test]
    fn photon_number_nonnegative_on_accessible() {
        let m = WeakRegimeModel::new(0.3, -2.0, 0.7);
        for i in 0..300 {
            let z = -1.0 + 2.0 * i as f64 / 299.0;
            if m.accessible(st(z, 0.0)) {
                assert!(m.photon_number(st(z, 0.0), 999).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn asym_equals_double_well_at_zero_detuning() {
        let asym = AsymmetricDoubleWellModel::new(0.0, 0.8);
        let dw = DoubleWellModel::new(0.8);
        for i in 0..80 {
            let z = -0.98 + 1.96 * i as f64 / 79.0;
            let phi = -3.0 + 6.0 * i as f64 / 79.0;
            let s = st(z, phi);
            assert_eq!(asym.energy(s).unwrap(), dw.energy(s).unwrap());
            assert_eq!(asym.velocity(s).unwrap(), dw.velocity(s).unwrap());
        }
    }

    #[test]
    fn asym_energy_values() {
        let m = AsymmetricDoubleWellModel::new(0.4, 2.0);
        assert!((m.energy(st(0.0, 0.0)).unwrap() + 1.0).abs() < 1e-15);
        let m = AsymmetricDoubleWellModel::new(0.5, 0.5);
        // 0.25 + 0.0625 + sqrt(0.75), checked independently
        assert!((m.energy(st(0.5, PI)).unwrap() - 1.178_525_403_784_438_6).abs() < 1e-14);
    }

    #[test]
    fn reduce_physical_collapsed_squeezing() {
        let p = PhysicalParams {
            field_frequency: 1.0,
            atom_frequency: 1.0,
            coupling: 0.01,
            kerr: 0.0,
            parametric: 0.0,
            intra_ensemble: 0.0,
            ensemble_size: 1000,
        };
        let r = reduce_physical(&p, WEAK_REGIME_THRESHOLD).unwrap();
        assert_eq!(r.effective.eta, 0.0);
        assert_eq!(r.effective.nu, 0.005);
        assert_eq!(r.effective.omega, 1.0);
        assert_eq!(r.effective.delta, 0.0);
        assert_eq!(r.effective.lambda, 0.005);
        assert_eq!(r.detuning, 0.0);
        assert_eq!(r.coupling_ratio, 0.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn reduce_physical_kerr_shifted() {
        let p = PhysicalParams {
            field_frequency: 1.0,
            atom_frequency: 1.002,
            coupling: 0.01,
            kerr: 0.001,
            parametric: 0.0,
            intra_ensemble: 0.04,
            ensemble_size: 100_000,
        };
        let r = reduce_physical(&p, WEAK_REGIME_THRESHOLD).unwrap();
        // nu = 0.01/2.002, lambda = omega*nu = nu, Delta = 0.003*2.002/0.01,
        // Lambda = 0.04*2.002/0.01; checked against a separate evaluation
        assert!((r.effective.delta - 0.002).abs() < 1e-15);
        assert!((r.effective.lambda - 0.004_995_004_995_004_995).abs() < 1e-17);
        assert!((r.detuning - 0.6006).abs() < 1e-12);
        assert!((r.coupling_ratio - 8.008).abs() < 1e-11);
    }

    #[test]
    fn reduce_physical_detuning_compensates_kerr() {
        // chi chosen so delta = -kappa, which forces Delta = 0
        let p = PhysicalParams {
            field_frequency: 1.0,
            atom_frequency: 0.99,
            coupling: 0.002,
            kerr: 0.0075,
            parametric: 0.025,
            intra_ensemble: 0.01,
            ensemble_size: 100,
        };
        let r = reduce_physical(&p, WEAK_REGIME_THRESHOLD).unwrap();
        assert!((r.effective.delta + p.kerr).abs() < 1e-15);
        assert!(r.detuning.abs() < 1e-12);
        // eta = 0.025 exceeds the default threshold
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.warnings[0].parameter, SmallParameter::Eta);
    }

    #[test]
    fn reduce_physical_no_nonlinearities_recovers_bare_detuning() {
        let p = PhysicalParams {
            field_frequency: 1.0,
            atom_frequency: 1.3,
            coupling: 0.004,
            kerr: 0.0,
            parametric: 0.0,
            intra_ensemble: 0.0,
            ensemble_size: 10,
        };
        let r = reduce_physical(&p, WEAK_REGIME_THRESHOLD).unwrap();
        let expected = (p.atom_frequency - p.field_frequency) / r.effective.lambda;
        assert_eq!(r.detuning, expected);
        assert_eq!(r.coupling_ratio, 0.0);
    }

    #[test]
    fn reduce_physical_degenerate_coupling() {
        let p = PhysicalParams {
            field_frequency: 1.0,
            atom_frequency: 1.0,
            coupling: 0.0,
            kerr: 0.0,
            parametric: 0.0,
            intra_ensemble: 0.1,
            ensemble_size: 10,
        };
        assert!(matches!(
            reduce_physical(&p, WEAK_REGIME_THRESHOLD),
            Err(Error::DegenerateReduction(_))
        ));
    }

    #[test]
    fn reduce_physical_rejects_bad_params() {
        let p = PhysicalParams {
            field_frequency: -1.0,
            atom_frequency: 1.0,
            coupling: 0.01,
            kerr: 0.0,
            parametric: 0.0,
            intra_ensemble: 0.0,
            ensemble_size: 10,
        };
        assert!(matches!(
            reduce_physical(&p, WEAK_REGIME_THRESHOLD),
            Err(Error::InvalidParameter(_))
        ));
    }
}
