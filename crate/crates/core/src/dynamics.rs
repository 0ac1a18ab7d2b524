//! Trajectory integration with conserved-energy monitoring and
//! boundary-aware termination.
//!
//! The default integrator is fixed-step classical RK4: deterministic,
//! fourth order, and sufficient for the bounded orbits of these models. An
//! embedded Dormand-Prince 5(4) pair is available for orbits that graze the
//! phase-space boundary (separatrix-adjacent runs), where the phase rate
//! stiffens.

use crate::error::Error;
use crate::models::{Model, PhaseState};

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached `t_end`.
    Completed,
    /// The next step would have left the accessible region or entered the
    /// singularity guard band.
    BoundaryHit,
    /// The adaptive controller drove the step below its floor away from any
    /// boundary. Never produced by the fixed-step method.
    StepUnderflow,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Completed => write!(f, "completed"),
            Termination::BoundaryHit => write!(f, "boundary_hit"),
            Termination::StepUnderflow => write!(f, "step_underflow"),
        }
    }
}

/// Integration method selector for [`IntegratorConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge-Kutta.
    FixedRk4,
    /// Embedded Dormand-Prince 5(4) pair with proportional step control.
    AdaptiveRk45 { rel_tol: f64 },
}

/// Integration parameters. `record_stride` thins the stored samples: the
/// initial state, every `record_stride`-th accepted step, and the final
/// state are recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub boundary_margin: f64,
    pub method: Method,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, record_stride: usize) -> Self {
        self.record_stride = record_stride;
        self
    }

    pub fn adaptive(mut self, rel_tol: f64) -> Self {
        self.method = Method::AdaptiveRk45 { rel_tol };
        self
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 100.0,
            record_stride: 1,
            boundary_margin: 1e-6,
            method: Method::FixedRk4,
        }
    }
}

/// A time-ordered record of integrated states with their energies.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub energies: Vec<f64>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> PhaseState {
        *self.states.last().expect("trajectory holds at least the initial state")
    }

    /// Smallest and largest recorded imbalance.
    pub fn z_extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.states {
            lo = lo.min(s.z);
            hi = hi.max(s.z);
        }
        (lo, hi)
    }
}

struct Recorder<'a, M: Model> {
    model: &'a M,
    stride: usize,
    accepted: usize,
    times: Vec<f64>,
    states: Vec<PhaseState>,
    energies: Vec<f64>,
}

impl<'a, M: Model> Recorder<'a, M> {
    fn new(model: &'a M, stride: usize) -> Self {
        Self {
            model,
            stride,
            accepted: 0,
            times: Vec::new(),
            states: Vec::new(),
            energies: Vec::new(),
        }
    }

    fn push(&mut self, t: f64, state: PhaseState) {
        self.times.push(t);
        self.states.push(state);
        self.energies.push(
            self.model
                .energy(state)
                .expect("recorded states stay inside the accessible region"),
        );
    }

    fn on_step(&mut self, t: f64, state: PhaseState) {
        self.accepted += 1;
        if self.accepted % self.stride == 0 {
            self.push(t, state);
        }
    }

    /// Record the final state if the stride skipped it.
    fn flush(&mut self, t: f64, state: PhaseState) {
        if self.times.last() != Some(&t) {
            self.push(t, state);
        }
    }

    fn finish(self, termination: Termination) -> Trajectory {
        Trajectory {
            times: self.times,
            states: self.states,
            energies: self.energies,
            termination,
        }
    }
}

fn offset(y: PhaseState, h: f64, v: (f64, f64)) -> PhaseState {
    PhaseState::new(y.z + h * v.0, y.phi + h * v.1)
}

fn rk4_step<M: Model>(model: &M, y: PhaseState, dt: f64) -> Result<PhaseState, Error> {
    let k1 = model.velocity(y)?;
    let k2 = model.velocity(offset(y, 0.5 * dt, k1))?;
    let k3 = model.velocity(offset(y, 0.5 * dt, k2))?;
    let k4 = model.velocity(offset(y, dt, k3))?;
    Ok(PhaseState::new(
        y.z + dt * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) / 6.0,
        y.phi + dt * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) / 6.0,
    ))
}

fn admissible<M: Model>(model: &M, state: PhaseState, margin: f64) -> bool {
    state.z.abs() <= 1.0
        && model.accessible(state)
        && model.boundary_clearance(state) >= margin
}

/// Integrate `model` from `initial` according to `config`.
///
/// The initial state must be accessible and clear of the boundary margin.
/// Integration halts early with [`Termination::BoundaryHit`] when the next
/// step would violate accessibility or enter the singularity guard band; the
/// trajectory never records such a state.
pub fn integrate<M: Model>(
    model: &M,
    initial: PhaseState,
    config: &IntegratorConfig,
) -> Result<Trajectory, Error> {
    assert!(config.dt > 0.0, "dt must be positive");
    assert!(config.t_end > 0.0, "t_end must be positive");
    assert!(config.record_stride >= 1, "record_stride must be at least 1");

    // Validates domain, accessibility, and the singularity guard in one go.
    model.velocity(initial)?;
    if !admissible(model, initial, config.boundary_margin) {
        return Err(Error::Singular(model.boundary_clearance(initial)));
    }

    let mut rec = Recorder::new(model, config.record_stride);
    rec.push(0.0, initial);

    match config.method {
        Method::FixedRk4 => {
            let n_steps = (config.t_end / config.dt).round().max(1.0) as u64;
            let mut y = initial;
            let mut t = 0.0;
            for i in 1..=n_steps {
                let next = match rk4_step(model, y, config.dt) {
                    Ok(next) => next,
                    Err(_) => {
                        rec.flush(t, y);
                        return Ok(rec.finish(Termination::BoundaryHit));
                    }
                };
                if !admissible(model, next, config.boundary_margin) {
                    rec.flush(t, y);
                    return Ok(rec.finish(Termination::BoundaryHit));
                }
                y = next;
                t = i as f64 * config.dt;
                rec.on_step(t, y);
            }
            rec.flush(t, y);
            Ok(rec.finish(Termination::Completed))
        }
        Method::AdaptiveRk45 { rel_tol } => {
            integrate_adaptive(model, initial, config, rel_tol, rec)
        }
    }
}

// Dormand-Prince 5(4) tableau (the system is autonomous, so the c nodes
// never enter).
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and 4th-order weights, for the error estimate.
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn dp_step<M: Model>(
    model: &M,
    y: PhaseState,
    h: f64,
) -> Result<(PhaseState, f64, f64), Error> {
    let mut k = [(0.0, 0.0); 7];
    k[0] = model.velocity(y)?;
    for stage in 0..6 {
        let mut dz = 0.0;
        let mut dphi = 0.0;
        for (j, kj) in k.iter().enumerate().take(stage + 1) {
            dz += DP_A[stage][j] * kj.0;
            dphi += DP_A[stage][j] * kj.1;
        }
        k[stage + 1] = model.velocity(PhaseState::new(y.z + h * dz, y.phi + h * dphi))?;
    }
    // stage 7 used the 5th-order weights, so k[6] is the FSAL derivative and
    // the last trial state is the solution itself
    let mut z5 = y.z;
    let mut phi5 = y.phi;
    for (j, kj) in k.iter().enumerate().take(6) {
        z5 += h * DP_A[5][j] * kj.0;
        phi5 += h * DP_A[5][j] * kj.1;
    }
    let mut err_z = 0.0;
    let mut err_phi = 0.0;
    for (j, kj) in k.iter().enumerate() {
        err_z += DP_E[j] * kj.0;
        err_phi += DP_E[j] * kj.1;
    }
    Ok((PhaseState::new(z5, phi5), h * err_z, h * err_phi))
}

fn integrate_adaptive<M: Model>(
    model: &M,
    initial: PhaseState,
    config: &IntegratorConfig,
    rel_tol: f64,
    mut rec: Recorder<'_, M>,
) -> Result<Trajectory, Error> {
    let h_min = 1e-14 * config.t_end;
    let mut y = initial;
    let mut t = 0.0;
    let mut h = config.dt.min(config.t_end);
    loop {
        if t >= config.t_end {
            rec.flush(t, y);
            return Ok(rec.finish(Termination::Completed));
        }
        h = h.min(config.t_end - t);
        let trial = dp_step(model, y, h);
        let (next, err_z, err_phi) = match trial {
            Ok(v) => v,
            Err(_) => {
                // stage left the domain: shrink toward the boundary
                if h <= h_min {
                    rec.flush(t, y);
                    return Ok(rec.finish(Termination::BoundaryHit));
                }
                h *= 0.5;
                continue;
            }
        };
        if !admissible(model, next, config.boundary_margin) {
            if h <= h_min {
                rec.flush(t, y);
                return Ok(rec.finish(Termination::BoundaryHit));
            }
            h *= 0.5;
            continue;
        }
        let scale_z = rel_tol * (1.0 + y.z.abs());
        let scale_phi = rel_tol * (1.0 + y.phi.abs());
        let err = (err_z / scale_z).abs().max((err_phi / scale_phi).abs());
        if err <= 1.0 {
            t += h;
            y = next;
            rec.on_step(t, y);
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
        } else {
            if h <= h_min {
                rec.flush(t, y);
                return Ok(rec.finish(Termination::StepUnderflow));
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
}

/// Largest deviation of the recorded energy from its initial value.
pub fn energy_drift(traj: &Trajectory) -> Result<f64, Error> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples(traj.len(), 2));
    }
    let e0 = traj.energies[0];
    Ok(traj
        .energies
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max))
}

/// A linear-interpolated crossing of a Poincaré section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionCrossing {
    pub t: f64,
    pub state: PhaseState,
}

/// Crossings of the section `Φ ≡ phi_value (mod 2π)`, ordered in time.
///
/// A trajectory sitting exactly on the section (a stationary point) yields
/// no crossings.
pub fn poincare_section(traj: &Trajectory, phi_value: f64) -> Vec<SectionCrossing> {
    let mut out = Vec::new();
    for i in 1..traj.len() {
        let d0 = crate::wrap_angle(traj.states[i - 1].phi - phi_value);
        let d1 = crate::wrap_angle(traj.states[i].phi - phi_value);
        // same-branch sign change only; a wrap jump is not a crossing
        if d0 * d1 < 0.0 && (d0 - d1).abs() < std::f64::consts::PI {
            let s = d0 / (d0 - d1);
            let t = traj.times[i - 1] + s * (traj.times[i] - traj.times[i - 1]);
            let z = traj.states[i - 1].z + s * (traj.states[i].z - traj.states[i - 1].z);
            let phi =
                traj.states[i - 1].phi + s * (traj.states[i].phi - traj.states[i - 1].phi);
            out.push(SectionCrossing {
                t,
                state: PhaseState::new(z, phi),
            });
        }
    }
    out
}
