//! Command-line and config-file parameter handling.
//!
//! Every option can also come from a flat `key=value` config file whose keys
//! mirror the long flag names; explicit flags win over file entries.

use std::collections::HashMap;
use std::fmt::Debug;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cavity-bec",
    about = "Semiclassical dynamics of a cavity-driven two-species condensate",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate a trajectory and emit t,z,phi,energy[,n_photon].
    Traj(TrajOpts),
    /// Locate stationary states and emit phi_star,z_star,stability,branch.
    FixedPoints(FixedPointsOpts),
    /// Sweep a parameter or bisect the excitation ratio for a transition.
    Bifurcation(BifurcationOpts),
    /// Evaluate the normalized energy grid over the phase-space cylinder.
    Landscape(LandscapeOpts),
    /// Reduce raw physical constants to the effective weak-regime parameters.
    Reduce(ReduceOpts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    DoubleWell,
    Weak,
    AsymDoubleWell,
    Physical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RateFormOpt {
    Gradient,
    Flipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountPhase {
    Zero,
    Pi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParamOpt {
    Lambda,
    K,
    Delta,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct CommonOpts {
    /// Flat key=value config file; flags override file entries.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<String>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for sweeps and grids (0 = automatic). Output bytes do
    /// not depend on this.
    #[arg(long, allow_negative_numbers = true)]
    pub threads: Option<usize>,
}

/// Model-selection parameters shared by the model-driven subcommands.
#[derive(Args, Debug, Clone)]
pub struct ModelOpts {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Coupling ratio for the double-well models.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Detuning for the weak and asymmetric double-well models.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Coupling ratio for the weak-regime model.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_ratio: Option<f64>,
    /// Excitation ratio for the weak-regime model.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Phase-rate form for the weak-regime model.
    #[arg(long, value_enum)]
    pub rate_form: Option<RateFormOpt>,
    // raw constants of the physical model
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    /// Ensemble size of the physical model.
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<u64>,
    /// Weak-regime warning threshold for the small parameters.
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TrajOpts {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(flatten)]
    pub model: ModelOpts,
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Record every n-th step.
    #[arg(long, allow_negative_numbers = true)]
    pub stride: Option<usize>,
    /// Use the adaptive embedded pair instead of fixed-step RK4.
    #[arg(long)]
    pub adaptive: bool,
    /// Relative tolerance for the adaptive integrator.
    #[arg(long, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    /// Emit the mean photon number column (weak model).
    #[arg(long, allow_negative_numbers = true)]
    pub ensemble_size: Option<u64>,
}

#[derive(Args, Debug)]
pub struct FixedPointsOpts {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(flatten)]
    pub model: ModelOpts,
    /// Uniform scan-grid density.
    #[arg(long, allow_negative_numbers = true)]
    pub grid_density: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BifurcationOpts {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(flatten)]
    pub model: ModelOpts,
    /// Sweep this parameter over --range.
    #[arg(long, value_enum)]
    pub sweep: Option<SweepParamOpt>,
    /// Sweep range (two values).
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub samples: Option<usize>,
    /// Refinement tolerance for the critical value found along a sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub refine_tol: Option<f64>,
    /// Bisect the excitation ratio over --k-range instead of sweeping.
    #[arg(long)]
    pub bisect_k: bool,
    /// Excitation-ratio bracket for --bisect-k (two values).
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    pub k_range: Option<Vec<f64>>,
    /// Bisection tolerance for --bisect-k.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Phase plane whose stationary states are counted.
    #[arg(long, value_enum)]
    pub count_phase: Option<CountPhase>,
    /// Also write the swept branches as CSV to this path.
    #[arg(long)]
    pub branches_out: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub grid_density: Option<usize>,
}

#[derive(Args, Debug)]
pub struct LandscapeOpts {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(flatten)]
    pub model: ModelOpts,
    #[arg(long, allow_negative_numbers = true)]
    pub z_samples: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi_samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ReduceOpts {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(flatten)]
    pub model: ModelOpts,
}

/// Parse a flat key=value file. Blank lines and `#` comments are ignored.
pub fn load_config(path: &str) -> Result<HashMap<String, String>, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub fn fill<T>(slot: &mut Option<T>, kv: &HashMap<String, String>, key: &str) -> Result<(), String>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        if let Some(raw) = kv.get(key) {
            let parsed = raw
                .parse::<T>()
                .map_err(|e| format!("config key {key}: {e}"))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

pub fn fill_flag(slot: &mut bool, kv: &HashMap<String, String>, key: &str) -> Result<(), String> {
    if !*slot {
        if let Some(raw) = kv.get(key) {
            *slot = raw
                .parse::<bool>()
                .map_err(|e| format!("config key {key}: {e}"))?;
        }
    }
    Ok(())
}

/// Two-value ranges come from config files as "lo hi" or "lo,hi".
pub fn fill_pair(
    slot: &mut Option<Vec<f64>>,
    kv: &HashMap<String, String>,
    key: &str,
) -> Result<(), String> {
    if slot.is_none() {
        if let Some(raw) = kv.get(key) {
            let parts: Result<Vec<f64>, _> = raw
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::parse::<f64>)
                .collect();
            let parts = parts.map_err(|e| format!("config key {key}: {e}"))?;
            if parts.len() != 2 {
                return Err(format!("config key {key}: expected two values"));
            }
            *slot = Some(parts);
        }
    }
    Ok(())
}

fn fill_enum<T: ValueEnum + Clone + Send + Sync + 'static>(
    slot: &mut Option<T>,
    kv: &HashMap<String, String>,
    key: &str,
) -> Result<(), String> {
    if slot.is_none() {
        if let Some(raw) = kv.get(key) {
            let parsed =
                T::from_str(raw, true).map_err(|e| format!("config key {key}: {e}"))?;
            *slot = Some(parsed);
        }
    }
    Ok(())
}

impl CommonOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        fill(&mut self.out, kv, "out")?;
        fill_enum(&mut self.format, kv, "format")?;
        fill(&mut self.threads, kv, "threads")?;
        Ok(())
    }
}

impl ModelOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        fill_enum(&mut self.model, kv, "model")?;
        fill(&mut self.lambda, kv, "lambda")?;
        fill(&mut self.delta, kv, "delta")?;
        fill(&mut self.lambda_ratio, kv, "lambda-ratio")?;
        fill(&mut self.k, kv, "k")?;
        fill_enum(&mut self.rate_form, kv, "rate-form")?;
        fill(&mut self.omega0, kv, "omega0")?;
        fill(&mut self.omega_a, kv, "omega-a")?;
        fill(&mut self.g, kv, "g")?;
        fill(&mut self.kappa, kv, "kappa")?;
        fill(&mut self.chi, kv, "chi")?;
        fill(&mut self.xi, kv, "xi")?;
        fill(&mut self.n, kv, "n")?;
        fill(&mut self.threshold, kv, "threshold")?;
        Ok(())
    }
}

impl TrajOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        self.common.merge(kv)?;
        self.model.merge(kv)?;
        fill(&mut self.z0, kv, "z0")?;
        fill(&mut self.phi0, kv, "phi0")?;
        fill(&mut self.t_end, kv, "t-end")?;
        fill(&mut self.dt, kv, "dt")?;
        fill(&mut self.stride, kv, "stride")?;
        fill_flag(&mut self.adaptive, kv, "adaptive")?;
        fill(&mut self.rel_tol, kv, "rel-tol")?;
        fill(&mut self.ensemble_size, kv, "ensemble-size")?;
        Ok(())
    }
}

impl FixedPointsOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        self.common.merge(kv)?;
        self.model.merge(kv)?;
        fill(&mut self.grid_density, kv, "grid-density")?;
        Ok(())
    }
}

impl BifurcationOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        self.common.merge(kv)?;
        self.model.merge(kv)?;
        fill_enum(&mut self.sweep, kv, "sweep")?;
        fill_pair(&mut self.range, kv, "range")?;
        fill(&mut self.samples, kv, "samples")?;
        fill(&mut self.refine_tol, kv, "refine-tol")?;
        fill_flag(&mut self.bisect_k, kv, "bisect-k")?;
        fill_pair(&mut self.k_range, kv, "k-range")?;
        fill(&mut self.tol, kv, "tol")?;
        fill_enum(&mut self.count_phase, kv, "count-phase")?;
        fill(&mut self.branches_out, kv, "branches-out")?;
        fill(&mut self.grid_density, kv, "grid-density")?;
        Ok(())
    }
}

impl LandscapeOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        self.common.merge(kv)?;
        self.model.merge(kv)?;
        fill(&mut self.z_samples, kv, "z-samples")?;
        fill(&mut self.phi_samples, kv, "phi-samples")?;
        Ok(())
    }
}

impl ReduceOpts {
    pub fn merge(&mut self, kv: &HashMap<String, String>) -> Result<(), String> {
        self.common.merge(kv)?;
        self.model.merge(kv)?;
        Ok(())
    }
}

pub fn require<T: Copy>(slot: Option<T>, name: &str) -> Result<T, String> {
    slot.ok_or_else(|| format!("missing required parameter --{name}"))
}
