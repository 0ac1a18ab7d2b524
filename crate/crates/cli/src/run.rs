//! Subcommand implementations.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 integration stopped at a
//! phase-space boundary before `t_end`, 4 transition detector found nothing.

use std::f64::consts::PI;

use clap::Parser;

use cavity_bec::bifurcation::{
    critical_excitation, critical_from_sweep, landscape, sweep, BifurcationBranch,
    PitchforkReport, SweepModel, SweepOptions, SweepParameter,
};
use cavity_bec::dynamics::{integrate, IntegratorConfig, Termination, Trajectory};
use cavity_bec::models::{
    reduce_physical, AsymmetricDoubleWellModel, DoubleWellModel, PhaseState, PhysicalParams,
    RateForm, WeakRegimeModel, WEAK_REGIME_THRESHOLD,
};
use cavity_bec::stationary::{find_fixed_points_with, FixedPoint, ScanOptions};

use crate::emit::{float17, float17_opt, json_f64_array, json_f64_opt, json_string, write_output};
use crate::opts::{
    load_config, require, BifurcationOpts, Cli, Command, CommonOpts, CountPhase, FixedPointsOpts,
    LandscapeOpts, ModelKind, ModelOpts, OutputFormat, RateFormOpt, ReduceOpts, SweepParamOpt,
    TrajOpts,
};

pub fn dispatch() -> Result<u8, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Traj(o) => cmd_traj(o),
        Command::FixedPoints(o) => cmd_fixed_points(o),
        Command::Bifurcation(o) => cmd_bifurcation(o),
        Command::Landscape(o) => cmd_landscape(o),
        Command::Reduce(o) => cmd_reduce(o),
    }
}

fn apply_common(common: &CommonOpts) {
    if let Some(threads) = common.threads {
        if threads > 0 {
            // ignore the error if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
}

fn config_map(common: &CommonOpts) -> Result<std::collections::HashMap<String, String>, String> {
    match &common.config {
        Some(path) => load_config(path),
        None => Ok(Default::default()),
    }
}

enum BuiltModel {
    DoubleWell(DoubleWellModel),
    Weak(WeakRegimeModel),
    Asym(AsymmetricDoubleWellModel),
}

fn physical_params(m: &ModelOpts) -> Result<PhysicalParams, String> {
    Ok(PhysicalParams {
        field_frequency: require(m.omega0, "omega0")?,
        atom_frequency: require(m.omega_a, "omega-a")?,
        coupling: require(m.g, "g")?,
        kerr: require(m.kappa, "kappa")?,
        parametric: require(m.chi, "chi")?,
        intra_ensemble: require(m.xi, "xi")?,
        ensemble_size: require(m.n, "n")?,
    })
}

fn rate_form(m: &ModelOpts) -> RateForm {
    match m.rate_form {
        Some(RateFormOpt::Flipped) => RateForm::FlippedCurvature,
        _ => RateForm::GradientConsistent,
    }
}

/// Build the model named by --model. For the physical kind the raw constants
/// are reduced first and --k supplies the conserved excitation ratio.
fn build_model(m: &ModelOpts) -> Result<BuiltModel, String> {
    match require(m.model, "model")? {
        ModelKind::DoubleWell => Ok(BuiltModel::DoubleWell(DoubleWellModel::new(require(
            m.lambda, "lambda",
        )?))),
        ModelKind::AsymDoubleWell => Ok(BuiltModel::Asym(AsymmetricDoubleWellModel::new(
            require(m.delta, "delta")?,
            require(m.lambda, "lambda")?,
        ))),
        ModelKind::Weak => Ok(BuiltModel::Weak(
            WeakRegimeModel::new(
                require(m.delta, "delta")?,
                require(m.lambda_ratio, "lambda-ratio")?,
                require(m.k, "k")?,
            )
            .with_rate_form(rate_form(m)),
        )),
        ModelKind::Physical => {
            let params = physical_params(m)?;
            let threshold = m.threshold.unwrap_or(WEAK_REGIME_THRESHOLD);
            let reduction = reduce_physical(&params, threshold).map_err(|e| e.to_string())?;
            for w in &reduction.warnings {
                eprintln!("warning: {w}");
            }
            Ok(BuiltModel::Weak(
                WeakRegimeModel::from_reduction(&reduction, require(m.k, "k")?)
                    .with_rate_form(rate_form(m)),
            ))
        }
    }
}

fn scan_options(grid_density: Option<usize>) -> ScanOptions {
    ScanOptions {
        grid_density: grid_density.unwrap_or_else(|| ScanOptions::default().grid_density),
        ..ScanOptions::default()
    }
}

fn format_of(common: &CommonOpts) -> OutputFormat {
    common.format.unwrap_or(OutputFormat::Csv)
}

// ---------------------------------------------------------------- traj

fn cmd_traj(mut o: TrajOpts) -> Result<u8, String> {
    let kv = config_map(&o.common)?;
    o.merge(&kv)?;
    apply_common(&o.common);
    let built = build_model(&o.model)?;
    let initial = PhaseState::new(require(o.z0, "z0")?, require(o.phi0, "phi0")?);
    let mut cfg = IntegratorConfig::new(o.dt.unwrap_or(1e-3), require(o.t_end, "t-end")?)
        .with_stride(o.stride.unwrap_or(1));
    if o.adaptive {
        cfg = cfg.adaptive(o.rel_tol.unwrap_or(1e-9));
    }

    let (traj, photons) = match &built {
        BuiltModel::DoubleWell(m) => (integrate(m, initial, &cfg).map_err(|e| e.to_string())?, None),
        BuiltModel::Asym(m) => (integrate(m, initial, &cfg).map_err(|e| e.to_string())?, None),
        BuiltModel::Weak(m) => {
            let traj = integrate(m, initial, &cfg).map_err(|e| e.to_string())?;
            // the photon column needs an ensemble size: --ensemble-size, or
            // --n when the model came from raw constants
            let ensemble = o.ensemble_size.or(o.model.n);
            let photons = ensemble.map(|n| {
                traj.states
                    .iter()
                    .map(|s| {
                        m.photon_number(*s, n)
                            .expect("recorded states are accessible")
                    })
                    .collect::<Vec<f64>>()
            });
            (traj, photons)
        }
    };

    let content = match format_of(&o.common) {
        OutputFormat::Csv => traj_csv(&traj, photons.as_deref()),
        OutputFormat::Json => traj_json(&traj, photons.as_deref()),
    };
    write_output(o.common.out.as_deref(), &content)?;
    Ok(match traj.termination {
        Termination::Completed => 0,
        _ => 3,
    })
}

fn traj_csv(traj: &Trajectory, photons: Option<&[f64]>) -> String {
    let mut out = String::new();
    out.push_str(if photons.is_some() {
        "t,z,phi,energy,n_photon\n"
    } else {
        "t,z,phi,energy\n"
    });
    for i in 0..traj.len() {
        out.push_str(&float17(traj.times[i]));
        out.push(',');
        out.push_str(&float17(traj.states[i].z));
        out.push(',');
        out.push_str(&float17(traj.states[i].phi));
        out.push(',');
        out.push_str(&float17(traj.energies[i]));
        if let Some(n) = photons {
            out.push(',');
            out.push_str(&float17(n[i]));
        }
        out.push('\n');
    }
    if traj.termination != Termination::Completed {
        out.push_str(&format!("# termination={}\n", traj.termination));
    }
    out
}

fn traj_json(traj: &Trajectory, photons: Option<&[f64]>) -> String {
    let z: Vec<f64> = traj.states.iter().map(|s| s.z).collect();
    let phi: Vec<f64> = traj.states.iter().map(|s| s.phi).collect();
    let mut out = String::from("{\n");
    out.push_str(&format!(
        "  \"termination\": {},\n",
        json_string(&traj.termination.to_string())
    ));
    out.push_str(&format!("  \"t\": {},\n", json_f64_array(&traj.times)));
    out.push_str(&format!("  \"z\": {},\n", json_f64_array(&z)));
    out.push_str(&format!("  \"phi\": {},\n", json_f64_array(&phi)));
    out.push_str(&format!("  \"energy\": {}", json_f64_array(&traj.energies)));
    if let Some(n) = photons {
        out.push_str(&format!(",\n  \"n_photon\": {}\n", json_f64_array(n)));
    } else {
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

// -------------------------------------------------------- fixed points

fn cmd_fixed_points(mut o: FixedPointsOpts) -> Result<u8, String> {
    let kv = config_map(&o.common)?;
    o.merge(&kv)?;
    apply_common(&o.common);
    let scan = scan_options(o.grid_density);
    let fps = match build_model(&o.model)? {
        BuiltModel::Weak(m) => find_fixed_points_with(&m, &scan),
        BuiltModel::DoubleWell(m) => SweepModel::DoubleWell(m).fixed_points(&scan),
        BuiltModel::Asym(_) => {
            return Err("fixed-points supports the double-well and weak models".into())
        }
    };
    let content = match format_of(&o.common) {
        OutputFormat::Csv => fixed_points_csv(&fps),
        OutputFormat::Json => format!("{{\n  \"fixed_points\": {}\n}}\n", fixed_points_json(&fps)),
    };
    write_output(o.common.out.as_deref(), &content)?;
    Ok(0)
}

fn fixed_points_csv(fps: &[FixedPoint]) -> String {
    let mut out = String::from("phi_star,z_star,stability,branch\n");
    for fp in fps {
        out.push_str(&format!(
            "{},{},{},{}\n",
            float17(fp.phi_star),
            float17(fp.z_star),
            fp.stability,
            fp.branch
        ));
    }
    out
}

fn fixed_point_json(fp: &FixedPoint) -> String {
    format!(
        "{{\"phi_star\": {}, \"z_star\": {}, \"stability\": {}, \"branch\": {}}}",
        float17(fp.phi_star),
        float17(fp.z_star),
        json_string(&fp.stability.to_string()),
        json_string(&fp.branch.to_string())
    )
}

fn fixed_points_json(fps: &[FixedPoint]) -> String {
    let items: Vec<String> = fps.iter().map(fixed_point_json).collect();
    format!("[{}]", items.join(", "))
}

// --------------------------------------------------------- bifurcation

fn cmd_bifurcation(mut o: BifurcationOpts) -> Result<u8, String> {
    let kv = config_map(&o.common)?;
    o.merge(&kv)?;
    apply_common(&o.common);
    if o.bisect_k == o.sweep.is_some() {
        return Err("choose exactly one of --sweep <param> or --bisect-k".into());
    }
    let scan = scan_options(o.grid_density);
    let count_phase = match o.count_phase.unwrap_or(CountPhase::Zero) {
        CountPhase::Zero => 0.0,
        CountPhase::Pi => PI,
    };

    if o.bisect_k {
        let pair = o.k_range.clone().ok_or("missing required parameter --k-range")?;
        let (lo, hi) = (pair[0], pair[1]);
        let detuning = require(o.model.delta, "delta")?;
        let coupling = require(o.model.lambda_ratio, "lambda-ratio")?;
        let tol = o.tol.unwrap_or((hi - lo) * 1e-6);
        return match critical_excitation(detuning, coupling, (lo, hi), tol, count_phase, &scan) {
            Ok(report) => {
                let content = report_json(&report, SweepParameter::ExcitationRatio);
                write_output(o.common.out.as_deref(), &content)?;
                Ok(0)
            }
            Err(cavity_bec::Error::NoTransition) => {
                eprintln!("no transition: stable fixed-point count is constant over the bracket");
                Ok(4)
            }
            Err(e) => Err(e.to_string()),
        };
    }

    let parameter = match o.sweep.unwrap() {
        SweepParamOpt::Lambda => SweepParameter::CouplingRatio,
        SweepParamOpt::K => SweepParameter::ExcitationRatio,
        SweepParamOpt::Delta => SweepParameter::Detuning,
    };
    let pair = o.range.clone().ok_or("missing required parameter --range")?;
    let (lo, hi) = (pair[0], pair[1]);
    // the swept parameter need not be given; seed the template with the
    // range start
    {
        let m = &mut o.model;
        match parameter {
            SweepParameter::CouplingRatio => {
                if m.model == Some(ModelKind::Weak) {
                    m.lambda_ratio.get_or_insert(lo);
                } else {
                    m.lambda.get_or_insert(lo);
                }
            }
            SweepParameter::ExcitationRatio => {
                m.k.get_or_insert(lo);
            }
            SweepParameter::Detuning => {
                m.delta.get_or_insert(lo);
            }
        }
    }
    let template = match build_model(&o.model)? {
        BuiltModel::DoubleWell(m) => {
            if parameter != SweepParameter::CouplingRatio {
                return Err("the double well has only lambda to sweep".into());
            }
            SweepModel::DoubleWell(m)
        }
        BuiltModel::Weak(m) => SweepModel::Weak(m),
        BuiltModel::Asym(_) => {
            return Err("bifurcation supports the double-well and weak models".into())
        }
    };
    let samples = o.samples.unwrap_or(201);
    let sweep_opts = SweepOptions {
        scan,
        ..SweepOptions::default()
    };
    if let Some(path) = &o.branches_out {
        let branches = sweep(&template, parameter, lo, hi, samples, &sweep_opts);
        write_output(Some(path), &branches_csv(parameter, &branches))?;
    }
    match critical_from_sweep(
        &template,
        parameter,
        lo,
        hi,
        samples,
        o.refine_tol.unwrap_or(1e-7),
        count_phase,
        &scan,
    ) {
        Ok(report) => {
            let content = report_json(&report, parameter);
            write_output(o.common.out.as_deref(), &content)?;
            Ok(0)
        }
        Err(cavity_bec::Error::NoTransition) => {
            eprintln!("no transition: stable fixed-point count is constant over the range");
            Ok(4)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn branches_csv(parameter: SweepParameter, branches: &[BifurcationBranch]) -> String {
    let mut out = String::from("branch_id,parameter,parameter_value,phi_star,z_star,stability,branch\n");
    for b in branches {
        for (value, p) in b.parameter_values.iter().zip(&b.points) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                b.branch_id,
                parameter,
                float17(*value),
                float17(p.phi_star),
                float17(p.z_star),
                p.stability,
                p.branch
            ));
        }
    }
    out
}

fn report_json(report: &PitchforkReport, parameter: SweepParameter) -> String {
    let saddle = match &report.new_saddle {
        Some(fp) => fixed_point_json(fp),
        None => "null".to_string(),
    };
    format!(
        "{{\n  \"parameter\": {},\n  \"critical_value\": {},\n  \"pre_count\": {},\n  \
         \"post_count\": {},\n  \"new_saddle\": {},\n  \"estimate_kc\": {}\n}}\n",
        json_string(&parameter.to_string()),
        float17(report.critical_value),
        report.pre_count,
        report.post_count,
        saddle,
        json_f64_opt(report.estimate_kc)
    )
}

// ----------------------------------------------------------- landscape

fn cmd_landscape(mut o: LandscapeOpts) -> Result<u8, String> {
    let kv = config_map(&o.common)?;
    o.merge(&kv)?;
    apply_common(&o.common);
    let model = match build_model(&o.model)? {
        BuiltModel::Weak(m) => m,
        _ => return Err("landscape supports the weak model".into()),
    };
    let grid = landscape(
        &model,
        o.z_samples.unwrap_or(201),
        o.phi_samples.unwrap_or(201),
    );
    let content = match format_of(&o.common) {
        OutputFormat::Csv => {
            let mut out = String::from("phi,z,energy_norm,defined\n");
            for (i, phi) in grid.phi.iter().enumerate() {
                for (j, z) in grid.z.iter().enumerate() {
                    let cell = grid.normalized[grid.index(i, j)];
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        float17(*phi),
                        float17(*z),
                        float17_opt(cell),
                        u8::from(cell.is_some())
                    ));
                }
            }
            let (lo, hi) = match grid.raw_range {
                Some((lo, hi)) => (Some(lo), Some(hi)),
                None => (None, None),
            };
            out.push_str(&format!("# raw_min={}\n", float17_opt(lo)));
            out.push_str(&format!("# raw_max={}\n", float17_opt(hi)));
            out
        }
        OutputFormat::Json => {
            let mut rows_norm = Vec::with_capacity(grid.phi.len());
            let mut rows_def = Vec::with_capacity(grid.phi.len());
            for i in 0..grid.phi.len() {
                let norm: Vec<String> = (0..grid.z.len())
                    .map(|j| json_f64_opt(grid.normalized[grid.index(i, j)]))
                    .collect();
                let def: Vec<String> = (0..grid.z.len())
                    .map(|j| {
                        u8::from(grid.normalized[grid.index(i, j)].is_some()).to_string()
                    })
                    .collect();
                rows_norm.push(format!("[{}]", norm.join(", ")));
                rows_def.push(format!("[{}]", def.join(", ")));
            }
            let (lo, hi) = match grid.raw_range {
                Some((lo, hi)) => (Some(lo), Some(hi)),
                None => (None, None),
            };
            format!(
                "{{\n  \"phi\": {},\n  \"z\": {},\n  \"energy_norm\": [{}],\n  \
                 \"defined\": [{}],\n  \"raw_min\": {},\n  \"raw_max\": {}\n}}\n",
                json_f64_array(&grid.phi),
                json_f64_array(&grid.z),
                rows_norm.join(", "),
                rows_def.join(", "),
                json_f64_opt(lo),
                json_f64_opt(hi)
            )
        }
    };
    write_output(o.common.out.as_deref(), &content)?;
    Ok(0)
}

// -------------------------------------------------------------- reduce

fn cmd_reduce(mut o: ReduceOpts) -> Result<u8, String> {
    let kv = config_map(&o.common)?;
    o.merge(&kv)?;
    apply_common(&o.common);
    if o.common.format == Some(OutputFormat::Csv) {
        return Err("reduce emits JSON only".into());
    }
    let params = physical_params(&o.model)?;
    let threshold = o.model.threshold.unwrap_or(WEAK_REGIME_THRESHOLD);
    let r = reduce_physical(&params, threshold).map_err(|e| e.to_string())?;
    let warnings: Vec<String> = r
        .warnings
        .iter()
        .map(|w| json_string(&w.to_string()))
        .collect();
    let content = format!(
        "{{\n  \"eta\": {},\n  \"nu\": {},\n  \"omega\": {},\n  \"delta\": {},\n  \
         \"lambda\": {},\n  \"detuning\": {},\n  \"coupling_ratio\": {},\n  \
         \"warnings\": [{}]\n}}\n",
        float17(r.effective.eta),
        float17(r.effective.nu),
        float17(r.effective.omega),
        float17(r.effective.delta),
        float17(r.effective.lambda),
        float17(r.detuning),
        float17(r.coupling_ratio),
        warnings.join(", ")
    );
    write_output(o.common.out.as_deref(), &content)?;
    Ok(0)
}
