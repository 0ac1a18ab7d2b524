//! Parameter sweeps, branch assembly, pitchfork detection, and the
//! symmetry-breaking trajectory diagnostics.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dynamics::{integrate, IntegratorConfig, Termination};
use crate::error::Error;
use crate::models::{DoubleWellModel, Model, WeakRegimeModel};
use crate::stationary::{
    classify_stability, find_fixed_points_with, scan_fixed_points, BranchLabel, FixedPoint,
    ScanOptions, Stability,
};

/// Which model parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Λ.
    CouplingRatio,
    /// k.
    ExcitationRatio,
    /// Δ.
    Detuning,
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepParameter::CouplingRatio => write!(f, "lambda"),
            SweepParameter::ExcitationRatio => write!(f, "k"),
            SweepParameter::Detuning => write!(f, "delta"),
        }
    }
}

/// Template whose swept parameter is replaced sample by sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepModel {
    DoubleWell(DoubleWellModel),
    Weak(WeakRegimeModel),
}

impl SweepModel {
    fn with_parameter(&self, parameter: SweepParameter, value: f64) -> SweepModel {
        match (self, parameter) {
            (SweepModel::DoubleWell(_), SweepParameter::CouplingRatio) => {
                SweepModel::DoubleWell(DoubleWellModel::new(value))
            }
            (SweepModel::DoubleWell(_), _) => {
                panic!("the double well has only the coupling ratio to sweep")
            }
            (SweepModel::Weak(m), p) => {
                let mut m = *m;
                match p {
                    SweepParameter::CouplingRatio => m.coupling_ratio = value,
                    SweepParameter::ExcitationRatio => m.excitation_ratio = value,
                    SweepParameter::Detuning => m.detuning = value,
                }
                SweepModel::Weak(m)
            }
        }
    }

    /// Stationary states at both phase planes via the numeric scanner.
    pub fn fixed_points(&self, opts: &ScanOptions) -> Vec<FixedPoint> {
        match self {
            SweepModel::Weak(m) => find_fixed_points_with(m, opts),
            SweepModel::DoubleWell(m) => {
                let mut out = Vec::new();
                for phi_star in [0.0, PI] {
                    for z_star in scan_fixed_points(m, phi_star, opts) {
                        let Ok(stability) = classify_stability(m, z_star, phi_star) else {
                            continue;
                        };
                        let branch = if z_star.abs() < 1e-9 {
                            BranchLabel::DoubleWellSymmetric
                        } else {
                            BranchLabel::DoubleWellBroken
                        };
                        out.push(FixedPoint {
                            z_star,
                            phi_star,
                            stability,
                            branch,
                        });
                    }
                }
                out
            }
        }
    }
}

/// A connected family of fixed points over a swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationBranch {
    pub parameter: SweepParameter,
    /// Strictly monotone sample values the branch spans.
    pub parameter_values: Vec<f64>,
    /// One fixed point per sample value.
    pub points: Vec<FixedPoint>,
    pub branch_id: u32,
}

/// Options for [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Largest |Δz*| linking a point to a branch between adjacent samples;
    /// larger gaps split the branch.
    pub jump_threshold: f64,
    pub scan: ScanOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            jump_threshold: 0.05,
            scan: ScanOptions::default(),
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two samples");
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

struct OpenBranch {
    id: u32,
    phi: f64,
    values: Vec<f64>,
    points: Vec<FixedPoint>,
    last_z: f64,
}

/// Sweep one parameter, locating fixed points at each sample and linking
/// them into branches by nearest-imbalance matching.
///
/// `lo` and `hi` may be given in either order; samples run from `lo` to
/// `hi`. Branch ids are assigned in order of first appearance.
pub fn sweep(
    template: &SweepModel,
    parameter: SweepParameter,
    lo: f64,
    hi: f64,
    samples: usize,
    opts: &SweepOptions,
) -> Vec<BifurcationBranch> {
    assert!(lo != hi, "sweep range is empty");
    let values = linspace(lo, hi, samples);
    let per_sample: Vec<Vec<FixedPoint>> = values
        .par_iter()
        .map(|&v| template.with_parameter(parameter, v).fixed_points(&opts.scan))
        .collect();

    let mut next_id = 0u32;
    let mut open: Vec<OpenBranch> = Vec::new();
    let mut done: Vec<OpenBranch> = Vec::new();
    for (value, fps) in values.iter().zip(&per_sample) {
        let mut taken_branch = vec![false; open.len()];
        let mut taken_point = vec![false; fps.len()];
        // all candidate links under the threshold, nearest first
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (bi, b) in open.iter().enumerate() {
            for (pi, p) in fps.iter().enumerate() {
                if p.phi_star == b.phi {
                    let d = (p.z_star - b.last_z).abs();
                    if d <= opts.jump_threshold {
                        pairs.push((d, bi, pi));
                    }
                }
            }
        }
        pairs.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        for (_, bi, pi) in pairs {
            if taken_branch[bi] || taken_point[pi] {
                continue;
            }
            taken_branch[bi] = true;
            taken_point[pi] = true;
            open[bi].values.push(*value);
            open[bi].points.push(fps[pi]);
            open[bi].last_z = fps[pi].z_star;
        }
        // close branches that found no continuation
        let mut still_open = Vec::with_capacity(open.len());
        for (bi, b) in open.drain(..).enumerate() {
            if taken_branch[bi] {
                still_open.push(b);
            } else {
                done.push(b);
            }
        }
        open = still_open;
        // unmatched points start new branches
        for (pi, p) in fps.iter().enumerate() {
            if !taken_point[pi] {
                open.push(OpenBranch {
                    id: next_id,
                    phi: p.phi_star,
                    values: vec![*value],
                    points: vec![*p],
                    last_z: p.z_star,
                });
                next_id += 1;
            }
        }
    }
    done.extend(open);
    done.sort_by_key(|b| b.id);
    done.into_iter()
        .map(|b| BifurcationBranch {
            parameter,
            parameter_values: b.values,
            points: b.points,
            branch_id: b.id,
        })
        .collect()
}

/// Stationary-state tally in one phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationaryCount {
    pub total: usize,
    pub stable: usize,
}

/// Count fixed points lying in the `Φ* = phi_star` plane.
pub fn count_at_phase(fps: &[FixedPoint], phi_star: f64) -> StationaryCount {
    let in_plane = fps.iter().filter(|p| {
        if phi_star == 0.0 {
            p.phi_star == 0.0
        } else {
            p.phi_star != 0.0
        }
    });
    let mut total = 0;
    let mut stable = 0;
    for p in in_plane {
        total += 1;
        if p.stability == Stability::Center {
            stable += 1;
        }
    }
    StationaryCount { total, stable }
}

/// Report of a detected pitchfork transition.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchforkReport {
    /// Refined location of the transition in the swept parameter.
    pub critical_value: f64,
    /// Total stationary-state count (in the counted phase plane) at the low
    /// end of the bracketing range.
    pub pre_count: usize,
    /// Same at the high end.
    pub post_count: usize,
    /// The saddle accompanying the stable pair, taken at the end of the
    /// range on the side where the pair exists.
    pub new_saddle: Option<FixedPoint>,
    /// Closed-form estimate `Λ²/2` of the critical excitation ratio;
    /// present for excitation-ratio sweeps.
    pub estimate_kc: Option<f64>,
}

fn bisect_stable_count<F>(
    count: &F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, Error>
where
    F: Fn(f64) -> StationaryCount,
{
    let stable_lo = count(lo).stable;
    let stable_hi = count(hi).stable;
    if stable_lo == stable_hi {
        return Err(Error::NoTransition);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid).stable == stable_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn saddle_in_plane(fps: &[FixedPoint], phi_star: f64) -> Option<FixedPoint> {
    fps.iter()
        .find(|p| {
            let same_plane = if phi_star == 0.0 {
                p.phi_star == 0.0
            } else {
                p.phi_star != 0.0
            };
            same_plane && p.stability == Stability::Saddle
        })
        .copied()
}

/// Localize the critical excitation ratio of the weak-regime model by
/// bisecting the count of stable fixed points in the `Φ* = count_phase`
/// plane over `k ∈ k_range`, and report the closed-form estimate `Λ²/2`
/// alongside.
pub fn critical_excitation(
    detuning: f64,
    coupling_ratio: f64,
    k_range: (f64, f64),
    tol: f64,
    count_phase: f64,
    scan: &ScanOptions,
) -> Result<PitchforkReport, Error> {
    assert!(k_range.0 < k_range.1, "empty excitation-ratio bracket");
    assert!(tol > 0.0, "tolerance must be positive");
    let fps_at = |k: f64| {
        find_fixed_points_with(
            &WeakRegimeModel::new(detuning, coupling_ratio, k),
            scan,
        )
    };
    let count = |k: f64| count_at_phase(&fps_at(k), count_phase);
    let critical_value = bisect_stable_count(&count, k_range.0, k_range.1, tol)?;
    let lo_fps = fps_at(k_range.0);
    let hi_fps = fps_at(k_range.1);
    let pre = count_at_phase(&lo_fps, count_phase);
    let post = count_at_phase(&hi_fps, count_phase);
    let new_saddle = if pre.total > post.total {
        saddle_in_plane(&lo_fps, count_phase)
    } else {
        saddle_in_plane(&hi_fps, count_phase)
    };
    Ok(PitchforkReport {
        critical_value,
        pre_count: pre.total,
        post_count: post.total,
        new_saddle,
        estimate_kc: Some(coupling_ratio * coupling_ratio / 2.0),
    })
}

/// Detect and refine a transition along a swept parameter by scanning the
/// sample values for a change in the stable count, then bisecting inside
/// the bracketing pair.
pub fn critical_from_sweep(
    template: &SweepModel,
    parameter: SweepParameter,
    lo: f64,
    hi: f64,
    samples: usize,
    refine_tol: f64,
    count_phase: f64,
    scan: &ScanOptions,
) -> Result<PitchforkReport, Error> {
    assert!(lo < hi, "sweep range is empty");
    let values = linspace(lo, hi, samples);
    let fps_at = |v: f64| template.with_parameter(parameter, v).fixed_points(scan);
    let counts: Vec<StationaryCount> = values
        .par_iter()
        .map(|&v| count_at_phase(&fps_at(v), count_phase))
        .collect();
    let bracket = counts
        .windows(2)
        .position(|w| w[0].stable != w[1].stable)
        .ok_or(Error::NoTransition)?;
    let count = |v: f64| count_at_phase(&fps_at(v), count_phase);
    let critical_value =
        bisect_stable_count(&count, values[bracket], values[bracket + 1], refine_tol)?;
    // regime counts at the range ends; a sample can land exactly on the
    // degenerate point, so the bracketing pair is not representative
    let lo_fps = fps_at(lo);
    let hi_fps = fps_at(hi);
    let pre = count_at_phase(&lo_fps, count_phase);
    let post = count_at_phase(&hi_fps, count_phase);
    let new_saddle = if pre.total > post.total {
        saddle_in_plane(&lo_fps, count_phase)
    } else {
        saddle_in_plane(&hi_fps, count_phase)
    };
    let estimate_kc = match (template, parameter) {
        (SweepModel::Weak(m), SweepParameter::ExcitationRatio) => {
            Some(m.coupling_ratio * m.coupling_ratio / 2.0)
        }
        _ => None,
    };
    Ok(PitchforkReport {
        critical_value,
        pre_count: pre.total,
        post_count: post.total,
        new_saddle,
        estimate_kc,
    })
}

/// Outcome of integrating a mirror pair of initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    /// Mirrored extents agree: the two orbits are images of each other.
    Identical,
    /// Each orbit keeps its sign and the extents mirror (self-trapping
    /// with intact symmetry).
    LocalizedSymmetric,
    /// Each orbit keeps its sign but the extents do not mirror.
    LocalizedAsymmetric,
    /// Orbits cross z = 0 and their extents do not mirror.
    AsymmetricOrbits,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymmetryClass::Identical => write!(f, "identical"),
            SymmetryClass::LocalizedSymmetric => write!(f, "localized_symmetric"),
            SymmetryClass::LocalizedAsymmetric => write!(f, "localized_asymmetric"),
            SymmetryClass::AsymmetricOrbits => write!(f, "asymmetric_orbits"),
        }
    }
}

/// Report of [`symmetry_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub class: SymmetryClass,
    /// `(min z, max z)` of the orbit started at `+z0`.
    pub plus_extent: (f64, f64),
    /// Same for the orbit started at `-z0`.
    pub minus_extent: (f64, f64),
    /// Largest disagreement between the extents after mirroring one orbit.
    pub mirror_mismatch: f64,
    pub terminations: (Termination, Termination),
}

/// Mirror-extent threshold below which orbits count as symmetric images.
const MIRROR_AGREEMENT: f64 = 1e-6;

/// Integrate the mirror pair `(±z0, phi0)` and classify the symmetry of the
/// resulting orbits.
///
/// Orbits are symmetric images when the mirrored extents agree within
/// `1e-6`; the reported `mirror_mismatch` lets callers apply their own
/// coarser threshold. Early `boundary_hit` terminations are reported, not
/// raised.
pub fn symmetry_diagnostic<M: Model>(
    model: &M,
    z0: f64,
    phi0: f64,
    t_end: f64,
) -> Result<SymmetryReport, Error> {
    let cfg = IntegratorConfig::new(1e-3, t_end);
    let plus = integrate(model, crate::models::PhaseState::new(z0, phi0), &cfg)?;
    let minus = integrate(model, crate::models::PhaseState::new(-z0, phi0), &cfg)?;
    let plus_extent = plus.z_extent();
    let minus_extent = minus.z_extent();
    let localized = (plus_extent.0 > 0.0 || plus_extent.1 < 0.0)
        && (minus_extent.0 > 0.0 || minus_extent.1 < 0.0);
    let mirror_mismatch = (plus_extent.1 + minus_extent.0)
        .abs()
        .max((plus_extent.0 + minus_extent.1).abs());
    let symmetric = mirror_mismatch <= MIRROR_AGREEMENT;
    let class = match (localized, symmetric) {
        (false, true) => SymmetryClass::Identical,
        (true, true) => SymmetryClass::LocalizedSymmetric,
        (true, false) => SymmetryClass::LocalizedAsymmetric,
        (false, false) => SymmetryClass::AsymmetricOrbits,
    };
    Ok(SymmetryReport {
        class,
        plus_extent,
        minus_extent,
        mirror_mismatch,
        terminations: (plus.termination, minus.termination),
    })
}

/// Energy grid over the phase-space cylinder.
///
/// Row-major with the phase index outermost; inaccessible cells are `None`.
/// `normalized` rescales the defined cells to `[0, 1]`; the raw extrema are
/// kept in `raw_range` so raw values can be reconstructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub phi: Vec<f64>,
    pub z: Vec<f64>,
    pub raw: Vec<Option<f64>>,
    pub normalized: Vec<Option<f64>>,
    pub raw_range: Option<(f64, f64)>,
}

impl Landscape {
    pub fn index(&self, phi_idx: usize, z_idx: usize) -> usize {
        phi_idx * self.z.len() + z_idx
    }
}

/// Evaluate the weak-regime energy on a `phi_samples × z_samples` grid over
/// `Φ ∈ [-π, π]`, `z ∈ [-1, 1]`.
pub fn landscape(model: &WeakRegimeModel, z_samples: usize, phi_samples: usize) -> Landscape {
    assert!(z_samples >= 2 && phi_samples >= 2, "need at least a 2x2 grid");
    let phi = linspace(-PI, PI, phi_samples);
    let z = linspace(-1.0, 1.0, z_samples);
    let raw: Vec<Option<f64>> = phi
        .par_iter()
        .flat_map_iter(|&p| {
            let z = &z;
            z.iter()
                .map(move |&zv| model.energy(crate::models::PhaseState::new(zv, p)).ok())
        })
        .collect();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in raw.iter().flatten() {
        min = min.min(*v);
        max = max.max(*v);
    }
    let raw_range = if min <= max { Some((min, max)) } else { None };
    let normalized = raw
        .iter()
        .map(|cell| {
            cell.map(|v| {
                if max > min {
                    (v - min) / (max - min)
                } else {
                    0.0
                }
            })
        })
        .collect();
    Landscape {
        phi,
        z,
        raw,
        normalized,
        raw_range,
    }
}
