//! Stationary states: the excitation-ratio curve, the admissible imbalance
//! domain, numerical fixed-point location, and stability classification.
//!
//! Stationary states of all three models sit on the lines `Φ* ∈ {0, π}`
//! where `ż` vanishes identically; locating them reduces to rooting
//! `Φ̇(z, Φ*)` in `z`. The scanner brackets sign changes on a dense grid
//! (uniform plus geometric ladders toward the domain edges and z = 0, where
//! roots crowd at large coupling) and bisects each bracket down to float
//! resolution. Bisection is preferred over Newton here: the phase rate has
//! integrable singularities at the domain edges and near-degenerate root
//! clusters close to bifurcations.

use std::f64::consts::PI;

use crate::error::Error;
use crate::models::{DoubleWellModel, Model, PhaseState, WeakRegimeModel};

/// Linearized character of a stationary state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Center,
    Saddle,
    Degenerate,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stability::Center => write!(f, "center"),
            Stability::Saddle => write!(f, "saddle"),
            Stability::Degenerate => write!(f, "degenerate"),
        }
    }
}

/// Which solution family a fixed point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    /// Upper sign of the excitation-ratio curve.
    Plus,
    /// Lower sign of the excitation-ratio curve.
    Minus,
    /// Symmetric (z = 0) double-well solution.
    DoubleWellSymmetric,
    /// Symmetry-broken (z ≠ 0) double-well solution.
    DoubleWellBroken,
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchLabel::Plus => write!(f, "plus"),
            BranchLabel::Minus => write!(f, "minus"),
            BranchLabel::DoubleWellSymmetric => write!(f, "double-well-symmetric"),
            BranchLabel::DoubleWellBroken => write!(f, "double-well-broken"),
        }
    }
}

/// A located stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub z_star: f64,
    /// Exactly `0.0` or `π`.
    pub phi_star: f64,
    pub stability: Stability,
    pub branch: BranchLabel,
}

/// Sign choice in the excitation-ratio curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveBranch {
    Plus,
    Minus,
}

/// Excitation ratio `k` that makes `(z, Φ*)` stationary for the given
/// detuning and coupling ratio.
///
/// Algebraically this is
/// `k = (3z² - 1)/(2z) + (1 - z²)|Δ + Λz| (|Δ + Λz| ± √((Δ + Λz)² - 4z)) / (4z²)`,
/// rearranged as `k = z + (k - z)` with a cancellation-free form of `k - z`
/// on each branch (the minus branch is a difference of diverging pieces near
/// z = 0 when written literally).
pub fn excitation_ratio_curve(
    z: f64,
    detuning: f64,
    coupling_ratio: f64,
    branch: CurveBranch,
) -> Result<f64, Error> {
    if z == 0.0 {
        return Err(Error::NoRealExcitation("the curve is undefined at z = 0"));
    }
    if z.abs() > 1.0 {
        return Err(Error::OutOfRange(z));
    }
    let a = detuning + coupling_ratio * z;
    let radicand = a * a - 4.0 * z;
    if radicand < 0.0 {
        return Err(Error::NoRealExcitation(
            "negative radicand: z is outside the admissible domain",
        ));
    }
    let root = radicand.sqrt();
    let abs_a = a.abs();
    let omz2 = (1.0 - z) * (1.0 + z);
    let k_minus_z = match branch {
        CurveBranch::Plus => omz2 * (radicand + abs_a * root + 2.0 * z) / (4.0 * z * z),
        // |A| - root == 4z/(|A| + root), so k - z == 2(1-z²)/(|A| + root)²
        CurveBranch::Minus => 2.0 * omz2 / ((abs_a + root) * (abs_a + root)),
    };
    Ok(z + k_minus_z)
}

/// The z-range on which the excitation-ratio curve is real.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleDomain {
    /// Disjoint, ordered closed intervals within `[-1, 1]`.
    pub intervals: Vec<[f64; 2]>,
    pub z_minus: Option<f64>,
    pub z_plus: Option<f64>,
}

impl AdmissibleDomain {
    pub fn contains(&self, z: f64) -> bool {
        self.intervals.iter().any(|[a, b]| *a <= z && z <= *b)
    }

    /// Total length of the admissible intervals.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|[a, b]| b - a).sum()
    }
}

/// Admissible imbalance domain for the curve at `(Δ, Λ)`.
///
/// For `ΔΛ ≤ 1` the boundaries are `z± = [2 - ΔΛ ± 2√(1 - ΔΛ)]/Λ²`
/// (evaluated as `(1 ∓ √(1 - ΔΛ))²/Λ²`) and the domain is
/// `([-1, z₋] ∪ [z₊, 1]) ∩ [-1, 1]`; for `ΔΛ > 1` the whole interval is
/// admissible.
pub fn admissible_domain(detuning: f64, coupling_ratio: f64) -> AdmissibleDomain {
    if coupling_ratio == 0.0 {
        // (Δ)² ≥ 4z reduces to z ≤ Δ²/4
        let zm = detuning * detuning / 4.0;
        return if zm >= 1.0 {
            AdmissibleDomain {
                intervals: vec![[-1.0, 1.0]],
                z_minus: None,
                z_plus: None,
            }
        } else {
            AdmissibleDomain {
                intervals: vec![[-1.0, zm]],
                z_minus: Some(zm),
                z_plus: None,
            }
        };
    }
    let disc = 1.0 - detuning * coupling_ratio;
    if disc < 0.0 {
        return AdmissibleDomain {
            intervals: vec![[-1.0, 1.0]],
            z_minus: None,
            z_plus: None,
        };
    }
    let s = disc.sqrt();
    let ll = coupling_ratio * coupling_ratio;
    let zm = (1.0 - s) * (1.0 - s) / ll;
    let zp = (1.0 + s) * (1.0 + s) / ll;
    let mut intervals = Vec::new();
    if zm >= 1.0 {
        intervals.push([-1.0, 1.0]);
    } else {
        intervals.push([-1.0, zm]);
        if zp <= 1.0 {
            intervals.push([zp.max(-1.0), 1.0]);
        }
    }
    // a double root (ΔΛ = 1) leaves no forbidden gap
    if intervals.len() == 2 && intervals[1][0] <= intervals[0][1] {
        let merged = [intervals[0][0], intervals[1][1]];
        intervals = vec![merged];
    }
    AdmissibleDomain {
        intervals,
        z_minus: Some(zm),
        z_plus: Some(zp),
    }
}

/// Eigenvalue-product threshold below which a fixed point is reported as
/// degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

fn stability_from_product(p: f64) -> Stability {
    if p < -DEGENERACY_TOLERANCE {
        Stability::Center
    } else if p > DEGENERACY_TOLERANCE {
        Stability::Saddle
    } else {
        Stability::Degenerate
    }
}

/// Classify a stationary state by the analytic Jacobian of the vector field.
///
/// At `Φ* ∈ {0, π}` the Jacobian diagonal vanishes, so the eigenvalues
/// satisfy `μ² = P` with `P = (∂ż/∂Φ)(∂Φ̇/∂z)`: `P < 0` is a center,
/// `P > 0` a saddle, `|P| ≤ τ` degenerate.
pub fn classify_stability<M: Model>(
    model: &M,
    z_star: f64,
    phi_star: f64,
) -> Result<Stability, Error> {
    let j = model.velocity_jacobian(PhaseState::new(z_star, phi_star))?;
    Ok(stability_from_product(j[0][1] * j[1][0]))
}

/// Grid parameters for the stationary-state scanner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Number of uniform grid cells over the scan interval.
    pub grid_density: usize,
    /// Geometric refinement nodes per decade placed toward the interval
    /// edges and toward z = 0.
    pub ladder_per_decade: usize,
    /// Roots closer than this merge into one. At a degenerate (pitchfork)
    /// point the rate behaves like a cube near its root, so f64 cannot
    /// separate roots past ~(machine epsilon)^(1/3) anyway.
    pub cluster_radius: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_density: 4096,
            ladder_per_decade: 32,
            cluster_radius: 1e-7,
        }
    }
}

fn scan_nodes<M: Model>(model: &M, opts: &ScanOptions) -> Vec<f64> {
    let (lo, hi) = model.z_interval();
    let span = hi - lo;
    let mut nodes = Vec::with_capacity(opts.grid_density + 1);
    for i in 0..=opts.grid_density {
        nodes.push(lo + span * i as f64 / opts.grid_density as f64);
    }
    // refinement ladders: roots crowd toward the edges (phase rate diverges)
    // and toward z = 0 at large coupling ratio
    let mut anchors = vec![lo, hi];
    if lo < 0.0 && 0.0 < hi {
        anchors.push(0.0);
    }
    let decades = (span / 1e-12).log10();
    let steps = (decades * opts.ladder_per_decade as f64).ceil() as usize;
    for anchor in anchors {
        for j in 0..=steps {
            let offset = 1e-12 * 10f64.powf(j as f64 / opts.ladder_per_decade as f64);
            for z in [anchor + offset, anchor - offset] {
                if lo < z && z < hi {
                    nodes.push(z);
                }
            }
        }
    }
    nodes.retain(|z| lo < *z && *z < hi);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();
    nodes
}

fn bisect_to_resolution<F>(f: &F, mut lo: f64, mut flo: f64, mut hi: f64) -> Option<f64>
where
    F: Fn(f64) -> Result<f64, Error>,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Some(mid.clamp(lo, hi));
        }
        match f(mid) {
            Ok(fm) => {
                if fm == 0.0 {
                    return Some(mid);
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            Err(_) => return None,
        }
    }
    Some(0.5 * (lo + hi))
}

/// Roots of `Φ̇(z, Φ*)` over the model's evaluable z-interval, ascending.
///
/// Sign changes between adjacent evaluable grid nodes are refined by
/// bisection down to float resolution, so each returned root is the best
/// representable bracketing midpoint.
pub fn scan_fixed_points<M: Model>(model: &M, phi_star: f64, opts: &ScanOptions) -> Vec<f64> {
    let nodes = scan_nodes(model, opts);
    let f = |z: f64| model.velocity(PhaseState::new(z, phi_star)).map(|v| v.1);
    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    // a maximal run of consecutive zero-valued nodes is one root: near a
    // degenerate point the rate underflows to exactly zero on a whole
    // plateau of nodes
    let mut zero_run: Option<(f64, f64)> = None;
    let flush_run = |run: &mut Option<(f64, f64)>, roots: &mut Vec<f64>| {
        if let Some((a, b)) = run.take() {
            roots.push(0.5 * (a + b));
        }
    };
    for &z in &nodes {
        match f(z) {
            Ok(fz) => {
                if fz == 0.0 {
                    zero_run = match zero_run {
                        None => Some((z, z)),
                        Some((a, _)) => Some((a, z)),
                    };
                    prev = None;
                    continue;
                }
                flush_run(&mut zero_run, &mut roots);
                if let Some((pz, pf)) = prev {
                    if pf.signum() != fz.signum() {
                        if let Some(r) = bisect_to_resolution(&f, pz, pf, z) {
                            roots.push(r);
                        }
                    }
                }
                prev = Some((z, fz));
            }
            Err(_) => {
                flush_run(&mut zero_run, &mut roots);
                prev = None;
            }
        }
    }
    flush_run(&mut zero_run, &mut roots);
    // collapse clusters tighter than the scanner can meaningfully resolve
    let mut merged = Vec::with_capacity(roots.len());
    let mut i = 0;
    while i < roots.len() {
        let mut j = i;
        while j + 1 < roots.len() && roots[j + 1] - roots[j] <= opts.cluster_radius {
            j += 1;
        }
        merged.push(if i == j {
            roots[i]
        } else {
            0.5 * (roots[i] + roots[j])
        });
        i = j + 1;
    }
    merged
}

fn weak_branch_label(model: &WeakRegimeModel, z_star: f64) -> BranchLabel {
    // the minus branch is the finite one through z = 0
    if z_star.abs() < 1e-12 {
        return BranchLabel::Minus;
    }
    let plus = excitation_ratio_curve(z_star, model.detuning, model.coupling_ratio, CurveBranch::Plus);
    let minus =
        excitation_ratio_curve(z_star, model.detuning, model.coupling_ratio, CurveBranch::Minus);
    match (plus, minus) {
        (Ok(kp), Ok(km)) => {
            if (kp - model.excitation_ratio).abs() <= (km - model.excitation_ratio).abs() {
                BranchLabel::Plus
            } else {
                BranchLabel::Minus
            }
        }
        (Ok(_), Err(_)) => BranchLabel::Plus,
        _ => BranchLabel::Minus,
    }
}

/// All stationary states of the weak-regime model at `Φ* ∈ {0, π}`,
/// sorted by `(Φ*, z*)`.
pub fn find_fixed_points(model: &WeakRegimeModel) -> Vec<FixedPoint> {
    find_fixed_points_with(model, &ScanOptions::default())
}

/// [`find_fixed_points`] with explicit scan options.
pub fn find_fixed_points_with(model: &WeakRegimeModel, opts: &ScanOptions) -> Vec<FixedPoint> {
    let mut out = Vec::new();
    for phi_star in [0.0, PI] {
        for z_star in scan_fixed_points(model, phi_star, opts) {
            let Ok(stability) = classify_stability(model, z_star, phi_star) else {
                continue;
            };
            out.push(FixedPoint {
                z_star,
                phi_star,
                stability,
                branch: weak_branch_label(model, z_star),
            });
        }
    }
    out
}

/// Closed-form stationary states of the symmetric double well.
///
/// At `Φ = π`: `z = 0` for `Λ ≤ 1`, plus the broken pair
/// `z = ±√(Λ² - 1)/Λ` past the pitchfork at `Λ = 1`. At `Φ = 0` the mirror
/// structure appears for `Λ < -1`. Stabilities come from the analytic
/// eigenvalue products `Λ - 1` (z = 0, Φ = π), `1 - Λ²` (broken pair) and
/// `-(Λ + 1)` (z = 0, Φ = 0).
pub fn double_well_fixed_points(model: &DoubleWellModel) -> Vec<FixedPoint> {
    let lam = model.coupling_ratio;
    let broken_z = if lam.abs() > 1.0 {
        Some((lam * lam - 1.0).sqrt() / lam.abs())
    } else {
        None
    };
    let mut out = Vec::new();
    let mut push = |z: f64, phi: f64, p: f64| {
        out.push(FixedPoint {
            z_star: z,
            phi_star: phi,
            stability: stability_from_product(p),
            branch: if z == 0.0 {
                BranchLabel::DoubleWellSymmetric
            } else {
                BranchLabel::DoubleWellBroken
            },
        });
    };
    // phi = 0 plane
    if lam < -1.0 {
        let z = broken_z.unwrap();
        push(-z, 0.0, 1.0 - lam * lam);
        push(0.0, 0.0, -(lam + 1.0));
        push(z, 0.0, 1.0 - lam * lam);
    } else {
        push(0.0, 0.0, -(lam + 1.0));
    }
    // phi = pi plane
    if lam > 1.0 {
        let z = broken_z.unwrap();
        push(-z, PI, 1.0 - lam * lam);
        push(0.0, PI, lam - 1.0);
        push(z, PI, 1.0 - lam * lam);
    } else {
        push(0.0, PI, lam - 1.0);
    }
    out
}
