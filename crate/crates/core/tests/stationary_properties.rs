//! Randomized consistency properties of the stationary-state machinery:
//! substitution closure of the excitation-ratio curve, mirror inversion of
//! the fixed-point set, and agreement between the closed-form and numeric
//! double-well paths.

use cavity_bec::models::{DoubleWellModel, Model, PhaseState, WeakRegimeModel};
use cavity_bec::stationary::{
    admissible_domain, double_well_fixed_points, excitation_ratio_curve, find_fixed_points,
    scan_fixed_points, CurveBranch, ScanOptions,
};
use cavity_bec::SINGULARITY_GUARD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Draw z uniformly from the admissible intervals, keeping the same guard
/// bands the vector field enforces (no tighter than |z| > 1e-6 so the
/// curve's z = 0 exclusion is respected).
fn sample_admissible(rng: &mut ChaCha8Rng, detuning: f64, coupling: f64) -> Option<f64> {
    let dom = admissible_domain(detuning, coupling);
    let total = dom.measure();
    if total <= 0.0 {
        return None;
    }
    for _ in 0..64 {
        let mut x = rng.random_range(0.0..total);
        let mut z = None;
        for [a, b] in &dom.intervals {
            if x <= b - a {
                z = Some(a + x);
                break;
            }
            x -= b - a;
        }
        let z = z?;
        if z.abs() >= 1e-6 && z.abs() <= 1.0 - 1e-3 {
            return Some(z);
        }
    }
    None
}

#[test]
fn substitution_closure_of_the_excitation_curve() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0101);
    let mut tested = 0usize;
    let mut discarded = 0usize;
    while tested < 10_000 {
        let detuning = rng.random_range(-2.0..2.0);
        let coupling = rng.random_range(-8.0..8.0);
        let Some(z) = sample_admissible(&mut rng, detuning, coupling) else {
            continue;
        };
        let branch = if rng.random_range(0..2) == 0 {
            CurveBranch::Plus
        } else {
            CurveBranch::Minus
        };
        tested += 1;
        let Ok(k) = excitation_ratio_curve(z, detuning, coupling, branch) else {
            discarded += 1;
            continue;
        };
        if k - z <= SINGULARITY_GUARD {
            discarded += 1;
            continue;
        }
        let model = WeakRegimeModel::new(detuning, coupling, k);
        let residual = [0.0, PI]
            .iter()
            .filter_map(|&phi| model.velocity(PhaseState::new(z, phi)).ok())
            .map(|(_, phi_dot)| phi_dot.abs())
            .fold(f64::INFINITY, f64::min);
        assert!(
            residual < 1e-9,
            "curve point not stationary: residual {residual:e} at z={z}, \
             detuning={detuning}, coupling={coupling}, branch={branch:?}, k={k}"
        );
    }
    let fraction = discarded as f64 / tested as f64;
    println!("substitution closure: {tested} samples, discarded fraction {fraction:.4}");
    assert!(fraction < 0.5);
}

#[test]
fn fixed_point_set_mirrors_under_simultaneous_negation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0102);
    for _ in 0..100 {
        let detuning = rng.random_range(0.0..2.0);
        let coupling = rng.random_range(0.1..8.0);
        let k = rng.random_range(0.05..12.0);
        let a = find_fixed_points(&WeakRegimeModel::new(detuning, coupling, k));
        let b = find_fixed_points(&WeakRegimeModel::new(-detuning, -coupling, k));
        let mut za: Vec<f64> = a.iter().map(|p| p.z_star).collect();
        let mut zb: Vec<f64> = b.iter().map(|p| p.z_star).collect();
        za.sort_by(|x, y| x.partial_cmp(y).unwrap());
        zb.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(
            za.len(),
            zb.len(),
            "count mismatch at detuning={detuning}, coupling={coupling}, k={k}"
        );
        for (x, y) in za.iter().zip(&zb) {
            assert!(
                (x - y).abs() < 1e-9,
                "mirror inversion violated: {x} vs {y} at \
                 detuning={detuning}, coupling={coupling}, k={k}"
            );
        }
    }
}

#[test]
fn mirrored_fixed_points_swap_phase_planes() {
    let a = find_fixed_points(&WeakRegimeModel::new(-0.5, 8.0, 10.0));
    let b = find_fixed_points(&WeakRegimeModel::new(0.5, -8.0, 10.0));
    let plane = |fps: &[cavity_bec::stationary::FixedPoint], phi: f64| -> Vec<f64> {
        let mut zs: Vec<f64> = fps
            .iter()
            .filter(|p| if phi == 0.0 { p.phi_star == 0.0 } else { p.phi_star != 0.0 })
            .map(|p| p.z_star)
            .collect();
        zs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        zs
    };
    let (a0, api) = (plane(&a, 0.0), plane(&a, PI));
    let (b0, bpi) = (plane(&b, 0.0), plane(&b, PI));
    assert_eq!(a0.len(), bpi.len());
    assert_eq!(api.len(), b0.len());
    for (x, y) in a0.iter().zip(&bpi).chain(api.iter().zip(&b0)) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn double_well_closed_form_matches_scan_over_coupling_range() {
    let opts = ScanOptions::default();
    for i in 0..40 {
        let lam = -2.5 + 5.0 * i as f64 / 39.0;
        let model = DoubleWellModel::new(lam);
        for phi_star in [0.0, PI] {
            let numeric = scan_fixed_points(&model, phi_star, &opts);
            let closed: Vec<f64> = double_well_fixed_points(&model)
                .into_iter()
                .filter(|p| p.phi_star == phi_star)
                .map(|p| p.z_star)
                .collect();
            assert_eq!(
                numeric.len(),
                closed.len(),
                "count mismatch at coupling {lam}, phi* = {phi_star}"
            );
            for (n, c) in numeric.iter().zip(&closed) {
                assert!((n - c).abs() < 1e-9, "coupling {lam}: {n} vs {c}");
            }
        }
    }
}

#[test]
fn curve_output_is_always_accessible() {
    // k - z > 0 holds identically on both branches wherever the curve is
    // real, so curve points are never starved of photons
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0103);
    for _ in 0..2000 {
        let detuning = rng.random_range(-2.0..2.0);
        let coupling = rng.random_range(-8.0..8.0);
        let Some(z) = sample_admissible(&mut rng, detuning, coupling) else {
            continue;
        };
        for branch in [CurveBranch::Plus, CurveBranch::Minus] {
            if let Ok(k) = excitation_ratio_curve(z, detuning, coupling, branch) {
                assert!(k - z > 0.0, "k - z = {} at z = {z}", k - z);
            }
        }
    }
}
