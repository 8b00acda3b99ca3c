//! The uniform law is invariant for every built-in family.
//!
//! Two readings, both at the 1% KS level:
//! * replicas: X_10 across independent seeds is exactly an iid uniform
//!   sample when the chain is stationary — this covers every family,
//!   including the frozen mixture (a+b = 1), whose single path lives on
//!   two points and has no ergodic time average;
//! * single path: for mixing families, states subsampled at stride 16
//!   are effectively independent and the path's empirical law is
//!   uniform.

use copmix_core::registry::make_family;
use copmix_core::simulate::{ks_statistic_uniform, ks_uniform_critical_1pct, sample_chain};
use copmix_core::Grid;

#[test]
fn replica_marginals_are_uniform_for_every_builtin_family() {
    let grid = Grid::midpoint(512);
    let families: &[(&str, &[f64])] = &[
        ("independence", &[]),
        ("fgm", &[0.8]),
        ("frechet", &[0.3, 0.2]),
        ("frechet", &[0.6, 0.4]),
        ("mardia", &[0.5]),
        ("mh", &[0.5]),
        ("mh", &[1.0]),
        ("m2", &[]),
        ("t3_2", &[0.7, 1.0]),
        ("example2", &[0.3]),
        ("example3", &[1.2]),
    ];
    let replicas = 20_000;
    for (fam_idx, (name, params)) in families.iter().enumerate() {
        let model = make_family(name, params, &grid).unwrap();
        let sample: Vec<f64> = (0..replicas)
            .map(|r| {
                let seed = (fam_idx as u64) << 32 | r as u64;
                sample_chain(&model, 11, seed).unwrap().states[10]
            })
            .collect();
        let d = ks_statistic_uniform(&sample);
        assert!(
            d <= ks_uniform_critical_1pct(replicas),
            "{}: replica KS {d} above {}",
            model.label,
            ks_uniform_critical_1pct(replicas)
        );
    }
}

#[test]
fn single_paths_of_mixing_families_are_uniform() {
    let grid = Grid::midpoint(512);
    let families: &[(&str, &[f64])] = &[
        ("fgm", &[0.8]),
        ("frechet", &[0.3, 0.2]),
        ("mh", &[0.5]),
        ("example2", &[0.3]),
        ("example3", &[1.2]),
    ];
    let n = 100_000;
    for (fam_idx, (name, params)) in families.iter().enumerate() {
        let model = make_family(name, params, &grid).unwrap();
        let t = sample_chain(&model, n, 7000 + fam_idx as u64).unwrap();
        let thin: Vec<f64> = t.states.iter().copied().step_by(16).collect();
        let d = ks_statistic_uniform(&thin);
        assert!(
            d <= ks_uniform_critical_1pct(thin.len()),
            "{}: path KS {d} above {}",
            model.label,
            ks_uniform_critical_1pct(thin.len())
        );
    }
}
