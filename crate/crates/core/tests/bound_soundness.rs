//! Certificates never undercut the measured norm, and the two
//! no-mixing diagnostics agree at the frozen boundary.

use copmix_core::bounds::derivative_bound;
use copmix_core::ergodicity::minorization_check;
use copmix_core::families::{self, FrechetParams};
use copmix_core::spectral::{assemble_operator, no_mixing_witness, rho1_estimate};
use copmix_core::Grid;

#[test]
fn derivative_bound_dominates_the_measured_norm() {
    let grid = Grid::midpoint(256);
    for i in 0..=10 {
        let theta = -1.0 + 0.2 * i as f64;
        let model = families::fgm(theta).unwrap();
        let rho = rho1_estimate(&assemble_operator(&model, &grid).unwrap()).unwrap();
        let rep = derivative_bound(&model, &grid).unwrap();
        assert!(rep.satisfied, "fgm({theta}) not certified");
        let bound = rep.inputs["rho1_bound"];
        assert!(
            rho <= bound + 10.0 * grid.tolerance(),
            "fgm({theta}): rho1 {rho} above certified {bound}"
        );
    }
}

#[test]
fn no_mixing_diagnostics_agree_at_the_boundary() {
    // a + b = 1: the minorization fails for every q > 0 and the cosine
    // witness pins rho1 = 1; off the boundary both certify mixing.
    let grid = Grid::midpoint(256);
    for &(a, b) in &[(0.6, 0.4), (0.3, 0.7)] {
        let model = families::frechet(FrechetParams { a, b }).unwrap();
        for &q in &[0.01, 0.1, 0.5] {
            let cert = minorization_check(&model, (0.5, 1.0), q, &grid).unwrap();
            assert!(!cert.is_valid(1e-12), "({a},{b}) q={q}: margin {}", cert.worst_margin);
        }
        let (is_fixed, _) = no_mixing_witness(&model, &grid).unwrap();
        assert!(is_fixed);
        let rho = rho1_estimate(&assemble_operator(&model, &grid).unwrap()).unwrap();
        assert!((rho - 1.0).abs() <= 1e-3);
    }

    let mixing = families::frechet(FrechetParams { a: 0.3, b: 0.2 }).unwrap();
    let cert = minorization_check(&mixing, (0.5, 1.0), 0.5, &grid).unwrap();
    assert!(cert.is_valid(1e-12));
    let (is_fixed, _) = no_mixing_witness(&mixing, &grid).unwrap();
    assert!(!is_fixed);
}
