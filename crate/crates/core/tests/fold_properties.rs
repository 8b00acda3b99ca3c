//! Cross-family properties of the fold product.

use copmix_core::families::{self, FrechetParams};
use copmix_core::model::{conditional_cdf, validate_copula, MapKind};
use copmix_core::{fold, n_step, Grid};

use proptest::prelude::*;

fn max_density_diff(a: &copmix_core::CopulaModel, b: &copmix_core::CopulaModel, grid: &Grid) -> f64 {
    let mut worst = 0.0f64;
    for &x in grid.nodes() {
        for &y in grid.nodes() {
            worst = worst.max((a.density(x, y) - b.density(x, y)).abs());
        }
    }
    worst
}

#[test]
fn fold_of_validated_models_stays_valid() {
    let grid = Grid::midpoint(256);
    let tol = grid.tolerance();
    let pairs = [
        (families::fgm(0.9).unwrap(), families::fgm(-0.6).unwrap()),
        (
            families::frechet(FrechetParams { a: 0.3, b: 0.2 }).unwrap(),
            families::mh_copula(0.5).unwrap(),
        ),
        (families::mh_copula(1.0).unwrap(), families::fgm(0.4).unwrap()),
    ];
    for (a, b) in pairs {
        let ab = fold(&a, &b, &grid).unwrap();
        let rep = validate_copula(&ab, &grid, 10.0 * tol).unwrap();
        assert!(rep.all_ok(), "{} fails: {rep:?}", ab.label);
    }
}

#[test]
fn fgm_n_step_parameter_law() {
    let grid = Grid::midpoint(256);
    let three = n_step(&families::fgm(0.9).unwrap(), 3, &grid).unwrap();
    let expected = families::fgm(0.9f64.powi(3) / 9.0).unwrap();
    assert!(max_density_diff(&three, &expected, &grid) <= grid.tolerance());
}

#[test]
fn frechet_fold_mixes_weights_algebraically() {
    let grid = Grid::midpoint(128);
    let a = families::frechet(FrechetParams { a: 0.25, b: 0.3 }).unwrap();
    let b = families::frechet(FrechetParams { a: 0.1, b: 0.45 }).unwrap();
    let ab = fold(&a, &b, &grid).unwrap();
    let mut wid = 0.0;
    let mut wfl = 0.0;
    for atom in ab.atoms() {
        match atom.kind {
            MapKind::Identity => wid = atom.weight_at(0.2),
            MapKind::Flip => wfl = atom.weight_at(0.2),
        }
    }
    assert!((wid - (0.25 * 0.1 + 0.3 * 0.45)).abs() < 1e-15);
    assert!((wfl - (0.25 * 0.45 + 0.3 * 0.1)).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fold_is_associative_on_the_grid(
        t1 in -0.9f64..0.9,
        t2 in -0.9f64..0.9,
        a in 0.0f64..0.45,
        b in 0.0f64..0.45,
    ) {
        let grid = Grid::midpoint(128);
        let x = families::fgm(t1).unwrap();
        let y = families::frechet(FrechetParams { a, b }).unwrap();
        let z = families::fgm(t2).unwrap();
        let left = fold(&fold(&x, &y, &grid).unwrap(), &z, &grid).unwrap();
        let right = fold(&x, &fold(&y, &z, &grid).unwrap(), &grid).unwrap();
        prop_assert!(max_density_diff(&left, &right, &grid) <= 10.0 * grid.tolerance());
    }

    #[test]
    fn conditional_cdf_is_a_cdf(theta in -1.0f64..1.0, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let grid = Grid::midpoint(64);
        for model in [
            families::fgm(theta).unwrap(),
            families::frechet(FrechetParams { a, b }).unwrap(),
        ] {
            for &x in grid.nodes() {
                let mut prev = 0.0;
                for k in 0..=20 {
                    let v = k as f64 / 20.0;
                    let f = conditional_cdf(&model, x, v).unwrap();
                    prop_assert!(f >= prev - 1e-12, "decreasing at x={x}, v={v}");
                    prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f));
                    prev = f;
                }
                prop_assert!((conditional_cdf(&model, x, 1.0).unwrap() - 1.0).abs() <= 1e-9);
            }
        }
    }
}
