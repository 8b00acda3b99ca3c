//! `copmix reproduce`: regenerates every headline number — spectral
//! laws, closed-form constants, mixture algebra, generator roots,
//! bound soundness, kernel agreement, drift certificates, and the
//! property suite — into one JSON report, per-family CSV series, and a
//! markdown summary. Deterministic given (seed, grid): reruns produce
//! byte-identical artifacts.

use std::path::Path;

use serde::Serialize;

use copmix_core::archimedean::{
    critical_parameter, log_family, log_family_integral_closed, mixing_integral,
    rational_family, rational_family_integral_closed, standardize,
};
use copmix_core::bounds::{
    beta_sandwich, derivative_bound, envelope_bound, envelope_extract, table_bound,
};
use copmix_core::ergodicity::{drift_check, frechet_drift_spec, minorization_check};
use copmix_core::families::{
    self, frechet_n_step_params, BoundedFn, FrechetParams, MFamily, TableDensitySpec,
};
use copmix_core::model::MapKind;
use copmix_core::registry::make_family;
use copmix_core::simulate::{ks_statistic_two_sample, ks_two_sample_critical_1pct};
use copmix_core::spectral::{
    assemble_operator, basis_image_norm_sum, mixing_series, no_mixing_witness, rho1_estimate,
};
use copmix_core::{fold_powers, validate_copula, Error, Grid};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Serialize)]
pub struct Reproduction {
    pub schema_version: u32,
    pub seed: u64,
    pub grid_size: usize,
    pub scheme: String,
    pub sections: Vec<Section>,
}

#[derive(Debug, Serialize)]
pub struct Section {
    pub name: String,
    pub ok: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub ok: bool,
}

impl Check {
    fn abs(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Check {
        Check { name: name.into(), value, target, tolerance: tol, ok: (value - target).abs() <= tol }
    }

    fn le(name: impl Into<String>, value: f64, limit: f64) -> Check {
        Check { name: name.into(), value, target: limit, tolerance: 0.0, ok: value <= limit }
    }

    fn ge(name: impl Into<String>, value: f64, floor: f64) -> Check {
        Check { name: name.into(), value, target: floor, tolerance: 0.0, ok: value >= floor }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            target: 1.0,
            tolerance: 0.0,
            ok,
        }
    }
}

fn section(name: &str, checks: Vec<Check>) -> Section {
    let ok = checks.iter().all(|c| c.ok);
    Section { name: name.into(), ok, checks }
}

/// Independent stationary pairs (X_0, X_1) from a copula model: each
/// pair restarts from a fresh uniform state, so pairs are iid and the
/// two-sample KS critical value applies exactly.
pub fn independent_pairs_copula(
    model: &copmix_core::CopulaModel,
    n: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    let inv = model.closed_form_conditional_inverse().expect("closed-form inverse");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x: f64 = rng.gen();
            let u: f64 = rng.gen();
            (x, inv(x, u).clamp(0.0, 1.0))
        })
        .collect()
}

/// Independent stationary pairs from the stay-probability kernel on
/// [-1,1], mapped to the unit square.
pub fn independent_pairs_kernel(a: f64, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let k = 1.0 / (2.0 - a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x: f64 = 2.0 * rng.gen::<f64>() - 1.0;
            let u: f64 = rng.gen();
            let y = if u < a * x.abs() {
                x
            } else {
                let p: f64 = rng.gen();
                2.0 * copmix_core::families::mh_proposal_inverse(a, k, p) - 1.0
            };
            ((x + 1.0) / 2.0, (y + 1.0) / 2.0)
        })
        .collect()
}

/// Worst slack of the anti-concentration inequality
/// |int f g h| <= bound ||g|| ||h|| over seeded random mean-zero pairs.
pub fn bilinear_inequality_worst_slack(
    model: &copmix_core::CopulaModel,
    bound: f64,
    grid: &Grid,
    pairs: usize,
    seed: u64,
) -> f64 {
    let n = grid.len();
    let nodes = grid.nodes();
    let mut density = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            density[i][j] = model.density(nodes[i], nodes[j]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let mut g: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut h: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mg = grid.integrate_samples(&g);
        let mh = grid.integrate_samples(&h);
        for v in g.iter_mut() {
            *v -= mg;
        }
        for v in h.iter_mut() {
            *v -= mh;
        }
        let mut form = 0.0f64;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += density[i][j] * h[j] * grid.weights()[j];
            }
            form += g[i] * row * grid.weights()[i];
        }
        let slack = bound * grid.norm(&g) * grid.norm(&h) - form.abs();
        worst = worst.min(slack);
    }
    worst
}

fn atom_weights(model: &copmix_core::CopulaModel, x: f64) -> (f64, f64) {
    let mut wid = 0.0;
    let mut wfl = 0.0;
    for atom in model.atoms() {
        match atom.kind {
            MapKind::Identity => wid += atom.weight_at(x),
            MapKind::Flip => wfl += atom.weight_at(x),
        }
    }
    (wid, wfl)
}

fn spectral_law_section(grid: &Grid) -> Result<Section, Error> {
    let mut checks = Vec::new();
    for &theta in &[-1.0, -0.6, -0.3, 0.0, 0.3, 0.6, 1.0] {
        let model = families::fgm(theta)?;
        let rho = rho1_estimate(&assemble_operator(&model, grid)?)?;
        checks.push(Check::abs(
            format!("fgm({theta}) rho1 vs |theta|/3"),
            rho,
            theta.abs() / 3.0,
            1e-3,
        ));
        if theta != 0.0 {
            for (k, stepped) in fold_powers(&model, 3, grid)?.iter().enumerate().skip(1) {
                let rho_k = rho1_estimate(&assemble_operator(stepped, grid)?)?;
                checks.push(Check::abs(
                    format!("fgm({theta}) {}-step rho vs (|theta|/3)^k", k + 1),
                    rho_k,
                    (theta.abs() / 3.0).powi(k as i32 + 1),
                    2e-3,
                ));
            }
        }
    }
    Ok(section("fgm_spectral_law", checks))
}

fn derivative_constants_section() -> Result<Section, Error> {
    // Gauss-Legendre nodes: the integrands are polynomial after the
    // absolute values cancel, so the quadrature is essentially exact.
    let grid = Grid::gauss_legendre(512);
    let mut checks = Vec::new();
    for &theta in &[-1.0, -0.5, 0.25, 0.5, 1.0] {
        let rep = derivative_bound(&families::fgm(theta)?, &grid)?;
        checks.push(Check::abs(
            format!("fgm({theta}) k1 vs 4 theta^2/3"),
            rep.inputs["k1"],
            4.0 * theta * theta / 3.0,
            1e-6,
        ));
        checks.push(Check::abs(
            format!("fgm({theta}) k2 vs 16 theta^2/3"),
            rep.inputs["k2"],
            16.0 * theta * theta / 3.0,
            1e-6,
        ));
    }
    for i in 0..=10 {
        let theta = -1.0 + 0.2 * i as f64;
        let rep = derivative_bound(&families::fgm(theta)?, &grid)?;
        checks.push(Check::le(format!("fgm({theta:.1}) k1+k2 below 12"), rep.value, 12.0 - 1e-9));
    }
    Ok(section("derivative_constants", checks))
}

fn mixture_n_step_section(grid: &Grid) -> Result<Section, Error> {
    let mut checks = Vec::new();
    for &(a, b) in &[(0.3, 0.2), (0.5, 0.1), (0.05, 0.9)] {
        let p = FrechetParams { a, b };
        let model = families::frechet(p)?;
        let powers = fold_powers(&model, 6, grid)?;
        for (idx, stepped) in powers.iter().enumerate() {
            let n = idx + 1;
            let (an, bn) = frechet_n_step_params(p, n)?;
            let (wid, wfl) = atom_weights(stepped, 0.37);
            checks.push(Check::abs(
                format!("frechet({a},{b}) {n}-step identity weight"),
                wid,
                an,
                1e-12,
            ));
            checks.push(Check::abs(
                format!("frechet({a},{b}) {n}-step flip weight"),
                wfl,
                bn,
                1e-12,
            ));
            let mut dev = 0.0f64;
            for &x in grid.nodes().iter().step_by(16) {
                for &y in grid.nodes().iter().step_by(16) {
                    dev = dev.max((stepped.density(x, y) - (1.0 - an - bn)).abs());
                }
            }
            checks.push(Check::le(
                format!("frechet({a},{b}) {n}-step density dev"),
                dev,
                grid.tolerance(),
            ));
        }
    }
    Ok(section("mixture_n_step", checks))
}

fn mixture_mixing_section(grid: &Grid) -> Result<Section, Error> {
    let mut checks = Vec::new();
    for &(a, b) in &[(0.3, 0.2), (0.5, 0.1), (0.05, 0.9)] {
        let model = families::frechet(FrechetParams { a, b })?;
        for pt in mixing_series(&model, 6, grid)? {
            let target = (a + b).powi(pt.n as i32);
            checks.push(Check::abs(
                format!("frechet({a},{b}) beta_{}", pt.n),
                pt.beta,
                target,
                grid.tolerance(),
            ));
            checks.push(Check::abs(
                format!("frechet({a},{b}) phi_{}", pt.n),
                pt.phi,
                target,
                grid.tolerance(),
            ));
        }
        let rho = rho1_estimate(&assemble_operator(&model, grid)?)?;
        checks.push(Check::abs(format!("frechet({a},{b}) rho1"), rho, a + b, 1e-3));
    }
    let frozen = families::frechet(FrechetParams { a: 0.6, b: 0.4 })?;
    let rho = rho1_estimate(&assemble_operator(&frozen, grid)?)?;
    checks.push(Check::abs("frechet(0.6,0.4) rho1 at the boundary", rho, 1.0, 1e-3));
    let (_, residual) = no_mixing_witness(&frozen, grid)?;
    checks.push(Check::le("frechet(0.6,0.4) cos witness residual", residual, 1e-6));
    Ok(section("mixture_mixing", checks))
}

fn generator_critical_section(grid: &Grid) -> Result<Section, Error> {
    let mut checks = Vec::new();

    let root_log = critical_parameter(log_family, (0.01, 0.9), 1e-4, grid)?;
    // Stated target for the log family. The quadrature root sits at the
    // closed form's own crossing instead; both numbers are recorded.
    checks.push(Check::abs("log-family root vs stated 0.348", root_log, 0.348, 5e-3));
    let closed_log = bisect(|t| log_family_integral_closed(t) - 1.0, 0.01, 0.9);
    checks.push(Check::abs(
        "log-family root vs closed-form crossing",
        root_log,
        closed_log,
        2e-3,
    ));

    let root_rational = critical_parameter(rational_family, (1.01, 2.0), 1e-4, grid)?;
    checks.push(Check::abs(
        "rational-family root vs stated 1.388",
        root_rational,
        1.388,
        5e-3,
    ));
    checks.push(Check::abs(
        "rational-family closed form at 1",
        rational_family_integral_closed(1.0),
        0.0,
        0.0,
    ));
    // theta = 1 itself is the countermonotone generator, which the
    // certificate refuses; the closed form covers that endpoint.
    for &theta in &[1.05, 1.1, 1.2, 1.3, 1.45, 1.6] {
        let quad = mixing_integral(&rational_family(theta)?, grid)?;
        checks.push(Check::abs(
            format!("rational-family certificate at {theta} vs closed form"),
            quad,
            rational_family_integral_closed(theta),
            1e-4,
        ));
    }
    for &theta in &[0.01, 0.2, 0.3] {
        let quad = mixing_integral(&standardize(&log_family(theta)?)?, grid)?;
        checks.push(Check::abs(
            format!("log-family certificate at {theta} vs closed form"),
            quad,
            log_family_integral_closed(theta),
            1e-4,
        ));
    }
    Ok(section("generator_critical_parameters", checks))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn envelope_soundness_section(grid: &Grid) -> Result<Section, Error> {
    let mut checks = Vec::new();
    for &(a, b) in &[(0.0, 0.3), (0.2, 0.2), (0.45, 0.45), (0.6, 0.3), (0.1, 0.7), (0.3, 0.2)] {
        let model = families::frechet(FrechetParams { a, b })?;
        let rho = rho1_estimate(&assemble_operator(&model, grid)?)?;
        let (e1, e2) = envelope_extract(&model, grid);
        let bound = envelope_bound(&e1, &e2, grid)?;
        checks.push(Check::le(
            format!("frechet({a},{b}) rho1 {rho:.4} below envelope bound"),
            rho,
            bound.value + 1e-3,
        ));
    }
    let m_specs = [
        TableDensitySpec::m(MFamily::M1, BoundedFn::identity(), BoundedFn::identity()),
        TableDensitySpec::m(MFamily::M2, BoundedFn::identity(), BoundedFn::identity()),
        TableDensitySpec::m(
            MFamily::M2,
            BoundedFn::new(|x| x * x, 1.0, 0.0, 1.0 / 3.0),
            BoundedFn::identity(),
        ),
    ];
    for spec in &m_specs {
        let (model, _) = families::table_density(spec, grid)?;
        let rho = rho1_estimate(&assemble_operator(&model, grid)?)?;
        let bound = table_bound(spec)?;
        checks.push(Check::le(
            format!("{} rho1 {rho:.4} below closed-form bound", spec.name()),
            rho,
            bound.value + 1e-3,
        ));
        // The construction envelope reproduces the closed form.
        let (e1, e2) = spec.construction_envelope()?;
        let e1v: Vec<f64> = grid.nodes().iter().map(|&x| e1(x)).collect();
        let e2v: Vec<f64> = grid.nodes().iter().map(|&x| e2(x)).collect();
        let env = envelope_bound(&e1v, &e2v, grid)?;
        // The envelope integrals carry midpoint error (~1/(12 N^2) for
        // smooth g), the closed form uses the exact L1 norms.
        checks.push(Check::abs(
            format!("{} construction envelope matches closed form", spec.name()),
            env.value,
            bound.value,
            1e-6,
        ));
    }
    Ok(section("envelope_soundness", checks))
}

fn stay_kernel_section(grid: &Grid, seed: u64) -> Result<Section, Error> {
    let mut checks = Vec::new();
    for &a in &[0.25, 0.5, 0.75, 1.0] {
        let model = families::mh_copula(a)?;
        let rep = validate_copula(&model, grid, 1e-8)?;
        checks.push(Check::flag(format!("mh({a}) validates"), rep.all_ok()));
    }

    // Sampler agreement: KS on scalar pair functionals over independent
    // stationary pairs.
    let n = 100_000;
    let a = 0.5;
    let copula_pairs = independent_pairs_copula(&families::mh_copula(a)?, n, seed);
    let kernel_pairs = independent_pairs_kernel(a, n, seed + 1);
    let crit = ks_two_sample_critical_1pct(n, n);
    for (fname, f) in [
        ("u+v", (|p: &(f64, f64)| p.0 + p.1) as fn(&(f64, f64)) -> f64),
        ("v-u", |p: &(f64, f64)| p.1 - p.0),
    ] {
        let sa: Vec<f64> = copula_pairs.iter().map(f).collect();
        let sb: Vec<f64> = kernel_pairs.iter().map(f).collect();
        let d = ks_statistic_two_sample(&sa, &sb);
        checks.push(Check::le(format!("mh(0.5) sampler KS on {fname} at 1%"), d, crit));
    }

    // beta_n inside the closed-form sandwich; both readings of the lower
    // bound are accepted as the floor.
    for &a in &[0.25, 0.5, 0.75, 1.0] {
        let model = families::mh_copula(a)?;
        for pt in mixing_series(&model, 8, grid)? {
            let s = beta_sandwich(a, pt.n)?;
            let lower = s.lower.min(s.stay_moment) - grid.tolerance();
            let upper = s.upper + grid.tolerance();
            checks.push(Check::flag(
                format!(
                    "mh({a}) beta_{} = {:.5} in [{lower:.5}, {upper:.5}]",
                    pt.n, pt.beta
                ),
                lower <= pt.beta && pt.beta <= upper,
            ));
        }
    }
    Ok(section("stay_kernel", checks))
}

fn drift_section(grid: &Grid) -> Result<Section, Error> {
    let mut checks = Vec::new();
    let mut count = 0;
    'outer: for i in 1..=5 {
        for j in 1..=4 {
            let a = 0.18 * i as f64;
            let b = (0.94 - a).min(0.22 * j as f64).max(0.01);
            if a + b > 0.95 {
                continue;
            }
            count += 1;
            let p = FrechetParams { a, b };
            let model = families::frechet(p)?;
            let spec = frechet_drift_spec(p, grid)?;
            let drift = drift_check(&model, &spec, grid)?;
            let cert = minorization_check(&model, spec.small_set, 1.0 - a - b, grid)?;
            checks.push(Check::ge(
                format!("frechet({a:.2},{b:.2}) drift slack"),
                drift.worst_drift_slack,
                -1e-12,
            ));
            checks.push(Check::ge(
                format!("frechet({a:.2},{b:.2}) tail slack"),
                drift.worst_tail_slack,
                1e-12,
            ));
            checks.push(Check::ge(
                format!("frechet({a:.2},{b:.2}) minorization margin"),
                cert.worst_margin,
                -1e-12,
            ));
            if count >= 20 {
                break 'outer;
            }
        }
    }
    checks.push(Check::ge("drift lattice size", count as f64, 20.0));
    Ok(section("drift_certificates", checks))
}

fn property_section(grid: &Grid, seed: u64) -> Result<Section, Error> {
    let mut checks = Vec::new();

    // Copula axioms and mass margins for every built-in family.
    let family_list: &[(&str, &[f64])] = &[
        ("independence", &[]),
        ("fgm", &[0.5]),
        ("fgm", &[-1.0]),
        ("frechet", &[0.3, 0.2]),
        ("frechet", &[0.6, 0.4]),
        ("mardia", &[0.5]),
        ("m1", &[]),
        ("m2", &[]),
        ("m3", &[]),
        ("m4", &[]),
        ("t3_1", &[0.7]),
        ("t3_2", &[0.7, 1.0]),
        ("t3_3", &[0.7, 1.0, 0.5]),
        ("t3_4", &[0.7, 0.5]),
        ("mh", &[0.5]),
        ("mh", &[1.0]),
        ("example2", &[0.3]),
        ("example3", &[1.2]),
    ];
    for (name, params) in family_list {
        let model = make_family(name, params, grid)?;
        let tol = if model.closed_form_cdf().is_some() && !model.has_unrepresented_singular_part()
        {
            1e-8
        } else {
            grid.tolerance()
        };
        let rep = validate_copula(&model, grid, tol)?;
        checks.push(Check::flag(format!("{} axioms+margins", model.label), rep.all_ok()));
    }

    // Submultiplicativity of the k-step norm.
    for model in [
        families::fgm(0.8)?,
        families::frechet(FrechetParams { a: 0.3, b: 0.2 })?,
        families::mh_copula(0.5)?,
    ] {
        let rho1 = rho1_estimate(&assemble_operator(&model, grid)?)?;
        for (k, stepped) in fold_powers(&model, 3, grid)?.iter().enumerate().skip(1) {
            let rho_k = rho1_estimate(&assemble_operator(stepped, grid)?)?;
            checks.push(Check::le(
                format!("{} rho_{} below rho1^k", model.label, k + 1),
                rho_k,
                rho1.powi(k as i32 + 1) + 1e-3,
            ));
        }
    }

    // Basis-image partial sums dominate rho1^2 up to the pinned
    // truncation allowance (10x grid tolerance; the bilinear kernel
    // saturates the full series, so partial sums sit below by the tail).
    for model in [families::fgm(0.9)?, families::fgm(1.0)?] {
        let rho1 = rho1_estimate(&assemble_operator(&model, grid)?)?;
        let mut prev = 0.0;
        for terms in [5usize, 10, 20] {
            let sum = basis_image_norm_sum(&model, grid, terms)?;
            checks.push(Check::ge(
                format!("{} basis-image sum({terms}) vs rho1^2", model.label),
                sum,
                rho1 * rho1 - 10.0 * grid.tolerance(),
            ));
            checks.push(Check::ge(
                format!("{} basis-image sum({terms}) monotone", model.label),
                sum,
                prev,
            ));
            prev = sum;
        }
    }

    // Anti-concentration inequality on random mean-zero pairs.
    let m2 = TableDensitySpec::m(MFamily::M2, BoundedFn::identity(), BoundedFn::identity());
    let (m2_model, _) = families::table_density(&m2, grid)?;
    let bound = table_bound(&m2)?.value;
    let worst = bilinear_inequality_worst_slack(&m2_model, bound, grid, 200, seed);
    checks.push(Check::ge("m2 bilinear inequality worst slack", worst, 0.0));

    let fr = families::frechet(FrechetParams { a: 0.3, b: 0.2 })?;
    let (e1, e2) = envelope_extract(&fr, grid);
    let frbound = envelope_bound(&e1, &e2, grid)?.value;
    let worst = bilinear_inequality_worst_slack(&fr, frbound, grid, 200, seed + 1);
    checks.push(Check::ge("frechet bilinear inequality worst slack", worst, 0.0));

    Ok(section("property_suites", checks))
}

fn mixing_csv(model: &copmix_core::CopulaModel, grid: &Grid, nmax: usize) -> Result<String, Error> {
    let rho1 = rho1_estimate(&assemble_operator(model, grid)?)?;
    let mut csv = String::from("n,beta_n,phi_n,rho1_pow_n\n");
    for pt in mixing_series(model, nmax, grid)? {
        csv.push_str(&format!("{},{},{},{}\n", pt.n, pt.beta, pt.phi, rho1.powi(pt.n as i32)));
    }
    Ok(csv)
}

pub fn run(grid: &Grid, seed: u64, dir: &Path) -> Result<Reproduction, Error> {
    let sections = vec![
        spectral_law_section(grid)?,
        derivative_constants_section()?,
        mixture_n_step_section(grid)?,
        mixture_mixing_section(grid)?,
        generator_critical_section(grid)?,
        envelope_soundness_section(grid)?,
        stay_kernel_section(grid, seed)?,
        drift_section(grid)?,
        property_section(grid, seed)?,
    ];
    let rep = Reproduction {
        schema_version: 1,
        seed,
        grid_size: grid.len(),
        scheme: grid.scheme().to_string(),
        sections,
    };

    std::fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))?;
    let json = serde_json::to_string_pretty(&rep).expect("json");
    crate::write_file(&dir.join("report.json"), &json)?;

    crate::write_file(
        &dir.join("mixing_fgm.csv"),
        &mixing_csv(&families::fgm(0.9)?, grid, 6)?,
    )?;
    crate::write_file(
        &dir.join("mixing_frechet.csv"),
        &mixing_csv(&families::frechet(FrechetParams { a: 0.3, b: 0.2 })?, grid, 6)?,
    )?;
    crate::write_file(
        &dir.join("mixing_mh.csv"),
        &mixing_csv(&families::mh_copula(0.5)?, grid, 6)?,
    )?;

    let mut md = String::new();
    md.push_str("# Reproduction summary\n\n");
    md.push_str(&format!(
        "seed {}, grid {} ({} nodes)\n\n| section | checks | failed |\n|---|---|---|\n",
        rep.seed,
        rep.scheme,
        rep.grid_size
    ));
    for s in &rep.sections {
        let failed = s.checks.iter().filter(|c| !c.ok).count();
        md.push_str(&format!("| {} | {} | {} |\n", s.name, s.checks.len(), failed));
    }
    let failures: Vec<&Check> =
        rep.sections.iter().flat_map(|s| s.checks.iter()).filter(|c| !c.ok).collect();
    if failures.is_empty() {
        md.push_str("\nAll checks passed.\n");
    } else {
        md.push_str("\nFailed checks:\n\n");
        for c in failures {
            md.push_str(&format!(
                "- {}: value {} vs target {} (tolerance {})\n",
                c.name, c.value, c.target, c.tolerance
            ));
        }
    }
    crate::write_file(&dir.join("summary.md"), &md)?;

    Ok(rep)
}
