//! Archimedean generator machinery.
//!
//! A generator is a decreasing convex phi: [0,1] -> [0,infty) with
//! phi(1) = 0; the induced copula is C(u,v) = phi^{-1}(phi(u) + phi(v))
//! (clamped at phi(0) in the non-strict case). Non-strict generators are
//! normalized so phi(0) = 1; all generators of the same copula are
//! scalar multiples of the standard one.
//!
//! Beyond construction, this module evaluates the maximal-correlation
//! certificate for non-strict generators,
//!
//! ```text
//! integral_0^1 (1-x) ( h(x) / (phi' o phi^{-1}(x))^2 )^2 dx < 1,
//! h(x) = max_{t in [x,1]} |phi'' o phi^{-1}(t)|,
//! ```
//!
//! and finds the critical parameter where the integral crosses 1.
//!
//! Caveat on non-strict copulas: when phi'(0) is finite they carry
//! singular mass on the boundary curve phi(u) + phi(v) = phi(0) — the
//! conditional law jumps by phi'(u)/phi'(0) there. That mass is a curved
//! involution graph, which the identity/flip atom algebra cannot
//! represent, so the constructed model declares it via
//! `singular_row_mass` and row-mass validation accounts for it. The
//! total is -1/phi'(0), which for the built-in families is large on the
//! whole certified range.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{CopulaModel, PointFn};

/// Generator bundle: phi with its first two derivatives and inverse.
/// Derivatives are supplied in closed form; the certificate integrand is
/// sensitive to phi'' accuracy near the boundary.
#[derive(Clone)]
pub struct Generator {
    pub label: String,
    phi: PointFn,
    dphi: PointFn,
    ddphi: PointFn,
    phi_inv: PointFn,
    strict: bool,
}

impl Generator {
    pub fn new(
        label: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi_inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        strict: bool,
    ) -> Self {
        Generator {
            label: label.into(),
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            ddphi: Arc::new(ddphi),
            phi_inv: Arc::new(phi_inv),
            strict,
        }
    }

    pub fn phi(&self, u: f64) -> f64 {
        (self.phi)(u)
    }

    pub fn dphi(&self, u: f64) -> f64 {
        (self.dphi)(u)
    }

    pub fn ddphi(&self, u: f64) -> f64 {
        (self.ddphi)(u)
    }

    pub fn phi_inv(&self, x: f64) -> f64 {
        (self.phi_inv)(x)
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_standardized(&self) -> bool {
        !self.strict && (self.phi(0.0) - 1.0).abs() <= 1e-10
    }

    /// Checks phi(1) = 0, monotonicity and convexity on the grid, and
    /// (non-strict) inverse consistency.
    pub fn check(&self, grid: &Grid) -> Result<()> {
        let p1 = self.phi(1.0);
        if p1.abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "{}: phi(1) = {p1}, expected 0",
                self.label
            )));
        }
        for &x in grid.nodes() {
            if self.dphi(x) > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "{}: phi'({x}) = {} > 0, generator must decrease",
                    self.label,
                    self.dphi(x)
                )));
            }
            if self.ddphi(x) < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "{}: phi''({x}) = {} < 0, generator must be convex",
                    self.label,
                    self.ddphi(x)
                )));
            }
        }
        if !self.strict {
            if !self.phi(0.0).is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{}: declared non-strict but phi(0) is not finite",
                    self.label
                )));
            }
            for &x in grid.nodes() {
                let round = self.phi_inv(self.phi(x));
                if (round - x).abs() > 1e-8 {
                    return Err(Error::Numeric {
                        location: format!("phi_inv(phi({x}))"),
                        message: format!("roundtrip gives {round}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Rescales a non-strict generator so phi(0) = 1. The induced copula is
/// unchanged (generators of the same copula differ by a scalar).
pub fn standardize(gen: &Generator) -> Result<Generator> {
    if gen.strict {
        return Err(Error::NotApplicable(
            "strict generators have phi(0) = infinity and no standard form".into(),
        ));
    }
    let s = gen.phi(0.0);
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{}: phi(0) = {s}, cannot standardize",
            gen.label
        )));
    }
    if (s - 1.0).abs() <= 1e-12 {
        return Ok(gen.clone());
    }
    let (phi, dphi, ddphi, phi_inv) =
        (gen.phi.clone(), gen.dphi.clone(), gen.ddphi.clone(), gen.phi_inv.clone());
    let inv = phi_inv.clone();
    Ok(Generator {
        label: format!("std({})", gen.label),
        phi: Arc::new(move |u| phi(u) / s),
        dphi: Arc::new(move |u| dphi(u) / s),
        ddphi: Arc::new(move |u| ddphi(u) / s),
        phi_inv: Arc::new(move |x| inv(s * x)),
        strict: false,
    })
}

/// Copula model induced by a generator.
///
/// Strict generators give a plain density model. Non-strict generators
/// are standardized first; the density lives on {phi(u) + phi(v) < 1}
/// and is zero outside, and any boundary-curve mass (total -1/phi'(0))
/// is declared as unrepresented singular mass. The closed-form CDF and
/// conditional CDF describe the full copula including that mass, so
/// sampling and CDF-level validation are exact. Generators whose copula
/// is purely singular (the countermonotone bound) are rejected.
pub fn archimedean_copula(gen: &Generator) -> Result<CopulaModel> {
    let g = if gen.strict { gen.clone() } else { standardize(gen)? };
    let cap = if g.strict { f64::INFINITY } else { 1.0 };

    let dphi0 = g.dphi(0.0);
    let boundary_total = if g.strict || !dphi0.is_finite() { 0.0 } else { -1.0 / dphi0 };
    if boundary_total >= 1.0 - 1e-9 {
        return Err(Error::SingularCopula(format!(
            "{}: all mass sits on the boundary curve (countermonotone copula); no density part",
            g.label
        )));
    }

    let label = format!("arch({})", gen.label);
    let gd = g.clone();
    let density = move |u: f64, v: f64| {
        let s = gd.phi(u) + gd.phi(v);
        if s >= cap {
            return 0.0;
        }
        let z = gd.phi_inv(s);
        let dz = gd.dphi(z);
        -gd.ddphi(z) * gd.dphi(u) * gd.dphi(v) / (dz * dz * dz)
    };

    let gc = g.clone();
    let cdf = move |u: f64, v: f64| gc.phi_inv((gc.phi(u) + gc.phi(v)).min(cap));

    let gk = g.clone();
    let conditional = move |u: f64, v: f64| {
        let s = gk.phi(u) + gk.phi(v);
        if s > cap {
            0.0
        } else {
            gk.dphi(u) / gk.dphi(gk.phi_inv(s))
        }
    };

    let mut model = CopulaModel::from_density(label, density)
        .with_cdf(cdf)
        .with_conditional(conditional);
    if boundary_total > 0.0 {
        let gj = g.clone();
        model = model.with_singular_row_mass(move |u| gj.dphi(u) / dphi0);
    }
    Ok(model)
}

/// max_{t in [x,1]} |phi'' o phi^{-1}(t)| for a non-strict standardized
/// generator.
///
/// When phi'' is detected monotone on the grid the maximum has a closed
/// location: decreasing phi'' puts it at t = 1 (value |phi''(0)|),
/// increasing phi'' puts it at t = x. Otherwise the interval is scanned.
pub fn h_max(gen: &Generator, x: f64, grid: &Grid) -> Result<f64> {
    require_standard(gen, "h_max")?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("h_max needs x in [0,1]; got {x}")));
    }
    match second_derivative_trend(gen, grid) {
        Trend::Decreasing => Ok(gen.ddphi(gen.phi_inv(x)).abs()),
        Trend::Increasing => Ok(gen.ddphi(gen.phi_inv(1.0)).abs()),
        Trend::Mixed => {
            let mut m = gen.ddphi(gen.phi_inv(x)).abs().max(gen.ddphi(gen.phi_inv(1.0)).abs());
            for &s in grid.nodes() {
                let t = x + (1.0 - x) * s;
                m = m.max(gen.ddphi(gen.phi_inv(t)).abs());
            }
            Ok(m)
        }
    }
}

/// Signed extrema of phi'' o phi^{-1} on [x,1], for diagnostics when a
/// supplied phi'' has an unexpected sign.
pub fn h_extrema(gen: &Generator, x: f64, grid: &Grid) -> Result<(f64, f64)> {
    require_standard(gen, "h_extrema")?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in [x, 1.0].iter().copied().chain(grid.nodes().iter().map(|&s| x + (1.0 - x) * s)) {
        let v = gen.ddphi(gen.phi_inv(t));
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

enum Trend {
    Increasing,
    Decreasing,
    Mixed,
}

fn second_derivative_trend(gen: &Generator, grid: &Grid) -> Trend {
    let vals: Vec<f64> = grid.nodes().iter().map(|&u| gen.ddphi(u)).collect();
    let eps = 1e-12 * (1.0 + vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let incr = vals.windows(2).all(|w| w[1] >= w[0] - eps);
    let decr = vals.windows(2).all(|w| w[1] <= w[0] + eps);
    // phi'' monotone in u flips direction under the decreasing phi^{-1}.
    match (incr, decr) {
        (true, _) => Trend::Decreasing,  // phi'' o phi^{-1} decreasing in t
        (_, true) => Trend::Increasing,  // phi'' o phi^{-1} increasing in t
        _ => Trend::Mixed,
    }
}

fn require_standard(gen: &Generator, what: &str) -> Result<()> {
    if gen.is_strict() {
        return Err(Error::NotApplicable(format!("{what} applies to non-strict generators")));
    }
    if !gen.is_standardized() {
        return Err(Error::NotApplicable(format!(
            "{what} needs a standardized generator (phi(0) = 1); apply standardize first"
        )));
    }
    Ok(())
}

/// The exponential-mixing certificate integral
/// `int_0^1 (1-x) (h(x)/(phi' o phi^{-1}(x))^2)^2 dx`; a value below 1
/// certifies rho_1 < 1 for the density part of the copula.
pub fn mixing_integral(gen: &Generator, grid: &Grid) -> Result<f64> {
    require_standard(gen, "mixing_integral")?;
    let flat = grid.nodes().iter().all(|&u| gen.ddphi(u).abs() < 1e-12);
    if flat {
        return Err(Error::NotApplicable(
            "linear generator (countermonotone copula) is outside the certificate's scope".into(),
        ));
    }
    let mut total = 0.0;
    for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
        let h = h_max(gen, x, grid)?;
        let d = gen.dphi(gen.phi_inv(x));
        let val = (1.0 - x) * (h / (d * d)).powi(2);
        if !val.is_finite() {
            return Err(Error::Numeric {
                location: format!("certificate integrand at x={x}"),
                message: format!("value {val} (h={h}, phi' o phi_inv = {d})"),
            });
        }
        total += w * val;
    }
    Ok(total)
}

/// Critical parameter: bisection root of mixing_integral(theta) = 1 over
/// the bracket, to absolute tolerance `tol` in theta.
pub fn critical_parameter<F>(family: F, bracket: (f64, f64), tol: f64, grid: &Grid) -> Result<f64>
where
    F: Fn(f64) -> Result<Generator>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "critical_parameter needs lo < hi and tol > 0; got ({lo}, {hi}), tol {tol}"
        )));
    }
    let eval = |theta: f64| -> Result<f64> {
        let gen = family(theta)?;
        let std = if gen.is_strict() { gen } else { standardize(&gen)? };
        Ok(mixing_integral(&std, grid)? - 1.0)
    };
    let mut f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if f_lo * f_hi > 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if f_mid * f_lo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Built-in family: raw generator -ln(theta u + 1 - theta), theta in (0,1).
/// Not standardized; `standardize` divides by -ln(1-theta).
pub fn log_family(theta: f64) -> Result<Generator> {
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "log family needs theta in (0,1); got {theta}"
        )));
    }
    Ok(Generator::new(
        format!("log({theta})"),
        move |u| -(theta * u + 1.0 - theta).ln(),
        move |u| -theta / (theta * u + 1.0 - theta),
        move |u| theta * theta / (theta * u + 1.0 - theta).powi(2),
        move |x| ((-x).exp() - 1.0 + theta) / theta,
        false,
    ))
}

/// Built-in family: self-inverse generator (1-x)/(1+(theta-1)x),
/// theta >= 1; already standardized. theta = 1 is the countermonotone
/// bound (rejected by the copula constructor and the certificate).
pub fn rational_family(theta: f64) -> Result<Generator> {
    if theta < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "rational family needs theta >= 1; got {theta}"
        )));
    }
    Ok(Generator::new(
        format!("rational({theta})"),
        move |x| (1.0 - x) / (1.0 + (theta - 1.0) * x),
        move |x| -theta / (1.0 + (theta - 1.0) * x).powi(2),
        move |x| 2.0 * theta * (theta - 1.0) / (1.0 + (theta - 1.0) * x).powi(3),
        move |x| (1.0 - x) / (1.0 + (theta - 1.0) * x),
        false,
    ))
}

/// Strict generator -ln u of the independence copula.
pub fn independence_generator() -> Generator {
    Generator::new(
        "log-strict",
        |u| -u.ln(),
        |u| -1.0 / u,
        |u| 1.0 / (u * u),
        |x| (-x).exp(),
        true,
    )
}

/// Closed form of `mixing_integral` for the standardized log family.
pub fn log_family_integral_closed(theta: f64) -> f64 {
    let l = (1.0 - theta).ln();
    let c4 = (1.0 - theta).powi(4);
    -l / (4.0 * c4) + 1.0 / 16.0 - 1.0 / (16.0 * c4)
}

/// Closed form of `mixing_integral` for the rational family.
pub fn rational_family_integral_closed(theta: f64) -> f64 {
    2.0 / 21.0 + 4.0 * theta.powi(7) / 7.0 - 2.0 * theta.powi(6) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_copula;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::midpoint(512)
    }

    #[test]
    fn log_family_standardizes_to_the_expected_form() {
        let theta = 0.3;
        let raw = log_family(theta).unwrap();
        let std = standardize(&raw).unwrap();
        assert!(std.is_standardized());
        let l = (1.0 - theta).ln();
        for &u in &[0.0, 0.2, 0.5, 0.9, 1.0] {
            assert_abs_diff_eq!(std.phi(u), (theta * u + 1.0 - theta).ln() / l, epsilon = 1e-14);
        }
        std.check(&grid()).unwrap();
    }

    #[test]
    fn scalar_multiple_standardizes_to_linear() {
        let gen = Generator::new(
            "2(1-u)",
            |u| 2.0 * (1.0 - u),
            |_| -2.0,
            |_| 0.0,
            |x| 1.0 - x / 2.0,
            false,
        );
        let std = standardize(&gen).unwrap();
        for &u in &[0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(std.phi(u), 1.0 - u, epsilon = 1e-14);
        }
    }

    #[test]
    fn already_standard_returned_unchanged() {
        let gen = rational_family(1.5).unwrap();
        let std = standardize(&gen).unwrap();
        assert_eq!(std.label, gen.label);
    }

    #[test]
    fn strict_generator_cannot_standardize() {
        assert!(matches!(
            standardize(&independence_generator()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn h_max_log_family_is_constant() {
        let theta: f64 = 0.3;
        let gen = standardize(&log_family(theta).unwrap()).unwrap();
        let g = grid();
        let expected = theta * theta * (1.0 - theta).powi(-2) / (-(1.0f64 - theta).ln());
        for &x in &[0.0, 0.25, 0.5, 0.9] {
            assert_abs_diff_eq!(h_max(&gen, x, &g).unwrap(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn h_max_rational_family_is_constant() {
        let gen = rational_family(1.2).unwrap();
        let g = grid();
        for &x in &[0.0, 0.5, 0.99] {
            assert_abs_diff_eq!(h_max(&gen, x, &g).unwrap(), 0.48, epsilon = 1e-12);
        }
        // The signed extrema stay positive: the supplied phi'' is convex-side.
        let (lo, hi) = h_extrema(&gen, 0.0, &g).unwrap();
        assert!(lo > 0.0 && (hi - 0.48).abs() < 1e-12);
    }

    #[test]
    fn h_max_constant_second_derivative() {
        // phi(u) = (1-u)/2 + (1-u)^2/2 has phi'' = 1 everywhere.
        let gen = Generator::new(
            "quadratic",
            |u| 0.5 * (1.0 - u) + 0.5 * (1.0 - u) * (1.0 - u),
            |u| -0.5 - (1.0 - u),
            |_| 1.0,
            |x| (3.0 - (1.0 + 8.0 * x).sqrt()) / 2.0,
            false,
        );
        gen.check(&grid()).unwrap();
        let g = grid();
        for &x in &[0.1, 0.6] {
            assert_abs_diff_eq!(h_max(&gen, x, &g).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scan_agrees_with_monotone_shortcut() {
        let gen = standardize(&log_family(0.35).unwrap()).unwrap();
        let g = grid();
        for &x in &[0.0, 0.3, 0.7] {
            let shortcut = h_max(&gen, x, &g).unwrap();
            // Brute scan over a fine mesh of [x,1].
            let mut scan = f64::NEG_INFINITY;
            for k in 0..=4000 {
                let t = x + (1.0 - x) * k as f64 / 4000.0;
                scan = scan.max(gen.ddphi(gen.phi_inv(t)).abs());
            }
            assert_abs_diff_eq!(shortcut, scan, epsilon = 1e-8);
        }
    }

    #[test]
    fn certificate_matches_closed_form_log_family() {
        let g = grid();
        for &theta in &[0.01, 0.2, 0.3, 0.4] {
            let gen = standardize(&log_family(theta).unwrap()).unwrap();
            let quad = mixing_integral(&gen, &g).unwrap();
            assert_abs_diff_eq!(quad, log_family_integral_closed(theta), epsilon = 1e-4);
        }
        // The closed form vanishes as theta -> 0+.
        assert!(log_family_integral_closed(1e-6) < 1e-5);
    }

    #[test]
    fn certificate_matches_closed_form_rational_family() {
        let g = grid();
        assert_abs_diff_eq!(rational_family_integral_closed(1.0), 0.0);
        for &theta in &[1.05, 1.2, 1.388, 1.6] {
            let gen = rational_family(theta).unwrap();
            let quad = mixing_integral(&gen, &g).unwrap();
            assert_abs_diff_eq!(quad, rational_family_integral_closed(theta), epsilon = 1e-4);
        }
    }

    #[test]
    fn critical_parameters_match_their_closed_forms() {
        let g = grid();
        // Root of the quadrature certificate...
        let root_log =
            critical_parameter(|t| log_family(t), (0.01, 0.9), 1e-4, &g).unwrap();
        let root_rational =
            critical_parameter(|t| rational_family(t), (1.01, 2.0), 1e-4, &g).unwrap();
        // ...versus independent bisection of the closed forms.
        let closed_log = bisect(|t| log_family_integral_closed(t) - 1.0, 0.01, 0.9);
        let closed_rational = bisect(|t| rational_family_integral_closed(t) - 1.0, 1.01, 2.0);
        assert_abs_diff_eq!(root_log, closed_log, epsilon = 1e-3);
        assert_abs_diff_eq!(root_rational, closed_rational, epsilon = 1e-3);
        // Frozen values from the closed forms.
        assert_abs_diff_eq!(closed_log, 0.448915, epsilon = 1e-4);
        assert_abs_diff_eq!(closed_rational, 1.388049, epsilon = 1e-4);
    }

    fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn bad_bracket_is_reported() {
        let g = grid();
        match critical_parameter(|t| log_family(t), (0.01, 0.1), 1e-4, &g) {
            Err(Error::Bracket { .. }) => {}
            other => panic!("expected bracket error, got {other:?}"),
        }
    }

    #[test]
    fn sufficient_condition_implies_certificate() {
        // Whenever int h^2 (1-x) dx < (phi'(1))^4 the full integral is
        // below 1 as well.
        let g = grid();
        let mut checked = 0;
        for gen in [
            standardize(&log_family(0.1).unwrap()).unwrap(),
            standardize(&log_family(0.25).unwrap()).unwrap(),
            rational_family(1.05).unwrap(),
            rational_family(1.15).unwrap(),
        ] {
            let lhs = g.integrate(|x| {
                let h = h_max(&gen, x, &g).unwrap();
                h * h * (1.0 - x)
            });
            let rhs = gen.dphi(1.0).powi(4);
            if gen.dphi(1.0) != 0.0 && lhs < rhs {
                checked += 1;
                assert!(mixing_integral(&gen, &g).unwrap() < 1.0);
            }
        }
        assert!(checked > 0, "no instance exercised the sufficient condition");
    }

    #[test]
    fn strict_independence_generator_gives_unit_density() {
        let model = archimedean_copula(&independence_generator()).unwrap();
        for &(u, v) in &[(0.3, 0.7), (0.5, 0.5), (0.9, 0.1)] {
            assert_abs_diff_eq!(model.density(u, v), 1.0, epsilon = 1e-12);
        }
        assert!(!model.has_unrepresented_singular_part());
    }

    #[test]
    fn countermonotone_generator_is_rejected() {
        let w = Generator::new("1-u", |u| 1.0 - u, |_| -1.0, |_| 0.0, |x| 1.0 - x, false);
        assert!(matches!(archimedean_copula(&w), Err(Error::SingularCopula(_))));
        assert!(matches!(archimedean_copula(&rational_family(1.0).unwrap()), Err(Error::SingularCopula(_))));
    }

    #[test]
    fn rational_copula_validates_with_declared_boundary_mass() {
        let g = grid();
        let model = archimedean_copula(&rational_family(1.2).unwrap()).unwrap();
        assert!(model.has_unrepresented_singular_part());
        let rep = validate_copula(&model, &g, g.tolerance()).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        // Density mass on the region is 1 - 1/theta.
        let theta = 1.2;
        let mut mass = 0.0;
        for (&x, &wx) in g.nodes().iter().zip(g.weights()) {
            mass += wx * g.integrate(|y| model.density(x, y));
        }
        assert_abs_diff_eq!(mass, 1.0 - 1.0 / theta, epsilon = g.tolerance());
    }

    #[test]
    fn log_copula_matches_its_algebraic_cdf() {
        // Independent oracle: the induced copula has the closed form
        // max{[(tu+1-t)(tv+1-t) - (1-t)]/t, 0}.
        let theta: f64 = 0.3;
        let model = archimedean_copula(&log_family(theta).unwrap()).unwrap();
        let cdf = model.closed_form_cdf().unwrap();
        for &(u, v) in &[(0.1, 0.2), (0.4, 0.9), (0.8, 0.8), (0.05, 0.99), (1.0, 0.37)] {
            let alg =
                (((theta * u + 1.0 - theta) * (theta * v + 1.0 - theta) - (1.0 - theta)) / theta)
                    .max(0.0);
            assert_abs_diff_eq!(cdf(u, v), alg, epsilon = 1e-10);
        }
        // AC mass matches 1 + (1-theta) ln(1-theta)/theta.
        let g = grid();
        let mut mass = 0.0;
        for (&x, &wx) in g.nodes().iter().zip(g.weights()) {
            mass += wx * g.integrate(|y| model.density(x, y));
        }
        let expected = 1.0 + (1.0 - theta) * (1.0 - theta).ln() / theta;
        assert_abs_diff_eq!(mass, expected, epsilon = g.tolerance());
    }
}
