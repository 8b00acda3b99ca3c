//! Copula representation and axiom validation.
//!
//! A chain on the unit interval is represented by the copula of two
//! consecutive states: an absolutely continuous density c(x,y) plus a
//! list of weighted atomic maps. The only singular parts supported are
//! the identity graph (y = x) and the flip graph (y = 1 - x), each with
//! a state-dependent weight; these are exactly what the comonotone /
//! countermonotone mixtures and the stay-probability kernel need.
//!
//! Models constructed from closed-form families may carry overrides for
//! the joint CDF, the conditional CDF, and the conditional inverse; when
//! absent, everything is reconstructed from density + atoms by
//! cumulative quadrature.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;

pub type DensityFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type PointFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Supported atomic maps. Closed under composition:
/// identity∘identity = identity, identity∘flip = flip, flip∘flip = identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// y = x
    Identity,
    /// y = 1 - x
    Flip,
}

impl MapKind {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            MapKind::Identity => x,
            MapKind::Flip => 1.0 - x,
        }
    }

    /// Composition: first `self`, then `next`.
    pub fn compose(self, next: MapKind) -> MapKind {
        if self == next {
            MapKind::Identity
        } else {
            MapKind::Flip
        }
    }
}

/// A deterministic map applied with state-dependent probability.
#[derive(Clone)]
pub struct AtomicMap {
    pub kind: MapKind,
    pub weight: PointFn,
}

impl AtomicMap {
    pub fn new(kind: MapKind, weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        AtomicMap { kind, weight: Arc::new(weight) }
    }

    pub fn constant(kind: MapKind, w: f64) -> Self {
        AtomicMap { kind, weight: Arc::new(move |_| w) }
    }

    pub fn weight_at(&self, x: f64) -> f64 {
        (self.weight)(x)
    }
}

impl std::fmt::Debug for AtomicMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AtomicMap({:?})", self.kind)
    }
}

/// Universal chain representation: density of the absolutely continuous
/// part plus weighted identity/flip atoms.
#[derive(Clone)]
pub struct CopulaModel {
    pub label: String,
    pub(crate) density: DensityFn,
    pub(crate) atoms: Vec<AtomicMap>,
    pub(crate) density_y_derivative: Option<DensityFn>,
    pub(crate) cdf: Option<DensityFn>,
    pub(crate) conditional: Option<DensityFn>,
    pub(crate) conditional_inverse: Option<DensityFn>,
    /// Mass per row carried by singular parts that the identity/flip atom
    /// algebra cannot represent (e.g. the boundary curve of a non-strict
    /// Archimedean copula). Row mass of density + atoms must then equal
    /// 1 minus this. Only symmetric copulas declare it, so the same
    /// function serves the column check.
    pub(crate) singular_row_mass: Option<PointFn>,
}

impl std::fmt::Debug for CopulaModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CopulaModel")
            .field("label", &self.label)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl CopulaModel {
    pub fn from_density(
        label: impl Into<String>,
        density: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CopulaModel {
            label: label.into(),
            density: Arc::new(density),
            atoms: Vec::new(),
            density_y_derivative: None,
            cdf: None,
            conditional: None,
            conditional_inverse: None,
            singular_row_mass: None,
        }
    }

    pub fn with_atoms(mut self, atoms: Vec<AtomicMap>) -> Self {
        self.atoms = atoms;
        self
    }

    pub fn with_cdf(mut self, cdf: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cdf = Some(Arc::new(cdf));
        self
    }

    pub fn with_conditional(
        mut self,
        cond: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.conditional = Some(Arc::new(cond));
        self
    }

    pub fn with_conditional_inverse(
        mut self,
        inv: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.conditional_inverse = Some(Arc::new(inv));
        self
    }

    pub fn with_density_y_derivative(
        mut self,
        dcdy: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.density_y_derivative = Some(Arc::new(dcdy));
        self
    }

    pub fn with_singular_row_mass(
        mut self,
        mass: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.singular_row_mass = Some(Arc::new(mass));
        self
    }

    /// Density of the absolutely continuous part at (x, y).
    pub fn density(&self, x: f64, y: f64) -> f64 {
        (self.density)(x, y)
    }

    pub fn atoms(&self) -> &[AtomicMap] {
        &self.atoms
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    /// Total atomic weight leaving state x.
    pub fn atom_mass(&self, x: f64) -> f64 {
        self.atoms.iter().map(|a| a.weight_at(x)).sum()
    }

    /// Mass at x of singular parts outside the atom algebra (0 for
    /// models fully described by density + atoms).
    pub fn singular_row_mass(&self, x: f64) -> f64 {
        self.singular_row_mass.as_ref().map_or(0.0, |f| f(x))
    }

    pub fn has_unrepresented_singular_part(&self) -> bool {
        self.singular_row_mass.is_some()
    }

    pub fn density_y_derivative(&self) -> Option<&DensityFn> {
        self.density_y_derivative.as_ref()
    }

    pub fn closed_form_cdf(&self) -> Option<&DensityFn> {
        self.cdf.as_ref()
    }

    pub fn closed_form_conditional(&self) -> Option<&DensityFn> {
        self.conditional.as_ref()
    }

    pub fn closed_form_conditional_inverse(&self) -> Option<&DensityFn> {
        self.conditional_inverse.as_ref()
    }
}

/// Conditional CDF F(v | x) = P(X_{t+1} <= v | X_t = x).
///
/// Atoms count with right continuity: an atom sitting exactly at v is
/// included. Without a closed-form override the absolutely continuous
/// part is integrated by composite Simpson.
pub fn conditional_cdf(model: &CopulaModel, x: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidInput(format!(
            "conditional_cdf needs x, v in [0,1]; got x={x}, v={v}"
        )));
    }
    if let Some(cond) = &model.conditional {
        return Ok(cond(x, v));
    }
    let mut total = 0.0;
    for atom in &model.atoms {
        if atom.kind.apply(x) <= v {
            total += atom.weight_at(x);
        }
    }
    total += simpson(|t| model.density(x, t), 0.0, v, 512);
    Ok(total)
}

/// Composite Simpson rule with `panels` panels.
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = panels.max(2) & !1; // even panel count
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Outcome of the copula axiom checks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub grounded_ok: bool,
    pub margins_ok: bool,
    pub two_increasing_ok: bool,
    pub worst_violation: f64,
    /// Worst offenders: (location, violation magnitude).
    pub details: Vec<(String, f64)>,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.grounded_ok && self.margins_ok && self.two_increasing_ok
    }
}

/// Joint CDF evaluator: closed form when the model has one, otherwise
/// cumulative quadrature of density + atoms on the grid.
pub struct CdfEval<'a> {
    model: &'a CopulaModel,
    grid: &'a Grid,
    /// Prefix sums over grid cells, (n+1) x (n+1); S[i][j] = mass of
    /// [0, b_i] x [0, b_j] from the density part. Only built when there
    /// is no closed-form CDF.
    prefix: Option<Vec<Vec<f64>>>,
    /// Cumulative identity-atom weight up to cell boundary i.
    id_prefix: Vec<f64>,
    /// Cumulative flip-atom weight up to cell boundary i.
    flip_prefix: Vec<f64>,
    /// Cell boundaries (n+1 of them, first 0, last 1).
    boundaries: Vec<f64>,
}

impl<'a> CdfEval<'a> {
    pub fn new(model: &'a CopulaModel, grid: &'a Grid) -> Result<CdfEval<'a>> {
        let n = grid.len();
        let mut boundaries = Vec::with_capacity(n + 1);
        boundaries.push(0.0);
        for i in 1..n {
            boundaries.push(0.5 * (grid.nodes()[i - 1] + grid.nodes()[i]));
        }
        boundaries.push(1.0);

        let mut id_prefix = vec![0.0; n + 1];
        let mut flip_prefix = vec![0.0; n + 1];
        for i in 0..n {
            let x = grid.nodes()[i];
            let w = grid.weights()[i];
            let (mut wid, mut wfl) = (0.0, 0.0);
            for atom in &model.atoms {
                match atom.kind {
                    MapKind::Identity => wid += atom.weight_at(x),
                    MapKind::Flip => wfl += atom.weight_at(x),
                }
            }
            id_prefix[i + 1] = id_prefix[i] + wid * w;
            flip_prefix[i + 1] = flip_prefix[i] + wfl * w;
        }

        let prefix = if model.cdf.is_some() {
            None
        } else {
            let mut p = vec![vec![0.0; n + 1]; n + 1];
            for i in 0..n {
                let x = grid.nodes()[i];
                let wi = grid.weights()[i];
                for j in 0..n {
                    let c = model.density(x, grid.nodes()[j]);
                    if !c.is_finite() {
                        return Err(Error::Numeric {
                            location: format!("density at ({x}, {})", grid.nodes()[j]),
                            message: format!("value {c}"),
                        });
                    }
                    p[i + 1][j + 1] =
                        p[i][j + 1] + p[i + 1][j] - p[i][j] + c * wi * grid.weights()[j];
                }
            }
            Some(p)
        };

        Ok(CdfEval { model, grid, prefix, id_prefix, flip_prefix, boundaries })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Snaps a point to the nearest cell boundary. Rectangle checks on
    /// quadrature-reconstructed CDFs use boundary points so the discrete
    /// measure is evaluated exactly (no partial cells).
    pub fn snap(&self, x: f64) -> usize {
        let n = self.grid.len();
        match self.grid.scheme() {
            crate::grid::Scheme::Midpoint => ((x * n as f64).round() as usize).min(n),
            _ => {
                let mut best = 0;
                let mut bestd = f64::INFINITY;
                for (i, &b) in self.boundaries.iter().enumerate() {
                    let d = (b - x).abs();
                    if d < bestd {
                        bestd = d;
                        best = i;
                    }
                }
                best
            }
        }
    }

    /// CDF at a pair of cell-boundary indices (exact for the discrete
    /// measure when no closed form is available).
    pub fn at_indices(&self, bi: usize, bj: usize) -> f64 {
        let x = self.boundaries[bi];
        let y = self.boundaries[bj];
        if let Some(cdf) = &self.model.cdf {
            return cdf(x, y);
        }
        let density_part = self.prefix.as_ref().expect("prefix built")[bi][bj];
        // Identity atom: mass of {s <= x, s <= y} = cumulative up to min.
        let id_part = self.id_prefix[bi.min(bj)];
        // Flip atom: mass of {s <= x, 1-s <= y} = cumulative over [1-y, x].
        let lo = self.grid.len() - bj; // boundary index of 1 - y
        let flip_part = if bi > lo { self.flip_prefix[bi] - self.flip_prefix[lo] } else { 0.0 };
        density_part + id_part + flip_part
    }

    /// CDF at an arbitrary point (closed form if available, otherwise
    /// snapped to the nearest cell boundary).
    pub fn at(&self, x: f64, y: f64) -> f64 {
        if let Some(cdf) = &self.model.cdf {
            cdf(x, y)
        } else {
            self.at_indices(self.snap(x), self.snap(y))
        }
    }
}

/// Checks the copula axioms and the doubly stochastic mass margins.
///
/// * grounded: C(0,t) = C(t,0) = 0;
/// * uniform margins: C(1,t) = C(t,1) = t;
/// * 2-increasing: nonnegative mass on 1000 seeded random rectangles,
///   plus density >= 0 and atom weights in [0,1] at every grid node;
/// * mass margins: row and column mass of density + atoms (+ declared
///   singular mass) equal to 1 at every node.
///
/// The CDF is reconstructed by cumulative quadrature unless the model
/// carries a closed form.
pub fn validate_copula(model: &CopulaModel, grid: &Grid, tol: f64) -> Result<ValidationReport> {
    let n = grid.len();
    let nodes = grid.nodes();
    let weights = grid.weights();

    let mut details: Vec<(String, f64)> = Vec::new();
    let mut worst = 0.0f64;
    let record = |ok: &mut bool, violation: f64, loc: String, details: &mut Vec<(String, f64)>| {
        if violation > tol {
            *ok = false;
            if details.len() < 16 {
                details.push((loc, violation));
            }
        }
    };

    // Density matrix, atom weights, and mass margins at the nodes.
    let mut density = vec![vec![0.0; n]; n];
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            let c = model.density(x, y);
            if c.is_nan() || c.is_infinite() {
                return Err(Error::Numeric {
                    location: format!("density at ({x}, {y})"),
                    message: format!("value {c}"),
                });
            }
            density[i][j] = c;
        }
    }

    let mut two_increasing_ok = true;
    let mut margins_ok = true;

    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            let c = density[i][j];
            if c < -tol {
                record(
                    &mut two_increasing_ok,
                    -c,
                    format!("negative density at ({x:.6}, {y:.6})"),
                    &mut details,
                );
                worst = worst.max(-c);
            }
        }
        for atom in &model.atoms {
            let w = atom.weight_at(x);
            let out = (-w).max(w - 1.0);
            if out > tol {
                record(
                    &mut two_increasing_ok,
                    out,
                    format!("atom weight {w:.6} outside [0,1] at x={x:.6}"),
                    &mut details,
                );
                worst = worst.max(out);
            }
        }
    }

    // Row mass: atoms + density + declared singular mass.
    for (i, &x) in nodes.iter().enumerate() {
        let ac: f64 = (0..n).map(|j| density[i][j] * weights[j]).sum();
        let mass = ac + model.atom_mass(x) + model.singular_row_mass(x);
        let dev = (mass - 1.0).abs();
        worst = worst.max(dev);
        record(&mut margins_ok, dev, format!("row mass {mass:.8} at x={x:.6}"), &mut details);
    }
    // Column mass: identity atom lands at y = y_j from x = y_j; flip atom
    // lands at y_j from x = 1 - y_j.
    for (j, &y) in nodes.iter().enumerate() {
        let mut mass: f64 = (0..n).map(|i| density[i][j] * weights[i]).sum();
        for atom in &model.atoms {
            mass += match atom.kind {
                MapKind::Identity => atom.weight_at(y),
                MapKind::Flip => atom.weight_at(1.0 - y),
            };
        }
        mass += model.singular_row_mass(y);
        let dev = (mass - 1.0).abs();
        worst = worst.max(dev);
        record(&mut margins_ok, dev, format!("column mass {mass:.8} at y={y:.6}"), &mut details);
    }

    // CDF-level checks.
    let eval = CdfEval::new(model, grid)?;
    let mut grounded_ok = true;
    let bcount = eval.boundaries().len();
    for k in 0..bcount {
        let t = eval.boundaries()[k];
        let g0 = eval.at(0.0, t).abs().max(eval.at(t, 0.0).abs());
        worst = worst.max(g0);
        record(&mut grounded_ok, g0, format!("grounding at t={t:.6}"), &mut details);
        let m = (eval.at(1.0, t) - t).abs().max((eval.at(t, 1.0) - t).abs());
        worst = worst.max(m);
        record(&mut margins_ok, m, format!("cdf margin at t={t:.6}"), &mut details);
    }

    // Rectangle inequality on seeded random rectangles.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED_0001);
    let closed_form = model.cdf.is_some();
    for k in 0..1000 {
        let (x1, x2, y1, y2) = if closed_form {
            let mut a: f64 = rng.gen();
            let mut b: f64 = rng.gen();
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let mut c: f64 = rng.gen();
            let mut d: f64 = rng.gen();
            if c > d {
                std::mem::swap(&mut c, &mut d);
            }
            (a, b, c, d)
        } else {
            // Snap to cell boundaries so the discrete measure is exact.
            let mut i1 = rng.gen_range(0..bcount);
            let mut i2 = rng.gen_range(0..bcount);
            if i1 > i2 {
                std::mem::swap(&mut i1, &mut i2);
            }
            let mut j1 = rng.gen_range(0..bcount);
            let mut j2 = rng.gen_range(0..bcount);
            if j1 > j2 {
                std::mem::swap(&mut j1, &mut j2);
            }
            (
                eval.boundaries()[i1],
                eval.boundaries()[i2],
                eval.boundaries()[j1],
                eval.boundaries()[j2],
            )
        };
        let mass = eval.at(x2, y2) - eval.at(x1, y2) - eval.at(x2, y1) + eval.at(x1, y1);
        if mass < -tol {
            worst = worst.max(-mass);
            record(
                &mut two_increasing_ok,
                -mass,
                format!("rectangle {k} [{x1:.4},{x2:.4}]x[{y1:.4},{y2:.4}] mass {mass:.3e}"),
                &mut details,
            );
        }
    }

    Ok(ValidationReport { grounded_ok, margins_ok, two_increasing_ok, worst_violation: worst, details })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn independence() -> CopulaModel {
        CopulaModel::from_density("P", |_, _| 1.0).with_cdf(|u, v| u * v)
    }

    #[test]
    fn independence_validates_tightly() {
        let grid = Grid::midpoint(128);
        let rep = validate_copula(&independence(), &grid, 1e-12).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        assert!(rep.worst_violation <= 1e-12);
    }

    #[test]
    fn conditional_cdf_of_independence() {
        let m = independence();
        assert!((conditional_cdf(&m, 0.7, 0.3).unwrap() - 0.3).abs() < 1e-12);
        assert!(conditional_cdf(&m, 1.2, 0.3).is_err());
        assert!(conditional_cdf(&m, 0.2, -0.1).is_err());
    }

    #[test]
    fn out_of_range_fgm_density_fails_validation() {
        // theta = 1.5 pushes the density negative near two corners.
        let m = CopulaModel::from_density("bad-fgm", |x, y| {
            1.0 + 1.5 * (1.0 - 2.0 * x) * (1.0 - 2.0 * y)
        });
        let grid = Grid::midpoint(128);
        let rep = validate_copula(&m, &grid, 1e-8).unwrap();
        assert!(!rep.two_increasing_ok);
        assert!(rep.worst_violation > 0.0);
    }

    #[test]
    fn quadrature_cdf_matches_closed_form_for_independence() {
        // The quadrature evaluator snaps to cell boundaries, so compare
        // at boundary-aligned points (multiples of 1/256).
        let with_cdf = independence();
        let without = CopulaModel::from_density("P-quad", |_, _| 1.0);
        let grid = Grid::midpoint(256);
        let e1 = CdfEval::new(&with_cdf, &grid).unwrap();
        let e2 = CdfEval::new(&without, &grid).unwrap();
        for &(x, y) in &[(0.25, 0.5), (0.125, 0.875), (1.0, 1.0), (0.5, 0.0)] {
            assert!(
                (e1.at(x, y) - e2.at(x, y)).abs() < 1e-12,
                "({x},{y}): {} vs {}",
                e1.at(x, y),
                e2.at(x, y)
            );
        }
    }

    #[test]
    fn nan_density_reports_location() {
        let m = CopulaModel::from_density("nan", |x, _| if x > 0.5 { f64::NAN } else { 1.0 });
        let grid = Grid::midpoint(16);
        match validate_copula(&m, &grid, 1e-8) {
            Err(Error::Numeric { location, .. }) => assert!(location.contains("density")),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }
}
