//! Fold product of copulas: the copula of (X_0, X_2) when consecutive
//! pairs follow the two factors. Composition of transition kernels.
//!
//! The absolutely continuous part is composed by quadrature,
//! atom-density cross terms are added in closed form, and atom-atom
//! terms compose algebraically (no quadrature), so e.g. mixture-family
//! atom weights stay exact under iteration.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{AtomicMap, CopulaModel, MapKind};

/// Density backed by node samples; exact at grid nodes, bilinear
/// interpolation elsewhere.
pub(crate) struct GridDensity {
    values: DMatrix<f64>,
    nodes: Arc<Vec<f64>>,
}

impl GridDensity {
    pub(crate) fn into_fn(self) -> impl Fn(f64, f64) -> f64 + Send + Sync {
        move |x: f64, y: f64| {
            let i = locate(&self.nodes, x);
            let j = locate(&self.nodes, y);
            // Bilinear on the surrounding node square, clamped at edges.
            let (i0, i1, tx) = bracket(&self.nodes, i, x);
            let (j0, j1, ty) = bracket(&self.nodes, j, y);
            let v00 = self.values[(i0, j0)];
            let v01 = self.values[(i0, j1)];
            let v10 = self.values[(i1, j0)];
            let v11 = self.values[(i1, j1)];
            (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11)
        }
    }
}

fn locate(nodes: &[f64], x: f64) -> usize {
    match nodes.binary_search_by(|a| a.total_cmp(&x)) {
        Ok(i) => i,
        Err(i) => i.min(nodes.len() - 1),
    }
}

fn bracket(nodes: &[f64], hint: usize, x: f64) -> (usize, usize, f64) {
    let n = nodes.len();
    if x <= nodes[0] {
        return (0, 0, 0.0);
    }
    if x >= nodes[n - 1] {
        return (n - 1, n - 1, 0.0);
    }
    let hi = if nodes[hint] >= x { hint } else { (hint + 1).min(n - 1) };
    let lo = hi - 1;
    let t = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
    (lo, hi, t)
}

/// Per-kind atom weights of a model evaluated symbolically.
fn atom_weight(model: &CopulaModel, kind: MapKind) -> Vec<&AtomicMap> {
    model.atoms().iter().filter(|a| a.kind == kind).collect()
}

fn total_weight(atoms: &[&AtomicMap], x: f64) -> f64 {
    atoms.iter().map(|a| a.weight_at(x)).sum()
}

/// Fold product A * B on the given grid.
///
/// Atom maps must be identity or flip (the type system enforces this);
/// models carrying singular mass outside that algebra cannot be folded.
pub fn fold(a: &CopulaModel, b: &CopulaModel, grid: &Grid) -> Result<CopulaModel> {
    if a.has_unrepresented_singular_part() || b.has_unrepresented_singular_part() {
        return Err(Error::Unsupported(format!(
            "fold of '{}' * '{}': a factor carries singular mass outside the identity/flip atom algebra",
            a.label, b.label
        )));
    }
    let n = grid.len();
    let nodes = grid.nodes();

    let amat = DMatrix::from_fn(n, n, |i, k| a.density(nodes[i], nodes[k]));
    let bmat = DMatrix::from_fn(n, n, |k, j| b.density(nodes[k], nodes[j]));
    for m in [&amat, &bmat] {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                location: "fold density sampling".into(),
                message: "non-finite density value".into(),
            });
        }
    }

    // density(A) then density(B): integral over the intermediate state.
    let mut aw = amat.clone();
    for k in 0..n {
        let w = grid.weights()[k];
        for i in 0..n {
            aw[(i, k)] *= w;
        }
    }
    let mut dens = aw * &bmat;

    let a_id = atom_weight(a, MapKind::Identity);
    let a_fl = atom_weight(a, MapKind::Flip);
    let b_id = atom_weight(b, MapKind::Identity);
    let b_fl = atom_weight(b, MapKind::Flip);

    // atom(A) then density(B): weight(x) * b(map(x), y).
    for i in 0..n {
        let wid = total_weight(&a_id, nodes[i]);
        let wfl = total_weight(&a_fl, nodes[i]);
        if wid != 0.0 || wfl != 0.0 {
            let ri = grid.flip_index(i);
            for j in 0..n {
                dens[(i, j)] += wid * bmat[(i, j)] + wfl * bmat[(ri, j)];
            }
        }
    }
    // density(A) then atom(B): a(x, map(y)) * weight(map(y)); identity and
    // flip are involutions, so map^{-1} = map.
    for j in 0..n {
        let wid = total_weight(&b_id, nodes[j]);
        let rj = grid.flip_index(j);
        let wfl = total_weight(&b_fl, nodes[rj]);
        if wid != 0.0 || wfl != 0.0 {
            for i in 0..n {
                dens[(i, j)] += amat[(i, j)] * wid + amat[(i, rj)] * wfl;
            }
        }
    }

    // atom(A) then atom(B): map composition, pointwise weight product.
    let mut new_atoms: Vec<AtomicMap> = Vec::new();
    for first in a.atoms() {
        for second in b.atoms() {
            let kind = first.kind.compose(second.kind);
            let w1 = first.weight.clone();
            let w2 = second.weight.clone();
            let m1 = first.kind;
            new_atoms.push(AtomicMap::new(kind, move |x| w1(x) * w2(m1.apply(x))));
        }
    }
    let merged = merge_atoms(new_atoms);

    let label = format!("{} * {}", a.label, b.label);
    let gd = GridDensity { values: dens, nodes: Arc::new(nodes.to_vec()) };
    Ok(CopulaModel::from_density(label, gd.into_fn()).with_atoms(merged))
}

/// Collapses same-kind atoms into one by summing weights.
fn merge_atoms(atoms: Vec<AtomicMap>) -> Vec<AtomicMap> {
    let mut out: Vec<AtomicMap> = Vec::new();
    for kind in [MapKind::Identity, MapKind::Flip] {
        let same: Vec<AtomicMap> = atoms.iter().filter(|a| a.kind == kind).cloned().collect();
        match same.len() {
            0 => {}
            1 => out.push(same.into_iter().next().unwrap()),
            _ => out.push(AtomicMap::new(kind, move |x| {
                same.iter().map(|a| a.weight_at(x)).sum()
            })),
        }
    }
    out
}

/// n-step copula: the model of (X_0, X_n) by repeated fold.
/// n = 0 is rejected: the zero-step copula is the comonotone bound,
/// which has no density representation.
pub fn n_step(model: &CopulaModel, n: usize, grid: &Grid) -> Result<CopulaModel> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "n_step needs n >= 1; the 0-step copula is a pure identity atom".into(),
        ));
    }
    let mut acc = model.clone();
    for _ in 1..n {
        acc = fold(&acc, model, grid)?;
    }
    Ok(acc)
}

/// All step models 1..=nmax, reusing partial products.
pub fn fold_powers(model: &CopulaModel, nmax: usize, grid: &Grid) -> Result<Vec<CopulaModel>> {
    if nmax == 0 {
        return Err(Error::InvalidInput("fold_powers needs nmax >= 1".into()));
    }
    let mut out = Vec::with_capacity(nmax);
    out.push(model.clone());
    for k in 1..nmax {
        let next = fold(&out[k - 1], model, grid)?;
        out.push(next);
    }
    Ok(out)
}
