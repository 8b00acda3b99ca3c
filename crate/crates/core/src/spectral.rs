//! Transfer-operator discretization and mixing coefficients.
//!
//! The transition operator of a copula chain acts on square-integrable
//! functions as T(f)(x) = sum of atom terms + integral of f(y) c(x,y) dy.
//! Its restriction to mean-zero functions has operator norm rho_1, the
//! maximal correlation of consecutive states. Discretizing with the
//! symmetrizing sqrt-weight scaling makes the matrix singular values
//! equal to the L2 operator norm up to quadrature error:
//!
//! ```text
//! K[i][j] = sqrt(w_i) (c(x_i, x_j) - 1) sqrt(w_j)
//!           + identity-atom weight on the diagonal
//!           + flip-atom weight on the anti-diagonal.
//! ```
//!
//! Constants are in the null space of K on both sides (row and column
//! mass of a copula are 1), so the top singular value is attained on
//! mean-zero vectors.
//!
//! beta_n and phi_n use the positive-part identity: for a signed density
//! with zero total mass, the supremum of the measure over Borel sets is
//! the integral of the positive part; atoms are singular with respect to
//! Lebesgue measure, so the supremum set collects their full weight.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::fold::{fold_powers, n_step};
use crate::grid::Grid;
use crate::model::{CopulaModel, MapKind};

/// Dense discretization of the centered kernel plus atomic terms.
pub struct TransferOperator {
    matrix: DMatrix<f64>,
    grid: Grid,
    symmetric: bool,
    stochasticity_dev: f64,
}

impl TransferOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Largest deviation of an uncentered row sum from 1.
    pub fn stochasticity_dev(&self) -> f64 {
        self.stochasticity_dev
    }

    /// Applies the centered operator to a function sampled at the nodes.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let sw: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        let phi = nalgebra::DVector::from_iterator(n, f.iter().zip(&sw).map(|(v, s)| v * s));
        let out = &self.matrix * phi;
        (0..n).map(|i| out[i] / sw[i]).collect()
    }
}

/// Builds the weighted operator matrix. Models that declare singular
/// mass outside the atom algebra cannot be discretized faithfully and
/// are rejected.
pub fn assemble_operator(model: &CopulaModel, grid: &Grid) -> Result<TransferOperator> {
    if model.has_unrepresented_singular_part() {
        let total = grid.integrate(|x| model.singular_row_mass(x));
        if total > grid.tolerance() {
            return Err(Error::Unsupported(format!(
                "'{}' carries {total:.4} of singular mass outside the identity/flip atom \
                 algebra; its transfer operator is not representable on the grid",
                model.label
            )));
        }
    }
    let n = grid.len();
    let nodes = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();

    let mut k = DMatrix::zeros(n, n);
    let mut stoch_dev = 0.0f64;
    for i in 0..n {
        let mut row_mass = 0.0;
        for j in 0..n {
            let c = model.density(nodes[i], nodes[j]);
            if !c.is_finite() {
                return Err(Error::Numeric {
                    location: format!("density at ({}, {})", nodes[i], nodes[j]),
                    message: format!("value {c}"),
                });
            }
            row_mass += c * grid.weights()[j];
            k[(i, j)] = sw[i] * (c - 1.0) * sw[j];
        }
        for atom in model.atoms() {
            let w = atom.weight_at(nodes[i]);
            row_mass += w;
            match atom.kind {
                MapKind::Identity => k[(i, i)] += w,
                MapKind::Flip => {
                    let r = grid.flip_index(i);
                    k[(i, r)] += w * sw[i] / sw[r];
                }
            }
        }
        stoch_dev = stoch_dev.max((row_mass - 1.0).abs());
    }

    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((k[(i, j)] - k[(j, i)]).abs());
        }
    }

    Ok(TransferOperator { matrix: k, grid: grid.clone(), symmetric: asym <= 1e-10, stochasticity_dev: stoch_dev })
}

/// Operator norm on mean-zero functions: the largest singular value of
/// the centered weighted matrix, by power iteration on K^T K with the
/// constants direction projected out.
pub fn rho1_estimate(op: &TransferOperator) -> Result<f64> {
    let n = op.grid.len();
    let k = &op.matrix;
    let s = nalgebra::DVector::from_iterator(n, op.grid.weights().iter().map(|w| w.sqrt()));

    // Deterministic pseudo-random start, deflated against constants.
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut v = nalgebra::DVector::from_fn(n, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    });
    let project = |v: &mut nalgebra::DVector<f64>| {
        let c = v.dot(&s);
        v.axpy(-c, &s, 1.0);
    };
    project(&mut v);
    let nv = v.norm();
    if nv == 0.0 {
        return Err(Error::Numeric {
            location: "rho1 power iteration".into(),
            message: "degenerate start vector".into(),
        });
    }
    v /= nv;

    let mut prev = f64::INFINITY;
    for _ in 0..50_000 {
        let u = k * &v;
        let sigma2 = u.norm_squared();
        if sigma2 < 1e-28 {
            return Ok(0.0);
        }
        let mut w = k.transpose() * u;
        project(&mut w);
        let nw = w.norm();
        if nw == 0.0 {
            return Ok(sigma2.sqrt());
        }
        v = w / nw;
        if (sigma2 - prev).abs() <= 1e-13 * sigma2.max(1e-10) {
            return Ok(sigma2.sqrt());
        }
        prev = sigma2;
    }
    Err(Error::Numeric {
        location: "rho1 power iteration".into(),
        message: format!("no convergence after 50000 iterations; last residual {prev:.3e}"),
    })
}

/// Eigendecomposition of a symmetric (reversible-chain) operator.
pub struct SpectralDecomposition {
    /// Signed eigenvalues, sorted by decreasing magnitude. Symmetric
    /// kernels can have negative eigenvalues (the countermonotone part
    /// acts as -1 on odd functions); magnitudes bound the correlations.
    pub eigenvalues: Vec<f64>,
    /// Eigenfunction samples at the grid nodes, one row per eigenvalue,
    /// orthonormal under the grid inner product.
    pub eigenfunctions: Vec<Vec<f64>>,
}

pub fn spectral_decomposition(op: &TransferOperator) -> Result<SpectralDecomposition> {
    if !op.symmetric {
        return Err(Error::NotApplicable(
            "eigendecomposition is for symmetric operators; use rho1_estimate for the norm".into(),
        ));
    }
    let n = op.grid.len();
    let eig = nalgebra::SymmetricEigen::new(op.matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    let sw: Vec<f64> = op.grid.weights().iter().map(|w| w.sqrt()).collect();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenfunctions = Vec::with_capacity(n);
    for &idx in &order {
        eigenvalues.push(eig.eigenvalues[idx]);
        let col = eig.eigenvectors.column(idx);
        eigenfunctions.push((0..n).map(|j| col[j] / sw[j]).collect());
    }
    Ok(SpectralDecomposition { eigenvalues, eigenfunctions })
}

/// Per-row total variation against the uniform law: positive part of the
/// centered density plus the full atomic weight.
fn mixing_row_values(model: &CopulaModel, grid: &Grid) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in nodes {
        let mut pos = 0.0;
        for (&y, &w) in nodes.iter().zip(grid.weights()) {
            let c = model.density(x, y);
            if !c.is_finite() {
                return Err(Error::Numeric {
                    location: format!("density at ({x}, {y})"),
                    message: format!("value {c}"),
                });
            }
            pos += (c - 1.0).max(0.0) * w;
        }
        rows.push(pos + model.atom_mass(x));
    }
    Ok(rows)
}

/// Absolute-regularity coefficient of the n-step chain:
/// integral over x of sup_B |P^n(x,B) - mu(B)|.
pub fn beta_n(model: &CopulaModel, n: usize, grid: &Grid) -> Result<f64> {
    let stepped = n_step(model, n, grid)?;
    let rows = mixing_row_values(&stepped, grid)?;
    Ok(grid.integrate_samples(&rows))
}

/// Uniform-mixing coefficient of the n-step chain:
/// sup over x of sup_B |P^n(x,B) - mu(B)|, the sup taken over grid rows.
pub fn phi_n(model: &CopulaModel, n: usize, grid: &Grid) -> Result<f64> {
    let stepped = n_step(model, n, grid)?;
    let rows = mixing_row_values(&stepped, grid)?;
    Ok(rows.iter().fold(0.0f64, |m, &v| m.max(v)))
}

/// One row of the mixing series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixingPoint {
    pub n: usize,
    pub beta: f64,
    pub phi: f64,
}

/// beta_n and phi_n for n = 1..=nmax, reusing intermediate folds.
pub fn mixing_series(model: &CopulaModel, nmax: usize, grid: &Grid) -> Result<Vec<MixingPoint>> {
    let powers = fold_powers(model, nmax, grid)?;
    let mut out = Vec::with_capacity(nmax);
    for (k, m) in powers.iter().enumerate() {
        let rows = mixing_row_values(m, grid)?;
        out.push(MixingPoint {
            n: k + 1,
            beta: grid.integrate_samples(&rows),
            phi: rows.iter().fold(0.0f64, |m, &v| m.max(v)),
        });
    }
    Ok(out)
}

/// Applies the uncentered operator to cos(2 pi x) and reports the L2
/// residual against the input. A fixed point witnesses rho_1 = 1 (no
/// mixing); this happens exactly when the chain is a mixture of the
/// identity and flip maps with total weight 1.
pub fn no_mixing_witness(model: &CopulaModel, grid: &Grid) -> Result<(bool, f64)> {
    let n = grid.len();
    let nodes = grid.nodes();
    let f: Vec<f64> = nodes.iter().map(|&x| (2.0 * std::f64::consts::PI * x).cos()).collect();
    let mut residual2 = 0.0;
    for i in 0..n {
        let mut qf = 0.0;
        for j in 0..n {
            qf += model.density(nodes[i], nodes[j]) * f[j] * grid.weights()[j];
        }
        for atom in model.atoms() {
            qf += atom.weight_at(nodes[i])
                * (2.0 * std::f64::consts::PI * atom.kind.apply(nodes[i])).cos();
        }
        residual2 += (qf - f[i]) * (qf - f[i]) * grid.weights()[i];
    }
    let residual = residual2.sqrt();
    Ok((residual <= 10.0 * grid.tolerance(), residual))
}

/// Partial sum of ||T e||^2 over the Fourier basis
/// {sqrt(2) sin(2 pi n x), sqrt(2) cos(2 pi n x), n = 1..n_terms}.
///
/// The full series dominates rho_1^2 (it is the squared Hilbert-Schmidt
/// norm); partial sums increase toward it and for a rank-one kernel
/// approach rho_1^2 from below, so comparisons must allow a truncation
/// tail.
pub fn basis_image_norm_sum(model: &CopulaModel, grid: &Grid, n_terms: usize) -> Result<f64> {
    if model.has_atoms() || model.has_unrepresented_singular_part() {
        return Err(Error::NotApplicable(
            "the basis-image sum needs a square-integrable kernel; atoms are excluded".into(),
        ));
    }
    let n = grid.len();
    let nodes = grid.nodes();
    let c = DMatrix::from_fn(n, n, |i, j| model.density(nodes[i], nodes[j]));
    let mut total = 0.0;
    for m in 1..=n_terms {
        let om = 2.0 * std::f64::consts::PI * m as f64;
        for phase in 0..2 {
            let e: Vec<f64> = nodes
                .iter()
                .map(|&x| {
                    std::f64::consts::SQRT_2 * if phase == 0 { (om * x).sin() } else { (om * x).cos() }
                })
                .collect();
            let mut norm2 = 0.0;
            for i in 0..n {
                let mut te = 0.0;
                for j in 0..n {
                    te += c[(i, j)] * e[j] * grid.weights()[j];
                }
                norm2 += te * te * grid.weights()[i];
            }
            total += norm2;
        }
    }
    Ok(total)
}

/// Everything the mixing analysis of one model produces.
#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub schema_version: u32,
    pub label: String,
    pub grid_size: usize,
    pub rho1: f64,
    /// rho_1 of the k-step chain, k = 1..=len.
    pub rho_k: Vec<f64>,
    pub beta_n: Vec<f64>,
    pub phi_n: Vec<f64>,
    pub certified_bounds: Vec<BoundReport>,
    pub notes: Vec<String>,
}

/// Runs the full per-model analysis: rho_1, the k-step spectral series,
/// the mixing series, and whichever closed-form certificates apply.
pub fn mixing_report(model: &CopulaModel, grid: &Grid, nmax: usize) -> Result<MixingReport> {
    let powers = fold_powers(model, nmax.max(1), grid)?;
    let mut rho_k = Vec::new();
    for m in powers.iter().take(3.min(nmax.max(1))) {
        rho_k.push(rho1_estimate(&assemble_operator(m, grid)?)?);
    }
    let rho1 = rho_k[0];
    let mut beta = Vec::new();
    let mut phi = Vec::new();
    for m in &powers {
        let rows = mixing_row_values(m, grid)?;
        beta.push(grid.integrate_samples(&rows));
        phi.push(rows.iter().fold(0.0f64, |a, &v| a.max(v)));
    }

    let mut bounds = Vec::new();
    let mut notes = Vec::new();
    let (e1, e2) = crate::bounds::envelope_extract(model, grid);
    match crate::bounds::envelope_bound(&e1, &e2, grid) {
        Ok(rep) => bounds.push(rep),
        Err(e) => notes.push(format!("envelope bound unavailable: {e}")),
    }
    if model.density_y_derivative().is_some() {
        match crate::bounds::derivative_bound(model, grid) {
            Ok(rep) => bounds.push(rep),
            Err(e) => notes.push(format!("derivative bound unavailable: {e}")),
        }
    }

    Ok(MixingReport {
        schema_version: 1,
        label: model.label.clone(),
        grid_size: grid.len(),
        rho1,
        rho_k,
        beta_n: beta,
        phi_n: phi,
        certified_bounds: bounds,
        notes,
    })
}
