//! Closed-form certificates for the maximal correlation rho_1 and the
//! beta-mixing sandwich of the stay-probability kernel.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::CopulaModel;
use crate::families::{MFamily, TableDensitySpec};

/// Outcome of one certificate. `satisfied` means `value < threshold`
/// strictly.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(name: &str, value: f64, threshold: f64, inputs: BTreeMap<String, f64>) -> Self {
        BoundReport { name: name.into(), value, threshold, satisfied: value < threshold, inputs }
    }
}

/// Derivative route: with k1 = ||int |c_y(x,y)| dy||_2^2 and
/// k2 = || |c(x,1)-c(x,0)| + int |c_y(x,y)| dy ||_2^2, a total below 12
/// certifies rho_1 <= sqrt((k1+k2)/12) < 1.
///
/// Needs the density's y-derivative and boundary values c(x,0), c(x,1).
pub fn derivative_bound(model: &CopulaModel, grid: &Grid) -> Result<BoundReport> {
    let dcdy = model.density_y_derivative().ok_or_else(|| {
        Error::InvalidInput(format!(
            "'{}' has no density_y_derivative; the derivative bound needs one",
            model.label
        ))
    })?;
    let mut k1 = 0.0;
    let mut k2 = 0.0;
    for (&x, &wx) in grid.nodes().iter().zip(grid.weights()) {
        let inner = grid.integrate(|y| dcdy(x, y).abs());
        let edge = (model.density(x, 1.0) - model.density(x, 0.0)).abs();
        if !inner.is_finite() || !edge.is_finite() {
            return Err(Error::Numeric {
                location: format!("derivative bound at x={x}"),
                message: "non-finite integrand".into(),
            });
        }
        k1 += wx * inner * inner;
        k2 += wx * (edge + inner) * (edge + inner);
    }
    let value = k1 + k2;
    let mut inputs = BTreeMap::new();
    inputs.insert("k1".into(), k1);
    inputs.insert("k2".into(), k2);
    inputs.insert("rho1_bound".into(), (value / 12.0).sqrt());
    Ok(BoundReport::new("derivative", value, 12.0, inputs))
}

/// Envelope route: nonnegative eps1, eps2 with
/// c(x,y) >= eps1(x) + eps2(y) give rho_1 <= 1 - (int eps1 + int eps2)/2.
/// The envelopes are supplied as node samples on the grid. A total
/// integral of 2 or more is incompatible with a doubly stochastic
/// density and is rejected.
pub fn envelope_bound(eps1: &[f64], eps2: &[f64], grid: &Grid) -> Result<BoundReport> {
    if eps1.len() != grid.len() || eps2.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "envelope samples must match the grid size {}",
            grid.len()
        )));
    }
    for (i, (&a, &b)) in eps1.iter().zip(eps2).enumerate() {
        if a < 0.0 || b < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative envelope value at node {i} (x={})",
                grid.nodes()[i]
            )));
        }
    }
    let i1 = grid.integrate_samples(eps1);
    let i2 = grid.integrate_samples(eps2);
    if i1 + i2 >= 2.0 {
        return Err(Error::InfeasibleEnvelope(format!(
            "int eps1 + int eps2 = {} >= 2; no doubly stochastic density dominates that",
            i1 + i2
        )));
    }
    let value = 1.0 - 0.5 * (i1 + i2);
    let mut inputs = BTreeMap::new();
    inputs.insert("int_eps1".into(), i1);
    inputs.insert("int_eps2".into(), i2);
    Ok(BoundReport::new("envelope", value, 1.0, inputs))
}

/// Default envelope: eps1(x) = min_y c(x,y)/2 and eps2(y) = min_x c(x,y)/2
/// over the grid (clamped at 0). The symmetric half split guarantees
/// c >= eps1 + eps2 at the nodes.
pub fn envelope_extract(model: &CopulaModel, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let nodes = grid.nodes();
    let mut row_min = vec![f64::INFINITY; n];
    let mut col_min = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            let c = model.density(nodes[i], nodes[j]);
            row_min[i] = row_min[i].min(c);
            col_min[j] = col_min[j].min(c);
        }
    }
    let eps1 = row_min.iter().map(|&m| (0.5 * m).max(0.0)).collect();
    let eps2 = col_min.iter().map(|&m| (0.5 * m).max(0.0)).collect();
    (eps1, eps2)
}

/// Closed-form rho_1 bounds for the four bounded-function table
/// densities. Degenerate specs (constant g or h where the row's
/// numerator and denominator both vanish) are rejected instead of
/// returning 0/0.
pub fn table_bound(spec: &TableDensitySpec) -> Result<BoundReport> {
    let (which, g, h) = match spec {
        TableDensitySpec::M { which, g, h } => (which, g, h),
        TableDensitySpec::T3 { .. } => {
            return Err(Error::NotApplicable(
                "closed-form bounds exist for the m-families only".into(),
            ))
        }
    };
    let (b1, a1, ng) = (g.sup, g.inf, g.l1);
    let (b2, a2, nh) = (h.sup, h.inf, h.l1);
    let (num, den) = match which {
        MFamily::M1 => (b1, b1 + ng * nh),
        MFamily::M2 => (b1 * b2, b1 * b2 + ng * nh),
        MFamily::M3 => (b1 * (b2 - a2), b1 * (b2 - a2) + ng * (b2 - nh)),
        MFamily::M4 => (
            (b1 - a1) * (b2 - a2),
            (b1 - a1) * (b2 - a2) + (b1 - ng) * (b2 - nh),
        ),
    };
    if den <= 1e-12 || num <= 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "{}: degenerate bound ({num}/{den}); constant g or h has no closed-form rate here",
            spec.name()
        )));
    }
    let mut inputs = BTreeMap::new();
    inputs.insert("b1".into(), b1);
    inputs.insert("a1".into(), a1);
    inputs.insert("b2".into(), b2);
    inputs.insert("a2".into(), a2);
    inputs.insert("g_l1".into(), ng);
    inputs.insert("h_l1".into(), nh);
    Ok(BoundReport::new(spec.name(), num / den, 1.0, inputs))
}

/// Two-sided closed-form bracket for beta_n of the stay-probability
/// kernel with p(x) = a|x|.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BetaSandwich {
    /// a^{n+1}/(n+1)
    pub lower: f64,
    /// 3 a^{floor(n/2)+1} / (floor(n/2)+1)
    pub upper: f64,
    /// E[p^n(X)] under the uniform marginal, a^n/(n+1): the expectation
    /// the lower bound is stated through. It exceeds `lower` by one
    /// factor of a; both readings are reported and tests accept either
    /// as the floor.
    pub stay_moment: f64,
}

pub fn beta_sandwich(a: f64, n: usize) -> Result<BetaSandwich> {
    if !(0.0 < a && a <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta_sandwich needs a in (0,1]; got {a}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("beta_sandwich needs n >= 1".into()));
    }
    let half = n / 2;
    Ok(BetaSandwich {
        lower: a.powi(n as i32 + 1) / (n as f64 + 1.0),
        upper: 3.0 * a.powi(half as i32 + 1) / (half as f64 + 1.0),
        stay_moment: a.powi(n as i32) / (n as f64 + 1.0),
    })
}
