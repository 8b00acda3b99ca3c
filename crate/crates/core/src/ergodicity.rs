//! Small-set (minorization) certificates and Lyapunov drift checks.
//!
//! A set S is small when P(x, A) >= q mu(A) for every x in S and
//! measurable A; combined with a drift condition
//!
//! ```text
//! r E[L(X_1) | X_0 = x] <= L(x) - gamma   for x outside S,
//! int_{S^c} L dP(x, .) < K                for x in S,
//! ```
//!
//! (r > 1, gamma > 0) this certifies geometric ergodicity. Test sets for
//! the minorization are all grid sub-intervals; for densities bounded
//! below that is where the worst margin lives, and a randomized-union
//! spot check covers the rest.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{CopulaModel, PointFn};
use crate::families::FrechetParams;

/// Drift specification: Lyapunov function, small-set candidate, and the
/// constants of the two conditions.
#[derive(Clone)]
pub struct DriftSpec {
    pub lyapunov: PointFn,
    /// Closed sub-interval of [0,1].
    pub small_set: (f64, f64),
    pub r: f64,
    pub gamma: f64,
    /// Bound for the second condition.
    pub k_bound: f64,
}

impl DriftSpec {
    pub fn new(
        lyapunov: impl Fn(f64) -> f64 + Send + Sync + 'static,
        small_set: (f64, f64),
        r: f64,
        gamma: f64,
        k_bound: f64,
    ) -> Self {
        DriftSpec { lyapunov: std::sync::Arc::new(lyapunov), small_set, r, gamma, k_bound }
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if self.r <= 1.0 {
            return Err(Error::InvalidParameter(format!("drift needs r > 1; got {}", self.r)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drift needs gamma > 0; got {}",
                self.gamma
            )));
        }
        if self.k_bound <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drift needs K > 0; got {}",
                self.k_bound
            )));
        }
        let (lo, hi) = self.small_set;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidInput(format!("bad small set [{lo}, {hi}]")));
        }
        // L bounded away from 0 and infinity on S (grid check).
        for &x in grid.nodes().iter().filter(|&&x| lo <= x && x <= hi) {
            let v = (self.lyapunov)(x);
            if !(v.is_finite() && v > 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "Lyapunov function must be bounded away from 0 and infinity on the small set; L({x}) = {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub drift_ok: bool,
    /// min over x outside S of L(x) - gamma - r E[L(X_1)|x].
    pub worst_drift_slack: f64,
    pub tail_ok: bool,
    /// min over x in S of K - int_{S^c} L dP(x, .).
    pub worst_tail_slack: f64,
    pub r: f64,
    pub gamma: f64,
    pub k_bound: f64,
}

impl DriftReport {
    pub fn all_ok(&self) -> bool {
        self.drift_ok && self.tail_ok
    }
}

/// Verifies both drift conditions at every grid node.
pub fn drift_check(model: &CopulaModel, spec: &DriftSpec, grid: &Grid) -> Result<DriftReport> {
    spec.check(grid)?;
    let (lo, hi) = spec.small_set;
    let l: Vec<f64> = grid.nodes().iter().map(|&x| (spec.lyapunov)(x)).collect();

    let mut worst_drift = f64::INFINITY;
    let mut worst_tail = f64::INFINITY;
    for (i, &x) in grid.nodes().iter().enumerate() {
        let in_s = lo <= x && x <= hi;
        if !in_s {
            // E[L(X_1) | X_0 = x] over atoms and the density part.
            let mut e = 0.0;
            for atom in model.atoms() {
                e += atom.weight_at(x) * (spec.lyapunov)(atom.kind.apply(x));
            }
            for (j, (&y, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
                e += model.density(x, y) * l[j] * w;
            }
            let slack = l[i] - spec.gamma - spec.r * e;
            worst_drift = worst_drift.min(slack);
        } else {
            let mut tail = 0.0;
            for atom in model.atoms() {
                let target = atom.kind.apply(x);
                if !(lo <= target && target <= hi) {
                    tail += atom.weight_at(x) * (spec.lyapunov)(target);
                }
            }
            for (j, (&y, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
                if !(lo <= y && y <= hi) {
                    tail += model.density(x, y) * l[j] * w;
                }
            }
            worst_tail = worst_tail.min(spec.k_bound - tail);
        }
    }
    if worst_drift == f64::INFINITY {
        worst_drift = 0.0; // S covers the whole grid; nothing to check
    }
    if worst_tail == f64::INFINITY {
        worst_tail = spec.k_bound;
    }
    Ok(DriftReport {
        drift_ok: worst_drift >= -1e-12,
        worst_drift_slack: worst_drift,
        tail_ok: worst_tail > 0.0,
        worst_tail_slack: worst_tail,
        r: spec.r,
        gamma: spec.gamma,
        k_bound: spec.k_bound,
    })
}

/// Minorization certificate: witnesses P(x, A) >= q mu(A) for all grid
/// x in S and A over all grid sub-intervals.
#[derive(Debug, Clone, Serialize)]
pub struct MinorizationCertificate {
    pub small_set: (f64, f64),
    pub q: f64,
    pub n_steps: usize,
    /// min over x in S and intervals A of P(x,A) - q mu(A).
    pub worst_margin: f64,
}

impl MinorizationCertificate {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.worst_margin >= -tol
    }
}

/// Sweeps all grid sub-intervals with a minimum-subarray scan per row.
/// The reference measure is Lebesgue, and the check is one-step.
pub fn minorization_check(
    model: &CopulaModel,
    small_set: (f64, f64),
    q: f64,
    grid: &Grid,
) -> Result<MinorizationCertificate> {
    if !(0.0 < q && q <= 1.0) {
        return Err(Error::InvalidParameter(format!("minorization needs q in (0,1]; got {q}")));
    }
    let (lo, hi) = small_set;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidInput(format!("bad small set [{lo}, {hi}]")));
    }
    let n = grid.len();
    let mut worst = f64::INFINITY;
    let mut cell = vec![0.0f64; n];
    for (i, &x) in grid.nodes().iter().enumerate() {
        if !(lo <= x && x <= hi) {
            continue;
        }
        for (j, (&y, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
            cell[j] = (model.density(x, y) - q) * w;
        }
        for atom in model.atoms() {
            let j = match atom.kind {
                crate::model::MapKind::Identity => i,
                crate::model::MapKind::Flip => grid.flip_index(i),
            };
            cell[j] += atom.weight_at(x);
        }
        // Minimum over nonempty contiguous windows.
        let mut best = f64::INFINITY;
        let mut run = 0.0f64;
        for &v in &cell {
            run = v.min(run + v);
            best = best.min(run);
        }
        worst = worst.min(best);
    }
    if worst == f64::INFINITY {
        return Err(Error::InvalidInput(format!(
            "small set [{lo}, {hi}] contains no grid node"
        )));
    }
    Ok(MinorizationCertificate { small_set, q, n_steps: 1, worst_margin: worst })
}

/// The mixture family's drift certificate: L = 1 on [1/2,1] and 2 below,
/// S = [1/2, 1], r = 4/(a+3), gamma = b/(a+3); K is the grid supremum of
/// the tail expectation plus 1.
pub fn frechet_drift_spec(p: FrechetParams, grid: &Grid) -> Result<DriftSpec> {
    p.check()?;
    if p.b <= 0.0 {
        return Err(Error::InvalidParameter(
            "the built-in drift certificate degenerates at b = 0 (gamma would vanish); \
             supply a custom DriftSpec"
                .into(),
        ));
    }
    if p.a + p.b >= 1.0 {
        return Err(Error::InvalidParameter(
            "a + b = 1 has no density part and is not geometrically ergodic".into(),
        ));
    }
    let lyapunov = |x: f64| if x >= 0.5 { 1.0 } else { 2.0 };
    let small_set = (0.5, 1.0);
    let r = 4.0 / (p.a + 3.0);
    let gamma = p.b / (p.a + 3.0);

    // K = sup_{x in S} int_{S^c} L dP(x,.) + 1 on the grid.
    let q = 1.0 - p.a - p.b;
    let mut sup_tail = 0.0f64;
    for &x in grid.nodes().iter().filter(|&&x| x >= 0.5) {
        let mut tail = 0.0;
        if 1.0 - x < 0.5 {
            tail += p.b * 2.0; // flip atom lands below 1/2
        }
        tail += q * grid.integrate(|y| if y < 0.5 { 2.0 } else { 0.0 });
        sup_tail = sup_tail.max(tail);
    }
    Ok(DriftSpec::new(lyapunov, small_set, r, gamma, sup_tail + 1.0))
}
