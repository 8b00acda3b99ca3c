//! Exact stationary sampling and empirical decay diagnostics.
//!
//! Chains start at stationarity (X_0 uniform) — the copula construction
//! guarantees the uniform marginal is invariant, so there is no burn-in.
//! Transitions invert the conditional CDF at a fresh uniform variate;
//! atoms are taken by direct categorical choice so stays and flips are
//! bit-exact. The RNG is an explicit seeded stream and trajectories are
//! reproducible bit-for-bit from (model, seed, length).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{conditional_cdf, CopulaModel};

/// A sampled path together with what produced it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<f64>,
    pub seed: u64,
    pub label: String,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// CSV with a JSON comment header: `# {...}` then one `state` column.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.states.len() * 20 + 64);
        out.push_str(&format!(
            "# {{\"schema_version\":1,\"model\":\"{}\",\"seed\":{},\"length\":{}}}\n",
            self.label,
            self.seed,
            self.states.len()
        ));
        out.push_str("state\n");
        for s in &self.states {
            out.push_str(&format!("{s}\n"));
        }
        out
    }
}

/// Draws one transition from x at the uniform variate u by generalized
/// inversion of the conditional CDF.
fn step(model: &CopulaModel, x: f64, u: f64) -> Result<f64> {
    if let Some(inv) = model.closed_form_conditional_inverse() {
        return Ok(inv(x, u).clamp(0.0, 1.0));
    }
    if model.has_atoms() && model.closed_form_conditional().is_none() {
        // Categorical over atoms, then invert the density part.
        let mut cum = 0.0;
        for atom in model.atoms() {
            cum += atom.weight_at(x);
            if u < cum {
                return Ok(atom.kind.apply(x));
            }
        }
        return invert_density_row(model, x, u - cum);
    }
    if model.closed_form_conditional().is_some() {
        // Monotone right-continuous CDF: bisect for inf{v : F(v|x) >= u}.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if conditional_cdf(model, x, mid)? >= u {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 {
                break;
            }
        }
        return Ok(hi);
    }
    invert_density_row(model, x, u)
}

/// Inverts v -> int_0^v c(x,t) dt = target on an internal midpoint mesh
/// with linear interpolation inside the crossing cell.
fn invert_density_row(model: &CopulaModel, x: f64, target: f64) -> Result<f64> {
    const CELLS: usize = 512;
    let w = 1.0 / CELLS as f64;
    let mut cum = 0.0;
    for j in 0..CELLS {
        let t = (j as f64 + 0.5) * w;
        let c = model.density(x, t);
        if !c.is_finite() || c < -1e-9 {
            return Err(Error::Numeric {
                location: format!("conditional inversion at x={x}, t={t}"),
                message: format!("density {c}"),
            });
        }
        let next = cum + c.max(0.0) * w;
        if target <= next {
            let frac = if next > cum { (target - cum) / (next - cum) } else { 0.5 };
            return Ok((j as f64 + frac) * w);
        }
        cum = next;
    }
    Ok(1.0)
}

/// Stationary path of the copula chain: X_0 uniform, each transition by
/// conditional-CDF inversion (closed-form inverses are used when the
/// model carries them).
pub fn sample_chain(model: &CopulaModel, length: usize, seed: u64) -> Result<Trajectory> {
    if length == 0 {
        return Err(Error::InvalidInput("sample_chain needs length >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(length);
    let mut x: f64 = rng.gen();
    states.push(x);
    for _ in 1..length {
        let u: f64 = rng.gen();
        x = step(model, x, u)?;
        states.push(x);
    }
    Ok(Trajectory { states, seed, label: model.label.clone() })
}

/// Direct simulation of the stay-probability kernel on [-1, 1]:
/// stay with probability a|x|, otherwise draw from the density
/// k(1 - a|t|), k = 1/(2-a). The affine image (x+1)/2 of this chain has
/// the same law as `sample_chain` on the corresponding copula model.
pub fn sample_mh_kernel(a: f64, length: usize, seed: u64) -> Result<Trajectory> {
    if !(0.0 < a && a <= 1.0) {
        return Err(Error::InvalidParameter(format!("kernel needs a in (0,1]; got {a}")));
    }
    if length == 0 {
        return Err(Error::InvalidInput("sample_mh_kernel needs length >= 1".into()));
    }
    let k = 1.0 / (2.0 - a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(length);
    let mut x: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    states.push(x);
    for _ in 1..length {
        let u: f64 = rng.gen();
        if u < a * x.abs() {
            states.push(x);
            continue;
        }
        let p: f64 = rng.gen();
        x = 2.0 * crate::families::mh_proposal_inverse(a, k, p) - 1.0;
        states.push(x);
    }
    Ok(Trajectory { states, seed, label: format!("mh-kernel({a})") })
}

/// Lagged-correlation estimates with batch-means standard errors.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecaySeries {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
}

/// Sample correlation of (f(X_t), f(X_{t+lag})) for each lag.
pub fn empirical_corr_decay<F: Fn(f64) -> f64>(
    traj: &Trajectory,
    f: F,
    lags: &[usize],
) -> Result<DecaySeries> {
    let y: Vec<f64> = traj.states.iter().map(|&x| f(x)).collect();
    let n = y.len();
    let max_lag = lags.iter().copied().max().unwrap_or(0);
    if n < max_lag + 32 {
        return Err(Error::InvalidInput(format!(
            "trajectory of length {n} is too short for lag {max_lag}"
        )));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var < 1e-14 {
        return Err(Error::InvalidInput(
            "f is (numerically) constant on the trajectory; correlation undefined".into(),
        ));
    }
    let mut values = Vec::with_capacity(lags.len());
    let mut errors = Vec::with_capacity(lags.len());
    for &lag in lags {
        let m = n - lag;
        let z: Vec<f64> = (0..m).map(|t| (y[t] - mean) * (y[t + lag] - mean) / var).collect();
        let corr = z.iter().sum::<f64>() / m as f64;
        // Batch means over 32 batches.
        let batches = 32.min(m);
        let step = m / batches;
        let mut bm = Vec::with_capacity(batches);
        for b in 0..batches {
            let lo = b * step;
            let hi = if b + 1 == batches { m } else { lo + step };
            bm.push(z[lo..hi].iter().sum::<f64>() / (hi - lo) as f64);
        }
        let bmean = bm.iter().sum::<f64>() / batches as f64;
        let bvar =
            bm.iter().map(|v| (v - bmean) * (v - bmean)).sum::<f64>() / (batches - 1).max(1) as f64;
        values.push(corr);
        errors.push((bvar / batches as f64).sqrt());
    }
    Ok(DecaySeries { lags: lags.to_vec(), values, standard_errors: errors })
}

/// One-sample Kolmogorov-Smirnov statistic against the uniform law on
/// the sample's support scaled to [0,1].
pub fn ks_statistic_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        d = d.max((i as f64 + 1.0) / n - x).max(x - i as f64 / n);
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.total_cmp(y));
    sb.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < sa.len() && j < sb.len() {
        let xa = sa[i];
        let xb = sb[j];
        let x = xa.min(xb);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical constant of the Kolmogorov distribution.
pub const KS_CRIT_1PCT: f64 = 1.62762;

/// 1% critical value for the one-sample statistic at size n.
pub fn ks_uniform_critical_1pct(n: usize) -> f64 {
    KS_CRIT_1PCT / (n as f64).sqrt()
}

/// 1% critical value for the two-sample statistic at sizes (n, m).
pub fn ks_two_sample_critical_1pct(n: usize, m: usize) -> f64 {
    KS_CRIT_1PCT * ((n as f64 + m as f64) / (n as f64 * m as f64)).sqrt()
}
