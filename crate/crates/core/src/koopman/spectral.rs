//! Per-term relevance over a time window and the numerical rank of the
//! sampled term family.

use faer::Mat;
use serde::Serialize;

use super::{Decomposition, MultiIndex};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::heatflow::CosineSeries;

/// Relative singular-value cutoff used by [`independent_count`].
pub const INDEPENDENCE_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relevance {
    pub index: MultiIndex,
    pub multiplicity: u64,
    pub sigma: f64,
}

fn trapezoid_1d(times: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    times
        .windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * (f(i) + f(i + 1)))
        .sum()
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::InvalidArgument("need at least two time samples".into()));
    }
    if times[0] < 0.0 {
        return Err(Error::NegativeTime(times[0]));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("time samples must be strictly increasing".into()));
    }
    Ok(())
}

/// `sigma_nu = ||exp(lambda_nu t) phi_nu a_nu|| / ||u||` in space-time `L2` over
/// the sampled window, trapezoid in `x` and `t`. The term includes its
/// multiplicity. Sorted by decreasing `sigma`.
pub fn relevance(dec: &Decomposition, times: &[f64], u: &[GridFunction]) -> Result<Vec<Relevance>> {
    check_times(times)?;
    if u.len() != times.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: u.len(),
        });
    }
    let norms: Vec<f64> = u.iter().map(|s| s.mul(s).trapezoid()).collect();
    let denom = trapezoid_1d(times, |i| norms[i]).sqrt();
    let mut out: Vec<_> = dec
        .terms
        .iter()
        .map(|term| {
            let space = term.mode.mul(&term.mode).trapezoid();
            let time = trapezoid_1d(times, |i| (2.0 * term.lambda * times[i]).exp());
            let c = term.multiplicity as f64 * term.amplitude;
            Relevance {
                index: term.index.clone(),
                multiplicity: term.multiplicity,
                sigma: c.abs() * (space * time).sqrt() / denom,
            }
        })
        .collect();
    out.sort_by(|a, b| b.sigma.total_cmp(&a.sigma).then_with(|| a.index.cmp(&b.index)));
    Ok(out)
}

/// [`relevance`] on `[t1, t2]` sampled with step close to `dt`, against the
/// exact solution generated by the heat state `heat`.
pub fn relevance_window(
    dec: &Decomposition,
    heat: &CosineSeries,
    t1: f64,
    t2: f64,
    dt: f64,
) -> Result<Vec<Relevance>> {
    if !(t2 > t1) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need t1 < t2 and dt > 0, got [{t1}, {t2}] with dt {dt}"
        )));
    }
    let steps = ((t2 - t1) / dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps)
        .map(|i| t1 + (t2 - t1) * i as f64 / steps as f64)
        .collect();
    let mesh = dec.mesh();
    let u = times
        .iter()
        .map(|&t| heat.burgers_at(t, mesh))
        .collect::<Result<Vec<_>>>()?;
    relevance(dec, &times, &u)
}

/// Numerical rank of the matrix whose columns are the space-time samples of
/// `exp(lambda_nu t) a_nu(x)`, one column per canonical term.
pub fn independent_count(dec: &Decomposition, times: &[f64]) -> Result<usize> {
    check_times(times)?;
    let n = dec.mesh().n_points();
    let k = dec.terms.len();
    if k == 0 {
        return Ok(0);
    }
    let samples = Mat::<f64>::from_fn(n * times.len(), k, |r, j| {
        let term = &dec.terms[j];
        let (ti, xi) = (r / n, r % n);
        (term.lambda * times[ti]).exp() * term.mode.values()[xi]
    });
    let sv = samples
        .singular_values()
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > INDEPENDENCE_CUTOFF * largest).count())
}
