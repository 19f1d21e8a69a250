//! Conditional randomization test engine.
//!
//! The engine is agnostic about what a dataset is. A test needs three things:
//! a statistic mapping a dataset to a scalar, a resampler that redraws the
//! randomized part of the dataset from its conditional distribution given
//! everything else, and a tail direction saying which extreme counts as
//! evidence. The p-value is the exact randomization percentile
//! `(1 + N - M) / (1 + N)`, where M counts resampled statistics on the
//! evidence side of the observed one and ties are broken by a small random
//! jitter. When the resampler draws from the true conditional distribution
//! under the null, `P[p <= alpha] = alpha` exactly, for any statistic and any
//! sample size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stream::{RngStream, SeedSpec};

/// Which extreme of the statistic counts against the null hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailDirection {
    /// Larger observed statistic is evidence against the null.
    Upper,
    /// Smaller observed statistic is evidence against the null.
    Lower,
}

/// Exact randomization p-value: a rational with denominator N + 1.
///
/// The attainable values are `1/(N+1), 2/(N+1), ..., 1`; zero is not
/// attainable because the observed dataset is always a member of its own
/// null ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PValue {
    numer: u64,
    denom: u64,
}

impl PValue {
    fn from_counts(n_resamples: usize, m_beyond: usize) -> Self {
        debug_assert!(m_beyond <= n_resamples);
        PValue {
            numer: (1 + n_resamples - m_beyond) as u64,
            denom: (n_resamples + 1) as u64,
        }
    }

    pub fn numer(self) -> u64 {
        self.numer
    }

    pub fn denom(self) -> u64 {
        self.denom
    }

    /// The p-value as a float (nearest f64 to numer/denom).
    pub fn value(self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// Rejection at level `alpha` under the convention `p <= alpha`.
    pub fn rejects_at(self, alpha: f64) -> bool {
        self.value() <= alpha
    }
}

/// Everything a single conditional randomization test produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome<F> {
    /// Statistic of the observed dataset.
    pub t_obs: F,
    /// Statistics of the resampled datasets, in resample order.
    pub ensemble: Vec<F>,
    /// Exact p-value on the (N+1)-atom lattice.
    pub p: PValue,
    pub tail: TailDirection,
    /// Seed the test ran under; replaying it reproduces this outcome exactly.
    pub seed: SeedSpec,
}

impl<F: Scalar> TestOutcome<F> {
    pub fn n_resamples(&self) -> usize {
        self.ensemble.len()
    }

    /// Re-derive the tie-break stream from the stored seed and recompute the
    /// p-value from the stored statistics. Always equals `self.p`.
    pub fn recompute_p(&self) -> Result<PValue> {
        let mut tie_rng = tie_break_stream(self.seed, self.ensemble.len());
        p_value(self.t_obs, &self.ensemble, self.tail, &mut tie_rng)
    }
}

fn tie_break_stream(seed: SeedSpec, n_resamples: usize) -> RngStream {
    // Resample i uses child lane i; the tie-break uses the first free lane.
    seed.child(n_resamples as u64).stream()
}

/// Exact p-value of `t_obs` within `ensemble` with randomized tie-breaking.
///
/// A uniform jitter, strictly smaller than the smallest nonzero gap between
/// distinct values, is added to the observed and every ensemble statistic, so
/// jitter resolves exact ties uniformly at random and changes nothing else.
/// `M` then counts jittered ensemble values strictly beyond the jittered
/// observed value in the tail direction, and the result is
/// `(1 + N - M) / (1 + N)`.
pub fn p_value<F: Scalar>(
    t_obs: F,
    ensemble: &[F],
    tail: TailDirection,
    rng: &mut RngStream,
) -> Result<PValue> {
    if ensemble.is_empty() {
        return Err(Error::invalid("p_value: empty null ensemble"));
    }
    if !t_obs.is_finite() {
        return Err(Error::invalid("p_value: non-finite observed statistic"));
    }
    if let Some(bad) = ensemble.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "p_value: non-finite ensemble statistic {bad}"
        )));
    }

    let scale = jitter_scale(t_obs, ensemble);
    let jittered_obs = t_obs + F::unit_uniform(rng) * scale;
    let n = ensemble.len();
    let mut beyond = 0usize;
    for &v in ensemble {
        let jittered = v + F::unit_uniform(rng) * scale;
        let is_beyond = match tail {
            TailDirection::Upper => jittered < jittered_obs,
            TailDirection::Lower => jittered > jittered_obs,
        };
        if is_beyond {
            beyond += 1;
        }
    }
    Ok(PValue::from_counts(n, beyond))
}

/// Half the smallest nonzero gap between distinct values, so that adding
/// jitter from [0, scale) can never reorder distinct values. Falls back to 1
/// when every value is identical (only jitter comparisons matter then).
fn jitter_scale<F: Scalar>(t_obs: F, ensemble: &[F]) -> F {
    let mut values: Vec<F> = Vec::with_capacity(ensemble.len() + 1);
    values.push(t_obs);
    values.extend_from_slice(ensemble);
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut min_gap: Option<F> = None;
    for pair in values.windows(2) {
        let gap = pair[1] - pair[0];
        if gap > F::zero() {
            min_gap = Some(match min_gap {
                Some(g) if g < gap => g,
                _ => gap,
            });
        }
    }
    match min_gap {
        Some(g) => g * F::cast(0.5),
        None => F::one(),
    }
}

/// Run a full conditional randomization test.
///
/// The resampler must draw from the conditional distribution of the
/// randomized variables given the conditioning statistic under the null
/// hypothesis; that obligation is on the caller and is documented per task
/// module. Each resample is driven by its own sub-stream derived from `seed`,
/// so the outcome is identical regardless of where or when it runs.
pub fn run_crt<D, F, S, R>(
    dataset: &D,
    statistic: S,
    resampler: R,
    n_resamples: usize,
    tail: TailDirection,
    seed: SeedSpec,
) -> Result<TestOutcome<F>>
where
    F: Scalar,
    S: Fn(&D) -> Result<F>,
    R: Fn(&D, &mut RngStream) -> Result<D>,
{
    if n_resamples == 0 {
        return Err(Error::invalid("run_crt: n_resamples must be >= 1"));
    }
    let t_obs = statistic(dataset)?;
    let mut ensemble = Vec::with_capacity(n_resamples);
    for index in 0..n_resamples {
        let mut rng = seed.child(index as u64).stream();
        let resampled = resampler(dataset, &mut rng).map_err(|e| e.at_resample(index))?;
        let value = statistic(&resampled).map_err(|e| e.at_resample(index))?;
        ensemble.push(value);
    }
    let mut tie_rng = tie_break_stream(seed, n_resamples);
    let p = p_value(t_obs, &ensemble, tail, &mut tie_rng)?;
    Ok(TestOutcome {
        t_obs,
        ensemble,
        p,
        tail,
        seed,
    })
}
