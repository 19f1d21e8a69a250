//! Reaction-time task: simulator, feasible-range resampler, statistic.
//!
//! A trial holds the subject's inter-press gaps (the first measured from
//! trial start) and the trial's quiescence interval `q`, drawn uniformly on
//! `(q_low, q_high]`. The stimulus appears `q` after the last event once the
//! subject has refrained from pressing for `q`, so the press closing the
//! first gap of length >= `q` is rewarded and ends the trial.
//!
//! Under the null hypothesis (the subject detects rewards but not stimuli)
//! the conditional law of `q` given presses and rewards is the prior
//! truncated to the trial's feasible range: strictly above every non-final
//! gap and at or below the final gap. Resampling from that truncation yields
//! an exact test for any statistic; the statistic here is the mean reaction
//! time, with the lower tail as the evidence direction.

use serde::{Deserialize, Serialize};

use crate::crt::{run_crt, TailDirection, TestOutcome};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stream::{RngStream, SeedSpec};

pub const DEFAULT_Q_LOW_MS: f64 = 500.0;
pub const DEFAULT_Q_HIGH_MS: f64 = 1000.0;
pub const DEFAULT_RT_TRIALS: usize = 100;

/// Gaussian gap draws are truncated below at 1 ms so gaps stay positive.
const MIN_GAP_MS: f64 = 1.0;
/// A trial that reaches this many presses without a reward is aborted.
const MAX_PRESSES_PER_TRIAL: usize = 10_000;
/// Bail out of rejection loops that accept with essentially zero probability.
const MAX_REJECTION_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtConfig<F> {
    pub q_low_ms: F,
    pub q_high_ms: F,
    pub n_trials: usize,
}

impl<F: Scalar> Default for RtConfig<F> {
    fn default() -> Self {
        RtConfig {
            q_low_ms: F::cast(DEFAULT_Q_LOW_MS),
            q_high_ms: F::cast(DEFAULT_Q_HIGH_MS),
            n_trials: DEFAULT_RT_TRIALS,
        }
    }
}

impl<F: Scalar> RtConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if !self.q_low_ms.is_finite() || !self.q_high_ms.is_finite() {
            return Err(Error::invalid("rt config: non-finite quiescence bounds"));
        }
        if !(self.q_low_ms > F::zero() && self.q_low_ms < self.q_high_ms) {
            return Err(Error::invalid(
                "rt config: require 0 < q_low_ms < q_high_ms",
            ));
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("rt config: n_trials must be >= 1"));
        }
        Ok(())
    }
}

/// One trial: inter-press gaps and the quiescence interval that governed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtTrial<F> {
    /// `gaps_ms[0]` runs from trial start to the first press; later entries
    /// are between consecutive presses. The press closing the last gap is the
    /// rewarded one.
    pub gaps_ms: Vec<F>,
    pub q_ms: F,
}

impl<F: Scalar> RtTrial<F> {
    pub fn final_gap(&self) -> F {
        *self.gaps_ms.last().expect("trial has at least one press")
    }

    /// Check the trial against the task rules: positive finite gaps, `q`
    /// within the configured bounds, every non-final gap strictly below `q`,
    /// and the final gap at least `q`.
    pub fn validate(&self, config: &RtConfig<F>) -> Result<()> {
        let Some((&last, prior)) = self.gaps_ms.split_last() else {
            return Err(Error::invalid("rt trial: no presses"));
        };
        if self
            .gaps_ms
            .iter()
            .any(|g| !g.is_finite() || *g <= F::zero())
        {
            return Err(Error::invalid("rt trial: gaps must be positive and finite"));
        }
        if !self.q_ms.is_finite() || self.q_ms < config.q_low_ms || self.q_ms > config.q_high_ms {
            return Err(Error::invalid("rt trial: q outside configured bounds"));
        }
        if prior.iter().any(|g| *g >= self.q_ms) {
            return Err(Error::invalid(
                "rt trial: a non-final gap reaches q, reward would have come earlier",
            ));
        }
        if last < self.q_ms {
            return Err(Error::invalid("rt trial: final gap shorter than q"));
        }
        Ok(())
    }

    /// Reaction time if the quiescence interval had been `q`: final gap minus
    /// `q`, the time from stimulus appearance to the rewarded press.
    pub fn reaction_time_with(&self, q: F) -> F {
        self.final_gap() - q
    }
}

/// Index of the press that would be rewarded when replaying `gaps` against a
/// quiescence interval `q`: the press closing the first gap of length >= `q`.
pub fn first_rewarded_press<F: Scalar>(gaps: &[F], q: F) -> Option<usize> {
    gaps.iter().position(|&g| g >= q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtSession<F> {
    pub config: RtConfig<F>,
    pub trials: Vec<RtTrial<F>>,
}

impl<F: Scalar> RtSession<F> {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.trials.len() != self.config.n_trials {
            return Err(Error::invalid(format!(
                "rt session: {} trials but config says {}",
                self.trials.len(),
                self.config.n_trials
            )));
        }
        for trial in &self.trials {
            trial.validate(&self.config)?;
        }
        Ok(())
    }
}

/// Press strategy of the simulated subject. Durations in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RtStrategy<F> {
    /// Press at i.i.d. Gaussian intervals, blind to stimuli and rewards.
    Random { mean_ms: F, sd_ms: F },
    /// Press at the earlier of a baseline Gaussian interval and a
    /// stimulus-triggered Gaussian delay after stimulus appearance.
    Response {
        mean_ms: F,
        sd_ms: F,
        delay_mean_ms: F,
        delay_sd_ms: F,
    },
    /// First gap Gaussian; each later gap is the previous gap plus a fresh
    /// draw from the same Gaussian, so gaps lengthen until the reward.
    Deceleration { step_mean_ms: F, step_sd_ms: F },
}

impl<F: Scalar> RtStrategy<F> {
    pub fn random() -> Self {
        RtStrategy::Random {
            mean_ms: F::cast(800.0),
            sd_ms: F::cast(300.0),
        }
    }

    pub fn response() -> Self {
        RtStrategy::Response {
            mean_ms: F::cast(800.0),
            sd_ms: F::cast(300.0),
            delay_mean_ms: F::cast(150.0),
            delay_sd_ms: F::cast(50.0),
        }
    }

    pub fn deceleration() -> Self {
        RtStrategy::Deceleration {
            step_mean_ms: F::cast(150.0),
            step_sd_ms: F::cast(50.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params: &[F] = match self {
            RtStrategy::Random { mean_ms, sd_ms } => &[*mean_ms, *sd_ms],
            RtStrategy::Response {
                mean_ms,
                sd_ms,
                delay_mean_ms,
                delay_sd_ms,
            } => &[*mean_ms, *sd_ms, *delay_mean_ms, *delay_sd_ms],
            RtStrategy::Deceleration {
                step_mean_ms,
                step_sd_ms,
            } => &[*step_mean_ms, *step_sd_ms],
        };
        if params.iter().any(|p| !p.is_finite() || *p <= F::zero()) {
            return Err(Error::invalid(
                "rt strategy: means and sds must be positive and finite",
            ));
        }
        Ok(())
    }
}

/// Gaussian draw truncated below at 1 ms by rejection, which preserves the
/// conditional shape instead of piling an atom at the cut.
fn truncated_normal<F: Scalar>(rng: &mut RngStream, mean: F, sd: F) -> Result<F> {
    let floor = F::cast(MIN_GAP_MS);
    for _ in 0..MAX_REJECTION_DRAWS {
        let draw = mean + sd * F::standard_normal(rng);
        if draw >= floor {
            return Ok(draw);
        }
    }
    Err(Error::SimulationOverflow(format!(
        "gap draw stuck below {MIN_GAP_MS} ms for mean {mean}, sd {sd}"
    )))
}

/// Uniform draw on the half-open interval (lo, hi].
fn uniform_open_closed<F: Scalar>(rng: &mut RngStream, lo: F, hi: F) -> F {
    debug_assert!(lo < hi);
    loop {
        let v = hi - (hi - lo) * F::unit_uniform(rng);
        // Rounding can land exactly on lo; redraw to keep the interval open.
        if v > lo {
            return v;
        }
    }
}

fn collect_gaps<F: Scalar>(q: F, mut next_gap: impl FnMut() -> Result<F>) -> Result<RtTrial<F>> {
    let mut gaps = Vec::new();
    while gaps.len() < MAX_PRESSES_PER_TRIAL {
        let gap = next_gap()?;
        gaps.push(gap);
        if gap >= q {
            return Ok(RtTrial {
                gaps_ms: gaps,
                q_ms: q,
            });
        }
    }
    Err(Error::SimulationOverflow(format!(
        "trial exceeded {MAX_PRESSES_PER_TRIAL} presses without a reward"
    )))
}

fn simulate_trial<F: Scalar>(
    strategy: &RtStrategy<F>,
    config: &RtConfig<F>,
    rng: &mut RngStream,
) -> Result<RtTrial<F>> {
    let q = uniform_open_closed(rng, config.q_low_ms, config.q_high_ms);
    match *strategy {
        RtStrategy::Random { mean_ms, sd_ms } => {
            collect_gaps(q, || truncated_normal(rng, mean_ms, sd_ms))
        }
        RtStrategy::Deceleration {
            step_mean_ms,
            step_sd_ms,
        } => {
            let mut gap = F::zero();
            collect_gaps(q, || {
                gap = gap + truncated_normal(rng, step_mean_ms, step_sd_ms)?;
                Ok(gap)
            })
        }
        RtStrategy::Response {
            mean_ms,
            sd_ms,
            delay_mean_ms,
            delay_sd_ms,
        } => {
            let mut gaps = Vec::new();
            while gaps.len() < MAX_PRESSES_PER_TRIAL {
                let baseline = truncated_normal(rng, mean_ms, sd_ms)?;
                if baseline < q {
                    // No stimulus before the intended press; press as planned.
                    gaps.push(baseline);
                    continue;
                }
                // The stimulus appears q after the last event. The subject
                // presses at the earlier of the planned press and the
                // stimulus-triggered press.
                let delay = truncated_normal(rng, delay_mean_ms, delay_sd_ms)?;
                let gap = baseline.min(q + delay);
                gaps.push(gap);
                return Ok(RtTrial {
                    gaps_ms: gaps,
                    q_ms: q,
                });
            }
            Err(Error::SimulationOverflow(format!(
                "trial exceeded {MAX_PRESSES_PER_TRIAL} presses without a reward"
            )))
        }
    }
}

/// Simulate a full session. Every returned trial satisfies the trial
/// invariants by construction.
pub fn simulate_rt_session<F: Scalar>(
    strategy: &RtStrategy<F>,
    config: &RtConfig<F>,
    rng: &mut RngStream,
) -> Result<RtSession<F>> {
    config.validate()?;
    strategy.validate()?;
    let trials = (0..config.n_trials)
        .map(|_| simulate_trial(strategy, config, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(RtSession {
        config: *config,
        trials,
    })
}

/// Quiescence values consistent with a trial: the half-open interval (lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleRange<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Scalar> FeasibleRange<F> {
    pub fn contains(&self, q: F) -> bool {
        q > self.lo && q <= self.hi
    }
}

/// The resampling support for a trial's quiescence interval: above the
/// longest non-final gap (and the prior's lower bound), at or below the final
/// gap (and the prior's upper bound). Always contains the trial's original q.
pub fn feasible_range<F: Scalar>(
    trial: &RtTrial<F>,
    config: &RtConfig<F>,
) -> Result<FeasibleRange<F>> {
    trial.validate(config)?;
    let (_, prior) = trial.gaps_ms.split_last().expect("validated nonempty");
    let mut lo = config.q_low_ms;
    for &gap in prior {
        if gap > lo {
            lo = gap;
        }
    }
    let hi = trial.final_gap().min(config.q_high_ms);
    Ok(FeasibleRange { lo, hi })
}

/// Redraw every trial's quiescence interval uniformly on its feasible range.
/// This is the conditional law of Q given presses and rewards under the null
/// hypothesis, computed by analytic truncation of the uniform prior.
pub fn resample_quiescence<F: Scalar>(
    session: &RtSession<F>,
    rng: &mut RngStream,
) -> Result<Vec<F>> {
    session
        .trials
        .iter()
        .map(|trial| {
            let range = feasible_range(trial, &session.config)?;
            Ok(uniform_open_closed(rng, range.lo, range.hi))
        })
        .collect()
}

/// Rejection-sampling variant: draw from the prior, retry until the draw is
/// feasible. Distribution-identical to [`resample_quiescence`] for the
/// uniform prior; this is the path to use for priors with no closed-form
/// truncation.
pub fn resample_quiescence_rejection<F: Scalar>(
    session: &RtSession<F>,
    rng: &mut RngStream,
) -> Result<Vec<F>> {
    session
        .trials
        .iter()
        .map(|trial| {
            let range = feasible_range(trial, &session.config)?;
            loop {
                let draw =
                    uniform_open_closed(rng, session.config.q_low_ms, session.config.q_high_ms);
                if range.contains(draw) {
                    return Ok(draw);
                }
            }
        })
        .collect()
}

/// Mean over trials of (final gap - q): the average time from stimulus
/// appearance to the rewarded press. Errors if any `q` is infeasible for its
/// trial, since the implied rewards would contradict the observed ones.
pub fn mean_reaction_time<F: Scalar>(session: &RtSession<F>, q_values: &[F]) -> Result<F> {
    if q_values.len() != session.trials.len() {
        return Err(Error::invalid(format!(
            "mean_reaction_time: {} q values for {} trials",
            q_values.len(),
            session.trials.len()
        )));
    }
    let mut sum = F::zero();
    for (trial, &q) in session.trials.iter().zip(q_values) {
        let range = feasible_range(trial, &session.config)?;
        if !range.contains(q) {
            return Err(Error::invalid(format!(
                "mean_reaction_time: q {q} outside feasible range ({}, {}]",
                range.lo, range.hi
            )));
        }
        sum = sum + trial.reaction_time_with(q);
    }
    Ok(sum / F::cast(session.trials.len() as f64))
}

/// Conditional randomization test for a reaction-time session: mean reaction
/// time against quiescence intervals resampled on their feasible ranges,
/// lower tail (subjects who see the stimulus react fast).
pub fn rt_crt<F: Scalar>(
    session: &RtSession<F>,
    n_resamples: usize,
    seed: SeedSpec,
) -> Result<TestOutcome<F>> {
    session.validate()?;
    let observed: Vec<F> = session.trials.iter().map(|t| t.q_ms).collect();
    run_crt(
        &observed,
        |q_values| mean_reaction_time(session, q_values),
        |_, rng| resample_quiescence(session, rng),
        n_resamples,
        TailDirection::Lower,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rng(seed: u64) -> RngStream {
        SeedSpec::new(seed, 0).stream()
    }

    fn config() -> RtConfig<f64> {
        RtConfig::default()
    }

    #[test]
    fn deceleration_worked_example() {
        // Candidate gaps 150, 150+200, 350+300, 650+400 against q = 900:
        // the fourth press closes the first gap >= q.
        let mut draws = [150.0, 200.0, 300.0, 400.0].into_iter();
        let mut gap = 0.0;
        let trial = collect_gaps(900.0, || {
            gap += draws.next().unwrap();
            Ok(gap)
        })
        .unwrap();
        assert_eq!(trial.gaps_ms, vec![150.0, 350.0, 650.0, 1050.0]);
        assert_eq!(first_rewarded_press(&trial.gaps_ms, trial.q_ms), Some(3));
        assert_eq!(trial.reaction_time_with(trial.q_ms), 150.0);
        trial.validate(&config()).unwrap();
    }

    #[test]
    fn simulated_sessions_replay_their_rewards() {
        let cfg = config();
        for (i, strategy) in [
            RtStrategy::random(),
            RtStrategy::response(),
            RtStrategy::deceleration(),
        ]
        .iter()
        .enumerate()
        {
            let session = simulate_rt_session(strategy, &cfg, &mut rng(i as u64)).unwrap();
            session.validate().unwrap();
            for trial in &session.trials {
                // Replaying the gaps against q rewards exactly the final press.
                assert_eq!(
                    first_rewarded_press(&trial.gaps_ms, trial.q_ms),
                    Some(trial.gaps_ms.len() - 1)
                );
            }
        }
    }

    #[test]
    fn feasible_range_rule_application() {
        let cfg = config();
        let trial = RtTrial {
            gaps_ms: vec![600.0, 700.0, 400.0, 900.0],
            q_ms: 800.0,
        };
        let r = feasible_range(&trial, &cfg).unwrap();
        assert_eq!((r.lo, r.hi), (700.0, 900.0));

        let single = RtTrial {
            gaps_ms: vec![850.0],
            q_ms: 600.0,
        };
        let r = feasible_range(&single, &cfg).unwrap();
        assert_eq!((r.lo, r.hi), (500.0, 850.0));

        let tight = RtTrial {
            gaps_ms: vec![950.0, 980.0],
            q_ms: 960.0,
        };
        let r = feasible_range(&tight, &cfg).unwrap();
        assert_eq!((r.lo, r.hi), (950.0, 980.0));
    }

    #[test]
    fn feasible_range_rejects_invalid_trials() {
        let cfg = config();
        // Non-final gap reaches q.
        let trial = RtTrial {
            gaps_ms: vec![900.0, 950.0],
            q_ms: 880.0,
        };
        assert!(feasible_range(&trial, &cfg).is_err());
        // Final gap below q.
        let trial = RtTrial {
            gaps_ms: vec![600.0],
            q_ms: 700.0,
        };
        assert!(feasible_range(&trial, &cfg).is_err());
    }

    fn one_trial_session(gaps_ms: Vec<f64>, q_ms: f64) -> RtSession<f64> {
        RtSession {
            config: RtConfig {
                n_trials: 1,
                ..config()
            },
            trials: vec![RtTrial { gaps_ms, q_ms }],
        }
    }

    #[test]
    fn truncated_uniform_oracle() {
        // Feasible range (700, 900]: mean 800, sd of the mean width/sqrt(12 n).
        let session = one_trial_session(vec![600.0, 700.0, 400.0, 900.0], 800.0);
        let n = 100_000usize;
        let mut r = rng(5);
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for _ in 0..n {
            let q = resample_quiescence(&session, &mut r).unwrap()[0];
            sum += q;
            min = min.min(q);
            max = max.max(q);
        }
        let mean = sum / n as f64;
        let sigma = 200.0 / (12.0f64 * n as f64).sqrt();
        assert!((mean - 800.0).abs() < 3.0 * sigma, "mean {mean}");
        assert!(min > 700.0);
        assert!(max <= 900.0);
    }

    #[test]
    fn untruncated_trial_matches_prior() {
        // Single press with a gap above q_high: feasible range is the whole
        // prior support, so draws must be uniform on (500, 1000].
        let session = one_trial_session(vec![1100.0], 800.0);
        let n = 100_000usize;
        let mut r = rng(6);
        let mut decile_counts = [0usize; 10];
        for _ in 0..n {
            let q = resample_quiescence(&session, &mut r).unwrap()[0];
            let idx = (((q - 500.0) / 50.0) as usize).min(9);
            decile_counts[idx] += 1;
        }
        let expected = n as f64 / 10.0;
        let sigma = (n as f64 * 0.1 * 0.9).sqrt();
        for &count in &decile_counts {
            assert!((count as f64 - expected).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn rejection_path_matches_truncated_path() {
        let session = one_trial_session(vec![600.0, 700.0, 400.0, 900.0], 800.0);
        let n = 100_000usize;
        let mut ra = rng(7);
        let mut rb = rng(8);
        let mut counts_a = [0usize; 10];
        let mut counts_b = [0usize; 10];
        for _ in 0..n {
            let qa = resample_quiescence(&session, &mut ra).unwrap()[0];
            let qb = resample_quiescence_rejection(&session, &mut rb).unwrap()[0];
            counts_a[(((qa - 700.0) / 20.0) as usize).min(9)] += 1;
            counts_b[(((qb - 700.0) / 20.0) as usize).min(9)] += 1;
        }
        // Two-sample comparison per decile at 3 sigma.
        let p = 0.1;
        let sigma = (2.0 * n as f64 * p * (1.0 - p)).sqrt();
        for (a, b) in counts_a.iter().zip(&counts_b) {
            assert!(
                (*a as f64 - *b as f64).abs() < 3.0 * sigma,
                "deciles {a} vs {b}"
            );
        }
    }

    #[test]
    fn mean_reaction_time_hand_examples() {
        let session = one_trial_session(vec![900.0], 600.0);
        assert_eq!(mean_reaction_time(&session, &[600.0]).unwrap(), 300.0);

        let session = RtSession {
            config: RtConfig {
                n_trials: 2,
                ..config()
            },
            trials: vec![
                RtTrial {
                    gaps_ms: vec![600.0, 800.0],
                    q_ms: 700.0,
                },
                RtTrial {
                    gaps_ms: vec![950.0],
                    q_ms: 500.1,
                },
            ],
        };
        let stat = mean_reaction_time(&session, &[700.0, 500.1]).unwrap();
        assert!((stat - (100.0 + 449.9) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_q_is_rejected() {
        let session = one_trial_session(vec![600.0, 700.0, 400.0, 900.0], 800.0);
        // 650 is below the longest non-final gap.
        let err = mean_reaction_time(&session, &[650.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        // Length mismatch.
        let err = mean_reaction_time(&session, &[]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn response_strategy_is_faster_than_random() {
        let cfg = config();
        let sessions = 1000usize;
        let mut r = rng(11);
        let mean_of_strategy = |strategy: &RtStrategy<f64>, r: &mut RngStream| {
            let mut total = 0.0;
            for _ in 0..sessions {
                let session = simulate_rt_session(strategy, &cfg, r).unwrap();
                let q: Vec<f64> = session.trials.iter().map(|t| t.q_ms).collect();
                total += mean_reaction_time(&session, &q).unwrap();
            }
            total / sessions as f64
        };
        let response = mean_of_strategy(&RtStrategy::response(), &mut r);
        let random = mean_of_strategy(&RtStrategy::random(), &mut r);
        assert!(
            response < random,
            "response {response} should beat random {random}"
        );
    }

    #[test]
    fn impossible_strategy_overflows() {
        let cfg = config();
        let strategy = RtStrategy::Random {
            mean_ms: 1.5,
            sd_ms: 0.01,
        };
        let err = simulate_rt_session(&strategy, &cfg, &mut rng(3)).unwrap_err();
        assert!(matches!(err, Error::SimulationOverflow(_)));
    }

    #[test]
    fn rt_crt_is_reproducible_and_lower_tailed() {
        let cfg = RtConfig {
            n_trials: 20,
            ..config()
        };
        let session = simulate_rt_session(&RtStrategy::random(), &cfg, &mut rng(9)).unwrap();
        let a = rt_crt(&session, 199, SeedSpec::new(5, 1)).unwrap();
        let b = rt_crt(&session, 199, SeedSpec::new(5, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tail, TailDirection::Lower);
        assert_eq!(a.n_resamples(), 199);
    }

    #[test]
    fn task_runs_on_f32_too() {
        let cfg = RtConfig::<f32> {
            n_trials: 10,
            ..RtConfig::default()
        };
        let session =
            simulate_rt_session(&RtStrategy::<f32>::random(), &cfg, &mut rng(21)).unwrap();
        session.validate().unwrap();
        let outcome = rt_crt(&session, 49, SeedSpec::new(21, 1)).unwrap();
        assert_eq!(outcome.p.denom(), 50);
    }

    #[test]
    fn session_json_schema() {
        let cfg = RtConfig {
            n_trials: 2,
            ..config()
        };
        let session = simulate_rt_session(&RtStrategy::random(), &cfg, &mut rng(10)).unwrap();
        let value = serde_json::to_value(&session).unwrap();
        assert!(value["config"]["q_low_ms"].is_number());
        assert!(value["config"]["q_high_ms"].is_number());
        assert!(value["config"]["n_trials"].is_number());
        assert!(value["trials"][0]["gaps_ms"].is_array());
        assert!(value["trials"][0]["q_ms"].is_number());
        let back: RtSession<f64> = serde_json::from_value(value).unwrap();
        assert_eq!(back, session);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Every resampled q is feasible, and the original q shares the range.
        #[test]
        fn resampled_q_is_always_feasible(seed in any::<u64>(), strategy_idx in 0usize..3) {
            let strategy: RtStrategy<f64> = [
                RtStrategy::random(),
                RtStrategy::response(),
                RtStrategy::deceleration(),
            ][strategy_idx];
            let cfg = RtConfig { n_trials: 30, ..RtConfig::default() };
            let mut r = SeedSpec::new(seed, 0).stream();
            let session = simulate_rt_session(&strategy, &cfg, &mut r).unwrap();
            let resampled = resample_quiescence(&session, &mut r).unwrap();
            for (trial, &q_new) in session.trials.iter().zip(&resampled) {
                let range = feasible_range(trial, &cfg).unwrap();
                prop_assert!(range.contains(trial.q_ms));
                prop_assert!(range.contains(q_new));
                // Replay under the new q rewards the same press.
                prop_assert_eq!(
                    first_rewarded_press(&trial.gaps_ms, q_new),
                    Some(trial.gaps_ms.len() - 1)
                );
            }
        }

        /// Adding a constant to every final gap shifts the statistic by it.
        #[test]
        fn statistic_is_translation_consistent(seed in any::<u64>(), shift_ms in 1.0f64..2000.0) {
            let cfg = RtConfig { n_trials: 25, ..RtConfig::default() };
            let mut r = SeedSpec::new(seed, 1).stream();
            let session = simulate_rt_session(&RtStrategy::random(), &cfg, &mut r).unwrap();
            let q: Vec<f64> = session.trials.iter().map(|t| t.q_ms).collect();
            let base = mean_reaction_time(&session, &q).unwrap();

            let mut shifted = session.clone();
            for trial in &mut shifted.trials {
                let last = trial.gaps_ms.len() - 1;
                trial.gaps_ms[last] += shift_ms;
            }
            let moved = mean_reaction_time(&shifted, &q).unwrap();
            prop_assert!((moved - (base + shift_ms)).abs() < 1e-9 * (1.0 + base.abs() + shift_ms));
        }
    }
}
