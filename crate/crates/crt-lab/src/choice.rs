//! Probabilistic choice task: block/stimulus/reward generator, learning-agent
//! simulators, the Markov-boundary conditional resampler, the tangent
//! resampler, and the two test statistics.
//!
//! Per trial, a stimulus appears on the block side with probability `alpha`,
//! the agent chooses a side, and a reward is delivered with probability
//! `beta` for a choice matching the stimulus and `gamma` otherwise. Under the
//! null hypothesis the agent cannot see the stimulus, so the stimulus is
//! independent of everything else given that trial's block, choice, and
//! reward, and the conditional law of the whole stimulus sequence factors
//! into per-trial posteriors:
//!
//! `P[s | b, c, r]  proportional to  P[s | b] * P[r | s, c]`
//!
//! Resampling stimuli from those posteriors yields an exact test for any
//! statistic. The tangent resampler instead redraws each stimulus from
//! `P[s | b]` alone, ignoring choices and rewards; it is kept as a comparator
//! because it fails for statistics that pick up the stimulus-to-reward-to-
//! later-choice path.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::crt::{run_crt, TailDirection, TestOutcome};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stream::{RngStream, SeedSpec};

/// One side of the task, coded -1 (left) / +1 (right) on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn sign_i64(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }

    pub fn sign<F: Scalar>(self) -> F {
        F::cast(self.sign_i64() as f64)
    }
}

impl From<Side> for i8 {
    fn from(side: Side) -> i8 {
        side.sign_i64() as i8
    }
}

impl TryFrom<i8> for Side {
    type Error = String;

    fn try_from(value: i8) -> std::result::Result<Side, String> {
        match value {
            -1 => Ok(Side::Left),
            1 => Ok(Side::Right),
            other => Err(format!("side must be -1 or 1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoiceConfig<F> {
    /// Probability the stimulus matches the block side.
    pub alpha: F,
    /// Reward probability for a choice matching the stimulus.
    pub beta: F,
    /// Reward probability for a non-matching choice.
    pub gamma: F,
    pub n_trials: usize,
    pub block_len_min: usize,
    pub block_len_max: usize,
}

pub const DEFAULT_CHOICE_TRIALS: usize = 500;

impl<F: Scalar> Default for ChoiceConfig<F> {
    fn default() -> Self {
        ChoiceConfig {
            alpha: F::cast(0.8),
            beta: F::cast(0.8),
            gamma: F::cast(0.2),
            n_trials: DEFAULT_CHOICE_TRIALS,
            block_len_min: 20,
            block_len_max: 100,
        }
    }
}

impl<F: Scalar> ChoiceConfig<F> {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !p.is_finite() || p < F::zero() || p > F::one() {
                return Err(Error::invalid(format!(
                    "choice config: {name} must lie in [0, 1]"
                )));
            }
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("choice config: n_trials must be >= 1"));
        }
        if !(1 <= self.block_len_min && self.block_len_min <= self.block_len_max) {
            return Err(Error::invalid(
                "choice config: require 1 <= block_len_min <= block_len_max",
            ));
        }
        Ok(())
    }
}

/// Aligned per-trial records of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceSession<F> {
    pub config: ChoiceConfig<F>,
    pub blocks: Vec<Side>,
    pub stimuli: Vec<Side>,
    pub choices: Vec<Side>,
    #[serde(with = "reward_coding")]
    pub rewards: Vec<bool>,
}

impl<F: Scalar> ChoiceSession<F> {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let n = self.config.n_trials;
        if self.blocks.len() != n
            || self.stimuli.len() != n
            || self.choices.len() != n
            || self.rewards.len() != n
        {
            return Err(Error::invalid(format!(
                "choice session: sequences must all have length {n}"
            )));
        }
        Ok(())
    }
}

/// Rewards travel as 0/1 integers in JSON.
mod reward_coding {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rewards: &[bool], ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(rewards.len()))?;
        for &r in rewards {
            seq.serialize_element(&u8::from(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<bool>, D::Error> {
        Vec::<u8>::deserialize(de)?
            .into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!(
                    "reward must be 0 or 1, got {other}"
                ))),
            })
            .collect()
    }
}

/// Learning-agent parameters. `stim_weight = 0` is the blind agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentParams<F> {
    pub rl_rate: F,
    pub habit_rate: F,
    pub rl_weight: F,
    pub habit_weight: F,
    pub stim_weight: F,
}

impl<F: Scalar> AgentParams<F> {
    /// Agent that learns from rewards and habit but never sees the stimulus.
    pub fn blind() -> Self {
        AgentParams {
            rl_rate: F::cast(0.3),
            habit_rate: F::cast(0.2),
            rl_weight: F::cast(3.0),
            habit_weight: F::cast(1.0),
            stim_weight: F::zero(),
        }
    }

    /// Same learning model plus direct stimulus detection.
    pub fn sighted() -> Self {
        AgentParams {
            stim_weight: F::cast(2.0),
            ..Self::blind()
        }
    }

    pub fn is_blind(&self) -> bool {
        self.stim_weight == F::zero()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, rate) in [("rl_rate", self.rl_rate), ("habit_rate", self.habit_rate)] {
            if !rate.is_finite() || rate <= F::zero() || rate > F::one() {
                return Err(Error::invalid(format!(
                    "agent params: {name} must lie in (0, 1]"
                )));
            }
        }
        for (name, w) in [
            ("rl_weight", self.rl_weight),
            ("habit_weight", self.habit_weight),
            ("stim_weight", self.stim_weight),
        ] {
            if !w.is_finite() || w < F::zero() {
                return Err(Error::invalid(format!("agent params: {name} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Per-side value and habit estimates, indexed left = 0, right = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState<F> {
    pub value: [F; 2],
    pub habit: [F; 2],
}

impl<F: Scalar> Default for AgentState<F> {
    fn default() -> Self {
        let half = F::cast(0.5);
        AgentState {
            value: [half, half],
            habit: [half, half],
        }
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Probability the agent chooses right: logistic in the value difference,
/// habit difference, and (for sighted agents) the stimulus side.
pub fn choice_probability<F: Scalar>(
    state: &AgentState<F>,
    params: &AgentParams<F>,
    stimulus: Option<Side>,
) -> F {
    let rl = params.rl_weight * (state.value[1] - state.value[0]);
    let habit = params.habit_weight * (state.habit[1] - state.habit[0]);
    let stim = stimulus.map_or(F::zero(), |s| params.stim_weight * s.sign());
    let logit = rl + habit + stim;
    F::one() / (F::one() + (-logit).exp())
}

/// Draw the agent's choice; the returned continuation folds the realized
/// reward into the state. Value moves toward the reward on the chosen side
/// only; habit moves toward 1 on the chosen side and 0 on the other,
/// rewarded or not. Blind agents are called with `stimulus = None`, so their
/// choice structurally cannot depend on the stimulus.
pub fn agent_step<F: Scalar, R: Rng + ?Sized>(
    state: &AgentState<F>,
    params: &AgentParams<F>,
    stimulus: Option<Side>,
    rng: &mut R,
) -> (Side, impl FnOnce(bool) -> AgentState<F>) {
    let p_right = choice_probability(state, params, stimulus);
    let choice = if F::unit_uniform(rng) < p_right {
        Side::Right
    } else {
        Side::Left
    };
    let mut next = *state;
    let rl_rate = params.rl_rate;
    let habit_rate = params.habit_rate;
    let update = move |rewarded: bool| {
        let reward = if rewarded { F::one() } else { F::zero() };
        let chosen = side_index(choice);
        next.value[chosen] = next.value[chosen] + rl_rate * (reward - next.value[chosen]);
        for side in [Side::Left, Side::Right] {
            let i = side_index(side);
            let target = if side == choice { F::one() } else { F::zero() };
            next.habit[i] = next.habit[i] + habit_rate * (target - next.habit[i]);
        }
        next
    };
    (choice, update)
}

/// Alternating-side blocks, lengths uniform on the configured range, first
/// side a fair draw, truncated to the session length. Synthesized up front,
/// before any trial runs.
pub fn generate_blocks<F: Scalar>(
    config: &ChoiceConfig<F>,
    rng: &mut RngStream,
) -> Result<Vec<Side>> {
    config.validate()?;
    let first = if rng.random::<bool>() {
        Side::Right
    } else {
        Side::Left
    };
    let min = config.block_len_min;
    let max = config.block_len_max;
    Ok(alternating_blocks(first, config.n_trials, || {
        rng.random_range(min..=max)
    }))
}

fn alternating_blocks(
    first: Side,
    n_trials: usize,
    mut next_len: impl FnMut() -> usize,
) -> Vec<Side> {
    let mut out = Vec::with_capacity(n_trials);
    let mut side = first;
    while out.len() < n_trials {
        let len = next_len().min(n_trials - out.len());
        out.extend(std::iter::repeat_n(side, len));
        side = side.flipped();
    }
    out
}

/// Simulate one session. Per trial the draw order is fixed: stimulus, then
/// choice, then reward, all from the single stream `seed` names.
pub fn simulate_choice_session<F: Scalar>(
    params: &AgentParams<F>,
    config: &ChoiceConfig<F>,
    seed: SeedSpec,
) -> Result<ChoiceSession<F>> {
    params.validate()?;
    config.validate()?;
    let mut rng = seed.stream();
    let blocks = generate_blocks(config, &mut rng)?;
    let n = config.n_trials;
    let mut stimuli = Vec::with_capacity(n);
    let mut choices = Vec::with_capacity(n);
    let mut rewards = Vec::with_capacity(n);
    let mut state = AgentState::default();
    for &block in &blocks {
        let stimulus = if F::unit_uniform(&mut rng) < config.alpha {
            block
        } else {
            block.flipped()
        };
        let visible = if params.is_blind() {
            None
        } else {
            Some(stimulus)
        };
        let (choice, update) = agent_step(&state, params, visible, &mut rng);
        let reward_prob = if choice == stimulus {
            config.beta
        } else {
            config.gamma
        };
        let rewarded = F::unit_uniform(&mut rng) < reward_prob;
        state = update(rewarded);
        stimuli.push(stimulus);
        choices.push(choice);
        rewards.push(rewarded);
    }
    Ok(ChoiceSession {
        config: *config,
        blocks,
        stimuli,
        choices,
        rewards,
    })
}

fn posterior<F: Scalar>(
    block: Side,
    choice: Side,
    rewarded: bool,
    config: &ChoiceConfig<F>,
) -> Result<F> {
    let likelihood = |stimulus: Side| {
        let reward_prob = if choice == stimulus {
            config.beta
        } else {
            config.gamma
        };
        if rewarded {
            reward_prob
        } else {
            F::one() - reward_prob
        }
    };
    let on_block = config.alpha * likelihood(block);
    let off_block = (F::one() - config.alpha) * likelihood(block.flipped());
    let total = on_block + off_block;
    if total <= F::zero() {
        return Err(Error::InconsistentObservation(format!(
            "both stimulus sides impossible for block {}, choice {}, reward {}",
            block.sign_i64(),
            choice.sign_i64(),
            u8::from(rewarded)
        )));
    }
    Ok(on_block / total)
}

/// Probability that the stimulus was on the block side given that trial's
/// block, choice, and reward: prior `alpha` times the reward likelihood,
/// normalized over the two stimulus values.
pub fn posterior_stimulus<F: Scalar>(
    block: Side,
    choice: Side,
    rewarded: bool,
    config: &ChoiceConfig<F>,
) -> Result<F> {
    config.validate()?;
    posterior(block, choice, rewarded, config)
}

/// Redraw every stimulus from its per-trial posterior given block, choice,
/// and reward. Because the reward is part of the conditioning set, resampled
/// stimuli are consistent with the rewards delivered after them; this is the
/// exact conditional law of the stimulus sequence under the null.
pub fn conditional_resample_stimuli<F: Scalar>(
    session: &ChoiceSession<F>,
    rng: &mut RngStream,
) -> Result<Vec<Side>> {
    session.validate()?;
    let mut out = Vec::with_capacity(session.blocks.len());
    for ((&block, &choice), &rewarded) in session
        .blocks
        .iter()
        .zip(&session.choices)
        .zip(&session.rewards)
    {
        let p = posterior(block, choice, rewarded, &session.config)?;
        let side = if F::unit_uniform(rng) < p {
            block
        } else {
            block.flipped()
        };
        out.push(side);
    }
    Ok(out)
}

/// Redraw every stimulus from `P[s | b]` alone: the block side with
/// probability `alpha`, ignoring choices and rewards entirely. Not an exact
/// resampler; kept as the tangent-randomization comparator.
pub fn tangent_resample_stimuli<F: Scalar>(
    session: &ChoiceSession<F>,
    rng: &mut RngStream,
) -> Result<Vec<Side>> {
    session.validate()?;
    Ok(session
        .blocks
        .iter()
        .map(|&block| {
            if F::unit_uniform(rng) < session.config.alpha {
                block
            } else {
                block.flipped()
            }
        })
        .collect())
}

/// Same-trial stimulus/choice correlation: sum over trials of s*c in +-1
/// coding.
pub fn stat_same_trial<F: Scalar>(stimuli: &[Side], choices: &[Side]) -> Result<F> {
    if stimuli.len() != choices.len() {
        return Err(Error::invalid(format!(
            "stat_same_trial: {} stimuli vs {} choices",
            stimuli.len(),
            choices.len()
        )));
    }
    let sum: i64 = stimuli
        .iter()
        .zip(choices)
        .map(|(s, c)| s.sign_i64() * c.sign_i64())
        .sum();
    Ok(F::cast(sum as f64))
}

/// Correlation of the stimulus with the next trial's choice: sum over t of
/// s_t * c_{t+1}, the final stimulus having no partner.
pub fn stat_delayed<F: Scalar>(stimuli: &[Side], choices: &[Side]) -> Result<F> {
    if stimuli.len() != choices.len() {
        return Err(Error::invalid(format!(
            "stat_delayed: {} stimuli vs {} choices",
            stimuli.len(),
            choices.len()
        )));
    }
    if stimuli.len() < 2 {
        return Err(Error::invalid("stat_delayed: need at least 2 trials"));
    }
    let sum: i64 = stimuli
        .iter()
        .zip(&choices[1..])
        .map(|(s, c)| s.sign_i64() * c.sign_i64())
        .sum();
    Ok(F::cast(sum as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceStatistic {
    SameTrial,
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StimulusResampler {
    Conditional,
    Tangent,
}

/// Randomization test for a choice session with the selected statistic and
/// resampler, upper tail (stimulus-driven agents push the correlation up).
pub fn choice_crt<F: Scalar>(
    session: &ChoiceSession<F>,
    statistic: ChoiceStatistic,
    resampler: StimulusResampler,
    n_resamples: usize,
    seed: SeedSpec,
) -> Result<TestOutcome<F>> {
    session.validate()?;
    let stat = |stimuli: &Vec<Side>| match statistic {
        ChoiceStatistic::SameTrial => stat_same_trial(stimuli, &session.choices),
        ChoiceStatistic::Delayed => stat_delayed(stimuli, &session.choices),
    };
    let resample = |_: &Vec<Side>, rng: &mut RngStream| match resampler {
        StimulusResampler::Conditional => conditional_resample_stimuli(session, rng),
        StimulusResampler::Tangent => tangent_resample_stimuli(session, rng),
    };
    run_crt(
        &session.stimuli,
        stat,
        resample,
        n_resamples,
        TailDirection::Upper,
        seed,
    )
}
