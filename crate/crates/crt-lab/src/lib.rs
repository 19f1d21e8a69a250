//! Exact conditional randomization tests for sequential behavioral
//! experiments.
//!
//! In many behavioral experiments the stimulus on a trial depends on the
//! subject's earlier responses, so the stimulus sequence cannot simply be
//! regenerated to build a null ensemble. This crate implements the fix:
//! resample the experimenter-randomized variables from their conditional
//! distribution given everything else observed, which remains valid when the
//! null hypothesis ("the subject cannot detect the stimulus") is true and
//! yields a test that is exact for any statistic at any sample size.
//!
//! The crate ships two complete task environments:
//!
//! - [`rt`]: a reaction-time task where the stimulus appears after a random
//!   quiescence interval; quiescence intervals are resampled uniformly on
//!   each trial's feasible range.
//! - [`choice`]: a probabilistic two-sided choice task with block structure
//!   and stochastic rewards; stimuli are resampled per trial from the
//!   posterior given block, choice, and reward. A tangent resampler (history
//!   only, no future conditioning) is included as the comparison that fails
//!   for delayed statistics.
//!
//! [`report`] drives batches of simulated sessions and aggregates rejection
//! rates, and the `crt-lab` binary exposes the whole thing on the command
//! line. The core math is generic over the scalar type via [`scalar::Scalar`]
//! (f32 or f64); the aliases below fix f64, which is what the harness uses.

pub mod choice;
pub mod crt;
pub mod error;
pub mod report;
pub mod rt;
pub mod scalar;
pub mod stream;

pub use crate::error::{Error, Result};
pub use crate::stream::{derive_stream, RngStream, SeedSpec};

/// f64 test outcome, the harness default.
pub type TestOutcome = crate::crt::TestOutcome<f64>;

pub use crate::crt::{p_value, run_crt, PValue, TailDirection};

/// f64 reaction-time task types.
pub type RtConfig = crate::rt::RtConfig<f64>;
pub type RtTrial = crate::rt::RtTrial<f64>;
pub type RtSession = crate::rt::RtSession<f64>;
pub type RtStrategy = crate::rt::RtStrategy<f64>;
pub type FeasibleRange = crate::rt::FeasibleRange<f64>;

/// f64 choice task types.
pub type ChoiceConfig = crate::choice::ChoiceConfig<f64>;
pub type ChoiceSession = crate::choice::ChoiceSession<f64>;
pub type AgentParams = crate::choice::AgentParams<f64>;
pub type AgentState = crate::choice::AgentState<f64>;

pub use crate::choice::{ChoiceStatistic, Side, StimulusResampler};
pub use crate::report::{
    emit_report, replication_table, report_json, run_experiment, run_replication, Band,
    ExperimentReport, ExperimentSpec, ReplicationRow, ReportFormat, ResamplerKind, Scenario,
    StatisticKind, Task,
};
