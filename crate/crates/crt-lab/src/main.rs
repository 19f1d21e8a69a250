use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crt_lab::choice::simulate_choice_session;
use crt_lab::rt::simulate_rt_session;
use crt_lab::{
    emit_report, replication_table, run_experiment, run_replication, AgentParams, ChoiceConfig,
    Error, ExperimentSpec, ReportFormat, ResamplerKind, Result, RtConfig, RtStrategy, Scenario,
    SeedSpec, StatisticKind, Task,
};

#[derive(Parser)]
#[command(
    name = "crt-lab",
    version,
    about = "Conditional randomization tests for sequential behavioral experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one batch experiment and emit its report.
    Run(RunArgs),
    /// Run the eight-cell replication grid and print its summary table.
    Replicate(ReplicateArgs),
    /// Simulate a single session and emit its JSON.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    task: Task,
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Choice task only; defaults to conditional.
    #[arg(long, value_enum)]
    resampler: Option<ResamplerKind>,
    #[arg(long, value_enum)]
    statistic: StatisticKind,
    #[arg(long, default_value_t = 1000)]
    sessions: usize,
    #[arg(long, default_value_t = 999)]
    resamples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated rejection levels, e.g. 0.05,0.01.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the per-session trial count.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct ReplicateArgs {
    #[arg(long, default_value_t = 1000)]
    sessions: usize,
    /// Directory for the eight JSON reports; reports are not written when
    /// omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    task: Task,
    #[arg(long, value_enum)]
    scenario: Scenario,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Session index within the seed's experiment, as `run` would number it.
    #[arg(long, default_value_t = 0)]
    session: usize,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let is_info = matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = err.print();
            // Bad flags are configuration errors.
            std::process::exit(if is_info { 0 } else { 1 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Replicate(args) => cmd_replicate(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let rt_config = match (args.task, args.trials) {
        (Task::Rt, Some(n_trials)) => Some(RtConfig {
            n_trials,
            ..RtConfig::default()
        }),
        _ => None,
    };
    let choice_config = match (args.task, args.trials) {
        (Task::Choice, Some(n_trials)) => Some(ChoiceConfig {
            n_trials,
            ..ChoiceConfig::default()
        }),
        _ => None,
    };
    let spec = ExperimentSpec {
        task: args.task,
        scenario: args.scenario,
        resampler: args.resampler,
        statistic: args.statistic,
        n_sessions: args.sessions,
        n_resamples: args.resamples,
        alpha_levels: args.alpha,
        master_seed: args.seed,
        rt_config,
        choice_config,
    };
    let report = run_experiment(&spec)?;
    emit_report(&report, args.format, args.out.as_deref())?;
    if let Some(path) = &args.out {
        for r in &report.rejections {
            println!(
                "alpha {}: rejected {}/{} (rate {})",
                r.alpha, r.rejections, r.n_sessions, r.rate
            );
        }
        println!(
            "report written to {} in {:.2}s",
            path.display(),
            report.wall_time.as_secs_f64()
        );
    }
    Ok(())
}

fn cmd_replicate(args: ReplicateArgs) -> Result<()> {
    let rows = run_replication(args.sessions, 999)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for row in &rows {
            let path = dir.join(format!("{}.json", row.label));
            emit_report(&row.report, ReportFormat::Json, Some(&path))?;
        }
    }
    print!("{}", replication_table(&rows));
    if let Some(dir) = &args.out {
        println!("reports written to {}", dir.display());
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    // Stream 2i simulates session i in `run`; mirror that numbering here.
    let seed = SeedSpec::new(args.seed, 2 * args.session as u64);
    let json = match args.task {
        Task::Rt => {
            let strategy = match args.scenario {
                Scenario::Random => RtStrategy::random(),
                Scenario::Response => RtStrategy::response(),
                Scenario::Deceleration => RtStrategy::deceleration(),
                other => {
                    return Err(Error::config(format!(
                        "scenario {other:?} is not an rt strategy"
                    )))
                }
            };
            let config = RtConfig {
                n_trials: args.trials.unwrap_or(RtConfig::default().n_trials),
                ..RtConfig::default()
            };
            let session = simulate_rt_session(&strategy, &config, &mut seed.stream())?;
            serde_json::to_string_pretty(&session)?
        }
        Task::Choice => {
            let params = match args.scenario {
                Scenario::Blind => AgentParams::blind(),
                Scenario::Sighted => AgentParams::sighted(),
                other => {
                    return Err(Error::config(format!(
                        "scenario {other:?} is not a choice agent"
                    )))
                }
            };
            let config = ChoiceConfig {
                n_trials: args.trials.unwrap_or(ChoiceConfig::default().n_trials),
                ..ChoiceConfig::default()
            };
            let session = simulate_choice_session(&params, &config, seed)?;
            serde_json::to_string_pretty(&session)?
        }
    };
    match &args.out {
        Some(path) => write_text(path, &format!("{json}\n"))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
