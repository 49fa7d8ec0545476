use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use courier::config::{apply_config_file, Scenario, SimConfig, ALL_SCENARIOS};
use courier::engine;
use courier::harness::{
    self, ExperimentSpec, SweepVar,
};

/// Cooperative grid-logistics simulator with emotional trust-based
/// delegation.
#[derive(Parser)]
#[command(name = "courier", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single simulation run and emit its event log as JSONL.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the event log here instead of stdout.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run a parameter sweep over scenarios with replications.
    Experiment {
        #[command(flatten)]
        common: CommonArgs,
        /// Variable to sweep: idle_fraction | privacy_prob.
        #[arg(long)]
        sweep: SweepVar,
        /// Sweep values (comma separated). Default: 0,0.2,0.4,0.6,0.8.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Scenarios to compare (comma separated). Default: all three.
        #[arg(long, value_delimiter = ',')]
        scenarios: Option<Vec<Scenario>>,
        /// Replications per (scenario, value) cell.
        #[arg(long, default_value_t = 100)]
        reps: u32,
        /// Output CSV path; a `<out>.summary.csv` sibling is written too.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Configuration sources shared by both subcommands. Precedence:
/// flags > config file > built-in defaults.
#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long = "grid_size")]
    grid_size: Option<u32>,
    #[arg(long = "n_packages")]
    n_packages: Option<u32>,
    #[arg(long = "n_agents")]
    n_agents: Option<u32>,
    #[arg(long = "idle_fraction")]
    idle_fraction: Option<f64>,
    #[arg(long = "privacy_prob")]
    privacy_prob: Option<f64>,
    #[arg(long = "p_neurotic")]
    p_neurotic: Option<f64>,
    #[arg(long = "p_psychotic")]
    p_psychotic: Option<f64>,
    #[arg(long = "privacy_penalty")]
    privacy_penalty: Option<f64>,
    #[arg(long = "ontime_reward")]
    ontime_reward: Option<f64>,
    #[arg(long = "delay_penalty")]
    delay_penalty: Option<f64>,
    #[arg(long = "base_threshold")]
    base_threshold: Option<f64>,
    #[arg(long = "initial_trust")]
    initial_trust: Option<f64>,
    /// notrust | noemotions | emotionaltrust.
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long = "deadline_slack")]
    deadline_slack: Option<f64>,
    #[arg(long = "cycle_cap")]
    cycle_cap: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "delta_e")]
    delta_e: Option<f64>,
    #[arg(long = "phi_e")]
    phi_e: Option<f64>,
    #[arg(long = "v_p")]
    v_p: Option<f64>,
    #[arg(long = "v_a")]
    v_a: Option<f64>,
    #[arg(long = "v_d")]
    v_d: Option<f64>,
    #[arg(long = "decay_toward_zero")]
    decay_toward_zero: Option<bool>,
}

impl CommonArgs {
    fn build_config(&self) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            apply_config_file(&mut cfg, &text)
                .with_context(|| format!("parsing config file {}", path.display()))?;
        }
        macro_rules! apply {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        apply!(
            grid_size, n_packages, n_agents, idle_fraction, privacy_prob,
            p_neurotic, p_psychotic, privacy_penalty, ontime_reward,
            delay_penalty, base_threshold, initial_trust, scenario,
            deadline_slack, cycle_cap, seed, delta_e, phi_e, v_p, v_a, v_d,
            decay_toward_zero,
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fail before any run starts if the output path cannot be written.
fn check_writable(path: &Path) -> Result<()> {
    fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("output path {} is not writable", path.display()))?;
    Ok(())
}

fn cmd_run(common: &CommonArgs, log: Option<&Path>) -> Result<()> {
    let cfg = common.build_config()?;
    if let Some(path) = log {
        check_writable(path)?;
    }
    let result = engine::run(cfg)?;
    let jsonl = result.log.to_jsonl();
    match log {
        Some(path) => fs::write(path, jsonl)
            .with_context(|| format!("writing event log to {}", path.display()))?,
        None => std::io::stdout().write_all(jsonl.as_bytes())?,
    }
    eprintln!(
        "cycles={} total_reward={} on_time={} late={} disclosures={} \
         cfp_sent={} cfp_accepted={} cfp_refused={} terminated={}",
        result.cycles,
        result.total_reward,
        result.on_time,
        result.late,
        result.disclosures,
        result.cfp_sent,
        result.cfp_accepted,
        result.cfp_refused,
        result.terminated
    );
    if !result.terminated {
        bail!("run hit the cycle cap with undelivered packages");
    }
    Ok(())
}

fn cmd_experiment(
    common: &CommonArgs,
    sweep: SweepVar,
    values: Option<Vec<f64>>,
    scenarios: Option<Vec<Scenario>>,
    reps: u32,
    out: &Path,
) -> Result<()> {
    let base = common.build_config()?;
    let mut spec = ExperimentSpec::default_for(sweep, base);
    if let Some(values) = values {
        spec.values = values;
    }
    spec.scenarios = scenarios.unwrap_or_else(|| ALL_SCENARIOS.to_vec());
    spec.replications = reps;
    spec.validate()?;

    let summary_path = out.with_extension("summary.csv");
    check_writable(out)?;
    check_writable(&summary_path)?;

    let rows = harness::run_experiment(&spec)?;
    fs::write(out, harness::rows_to_csv(&rows))
        .with_context(|| format!("writing rows to {}", out.display()))?;
    let summary = harness::summarize(&rows);
    fs::write(&summary_path, harness::summary_to_csv(&summary))
        .with_context(|| format!("writing summary to {}", summary_path.display()))?;
    print!("{}", harness::summary_table(sweep, &summary));

    let stuck = rows.iter().filter(|r| !r.terminated).count();
    if stuck > 0 {
        bail!("{stuck} runs hit the cycle cap with undelivered packages");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { common, log } => cmd_run(common, log.as_deref()),
        Command::Experiment {
            common,
            sweep,
            values,
            scenarios,
            reps,
            out,
        } => cmd_experiment(
            common,
            *sweep,
            values.clone(),
            scenarios.clone(),
            *reps,
            out,
        ),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
