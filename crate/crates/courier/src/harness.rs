//! Batch experiment runner: parameter sweeps over scenarios with
//! replications, CSV emission and summary statistics.
//!
//! Replication seeds are `base seed + replication index`, so any single
//! run can be reproduced in isolation with the `run` subcommand.
//! Replications execute on a worker pool; output rows are sorted into
//! canonical order (scenario, sweep value, replication) regardless of
//! completion order, so the CSV bytes are independent of scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, Scenario, SimConfig, ALL_SCENARIOS};
use crate::engine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    IdleFraction,
    PrivacyProb,
}

impl SweepVar {
    pub fn key(&self) -> &'static str {
        match self {
            SweepVar::IdleFraction => "idle_fraction",
            SweepVar::PrivacyProb => "privacy_prob",
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "idle_fraction" => Ok(SweepVar::IdleFraction),
            "privacy_prob" => Ok(SweepVar::PrivacyProb),
            other => Err(format!(
                "unknown sweep variable `{other}`, expected idle_fraction | privacy_prob"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub sweep: SweepVar,
    pub values: Vec<f64>,
    pub scenarios: Vec<Scenario>,
    pub replications: u32,
    pub base: SimConfig,
}

impl ExperimentSpec {
    /// Both sweeps over their default grid, all scenarios, 100
    /// replications each.
    pub fn default_for(sweep: SweepVar, base: SimConfig) -> Self {
        let values = match sweep {
            SweepVar::IdleFraction => vec![0.0, 0.2, 0.4, 0.6, 0.8],
            SweepVar::PrivacyProb => vec![0.0, 0.2, 0.4, 0.6, 0.8],
        };
        ExperimentSpec {
            sweep,
            values,
            scenarios: ALL_SCENARIOS.to_vec(),
            replications: 100,
            base,
        }
    }

    /// The simulation config of one cell (scenario × sweep value) and
    /// replication.
    pub fn cell_config(&self, scenario: Scenario, value: f64, replication: u32) -> SimConfig {
        let mut cfg = self.base.clone();
        cfg.scenario = scenario;
        match self.sweep {
            SweepVar::IdleFraction => cfg.idle_fraction = value,
            SweepVar::PrivacyProb => cfg.privacy_prob = value,
        }
        cfg.seed = self.base.seed + replication as u64;
        cfg
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replications == 0 {
            return Err(ConfigError::OutOfRange {
                key: "reps".into(),
                value: "0".into(),
                range: ">= 1".into(),
            });
        }
        if self.values.is_empty() {
            return Err(ConfigError::OutOfRange {
                key: "values".into(),
                value: "(empty)".into(),
                range: "at least one sweep value".into(),
            });
        }
        if self.scenarios.is_empty() {
            return Err(ConfigError::OutOfRange {
                key: "scenarios".into(),
                value: "(empty)".into(),
                range: "at least one scenario".into(),
            });
        }
        for scenario in &self.scenarios {
            for &value in &self.values {
                self.cell_config(*scenario, value, 0).validate()?;
            }
        }
        Ok(())
    }
}

/// One completed run inside a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: Scenario,
    pub value: f64,
    pub replication: u32,
    pub seed: u64,
    pub total_reward: f64,
    pub cycles: u64,
    pub on_time: u32,
    pub late: u32,
    pub disclosures: u32,
    pub cfp_sent: u32,
    pub cfp_accepted: u32,
    pub cfp_refused: u32,
    pub terminated: bool,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, ConfigError> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for &scenario in &spec.scenarios {
        for &value in &spec.values {
            for replication in 0..spec.replications {
                tasks.push((scenario, value, replication));
            }
        }
    }
    let mut rows: Vec<ResultRow> = tasks
        .par_iter()
        .map(|&(scenario, value, replication)| {
            let cfg = spec.cell_config(scenario, value, replication);
            let seed = cfg.seed;
            let result = engine::run(cfg).expect("validated in spec.validate");
            ResultRow {
                scenario,
                value,
                replication,
                seed,
                total_reward: result.total_reward,
                cycles: result.cycles,
                on_time: result.on_time,
                late: result.late,
                disclosures: result.disclosures,
                cfp_sent: result.cfp_sent,
                cfp_accepted: result.cfp_accepted,
                cfp_refused: result.cfp_refused,
                terminated: result.terminated,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.value.total_cmp(&b.value))
            .then(a.replication.cmp(&b.replication))
    });
    Ok(rows)
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("rows serialize");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// Aggregate total reward per (scenario, sweep value) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scenario: Scenario,
    pub value: f64,
    pub runs: u32,
    pub mean_reward: f64,
    pub sd_reward: f64,
    pub min_reward: f64,
    pub max_reward: f64,
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut cells: Vec<(Scenario, f64)> = rows.iter().map(|r| (r.scenario, r.value)).collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    cells.dedup();

    cells
        .into_iter()
        .map(|(scenario, value)| {
            let rewards: Vec<f64> = rows
                .iter()
                .filter(|r| r.scenario == scenario && r.value == value)
                .map(|r| r.total_reward)
                .collect();
            let n = rewards.len();
            let mean = rewards.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            let min = rewards.iter().copied().fold(f64::INFINITY, f64::min);
            let max = rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            SummaryRow {
                scenario,
                value,
                runs: n as u32,
                mean_reward: mean,
                sd_reward: sd,
                min_reward: min,
                max_reward: max,
            }
        })
        .collect()
}

pub fn summary_to_csv(summary: &[SummaryRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in summary {
        writer.serialize(row).expect("rows serialize");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// Plain-text rendering of the summary, one line per cell.
pub fn summary_table(sweep: SweepVar, summary: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<16} {:>12} {:>6} {:>12} {:>10} {:>10} {:>10}\n",
        "scenario",
        sweep.key(),
        "runs",
        "mean",
        "sd",
        "min",
        "max"
    );
    for row in summary {
        out.push_str(&format!(
            "{:<16} {:>12.3} {:>6} {:>12.3} {:>10.3} {:>10.3} {:>10.3}\n",
            row.scenario.to_string(),
            row.value,
            row.runs,
            row.mean_reward,
            row.sd_reward,
            row.min_reward,
            row.max_reward
        ));
    }
    out
}
