//! Run configuration, validation and the flat `key = value` file format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affect::AffectParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// No cooperation at all: agents never delegate.
    NoTrust,
    /// Trust decisions run with the mood modifier forced to zero and the
    /// affect dynamics frozen.
    NoEmotions,
    /// The full model.
    EmotionalTrust,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::NoTrust => "notrust",
            Scenario::NoEmotions => "noemotions",
            Scenario::EmotionalTrust => "emotionaltrust",
        };
        f.write_str(s)
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "notrust" => Ok(Scenario::NoTrust),
            "noemotions" => Ok(Scenario::NoEmotions),
            "emotionaltrust" => Ok(Scenario::EmotionalTrust),
            other => Err(format!(
                "unknown scenario `{other}`, expected notrust | noemotions | emotionaltrust"
            )),
        }
    }
}

pub const ALL_SCENARIOS: [Scenario; 3] = [
    Scenario::NoTrust,
    Scenario::NoEmotions,
    Scenario::EmotionalTrust,
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: `{value}` ({reason})")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("`{key}` = {value} is out of range, expected {range}")]
    OutOfRange {
        key: String,
        value: String,
        range: String,
    },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    MalformedLine { line: usize, text: String },
}

/// Full parameter set for one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub grid_size: u32,
    pub n_packages: u32,
    pub n_agents: u32,
    pub idle_fraction: f64,
    pub privacy_prob: f64,
    pub p_neurotic: f64,
    pub p_psychotic: f64,
    pub privacy_penalty: f64,
    pub ontime_reward: f64,
    pub delay_penalty: f64,
    pub base_threshold: f64,
    pub initial_trust: f64,
    pub scenario: Scenario,
    pub deadline_slack: f64,
    pub cycle_cap: u64,
    pub seed: u64,
    pub delta_e: f64,
    pub phi_e: f64,
    pub v_p: f64,
    pub v_a: f64,
    pub v_d: f64,
    pub decay_toward_zero: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid_size: 30,
            n_packages: 15,
            n_agents: 15,
            idle_fraction: 0.4,
            privacy_prob: 0.2,
            p_neurotic: 1.0 / 3.0,
            p_psychotic: 1.0 / 3.0,
            privacy_penalty: 2.0,
            ontime_reward: 1.0,
            delay_penalty: 2.0,
            base_threshold: 0.5,
            initial_trust: 0.5,
            scenario: Scenario::EmotionalTrust,
            deadline_slack: 1.5,
            cycle_cap: 2000,
            seed: 0,
            delta_e: 0.2,
            phi_e: 1.0,
            v_p: 0.1,
            v_a: 0.1,
            v_d: 0.1,
            decay_toward_zero: false,
        }
    }
}

fn out_of_range<T: fmt::Display>(key: &str, value: T, range: &str) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_string(),
        value: value.to_string(),
        range: range.to_string(),
    }
}

impl SimConfig {
    pub fn affect_params(&self) -> AffectParams {
        AffectParams {
            delta_e: self.delta_e,
            phi_e: self.phi_e,
            v_p: self.v_p,
            v_a: self.v_a,
            v_d: self.v_d,
            decay_toward_zero: self.decay_toward_zero,
        }
    }

    /// Number of agents that receive no initial packages:
    /// floor(idle_fraction * n_agents), tolerating float noise on exact
    /// products.
    pub fn idle_agent_count(&self) -> u32 {
        let v = self.idle_fraction * self.n_agents as f64;
        let rounded = v.round();
        if (v - rounded).abs() < 1e-9 {
            rounded as u32
        } else {
            v.floor() as u32
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid_size == 0 {
            return Err(out_of_range("grid_size", self.grid_size, ">= 1"));
        }
        if self.n_agents == 0 {
            return Err(out_of_range("n_agents", self.n_agents, ">= 1"));
        }
        for (key, value) in [
            ("idle_fraction", self.idle_fraction),
            ("privacy_prob", self.privacy_prob),
            ("p_neurotic", self.p_neurotic),
            ("p_psychotic", self.p_psychotic),
            ("base_threshold", self.base_threshold),
            ("initial_trust", self.initial_trust),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(out_of_range(key, value, "within [0, 1]"));
            }
        }
        if self.p_neurotic + self.p_psychotic > 1.0 + 1e-12 {
            return Err(out_of_range(
                "p_neurotic + p_psychotic",
                self.p_neurotic + self.p_psychotic,
                "<= 1",
            ));
        }
        for (key, value) in [
            ("privacy_penalty", self.privacy_penalty),
            ("ontime_reward", self.ontime_reward),
            ("delay_penalty", self.delay_penalty),
        ] {
            if value < 0.0 || !value.is_finite() {
                return Err(out_of_range(key, value, ">= 0"));
            }
        }
        if !(self.deadline_slack > 0.0 && self.deadline_slack.is_finite()) {
            return Err(out_of_range("deadline_slack", self.deadline_slack, "> 0"));
        }
        if !self.affect_params().is_valid() {
            return Err(out_of_range(
                "delta_e/phi_e/v_p/v_a/v_d",
                format!(
                    "{}/{}/{}/{}/{}",
                    self.delta_e, self.phi_e, self.v_p, self.v_a, self.v_d
                ),
                "0 < delta_e < phi_e and softening constants in (0, 1]",
            ));
        }
        if self.n_packages > 0 && self.idle_agent_count() >= self.n_agents {
            return Err(out_of_range(
                "idle_fraction",
                self.idle_fraction,
                "leaving at least one busy agent while packages exist",
            ));
        }
        Ok(())
    }

    /// Apply one textual `key = value` assignment; used both by the
    /// config-file loader and generic overrides.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
        where
            T::Err: fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
                key: key.to_string(),
                value: value.to_string(),
                reason: e.to_string(),
            })
        }

        match key {
            "grid_size" => self.grid_size = parse(key, value)?,
            "n_packages" => self.n_packages = parse(key, value)?,
            "n_agents" => self.n_agents = parse(key, value)?,
            "idle_fraction" => self.idle_fraction = parse(key, value)?,
            "privacy_prob" => self.privacy_prob = parse(key, value)?,
            "p_neurotic" => self.p_neurotic = parse(key, value)?,
            "p_psychotic" => self.p_psychotic = parse(key, value)?,
            "privacy_penalty" => self.privacy_penalty = parse(key, value)?,
            "ontime_reward" => self.ontime_reward = parse(key, value)?,
            "delay_penalty" => self.delay_penalty = parse(key, value)?,
            "base_threshold" => self.base_threshold = parse(key, value)?,
            "initial_trust" => self.initial_trust = parse(key, value)?,
            "scenario" => {
                self.scenario = value.parse().map_err(|e: String| ConfigError::InvalidValue {
                    key: key.to_string(),
                    value: value.to_string(),
                    reason: e,
                })?
            }
            "deadline_slack" => self.deadline_slack = parse(key, value)?,
            "cycle_cap" => self.cycle_cap = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "delta_e" => self.delta_e = parse(key, value)?,
            "phi_e" => self.phi_e = parse(key, value)?,
            "v_p" => self.v_p = parse(key, value)?,
            "v_a" => self.v_a = parse(key, value)?,
            "v_d" => self.v_d = parse(key, value)?,
            "decay_toward_zero" => self.decay_toward_zero = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }
}

/// Parse a flat `key = value` config file (blank lines and `#` comments
/// allowed) onto `cfg`.
pub fn apply_config_file(cfg: &mut SimConfig, text: &str) -> Result<(), ConfigError> {
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::MalformedLine {
            line: idx + 1,
            text: line.to_string(),
        })?;
        cfg.set_key(key.trim(), value.trim())?;
    }
    Ok(())
}
