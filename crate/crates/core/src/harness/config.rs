use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{DeviceNoise, Variant};
use crate::transpiler::CouplingMap;

/// A coupling map given by name (`jakarta`, `full:N`, `line:N`) or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    Named(String),
    Explicit(CouplingMap),
}

impl MapSpec {
    pub fn resolve(&self) -> Result<CouplingMap> {
        match self {
            MapSpec::Named(name) => CouplingMap::named(name)
                .ok_or_else(|| Error::config("coupling_map", format!("unknown map `{name}`"))),
            MapSpec::Explicit(map) => Ok(map.clone()),
        }
    }
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec::Named("jakarta".into())
    }
}

fn default_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

fn default_gamma_guess() -> f64 {
    0.5
}

fn default_shots() -> u64 {
    100_000
}

fn default_repetitions() -> u64 {
    10
}

fn default_seed() -> u64 {
    2023
}

fn default_true() -> bool {
    true
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("qroute-out")
}

/// A sweep over damping strengths with repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_grid")]
    pub gamma_grid: Vec<f64>,
    #[serde(default = "default_gamma_guess")]
    pub gamma_guess: f64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    /// Defaults to on for noisy variants and off for `no-noise`.
    #[serde(default)]
    pub error_correction: Option<bool>,
    #[serde(default = "default_shots")]
    pub shots_per_setting: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: u64,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub noise: DeviceNoise,
    #[serde(default = "default_true")]
    pub mitigation: bool,
    #[serde(default)]
    pub transpile: bool,
    #[serde(default)]
    pub coupling_map: MapSpec,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_variant() -> Variant {
    Variant::BothQubits
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

fn probability(field: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(field, format!("{p} is not a probability")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn error_correction(&self) -> bool {
        self.error_correction
            .unwrap_or(self.variant != Variant::NoNoise)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_grid.is_empty() {
            return Err(Error::config("gamma_grid", "grid is empty"));
        }
        if let Some(g) = self.gamma_grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::config("gamma_grid", format!("{g} outside [0, 1]")));
        }
        if !(0.0..1.0).contains(&self.gamma_guess) {
            return Err(Error::config(
                "gamma_guess",
                format!("{} outside [0, 1)", self.gamma_guess),
            ));
        }
        if self.shots_per_setting == 0 {
            return Err(Error::config("shots_per_setting", "must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        probability("noise.readout.p01", self.noise.readout.p01)?;
        probability("noise.readout.p10", self.noise.readout.p10)?;
        probability("noise.depolarizing_per_cx", self.noise.depolarizing_per_cx)?;
        if self.variant == Variant::NoNoise && self.error_correction() {
            return Err(Error::config(
                "error_correction",
                "the no-noise variant has no channel to correct",
            ));
        }
        let map = self.coupling_map.resolve()?;
        if self.transpile && map.n_physical() < crate::experiment::WIDTH {
            return Err(Error::config(
                "coupling_map",
                format!(
                    "{} physical qubits cannot hold the 7-qubit router",
                    map.n_physical()
                ),
            ));
        }
        Ok(())
    }
}

fn field_of(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .filter(|_| message.contains("field"))
        .unwrap_or("document")
        .to_string()
}

/// Parse and validate a JSON config, applying defaults.
pub fn parse_config(document: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(document).map_err(|e| {
        let msg = e.to_string();
        Error::config(field_of(&msg), msg)
    })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c.gamma_grid.len(), 11);
        assert_eq!(c.gamma_grid[3], 0.3);
        assert_eq!(c.gamma_guess, 0.5);
        assert_eq!(c.shots_per_setting, 100_000);
        assert_eq!(c.repetitions, 10);
        assert!(c.mitigation && c.error_correction());
        assert_eq!(c.variant, Variant::BothQubits);
    }

    #[test]
    fn out_of_range_gamma_names_field() {
        match parse_config(r#"{"gamma_grid":[1.5]}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "gamma_grid"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        match parse_config(r#"{"gama_grid":[0.1]}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "gama_grid"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn signal_only_with_mitigation() {
        let c = parse_config(r#"{"variant":"signal-only","mitigation":true}"#).unwrap();
        assert_eq!(c.variant, Variant::SignalOnly);
        assert!(c.mitigation);
    }

    #[test]
    fn no_noise_defaults_to_no_correction() {
        let c = parse_config(r#"{"variant":"no-noise"}"#).unwrap();
        assert!(!c.error_correction());
        assert!(parse_config(r#"{"variant":"no-noise","error_correction":true}"#).is_err());
    }

    #[test]
    fn explicit_coupling_map() {
        let c = parse_config(r#"{"coupling_map":{"n_physical":7,"edges":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,6]]},"transpile":true}"#)
            .unwrap();
        assert_eq!(c.coupling_map.resolve().unwrap(), CouplingMap::linear(7));
        assert!(parse_config(r#"{"coupling_map":"ring"}"#).is_err());
        assert!(parse_config(r#"{"coupling_map":"line:3","transpile":true}"#).is_err());
    }
}
