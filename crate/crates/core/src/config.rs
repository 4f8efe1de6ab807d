//! Run configuration read from TOML. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::EvalSettings;
use crate::features::FeatureOptions;
use crate::ingest::DEFAULT_WINDOW;
use crate::learn::TrainConfig;
use crate::select::KeepRule;
use crate::synth::{default_profiles, SensorProfile};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_WINDOWS_PER_CLASS: usize = 500;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub log: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateConfig {
    pub n_control_windows: usize,
    pub n_near_windows: usize,
    /// Restrict generation to these sensor ids.
    pub sensors: Option<Vec<String>>,
    /// Replaces the built-in nine-sensor environment.
    pub profiles: Option<Vec<SensorProfile>>,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            n_control_windows: DEFAULT_WINDOWS_PER_CLASS,
            n_near_windows: DEFAULT_WINDOWS_PER_CLASS,
            sensors: None,
            profiles: None,
        }
    }
}

impl GenerateConfig {
    /// Profiles to generate, after the sensor filter.
    pub fn resolved_profiles(&self) -> Result<Vec<SensorProfile>> {
        let all = self.profiles.clone().unwrap_or_else(default_profiles);
        let Some(wanted) = &self.sensors else { return Ok(all) };
        let valid: Vec<&str> = all.iter().map(|p| p.sensor_id.as_str()).collect();
        if let Some(bad) = wanted.iter().find(|w| !valid.contains(&w.as_str())) {
            return Err(Error::Config(format!("unknown sensor {bad:?}; valid sensors: {}", valid.join(", "))));
        }
        Ok(all.into_iter().filter(|p| wanted.contains(&p.sensor_id)).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    pub keep: KeepRule,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub stratified: bool,
    /// Defaults to the run seed.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AblationConfig {
    pub subset: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub window: usize,
    pub paths: Paths,
    pub generate: GenerateConfig,
    pub features: FeatureOptions,
    pub selection: SelectionConfig,
    pub train: TrainConfig,
    pub split: SplitConfig,
    pub ablation: AblationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            window: DEFAULT_WINDOW,
            paths: Paths::default(),
            generate: GenerateConfig::default(),
            features: FeatureOptions::default(),
            selection: SelectionConfig::default(),
            train: TrainConfig { seed: DEFAULT_SEED, ..TrainConfig::default() },
            split: SplitConfig::default(),
            ablation: AblationConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Sets the run seed and the training seed together.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.train.seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        // FFT-ADPI needs a power-of-two window.
        if self.window < 2 || !self.window.is_power_of_two() {
            return Err(Error::Config(format!("window must be a power of two >= 2, got {}", self.window)));
        }
        self.train.validate()
    }

    pub fn eval_settings(&self) -> EvalSettings {
        EvalSettings {
            train: self.train.clone(),
            keep: self.selection.keep,
            split_seed: self.split.seed.unwrap_or(self.seed),
            stratified: self.split.stratified,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(RunConfig::from_toml("").unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::from_toml("sed = 3"), Err(Error::Config(_))));
        assert!(RunConfig::from_toml("[train]\nalgo = \"nb\"").is_err());
        let ok = RunConfig::from_toml("seed = 3\n[train]\nalgorithm = \"nb\"\n[selection]\nkeep = \"top:5\"").unwrap();
        assert_eq!(ok.selection.keep, KeepRule::TopK(5));
    }

    #[test]
    fn window_must_be_power_of_two() {
        assert!(RunConfig::from_toml("window = 500").is_err());
        assert!(RunConfig::from_toml("window = 256").is_ok());
    }

    #[test]
    fn sensor_filter() {
        let g = GenerateConfig { sensors: Some(vec!["pressure".into()]), ..Default::default() };
        let p = g.resolved_profiles().unwrap();
        assert_eq!(p.len(), 1);
        let g = GenerateConfig { sensors: Some(vec!["sonar".into()]), ..Default::default() };
        let msg = g.resolved_profiles().unwrap_err().to_string();
        assert!(msg.contains("sonar") && msg.contains("pressure"));
    }
}
