//! Experiment configuration: JSON file schema, command-line overrides and
//! validation.
//!
//! Precedence is flags, then the config file, then (for `out_dir` only) the
//! `NAMING_GAME_OUT_DIR` environment variable, then built-in defaults.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{GameParams, PaletteSource, SnapshotAgents};
use crate::error::{ConfigError, Error, Result};
use crate::world::{check_separation, default_palette, ColourValue};

pub const OUT_DIR_ENV: &str = "NAMING_GAME_OUT_DIR";
pub const CONFIG_ECHO_FILE: &str = "config.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaletteMode {
    Fixed,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AllKeyword {
    All,
}

/// `"all"` or a zero-based agent index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnapshotAgent {
    Index(usize),
    #[serde(with = "all_keyword")]
    All,
}

mod all_keyword {
    use super::AllKeyword;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        AllKeyword::All.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        AllKeyword::deserialize(d).map(|_| ())
    }
}

impl FromStr for SnapshotAgent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "all" {
            return Ok(SnapshotAgent::All);
        }
        s.parse()
            .map(SnapshotAgent::Index)
            .map_err(|_| format!("expected \"all\" or an agent index, got {s:?}"))
    }
}

impl fmt::Display for SnapshotAgent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnapshotAgent::All => f.write_str("all"),
            SnapshotAgent::Index(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub population_size: usize,
    pub palette: Vec<[u8; 3]>,
    pub palette_mode: PaletteMode,
    /// Number of colours when `palette_mode` is `random`.
    pub random_palette_size: usize,
    pub min_separation: f64,
    pub objects_per_scene: usize,
    pub num_interactions: usize,
    pub noise_std: f64,
    pub initial_score: f64,
    pub inc: f64,
    pub inh: f64,
    pub dec: f64,
    pub shift_rate: f64,
    pub window: usize,
    pub sample_interval: usize,
    pub snapshot_points: Vec<usize>,
    pub snapshot_agent: SnapshotAgent,
    pub backend: String,
    pub runs: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub parallel: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let params = GameParams::default();
        ExperimentConfig {
            population_size: params.population_size,
            palette: default_palette(),
            palette_mode: PaletteMode::Fixed,
            random_palette_size: 6,
            min_separation: params.min_separation,
            objects_per_scene: params.objects_per_scene,
            num_interactions: params.num_interactions,
            noise_std: params.noise_std,
            initial_score: params.initial_score,
            inc: params.inc,
            inh: params.inh,
            dec: params.dec,
            shift_rate: params.shift_rate,
            window: params.window,
            sample_interval: params.sample_interval,
            snapshot_points: params.snapshot_points,
            snapshot_agent: SnapshotAgent::All,
            backend: params.backend,
            runs: 1,
            seed: 0,
            out_dir: PathBuf::from("naming-game-out"),
            parallel: 1,
        }
    }
}

/// Values given on the command line; `None` leaves the file/default value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub population_size: Option<usize>,
    pub objects_per_scene: Option<usize>,
    pub num_interactions: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub noise_std: Option<f64>,
    pub initial_score: Option<f64>,
    pub inc: Option<f64>,
    pub inh: Option<f64>,
    pub dec: Option<f64>,
    pub shift_rate: Option<f64>,
    pub window: Option<usize>,
    pub snapshot_points: Option<Vec<usize>>,
    pub snapshot_agent: Option<SnapshotAgent>,
    pub out_dir: Option<PathBuf>,
    pub parallel: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_owned(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_json(&text, path)?)
    }

    /// Resolves the final configuration from an optional file, flag
    /// overrides and the out-dir environment fallback, then validates it.
    pub fn resolve(file: Option<&Path>, overrides: &ConfigOverrides, env_out_dir: Option<PathBuf>) -> Result<Self> {
        let (mut config, file_has_out_dir) = match file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
                    path: path.to_owned(),
                    message: e.to_string(),
                })?;
                let has_out_dir = value.get("out_dir").is_some();
                (Self::from_json(&text, path)?, has_out_dir)
            }
            None => (Self::default(), false),
        };
        if !file_has_out_dir {
            if let Some(dir) = env_out_dir {
                config.out_dir = dir;
            }
        }
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &o.$field { self.$field = v.clone(); })*
            };
        }
        take!(
            population_size,
            objects_per_scene,
            num_interactions,
            runs,
            seed,
            noise_std,
            initial_score,
            inc,
            inh,
            dec,
            shift_rate,
            window,
            snapshot_points,
            snapshot_agent,
            out_dir,
            parallel
        );
    }

    pub fn game_params(&self) -> GameParams {
        GameParams {
            population_size: self.population_size,
            palette: match self.palette_mode {
                PaletteMode::Fixed => PaletteSource::Fixed(self.palette.clone()),
                PaletteMode::Random => PaletteSource::Random {
                    size: self.random_palette_size,
                },
            },
            min_separation: self.min_separation,
            objects_per_scene: self.objects_per_scene,
            num_interactions: self.num_interactions,
            noise_std: self.noise_std,
            initial_score: self.initial_score,
            inc: self.inc,
            inh: self.inh,
            dec: self.dec,
            shift_rate: self.shift_rate,
            window: self.window,
            sample_interval: self.sample_interval,
            snapshot_points: self.snapshot_points.clone(),
            snapshot_agents: match self.snapshot_agent {
                SnapshotAgent::All => SnapshotAgents::All,
                SnapshotAgent::Index(i) => SnapshotAgents::One(i),
            },
            backend: self.backend.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.game_params().validate()?;
        if self.palette_mode == PaletteMode::Fixed {
            let colours: Vec<ColourValue> = self.palette.iter().copied().map(ColourValue::from).collect();
            check_separation(&colours, self.min_separation)?;
        }
        if self.runs == 0 {
            return Err(ConfigError::OutOfRange {
                field: "runs",
                value: "0".into(),
                expected: ">= 1",
            });
        }
        if self.parallel == 0 {
            return Err(ConfigError::OutOfRange {
                field: "parallel",
                value: "0".into(),
                expected: ">= 1",
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises") + "\n"
    }

    /// Writes the resolved configuration to `out_dir/config.json`.
    pub fn echo(&self) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir).map_err(|e| Error::io(&self.out_dir, e))?;
        let path = self.out_dir.join(CONFIG_ECHO_FILE);
        fs::write(&path, self.to_json()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn run_seed(&self, run_index: usize) -> u64 {
        self.seed.wrapping_add(run_index as u64)
    }

    pub fn run_dir(&self, run_index: usize) -> PathBuf {
        self.out_dir.join(format!("run-{run_index}"))
    }
}
