//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

use crate::conceptual::CategoryId;
use crate::world::ObjectId;

/// Problems with a configuration or with inputs that the caller controls.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("palette is empty")]
    EmptyPalette,
    #[error(
        "palette colours {first} and {second} are {distance:.3} apart, closer than min_separation {min_separation}"
    )]
    SeparationViolation {
        first: usize,
        second: usize,
        distance: f64,
        min_separation: f64,
    },
    #[error("objects_per_scene {objects_per_scene} must be in [1, {palette_len}]")]
    ObjectsPerScene {
        objects_per_scene: usize,
        palette_len: usize,
    },
    #[error("population size {0} is too small, at least 2 agents are required")]
    PopulationTooSmall(usize),
    #[error("unsupported embodiment backend {kind:?}; supported kinds: {supported}")]
    UnsupportedBackend { kind: String, supported: String },
    #[error("{field} = {value} is out of range: {expected}")]
    OutOfRange {
        field: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("could not generate a random palette of {size} colours with min_separation {min_separation} after {attempts} attempts")]
    PaletteGeneration {
        size: usize,
        min_separation: f64,
        attempts: usize,
    },
    #[error("runs have mismatched series: {0}")]
    MismatchedRuns(String),
    #[error("invalid config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Violations of the embodiment call protocol (speak/hear/point).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("utterance channel already holds {pending:?}")]
    DoubleSpeak { pending: String },
    #[error("hear called on an empty utterance channel")]
    EmptyChannel,
    #[error("invalid word form {0:?}")]
    InvalidWordForm(String),
    #[error("object {0} is not part of the current scene")]
    NotInScene(ObjectId),
    #[error("body {0:?} has not observed a scene yet")]
    NoScene(String),
}

/// Broken internal invariants: an operation referenced state that does not exist.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsistencyError {
    #[error("unknown category {0}")]
    UnknownCategory(CategoryId),
    #[error("construction {form:?} <-> {category} already exists")]
    DuplicateConstruction { form: String, category: CategoryId },
    #[error("construction {form:?} <-> {category} is not in the inventory")]
    MissingConstruction { form: String, category: CategoryId },
    #[error("initial score {0} must be in (0, 1]")]
    InitialScore(f64),
}

/// Top-level error for experiment runs and exports.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
