//! Grounded colour naming game.
//!
//! A population of agents, each with private prototype colour categories
//! and a private scored lexicon, plays pairwise naming games about randomly
//! drawn scenes of coloured objects. Through invention, adoption and
//! lateral-inhibition alignment the population converges on one shared
//! word per colour.
//!
//! ```
//! use naming_game::engine::{run_experiment, GameParams};
//!
//! let params = GameParams { num_interactions: 200, ..GameParams::default() };
//! let output = run_experiment(&params, 42).unwrap();
//! assert_eq!(output.records.len(), 200);
//! ```

pub mod conceptual;
pub mod config;
pub mod embodiment;
pub mod engine;
pub mod error;
pub mod lexicon;
pub mod monitors;
pub mod runner;
pub mod world;

pub use error::{Error, Result};
