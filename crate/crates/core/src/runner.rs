//! Batch execution: several independently seeded runs, their output
//! directories and the cross-run aggregate.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::engine::run_experiment;
use crate::error::{Error, Result};
use crate::monitors::{aggregate_runs, export_run, write_aggregate, SeriesPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run_index: usize,
    pub seed: u64,
    pub dir: PathBuf,
    /// Final series point; `None` for a run without interactions.
    pub last: Option<SeriesPoint>,
}

impl RunSummary {
    pub fn line(&self) -> String {
        match &self.last {
            Some(p) => format!(
                "run-{} seed={} interactions={} success={:.3} ontology={:.2} distinct_forms={}",
                self.run_index,
                self.seed,
                p.interaction,
                p.success_window_avg,
                p.mean_ontology_size,
                p.distinct_forms_population
            ),
            None => format!("run-{} seed={} interactions=0", self.run_index, self.seed),
        }
    }
}

/// Runs every configured experiment and writes all outputs under `out_dir`.
pub fn run_batch(config: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    config.validate()?;
    config.echo()?;
    let params = config.game_params();
    let run_one = |run_index: usize| -> Result<(RunSummary, Vec<SeriesPoint>)> {
        let seed = config.run_seed(run_index);
        let output = run_experiment(&params, seed)?;
        let dir = config.run_dir(run_index);
        export_run(&output.series, &output.snapshots, &dir)?;
        let summary = RunSummary {
            run_index,
            seed,
            dir,
            last: output.series.last().cloned(),
        };
        Ok((summary, output.series))
    };
    let results: Vec<Result<(RunSummary, Vec<SeriesPoint>)>> = if config.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallel)
            .build()
            .map_err(|e| Error::io(&config.out_dir, std::io::Error::other(e)))?;
        pool.install(|| (0..config.runs).into_par_iter().map(run_one).collect())
    } else {
        (0..config.runs).map(run_one).collect()
    };
    let mut summaries = Vec::with_capacity(config.runs);
    let mut all_series = Vec::with_capacity(config.runs);
    for result in results {
        let (summary, series) = result?;
        summaries.push(summary);
        all_series.push(series);
    }
    let aggregate = aggregate_runs(&all_series)?;
    write_aggregate(&aggregate, &config.out_dir)?;
    Ok(summaries)
}
