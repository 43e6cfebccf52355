//! Run monitoring: the windowed success and lexicon statistics series,
//! lexicon snapshots, file export and aggregation across runs.
//!
//! Ratio fields (`mean_forms_per_meaning`, `mean_meanings_per_form`) are 0
//! when no agent has any construction yet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conceptual::CategoryId;
use crate::engine::{Agent, AgentId, InteractionRecord, Population};
use crate::error::{ConfigError, Error, Result};
use crate::world::ColourValue;

pub const SERIES_FILE: &str = "series.csv";
pub const SNAPSHOTS_JSON_FILE: &str = "snapshots.json";
pub const SNAPSHOTS_HTML_FILE: &str = "snapshots.html";
pub const AGGREGATE_FILE: &str = "aggregate.csv";

pub const SERIES_HEADER: &str = "interaction,success_window_avg,mean_ontology_size,mean_inventory_size,distinct_forms_population,mean_forms_per_meaning,mean_meanings_per_form";

/// Names of the per-point fields, in CSV column order.
pub const SERIES_FIELDS: [&str; 6] = [
    "success_window_avg",
    "mean_ontology_size",
    "mean_inventory_size",
    "distinct_forms_population",
    "mean_forms_per_meaning",
    "mean_meanings_per_form",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub interaction: usize,
    pub success_window_avg: f64,
    pub mean_ontology_size: f64,
    pub mean_inventory_size: f64,
    pub distinct_forms_population: usize,
    pub mean_forms_per_meaning: f64,
    pub mean_meanings_per_form: f64,
}

impl SeriesPoint {
    /// Field values in [`SERIES_FIELDS`] order.
    pub fn values(&self) -> [f64; 6] {
        [
            self.success_window_avg,
            self.mean_ontology_size,
            self.mean_inventory_size,
            self.distinct_forms_population as f64,
            self.mean_forms_per_meaning,
            self.mean_meanings_per_form,
        ]
    }
}

/// Fraction of successes among the last `min(window, at)` games up to `at`.
pub fn windowed_success(records: &[InteractionRecord], window: usize, at: usize) -> f64 {
    assert!(window >= 1, "window must be positive");
    let at = at.min(records.len());
    if at == 0 {
        return 0.0;
    }
    let recent = &records[at.saturating_sub(window)..at];
    recent.iter().filter(|r| r.success).count() as f64 / recent.len() as f64
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Per agent: average number of forms per category that has any form.
fn forms_per_meaning(agent: &Agent) -> f64 {
    let mut per_category: BTreeMap<CategoryId, usize> = BTreeMap::new();
    for c in agent.inventory.constructions() {
        *per_category.entry(c.category_id).or_default() += 1;
    }
    mean(per_category.values().map(|&n| n as f64))
}

/// Per agent: average number of categories per known form.
fn meanings_per_form(agent: &Agent) -> f64 {
    let mut per_form: BTreeMap<&str, usize> = BTreeMap::new();
    for c in agent.inventory.constructions() {
        *per_form.entry(c.form.as_str()).or_default() += 1;
    }
    mean(per_form.values().map(|&n| n as f64))
}

pub fn compute_series_point(
    population: &Population,
    records: &[InteractionRecord],
    at: usize,
    window: usize,
) -> SeriesPoint {
    let agents = population.agents();
    let speaking: Vec<&Agent> = agents.iter().filter(|a| !a.inventory.is_empty()).collect();
    let forms: BTreeSet<&str> = agents
        .iter()
        .flat_map(|a| a.inventory.constructions().iter().map(|c| c.form.as_str()))
        .collect();
    SeriesPoint {
        interaction: at,
        success_window_avg: windowed_success(records, window, at),
        mean_ontology_size: mean(agents.iter().map(|a| a.ontology.len() as f64)),
        mean_inventory_size: mean(agents.iter().map(|a| a.inventory.len() as f64)),
        distinct_forms_population: forms.len(),
        mean_forms_per_meaning: mean(speaking.iter().map(|a| forms_per_meaning(a))),
        mean_meanings_per_form: mean(speaking.iter().map(|a| meanings_per_form(a))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredForm {
    pub form: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub category_id: CategoryId,
    pub prototype: ColourValue,
    pub forms: Vec<ScoredForm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconSnapshot {
    pub interaction_number: usize,
    pub agent_id: AgentId,
    pub entries: Vec<SnapshotEntry>,
}

/// Copies an agent's categories with their forms, strongest form first.
pub fn take_snapshot(agent: &Agent, at: usize) -> LexiconSnapshot {
    let entries = agent
        .ontology
        .categories()
        .iter()
        .map(|category| {
            let mut forms: Vec<ScoredForm> = agent
                .inventory
                .constructions()
                .iter()
                .filter(|c| c.category_id == category.id)
                .map(|c| ScoredForm {
                    form: c.form.clone(),
                    score: c.score,
                })
                .collect();
            forms.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.form.cmp(&b.form)));
            SnapshotEntry {
                category_id: category.id,
                prototype: category.prototype,
                forms,
            }
        })
        .collect();
    LexiconSnapshot {
        interaction_number: at,
        agent_id: agent.id,
        entries,
    }
}

pub fn series_to_csv(series: &[SeriesPoint]) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for p in series {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{},{:.6},{:.6}",
            p.interaction,
            p.success_window_avg,
            p.mean_ontology_size,
            p.mean_inventory_size,
            p.distinct_forms_population,
            p.mean_forms_per_meaning,
            p.mean_meanings_per_form
        )
        .unwrap();
    }
    out
}

/// Parses the output of [`series_to_csv`].
pub fn series_from_csv(text: &str) -> std::result::Result<Vec<SeriesPoint>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(SERIES_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(format!("line {}: expected 7 columns, got {}", i + 2, cols.len()));
            }
            let f = |k: usize| cols[k].parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2));
            let u = |k: usize| cols[k].parse::<usize>().map_err(|e| format!("line {}: {e}", i + 2));
            Ok(SeriesPoint {
                interaction: u(0)?,
                success_window_avg: f(1)?,
                mean_ontology_size: f(2)?,
                mean_inventory_size: f(3)?,
                distinct_forms_population: u(4)?,
                mean_forms_per_meaning: f(5)?,
                mean_meanings_per_form: f(6)?,
            })
        })
        .collect()
}

fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Static page with one colour swatch per category, labelled with its forms.
pub fn snapshots_to_html(snapshots: &[LexiconSnapshot]) -> String {
    let mut out = String::new();
    out.push_str(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Colour lexicons</title>\n<style>\n\
         body { font-family: sans-serif; }\n\
         .row { display: flex; flex-wrap: wrap; gap: 8px; margin-bottom: 16px; }\n\
         .swatch { width: 120px; min-height: 80px; padding: 4px; border: 1px solid #444; }\n\
         .label { background: rgba(255,255,255,0.85); font-size: 12px; padding: 2px; }\n\
         </style>\n</head>\n<body>\n",
    );
    for snapshot in snapshots {
        writeln!(
            out,
            "<h2>{} after {} games</h2>\n<div class=\"row\">",
            snapshot.agent_id, snapshot.interaction_number
        )
        .unwrap();
        for entry in &snapshot.entries {
            let [r, g, b] = entry.prototype.to_rgb8();
            writeln!(
                out,
                "<div class=\"swatch\" style=\"background-color: rgb({r},{g},{b})\" title=\"{}\">",
                entry.category_id
            )
            .unwrap();
            for form in &entry.forms {
                writeln!(
                    out,
                    "<div class=\"label\">{} {:.2}</div>",
                    escape_html(&form.form),
                    form.score
                )
                .unwrap();
            }
            out.push_str("</div>\n");
        }
        out.push_str("</div>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `series.csv`, `snapshots.json` and `snapshots.html` into `out_dir`,
/// creating it if needed. Returns the written paths.
pub fn export_run(series: &[SeriesPoint], snapshots: &[LexiconSnapshot], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let series_path = out_dir.join(SERIES_FILE);
    let json_path = out_dir.join(SNAPSHOTS_JSON_FILE);
    let html_path = out_dir.join(SNAPSHOTS_HTML_FILE);
    write_file(series_path.clone(), &series_to_csv(series))?;
    let json = serde_json::to_string_pretty(snapshots).expect("snapshots serialise");
    write_file(json_path.clone(), &(json + "\n"))?;
    write_file(html_path.clone(), &snapshots_to_html(snapshots))?;
    Ok(vec![series_path, json_path, html_path])
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub interaction: usize,
    pub mean: [f64; 6],
    /// Sample standard deviation (n - 1 denominator); 0 for a single run.
    pub std: [f64; 6],
}

/// Per-interaction mean and sample standard deviation across runs.
pub fn aggregate_runs(runs: &[Vec<SeriesPoint>]) -> Result<Vec<AggregatePoint>, ConfigError> {
    let Some(first) = runs.first() else {
        return Ok(Vec::new());
    };
    for (i, run) in runs.iter().enumerate() {
        if run.len() != first.len() {
            return Err(ConfigError::MismatchedRuns(format!(
                "run {i} has {} points, run 0 has {}",
                run.len(),
                first.len()
            )));
        }
        if let Some((a, b)) = run.iter().zip(first).find(|(a, b)| a.interaction != b.interaction) {
            return Err(ConfigError::MismatchedRuns(format!(
                "run {i} samples interaction {} where run 0 samples {}",
                a.interaction, b.interaction
            )));
        }
    }
    let n = runs.len() as f64;
    Ok((0..first.len())
        .map(|k| {
            let mut mean = [0.0; 6];
            for run in runs {
                for (m, v) in mean.iter_mut().zip(run[k].values()) {
                    *m += v / n;
                }
            }
            let mut std = [0.0; 6];
            if runs.len() > 1 {
                for run in runs {
                    for ((s, v), m) in std.iter_mut().zip(run[k].values()).zip(mean) {
                        *s += (v - m).powi(2);
                    }
                }
                for s in &mut std {
                    *s = (*s / (n - 1.0)).sqrt();
                }
            }
            AggregatePoint {
                interaction: first[k].interaction,
                mean,
                std,
            }
        })
        .collect())
}

pub fn aggregate_header() -> String {
    let mut header = String::from("interaction");
    for field in SERIES_FIELDS {
        write!(header, ",{field}_mean,{field}_std").unwrap();
    }
    header
}

pub fn aggregate_to_csv(points: &[AggregatePoint]) -> String {
    let mut out = aggregate_header();
    out.push('\n');
    for p in points {
        write!(out, "{}", p.interaction).unwrap();
        for (m, s) in p.mean.iter().zip(&p.std) {
            write!(out, ",{m:.6},{s:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_aggregate(points: &[AggregatePoint], out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join(AGGREGATE_FILE);
    write_file(path.clone(), &aggregate_to_csv(points))?;
    Ok(path)
}
