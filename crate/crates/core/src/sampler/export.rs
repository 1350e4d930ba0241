//! Sample and summary export.
//!
//! CSV: header `index,target,value`, LF line endings, one row per (sample, target)
//! in index-major then request order. Values use the shortest decimal that
//! round-trips to the same `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::world::{Forecast, ForecastResult};
use crate::netcore::NodeId;

pub const CSV_HEADER: &str = "index,target,value";

/// JSON summary of one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub target: NodeId,
    pub n: usize,
    pub seed: u64,
    pub mean: f64,
    pub stddev: f64,
    pub histogram: BTreeMap<i64, u64>,
}

impl TargetSummary {
    pub fn from_result(r: &ForecastResult, seed: u64) -> Self {
        TargetSummary {
            target: r.target.clone(),
            n: r.n,
            seed,
            mean: r.mean,
            stddev: r.stddev,
            histogram: r.histogram.clone(),
        }
    }
}

pub fn summaries(f: &Forecast) -> Vec<TargetSummary> {
    f.results
        .iter()
        .map(|r| TargetSummary::from_result(r, f.master_seed))
        .collect()
}

pub fn samples_csv(f: &Forecast) -> String {
    let mut s = String::with_capacity(32 * f.n * f.results.len() + 32);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for i in 0..f.n {
        for r in &f.results {
            writeln!(s, "{i},{},{}", r.target, r.samples[i]).expect("write to string");
        }
    }
    s
}

/// Parse a CSV written by [`samples_csv`] back into per-target sample vectors.
pub fn parse_samples_csv(text: &str) -> Result<BTreeMap<String, Vec<f64>>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing header".into());
    }
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (ln, line) in lines.enumerate() {
        let mut parts = line.splitn(3, ',');
        let (Some(_), Some(t), Some(v)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("line {}: expected three fields", ln + 2));
        };
        let v: f64 = v.parse().map_err(|e| format!("line {}: {e}", ln + 2))?;
        out.entry(t.to_string()).or_default().push(v);
    }
    Ok(out)
}

/// Full-sample JSON: `[{target, samples: [...]}, ...]`.
pub fn samples_json(f: &Forecast) -> String {
    #[derive(Serialize)]
    struct Entry<'a> {
        target: &'a NodeId,
        samples: &'a [f64],
    }
    let v: Vec<Entry> = f
        .results
        .iter()
        .map(|r| Entry {
            target: &r.target,
            samples: &r.samples,
        })
        .collect();
    let mut s = serde_json::to_string(&v).expect("samples serialize");
    s.push('\n');
    s
}

pub fn summary_json(f: &Forecast) -> String {
    let mut s = serde_json::to_string_pretty(&summaries(f)).expect("summary serializes");
    s.push('\n');
    s
}

/// Table-style text block: one row per target with mean and standard deviation.
pub fn summary_table(f: &Forecast) -> String {
    let width = f
        .results
        .iter()
        .map(|r| r.target.as_str().len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut s = format!("{:<width$}  {:>10}  {:>10}\n", "target", "mean", "std dev");
    for r in &f.results {
        writeln!(s, "{:<width$}  {:>10.2}  {:>10.2}", r.target, r.mean, r.stddev).expect("write to string");
    }
    writeln!(s, "n = {}, seed = {}", f.n, f.master_seed).expect("write to string");
    s
}
