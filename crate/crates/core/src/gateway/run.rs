use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{Network, NodeId};
use crate::sampler::{run_monte_carlo, samples_csv, summaries, Forecast, SimulationError, TargetSummary};
use crate::scenario::{apply_overlay, Overlay, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Completed,
    Failed,
}

/// Everything needed to reproduce a run, plus its summarized results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub status: RunStatus,
    /// Workspace id (or file path) of the base network.
    pub network: String,
    /// Content hash of the base network before the overlay.
    pub network_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay: Option<Overlay>,
    pub targets: Vec<NodeId>,
    pub n: usize,
    pub seed: u64,
    pub created_at: String,
    #[serde(default)]
    pub results: Vec<TargetSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("run record serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("network hash mismatch: record has {expected}, network is {actual}")]
    HashMismatch { expected: String, actual: String },
}

static IDS: Mutex<Option<ulid::Generator>> = Mutex::new(None);

/// New run id. Lexicographic order follows creation order within a process.
pub fn new_run_id() -> String {
    let mut guard = IDS.lock().unwrap_or_else(|p| p.into_inner());
    let gen = guard.get_or_insert_with(ulid::Generator::new);
    gen.generate().unwrap_or_else(|_| ulid::Ulid::new()).to_string()
}

/// A run that has been set up but not executed.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub record: RunRecord,
    pub scenario: Network,
}

/// Apply the overlay and fill in the reproducibility fields of a new record.
pub fn prepare_run(
    network_ref: &str,
    base: &Network,
    overlay: Option<Overlay>,
    targets: Vec<NodeId>,
    n: usize,
    seed: u64,
) -> Result<PreparedRun, RunError> {
    let scenario = match &overlay {
        Some(o) => apply_overlay(base, o)?,
        None => base.clone(),
    };
    if n == 0 {
        return Err(SimulationError::ZeroSamples.into());
    }
    if let Some(t) = targets.iter().find(|t| !scenario.contains(t.as_str())) {
        return Err(SimulationError::UnknownTarget(t.to_string()).into());
    }
    Ok(PreparedRun {
        record: RunRecord {
            id: new_run_id(),
            status: RunStatus::Running,
            network: network_ref.to_string(),
            network_hash: base.content_hash(),
            overlay_name: overlay.as_ref().map(|o| o.name.clone()),
            overlay,
            targets,
            n,
            seed,
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            results: Vec::new(),
            error: None,
        },
        scenario,
    })
}

impl PreparedRun {
    /// Run the simulation. Returns the completed record and the sample CSV.
    #[allow(clippy::result_large_err)]
    pub fn execute(self) -> Result<(RunRecord, String), (RunRecord, SimulationError)> {
        let PreparedRun { mut record, scenario } = self;
        match run_monte_carlo(&scenario, &record.targets, record.n, record.seed) {
            Ok(f) => {
                record.status = RunStatus::Completed;
                record.results = summaries(&f);
                Ok((record, samples_csv(&f)))
            }
            Err(e) => {
                record.status = RunStatus::Failed;
                record.error = Some(e.to_string());
                Err((record, e))
            }
        }
    }
}

/// Re-run a recorded simulation against `base`, which must hash to the
/// recorded network hash.
pub fn replay(record: &RunRecord, base: &Network) -> Result<Forecast, RunError> {
    let actual = base.content_hash();
    if actual != record.network_hash {
        return Err(RunError::HashMismatch {
            expected: record.network_hash.clone(),
            actual,
        });
    }
    let scenario = match &record.overlay {
        Some(o) => apply_overlay(base, o)?,
        None => base.clone(),
    };
    Ok(run_monte_carlo(&scenario, &record.targets, record.n, record.seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Category, DistributionSpec, NodeSpec, ANNUAL};
    use crate::scenario::Edit;

    fn net() -> Network {
        Network::from_specs(
            "n",
            vec![],
            vec![NodeSpec::prior(
                "x",
                Category::Annual,
                ANNUAL,
                DistributionSpec::Normal {
                    mu: 1.0,
                    sigma: 2.0,
                    trunc_lo: None,
                    trunc_hi: None,
                },
            )],
        )
        .unwrap()
    }

    #[test]
    fn ids_sort_by_creation() {
        let ids: Vec<String> = (0..50).map(|_| new_run_id()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(ids[0].len(), 26);
    }

    #[test]
    fn execute_and_replay() {
        let base = net();
        let overlay = Overlay {
            name: "shift".into(),
            base: "n".into(),
            edits: vec![Edit::ReplaceDist {
                node: "x".into(),
                dist: DistributionSpec::Uniform { lo: 0.0, hi: 1.0 },
            }],
        };
        let prep = prepare_run("n", &base, Some(overlay), vec!["x".into()], 500, 3).unwrap();
        let (rec, csv) = prep.execute().unwrap();
        assert_eq!(rec.status, RunStatus::Completed);
        assert_eq!(rec.overlay_name.as_deref(), Some("shift"));
        assert!(rec.results[0].mean > 0.0 && rec.results[0].mean < 1.0);
        let again = replay(&rec, &base).unwrap();
        assert_eq!(samples_csv(&again), csv);

        let back: RunRecord = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(back, rec);

        let other = Network::from_specs(
            "n",
            vec![],
            vec![NodeSpec::constant("x", Category::Annual, ANNUAL, 0.0)],
        )
        .unwrap();
        assert!(matches!(replay(&rec, &other), Err(RunError::HashMismatch { .. })));
    }

    #[test]
    fn bad_requests() {
        let base = net();
        assert!(matches!(
            prepare_run("n", &base, None, vec!["y".into()], 10, 0),
            Err(RunError::Simulation(SimulationError::UnknownTarget(t))) if t == "y"
        ));
        assert!(matches!(
            prepare_run("n", &base, None, vec!["x".into()], 0, 0),
            Err(RunError::Simulation(SimulationError::ZeroSamples))
        ));
    }
}
