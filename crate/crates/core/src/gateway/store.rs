//! On-disk workspace.
//!
//! ```text
//! <root>/VERSION                 layout version ("1")
//! <root>/networks/<id>.json      canonical network documents (immutable)
//! <root>/overlays/<id>.json      overlay documents
//! <root>/params/<id>.json        parameter files
//! <root>/runs/<id>/record.json   run records (immutable)
//! <root>/runs/<id>/samples.csv
//! ```
//!
//! Every write goes to a temporary file that is renamed into place while the
//! workspace write lock is held, so readers see either the old file or the new
//! one and never block each other.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use thiserror::Error;

use super::run::RunRecord;
use crate::netcore::{Network, NetworkError};
use crate::oilmodel::{build_base_case, reference_parameters, REFERENCE_PARAMETERS_JSON};
use crate::scenario::{apply_overlay, constrained_overlay, reference_actuals, Overlay, ScenarioError};

pub const LAYOUT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid id `{0}`: use 1-128 characters from [A-Za-z0-9._-], not starting with '.'")]
    InvalidId(String),
    #[error("{kind} `{id}` not found")]
    NotFound { kind: &'static str, id: String },
    #[error("{kind} `{id}` already exists with different content")]
    Conflict { kind: &'static str, id: String },
    #[error("unsupported workspace layout version `{0}` (expected {LAYOUT_VERSION})")]
    UnsupportedVersion(String),
    #[error("stored {kind} `{id}` is corrupt: {detail}")]
    Corrupt {
        kind: &'static str,
        id: String,
        detail: String,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// What a PUT did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PutOutcome {
    Created,
    Replaced,
    Unchanged,
}

pub fn check_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidId(id.to_string()))
    }
}

#[derive(Debug)]
pub struct Workspace {
    root: PathBuf,
    writer: Mutex<()>,
}

impl Workspace {
    /// Open `root`, creating and seeding it with the reference models when it
    /// does not exist yet.
    pub fn open(root: impl Into<PathBuf>) -> Result<Workspace, StoreError> {
        let ws = Workspace {
            root: root.into(),
            writer: Mutex::new(()),
        };
        let version_file = ws.root.join("VERSION");
        match fs::read_to_string(&version_file) {
            Ok(v) if v.trim() == LAYOUT_VERSION => {}
            Ok(v) => return Err(StoreError::UnsupportedVersion(v.trim().to_string())),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                for dir in ["networks", "overlays", "params", "runs"] {
                    fs::create_dir_all(ws.root.join(dir))?;
                }
                ws.seed()?;
                ws.write_atomic(&version_file, format!("{LAYOUT_VERSION}\n").as_bytes())?;
            }
            Err(e) => return Err(e.into()),
        }
        Ok(ws)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn seed(&self) -> Result<(), StoreError> {
        let params = reference_parameters();
        let base = build_base_case(&params).map_err(|e| StoreError::Corrupt {
            kind: "reference model",
            id: "base".into(),
            detail: e.to_string(),
        })?;
        let overlay = constrained_overlay(&params, &reference_actuals()).map_err(|e| StoreError::Corrupt {
            kind: "reference model",
            id: "constrained".into(),
            detail: e.to_string(),
        })?;
        let constrained = apply_overlay(&base, &overlay)?;
        self.put_network(base.name(), &base)?;
        self.put_network(constrained.name(), &constrained)?;
        self.put_overlay(&overlay.name.clone(), &overlay)?;
        self.put_params("base_case", REFERENCE_PARAMETERS_JSON)?;
        Ok(())
    }

    fn path(&self, dir: &str, id: &str) -> PathBuf {
        self.root.join(dir).join(format!("{id}.json"))
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> io::Result<()> {
        let dir = path.parent().expect("workspace paths have a parent");
        let tmp = dir.join(format!(".tmp-{}-{}", std::process::id(), ulid::Ulid::new()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    }

    fn read(&self, kind: &'static str, path: &Path, id: &str) -> Result<String, StoreError> {
        fs::read_to_string(path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => StoreError::NotFound {
                kind,
                id: id.to_string(),
            },
            _ => e.into(),
        })
    }

    fn list(&self, dir: &str) -> Result<Vec<String>, StoreError> {
        let mut ids: Vec<String> = fs::read_dir(self.root.join(dir))?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                if name.starts_with('.') {
                    return None;
                }
                Some(name.strip_suffix(".json").unwrap_or(&name).to_string())
            })
            .collect();
        ids.sort();
        Ok(ids)
    }

    pub fn network_ids(&self) -> Result<Vec<String>, StoreError> {
        self.list("networks")
    }

    pub fn overlay_ids(&self) -> Result<Vec<String>, StoreError> {
        self.list("overlays")
    }

    pub fn params_ids(&self) -> Result<Vec<String>, StoreError> {
        self.list("params")
    }

    /// Run ids in creation order.
    pub fn run_ids(&self) -> Result<Vec<String>, StoreError> {
        self.list("runs")
    }

    /// Store a network under `id`. Networks are immutable: re-putting the same
    /// content is a no-op, different content is a conflict.
    pub fn put_network(&self, id: &str, net: &Network) -> Result<PutOutcome, StoreError> {
        check_id(id)?;
        let path = self.path("networks", id);
        let text = net.to_json();
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        match fs::read_to_string(&path) {
            Ok(existing) if existing == text => Ok(PutOutcome::Unchanged),
            Ok(_) => Err(StoreError::Conflict {
                kind: "network",
                id: id.to_string(),
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                self.write_atomic(&path, text.as_bytes())?;
                Ok(PutOutcome::Created)
            }
            Err(e) => Err(e.into()),
        }
    }

    pub fn network_json(&self, id: &str) -> Result<String, StoreError> {
        check_id(id)?;
        self.read("network", &self.path("networks", id), id)
    }

    pub fn network(&self, id: &str) -> Result<Network, StoreError> {
        let text = self.network_json(id)?;
        Network::from_json(&text).map_err(|e| StoreError::Corrupt {
            kind: "network",
            id: id.to_string(),
            detail: e.to_string(),
        })
    }

    /// Store an overlay. When its `base` names a stored network the overlay
    /// must apply cleanly to it.
    pub fn put_overlay(&self, id: &str, overlay: &Overlay) -> Result<PutOutcome, StoreError> {
        check_id(id)?;
        match self.network(&overlay.base) {
            Ok(base) => {
                apply_overlay(&base, overlay)?;
            }
            Err(StoreError::NotFound { .. } | StoreError::InvalidId(_)) => {}
            Err(e) => return Err(e),
        }
        let path = self.path("overlays", id);
        let text = overlay.to_json();
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let outcome = match fs::read_to_string(&path) {
            Ok(existing) if existing == text => return Ok(PutOutcome::Unchanged),
            Ok(_) => PutOutcome::Replaced,
            Err(e) if e.kind() == io::ErrorKind::NotFound => PutOutcome::Created,
            Err(e) => return Err(e.into()),
        };
        self.write_atomic(&path, text.as_bytes())?;
        Ok(outcome)
    }

    pub fn overlay(&self, id: &str) -> Result<Overlay, StoreError> {
        check_id(id)?;
        let text = self.read("overlay", &self.path("overlays", id), id)?;
        Overlay::from_json(&text).map_err(|e| StoreError::Corrupt {
            kind: "overlay",
            id: id.to_string(),
            detail: e.to_string(),
        })
    }

    pub fn put_params(&self, id: &str, text: &str) -> Result<PutOutcome, StoreError> {
        check_id(id)?;
        let path = self.path("params", id);
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let outcome = if path.exists() {
            PutOutcome::Replaced
        } else {
            PutOutcome::Created
        };
        self.write_atomic(&path, text.as_bytes())?;
        Ok(outcome)
    }

    pub fn params(&self, id: &str) -> Result<String, StoreError> {
        check_id(id)?;
        self.read("params", &self.path("params", id), id)
    }

    /// Persist a finished run. Records are write-once; failed runs have no samples.
    pub fn put_run(&self, record: &RunRecord, samples_csv: Option<&str>) -> Result<(), StoreError> {
        check_id(&record.id)?;
        let dir = self.root.join("runs").join(&record.id);
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        if dir.join("record.json").exists() {
            return Err(StoreError::Conflict {
                kind: "run",
                id: record.id.clone(),
            });
        }
        fs::create_dir_all(&dir)?;
        if let Some(csv) = samples_csv {
            self.write_atomic(&dir.join("samples.csv"), csv.as_bytes())?;
        }
        self.write_atomic(&dir.join("record.json"), record.to_json().as_bytes())?;
        Ok(())
    }

    pub fn run(&self, id: &str) -> Result<RunRecord, StoreError> {
        check_id(id)?;
        let path = self.root.join("runs").join(id).join("record.json");
        let text = self.read("run", &path, id)?;
        serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
            kind: "run",
            id: id.to_string(),
            detail: e.to_string(),
        })
    }

    pub fn run_samples_csv(&self, id: &str) -> Result<String, StoreError> {
        check_id(id)?;
        let path = self.root.join("runs").join(id).join("samples.csv");
        self.read("run", &path, id)
    }
}
