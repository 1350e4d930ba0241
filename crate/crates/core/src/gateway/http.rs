//! HTTP service over a [`Workspace`].
//!
//! | method | path                    | body / result                              |
//! |--------|-------------------------|--------------------------------------------|
//! | GET    | `/healthz`              | `{status, version}`                        |
//! | GET    | `/networks`             | list of ids                                |
//! | GET    | `/networks/{id}`        | network document                           |
//! | PUT    | `/networks/{id}`        | network document; 201, 200 if unchanged, 409 if different |
//! | GET    | `/overlays`             | list of ids                                |
//! | GET    | `/overlays/{id}`        | overlay document                           |
//! | PUT    | `/overlays/{id}`        | overlay document; 201 or 200               |
//! | POST   | `/simulate`             | `{network, overlay?, targets, n?, seed?}`; 200 + record, or 202 + `{id, status}` |
//! | GET    | `/runs`                 | run records, oldest first                  |
//! | GET    | `/runs/{id}`            | run record                                 |
//! | GET    | `/runs/{id}/samples.csv`| sample CSV                                 |
//! | POST   | `/diff`                 | `{a, b}`, each a network id or `{network, overlay?}` |
//!
//! Errors are `{code, message, detail}` with status 400 (malformed or invalid
//! input), 404 (unknown id), 409 (conflict) or 422 (well-formed but
//! semantically unusable, e.g. an unknown target).

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use super::run::{prepare_run, RunError, RunRecord, RunStatus};
use super::store::{PutOutcome, StoreError, Workspace};
use super::validate::{diagnose, has_errors};
use crate::netcore::{Network, NetworkDocument, NodeId};
use crate::sampler::{SimulationError, DEFAULT_SAMPLES};
use crate::scenario::{apply_overlay, diff_networks, Overlay, ScenarioError};

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(30);

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"code": self.code, "message": self.message, "detail": self.detail});
        (self.status, Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::InvalidId(_) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_id", msg),
            StoreError::NotFound { .. } => ApiError::new(StatusCode::NOT_FOUND, "not_found", msg),
            StoreError::Conflict { .. } => ApiError::new(StatusCode::CONFLICT, "conflict", msg),
            StoreError::Network(_) => ApiError::new(StatusCode::BAD_REQUEST, "validation_failed", msg),
            StoreError::Scenario(s) => s.into(),
            StoreError::UnsupportedVersion(_) | StoreError::Corrupt { .. } | StoreError::Io(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", msg)
            }
        }
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        let msg = e.to_string();
        match e {
            ScenarioError::Parse(_) => ApiError::new(StatusCode::BAD_REQUEST, "malformed_overlay", msg),
            ScenarioError::ValidationFailed(_) | ScenarioError::InvalidEdit { .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, "invalid_overlay", msg)
            }
            ScenarioError::EditTargetMissing { .. } | ScenarioError::RewireTypeError { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "overlay_not_applicable", msg)
            }
        }
    }
}

impl From<SimulationError> for ApiError {
    fn from(e: SimulationError) -> Self {
        let msg = e.to_string();
        match e {
            SimulationError::UnknownTarget(t) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unknown_target", msg).with_detail(json!({"target": t}))
            }
            SimulationError::ZeroSamples => ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", msg),
            _ => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "simulation_failed", msg),
        }
    }
}

impl From<RunError> for ApiError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(s) => s.into(),
            RunError::Simulation(s) => s.into(),
            RunError::HashMismatch { .. } => ApiError::new(StatusCode::CONFLICT, "hash_mismatch", e.to_string()),
        }
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "malformed_json",
            format!("malformed request body: {e}"),
        )
    })
}

type ApiResult = Result<Response, ApiError>;

pub struct AppState {
    pub workspace: Workspace,
    pub budget: Duration,
    running: Mutex<HashMap<String, RunRecord>>,
}

impl AppState {
    pub fn new(workspace: Workspace, budget: Duration) -> Arc<AppState> {
        Arc::new(AppState {
            workspace,
            budget,
            running: Mutex::new(HashMap::new()),
        })
    }

    fn running(&self) -> std::sync::MutexGuard<'_, HashMap<String, RunRecord>> {
        self.running.lock().unwrap_or_else(|p| p.into_inner())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/networks", get(list_networks))
        .route("/networks/{id}", get(get_network).put(put_network))
        .route("/overlays", get(list_overlays))
        .route("/overlays/{id}", get(get_overlay).put(put_overlay))
        .route("/simulate", post(simulate))
        .route("/runs", get(list_runs))
        .route("/runs/{id}", get(get_run))
        .route("/runs/{id}/samples.csv", get(get_run_samples))
        .route("/diff", post(diff))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .with_state(state)
}

/// Bind and serve until the process is stopped.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!(
        "beliefcast serving {} on http://{}",
        state.workspace.root().display(),
        listener.local_addr()?
    );
    axum::serve(listener, router(state)).await
}

fn json_text(status: StatusCode, text: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn put_status(outcome: PutOutcome) -> StatusCode {
    match outcome {
        PutOutcome::Created => StatusCode::CREATED,
        PutOutcome::Replaced | PutOutcome::Unchanged => StatusCode::OK,
    }
}

async fn healthz() -> Json<Value> {
    Json(json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}))
}

async fn list_networks(State(s): State<Arc<AppState>>) -> ApiResult {
    Ok(Json(s.workspace.network_ids()?).into_response())
}

async fn get_network(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    Ok(json_text(StatusCode::OK, s.workspace.network_json(&id)?))
}

async fn put_network(State(s): State<Arc<AppState>>, Path(id): Path<String>, body: String) -> ApiResult {
    let diags = diagnose(&body);
    if has_errors(&diags) {
        let code = if NetworkDocument::from_json(&body).is_err() {
            "malformed_network"
        } else {
            "validation_failed"
        };
        let first = diags[0].message.clone();
        return Err(ApiError::new(StatusCode::BAD_REQUEST, code, first).with_detail(json!({"diagnostics": diags})));
    }
    let net = Network::from_json(&body).expect("diagnosed as valid");
    let outcome = s.workspace.put_network(&id, &net)?;
    Ok((
        put_status(outcome),
        Json(json!({"id": id, "hash": net.content_hash(), "nodes": net.len(), "warnings": diags})),
    )
        .into_response())
}

async fn list_overlays(State(s): State<Arc<AppState>>) -> ApiResult {
    Ok(Json(s.workspace.overlay_ids()?).into_response())
}

async fn get_overlay(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    Ok(json_text(StatusCode::OK, s.workspace.overlay(&id)?.to_json()))
}

async fn put_overlay(State(s): State<Arc<AppState>>, Path(id): Path<String>, body: String) -> ApiResult {
    let overlay = Overlay::from_json(&body)?;
    let outcome = s.workspace.put_overlay(&id, &overlay)?;
    Ok((
        put_status(outcome),
        Json(json!({"id": id, "edits": overlay.edits.len()})),
    )
        .into_response())
}

/// An overlay given by workspace id or inline.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OverlayRef {
    Id(String),
    Inline(Overlay),
}

impl OverlayRef {
    fn resolve(self, ws: &Workspace) -> Result<Overlay, ApiError> {
        match self {
            OverlayRef::Id(id) => Ok(ws.overlay(&id)?),
            OverlayRef::Inline(o) => Ok(o),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateRequest {
    network: String,
    #[serde(default)]
    overlay: Option<OverlayRef>,
    targets: Vec<NodeId>,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default)]
    seed: u64,
}

fn default_n() -> usize {
    DEFAULT_SAMPLES
}

async fn simulate(State(s): State<Arc<AppState>>, body: String) -> ApiResult {
    let req: SimulateRequest = parse_body(&body)?;
    if req.targets.is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_request",
            "targets must not be empty",
        ));
    }
    let base = s.workspace.network(&req.network)?;
    let overlay = req.overlay.map(|o| o.resolve(&s.workspace)).transpose()?;
    let prepared = prepare_run(&req.network, &base, overlay, req.targets, req.n, req.seed)?;
    let id = prepared.record.id.clone();
    s.running().insert(id.clone(), prepared.record.clone());

    let worker = Arc::clone(&s);
    let mut handle = tokio::task::spawn_blocking(move || {
        let (record, csv) = match prepared.execute() {
            Ok((r, csv)) => (r, Some(csv)),
            Err((r, _)) => (r, None),
        };
        let stored = worker.workspace.put_run(&record, csv.as_deref());
        let mut running = worker.running();
        match stored {
            Ok(()) => {
                running.remove(&record.id);
            }
            Err(e) => {
                let mut failed = record.clone();
                failed.status = RunStatus::Failed;
                failed.error = Some(format!("could not persist run: {e}"));
                running.insert(record.id.clone(), failed);
            }
        }
        record
    });

    match tokio::time::timeout(s.budget, &mut handle).await {
        Ok(Ok(record)) => match record.status {
            RunStatus::Failed => Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "simulation_failed",
                record.error.clone().unwrap_or_default(),
            )
            .with_detail(json!({"run": record.id}))),
            _ => Ok(Json(record).into_response()),
        },
        Ok(Err(join)) => Err(ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            format!("simulation task failed: {join}"),
        )),
        Err(_) => Ok((
            StatusCode::ACCEPTED,
            [(header::LOCATION, format!("/runs/{id}"))],
            Json(json!({"id": id, "status": RunStatus::Running})),
        )
            .into_response()),
    }
}

async fn list_runs(State(s): State<Arc<AppState>>) -> ApiResult {
    let mut records: Vec<RunRecord> = s.running().values().cloned().collect();
    for id in s.workspace.run_ids()? {
        if !records.iter().any(|r| r.id == id) {
            match s.workspace.run(&id) {
                Ok(r) => records.push(r),
                // Directory created but record not yet renamed into place.
                Err(StoreError::NotFound { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Json(records).into_response())
}

async fn get_run(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    if let Some(r) = s.running().get(&id) {
        return Ok(Json(r.clone()).into_response());
    }
    Ok(Json(s.workspace.run(&id)?).into_response())
}

async fn get_run_samples(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    if s.running().contains_key(&id) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "run_not_complete",
            format!("run `{id}` has no samples yet"),
        ));
    }
    let record = s.workspace.run(&id)?;
    if record.status != RunStatus::Completed {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "run_not_complete",
            format!("run `{id}` failed"),
        ));
    }
    let csv = s.workspace.run_samples_csv(&id)?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NetworkRef {
    Id(String),
    Scenario {
        network: String,
        #[serde(default)]
        overlay: Option<OverlayRef>,
    },
}

impl NetworkRef {
    fn resolve(self, ws: &Workspace) -> Result<Network, ApiError> {
        match self {
            NetworkRef::Id(id) => Ok(ws.network(&id)?),
            NetworkRef::Scenario { network, overlay } => {
                let base = ws.network(&network)?;
                match overlay {
                    None => Ok(base),
                    Some(o) => Ok(apply_overlay(&base, &o.resolve(ws)?)?),
                }
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffRequest {
    a: NetworkRef,
    b: NetworkRef,
}

async fn diff(State(s): State<Arc<AppState>>, body: String) -> ApiResult {
    let req: DiffRequest = parse_body(&body)?;
    let a = req.a.resolve(&s.workspace)?;
    let b = req.b.resolve(&s.workspace)?;
    Ok(Json(diff_networks(&a, &b)).into_response())
}
