//! Command-line interface, HTTP service and on-disk workspace.

mod calibrate;
pub mod cli;
mod http;
mod run;
mod store;
mod validate;

pub use calibrate::{evaluate, AnnualGoal, BucketGoal, CalibrationReport, Check, Goals, TargetGoal, Tolerance};
pub use http::{router, serve, ApiError, AppState, DEFAULT_BUDGET};
pub use run::{new_run_id, prepare_run, replay, PreparedRun, RunError, RunRecord, RunStatus};
pub use store::{check_id, PutOutcome, StoreError, Workspace, LAYOUT_VERSION};
pub use validate::{diagnose, has_errors, Diagnostic, Severity};
