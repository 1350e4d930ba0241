//! Scenario overlays (pin, replace, excise, insert history), the
//! constrained-capacity case and network diffs.

mod constrained;
mod diff;
mod overlay;

pub use constrained::{
    build_constrained_case, constrained_overlay, ConstrainedActuals, ConstrainedCaseError, QuarterActuals,
    CONSTRAINED_CASE_NAME, CONSTRAINED_TARGETS,
};
pub use diff::{diff_networks, NetworkDiff, NodeChange};
pub use overlay::{apply_overlay, Edit, Overlay, ScenarioError};

/// Shipped 90Q1/90Q2 actuals used by the constrained case.
pub const REFERENCE_ACTUALS_JSON: &str = include_str!("../../models/constrained_actuals.json");

pub fn reference_actuals() -> ConstrainedActuals {
    ConstrainedActuals::from_json(REFERENCE_ACTUALS_JSON).expect("shipped actuals are valid")
}
