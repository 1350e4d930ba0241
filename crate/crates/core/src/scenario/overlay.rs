use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{DistributionSpec, Network, NetworkError, NodeId, NodeKind, NodeSpec};

/// Ordered list of edits turning a base network into a scenario variant.
///
/// ```json
/// {"name": "capacity-pinned", "base": "base_case",
///  "edits": [{"op": "pin", "node": "CapUt.3", "value": 1.0}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub name: String,
    /// Reference to the network this overlay was written against.
    pub base: String,
    #[serde(default)]
    pub edits: Vec<Edit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Edit {
    /// Replace a node with a constant.
    Pin { node: NodeId, value: f64 },
    /// Replace a node with an exogenous prior.
    ReplaceDist { node: NodeId, dist: DistributionSpec },
    /// Remove a node; each dependent sees `substitute` in its place.
    Excise { node: NodeId, substitute: f64 },
    /// Pin observed values for nodes of one period.
    InsertHistory {
        period: String,
        values: BTreeMap<NodeId, f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("edit {edit}: no node `{node}`")]
    EditTargetMissing { edit: usize, node: NodeId },
    #[error("edit {edit}: cannot rewire `{child}` after removing `{node}`: {detail}")]
    RewireTypeError {
        edit: usize,
        node: NodeId,
        child: NodeId,
        detail: String,
    },
    #[error("edit {edit}: {detail}")]
    InvalidEdit { edit: usize, detail: String },
    #[error("overlay result is invalid: {0}")]
    ValidationFailed(NetworkError),
    #[error("cannot parse overlay: {0}")]
    Parse(String),
}

impl Overlay {
    pub fn identity(name: &str, base: &str) -> Self {
        Overlay {
            name: name.to_string(),
            base: base.to_string(),
            edits: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("overlay serializes");
        s.push('\n');
        s
    }
}

fn finite(edit: usize, what: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::InvalidEdit {
            edit,
            detail: format!("{what} must be finite"),
        })
    }
}

fn pin(nodes: &mut BTreeMap<NodeId, NodeSpec>, edit: usize, id: &NodeId, value: f64) -> Result<(), ScenarioError> {
    finite(edit, "pinned value", value)?;
    let spec = nodes
        .get_mut(id)
        .ok_or_else(|| ScenarioError::EditTargetMissing { edit, node: id.clone() })?;
    let label = spec.kind.discrete_states().and_then(|states| {
        states
            .into_iter()
            .find(|s| s.value == value)
            .map(|s| s.label)
            .filter(|l| *l != value.to_string())
    });
    spec.kind = NodeKind::Constant { value, label };
    Ok(())
}

/// Rewire `child` as if parent `removed` were the constant `value`. A node
/// left without parents becomes the matching exogenous kind.
fn rewire(kind: &NodeKind, removed: &NodeId, value: f64) -> Result<NodeKind, String> {
    let out = match kind {
        NodeKind::Deterministic { parents, expr } => NodeKind::Deterministic {
            parents: parents.iter().filter(|p| *p != removed).cloned().collect(),
            expr: expr.substitute(removed.as_str(), value),
        },
        NodeKind::ConditionalTable { index, states, rows } => {
            let pos = index.parents.iter().position(|p| p == removed).expect("is a parent");
            let (index, kept) = index
                .slice(pos, value)
                .ok_or_else(|| format!("{value} is not one of the table's keys for that parent"))?;
            NodeKind::ConditionalTable {
                index,
                states: states.clone(),
                rows: kept.iter().map(|&r| rows[r].clone()).collect(),
            }
        }
        NodeKind::ConditionalDistribution { index, rows } => {
            let pos = index.parents.iter().position(|p| p == removed).expect("is a parent");
            let (index, kept) = index
                .slice(pos, value)
                .ok_or_else(|| format!("{value} is not one of the table's keys for that parent"))?;
            NodeKind::ConditionalDistribution {
                index,
                rows: kept.iter().map(|&r| rows[r].clone()).collect(),
            }
        }
        NodeKind::Constant { .. } | NodeKind::Prior { .. } => unreachable!("roots have no parents"),
    };
    Ok(match out {
        NodeKind::Deterministic { parents, expr } if parents.is_empty() => NodeKind::Constant {
            value: expr.eval(&Default::default()).map_err(|e| e.to_string())?,
            label: None,
        },
        NodeKind::ConditionalTable {
            index,
            states,
            mut rows,
        } if index.parents.is_empty() => NodeKind::Prior {
            dist: DistributionSpec::Categorical {
                values: states.iter().map(|s| s.value).collect(),
                probs: rows.remove(0),
            },
            labels: Some(states.into_iter().map(|s| s.label).collect()),
        },
        NodeKind::ConditionalDistribution { index, mut rows } if index.parents.is_empty() => NodeKind::Prior {
            dist: rows.remove(0),
            labels: None,
        },
        other => other,
    })
}

/// Apply `overlay` to `base`, edit by edit, and validate the result.
/// `base` is never modified.
pub fn apply_overlay(base: &Network, overlay: &Overlay) -> Result<Network, ScenarioError> {
    let mut nodes: BTreeMap<NodeId, NodeSpec> = base.nodes().iter().map(|n| (n.id.clone(), n.clone())).collect();

    for (i, edit) in overlay.edits.iter().enumerate() {
        match edit {
            Edit::Pin { node, value } => pin(&mut nodes, i, node, *value)?,
            Edit::ReplaceDist { node, dist } => {
                dist.check()
                    .map_err(|detail| ScenarioError::InvalidEdit { edit: i, detail })?;
                let spec = nodes.get_mut(node).ok_or_else(|| ScenarioError::EditTargetMissing {
                    edit: i,
                    node: node.clone(),
                })?;
                let labels = match &spec.kind {
                    NodeKind::Prior { labels, .. } => labels.clone(),
                    _ => None,
                };
                spec.kind = NodeKind::Prior {
                    dist: dist.clone(),
                    labels,
                };
            }
            Edit::Excise { node, substitute } => {
                finite(i, "substitute", *substitute)?;
                if nodes.remove(node).is_none() {
                    return Err(ScenarioError::EditTargetMissing {
                        edit: i,
                        node: node.clone(),
                    });
                }
                for child in nodes.values_mut() {
                    if child.parents().contains(node) {
                        child.kind = rewire(&child.kind, node, *substitute).map_err(|detail| {
                            ScenarioError::RewireTypeError {
                                edit: i,
                                node: node.clone(),
                                child: child.id.clone(),
                                detail,
                            }
                        })?;
                    }
                }
            }
            Edit::InsertHistory { period, values } => {
                if !base.periods().contains(period) {
                    return Err(ScenarioError::InvalidEdit {
                        edit: i,
                        detail: format!("unknown period `{period}`"),
                    });
                }
                for (node, v) in values {
                    if let Some(spec) = nodes.get(node) {
                        if spec.period != *period {
                            return Err(ScenarioError::InvalidEdit {
                                edit: i,
                                detail: format!("`{node}` belongs to {}, not {period}", spec.period),
                            });
                        }
                    }
                    pin(&mut nodes, i, node, *v)?;
                }
            }
        }
    }

    let used: BTreeSet<&str> = nodes.values().map(|n| n.period.as_str()).collect();
    let used_before: BTreeSet<&str> = base.nodes().iter().map(|n| n.period.as_str()).collect();
    let periods = base
        .periods()
        .iter()
        .filter(|p| used.contains(p.as_str()) || !used_before.contains(p.as_str()))
        .cloned()
        .collect();
    Network::from_specs(&overlay.name, periods, nodes.into_values().collect()).map_err(ScenarioError::ValidationFailed)
}
