use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::dist::DistributionSpec;
use super::expr::Expr;

/// Node identifier, e.g. `WTIp.3` or `NCCap`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Part before the first `.`, e.g. `WTI` for `WTI.3`.
    pub fn prefix(&self) -> &str {
        self.0.split('.').next().unwrap_or(&self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl PartialEq<str> for NodeId {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for NodeId {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Variable taxonomy of the oil-market model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Historical,
    Annual,
    Tax,
    Demand,
    Supply,
    Politics,
    Price,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Historical,
        Category::Annual,
        Category::Tax,
        Category::Demand,
        Category::Supply,
        Category::Politics,
        Category::Price,
    ];
}

/// Period tag for nodes that do not vary by quarter.
pub const ANNUAL: &str = "annual";

/// A labelled discrete state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub label: String,
    pub value: f64,
}

/// Row index over the joint states of discrete parents.
///
/// `keys[k]` holds the sorted parent values that parent `k` is keyed on; rows are
/// laid out in mixed-radix order with the first parent most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct ParentIndex {
    pub parents: Vec<NodeId>,
    pub keys: Vec<Vec<f64>>,
}

impl ParentIndex {
    pub fn row_count(&self) -> usize {
        self.keys.iter().map(Vec::len).product()
    }

    /// Row for the given parent values (in parent order).
    pub fn row_for(&self, values: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for (keys, v) in self.keys.iter().zip(values) {
            let k = keys.iter().position(|x| x == v)?;
            idx = idx * keys.len() + k;
        }
        Some(idx)
    }

    /// Parent values for a row index (inverse of [`row_for`](Self::row_for)).
    pub fn values_for(&self, mut row: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.keys.len()];
        for (k, keys) in self.keys.iter().enumerate().rev() {
            out[k] = keys[row % keys.len()];
            row /= keys.len();
        }
        out
    }

    /// Drop parent `pos`, keeping only rows where it equals `value`.
    /// Returns the kept row indices, or `None` if `value` is not a key.
    pub fn slice(&self, pos: usize, value: f64) -> Option<(ParentIndex, Vec<usize>)> {
        let k = self.keys[pos].iter().position(|x| *x == value)?;
        let kept: Vec<usize> = (0..self.row_count())
            .filter(|r| {
                let inner: usize = self.keys[pos + 1..].iter().map(Vec::len).product();
                (r / inner) % self.keys[pos].len() == k
            })
            .collect();
        let mut parents = self.parents.clone();
        parents.remove(pos);
        let mut keys = self.keys.clone();
        keys.remove(pos);
        Some((ParentIndex { parents, keys }, kept))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Constant {
        value: f64,
        label: Option<String>,
    },
    Prior {
        dist: DistributionSpec,
        labels: Option<Vec<String>>,
    },
    Deterministic {
        parents: Vec<NodeId>,
        expr: Expr,
    },
    ConditionalTable {
        index: ParentIndex,
        states: Vec<State>,
        rows: Vec<Vec<f64>>,
    },
    ConditionalDistribution {
        index: ParentIndex,
        rows: Vec<DistributionSpec>,
    },
}

impl NodeKind {
    pub fn parents(&self) -> &[NodeId] {
        match self {
            NodeKind::Constant { .. } | NodeKind::Prior { .. } => &[],
            NodeKind::Deterministic { parents, .. } => parents,
            NodeKind::ConditionalTable { index, .. } | NodeKind::ConditionalDistribution { index, .. } => {
                &index.parents
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Constant { .. } => "constant",
            NodeKind::Prior { .. } => "prior",
            NodeKind::Deterministic { .. } => "deterministic",
            NodeKind::ConditionalTable { .. } => "conditional_table",
            NodeKind::ConditionalDistribution { .. } => "conditional_distribution",
        }
    }

    /// Draws randomness when sampled.
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            NodeKind::Prior { .. } | NodeKind::ConditionalTable { .. } | NodeKind::ConditionalDistribution { .. }
        )
    }

    /// Labelled states, if this node may serve as a discrete parent.
    pub fn discrete_states(&self) -> Option<Vec<State>> {
        match self {
            NodeKind::Constant { value, label } => Some(vec![State {
                label: label.clone().unwrap_or_else(|| value.to_string()),
                value: *value,
            }]),
            NodeKind::Prior {
                dist: DistributionSpec::Categorical { values, .. },
                labels,
            } => Some(
                values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| State {
                        label: labels
                            .as_ref()
                            .and_then(|l| l.get(i).cloned())
                            .unwrap_or_else(|| v.to_string()),
                        value: *v,
                    })
                    .collect(),
            ),
            NodeKind::ConditionalTable { states, .. } => Some(states.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: NodeId,
    pub category: Category,
    /// Quarter tag such as `90Q1`, or [`ANNUAL`].
    pub period: String,
    pub kind: NodeKind,
}

impl NodeSpec {
    pub fn constant(id: impl Into<NodeId>, category: Category, period: &str, value: f64) -> Self {
        NodeSpec {
            id: id.into(),
            category,
            period: period.to_string(),
            kind: NodeKind::Constant { value, label: None },
        }
    }

    pub fn prior(id: impl Into<NodeId>, category: Category, period: &str, dist: DistributionSpec) -> Self {
        NodeSpec {
            id: id.into(),
            category,
            period: period.to_string(),
            kind: NodeKind::Prior { dist, labels: None },
        }
    }

    /// Deterministic node; parents are the expression's identifiers.
    pub fn deterministic(id: impl Into<NodeId>, category: Category, period: &str, expr: Expr) -> Self {
        let parents = expr.identifiers().into_iter().map(NodeId::from).collect();
        NodeSpec {
            id: id.into(),
            category,
            period: period.to_string(),
            kind: NodeKind::Deterministic { parents, expr },
        }
    }

    pub fn parents(&self) -> &[NodeId] {
        self.kind.parents()
    }
}
