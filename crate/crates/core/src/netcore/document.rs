//! JSON network document format.
//!
//! ```json
//! {
//!   "name": "toy",
//!   "periods": ["90Q1"],
//!   "nodes": [
//!     {"id": "p", "category": "supply", "period": "90Q1", "kind": "prior",
//!      "dist": {"type": "categorical", "values": [0, 1], "probs": [0.5, 0.5]}},
//!     {"id": "d", "category": "price", "period": "90Q1", "kind": "deterministic",
//!      "parents": ["p"], "expr": "p * 2"}
//!   ]
//! }
//! ```
//!
//! Conditional rows are keyed by parent *values* (`given`), one entry per parent.

use serde::{Deserialize, Serialize};

use super::dist::DistributionSpec;
use super::expr::{parse_expression, SyntaxError};
use super::node::{Category, NodeId, NodeKind, NodeSpec, ParentIndex, State};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub name: String,
    #[serde(default)]
    pub periods: Vec<String>,
    pub nodes: Vec<NodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: NodeId,
    pub category: Category,
    pub period: String,
    #[serde(flatten)]
    pub kind: KindDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindDoc {
    Constant {
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Prior {
        dist: DistributionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Deterministic {
        parents: Vec<NodeId>,
        expr: String,
    },
    ConditionalTable {
        parents: Vec<NodeId>,
        states: Vec<State>,
        rows: Vec<ProbRow>,
    },
    ConditionalDistribution {
        parents: Vec<NodeId>,
        rows: Vec<DistRow>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbRow {
    pub given: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistRow {
    pub given: Vec<f64>,
    pub dist: DistributionSpec,
}

/// Problems converting a single node document into a [`NodeSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum NodeDocError {
    Syntax(SyntaxError),
    Table(String),
}

impl NetworkDocument {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Canonical pretty JSON: fixed field order, nodes sorted by id by the caller.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("network document serializes");
        s.push('\n');
        s
    }
}

fn build_index(parents: &[NodeId], givens: &[&[f64]]) -> Result<(ParentIndex, Vec<usize>), String> {
    let mut keys: Vec<Vec<f64>> = vec![Vec::new(); parents.len()];
    for given in givens {
        if given.len() != parents.len() {
            return Err(format!(
                "row keyed by {} values but node has {} parents",
                given.len(),
                parents.len()
            ));
        }
        for (k, v) in given.iter().enumerate() {
            if !v.is_finite() {
                return Err("row key is not finite".into());
            }
            if !keys[k].contains(v) {
                keys[k].push(*v);
            }
        }
    }
    for k in &mut keys {
        k.sort_by(f64::total_cmp);
    }
    let index = ParentIndex {
        parents: parents.to_vec(),
        keys,
    };
    let expected = index.row_count();
    if givens.len() != expected {
        return Err(format!(
            "table has {} rows but the parent key space has {expected} combinations",
            givens.len()
        ));
    }
    let mut order = vec![usize::MAX; expected];
    for (i, given) in givens.iter().enumerate() {
        let r = index.row_for(given).expect("keys built from rows");
        if order[r] != usize::MAX {
            return Err(format!("duplicate row for parent values {given:?}"));
        }
        order[r] = i;
    }
    Ok((index, order))
}

impl NodeDoc {
    pub fn to_spec(&self) -> Result<NodeSpec, NodeDocError> {
        let kind = match &self.kind {
            KindDoc::Constant { value, label } => NodeKind::Constant {
                value: *value,
                label: label.clone(),
            },
            KindDoc::Prior { dist, labels } => NodeKind::Prior {
                dist: dist.clone(),
                labels: labels.clone(),
            },
            KindDoc::Deterministic { parents, expr } => NodeKind::Deterministic {
                parents: parents.clone(),
                expr: parse_expression(expr).map_err(NodeDocError::Syntax)?,
            },
            KindDoc::ConditionalTable { parents, states, rows } => {
                let givens: Vec<&[f64]> = rows.iter().map(|r| r.given.as_slice()).collect();
                let (index, order) = build_index(parents, &givens).map_err(NodeDocError::Table)?;
                NodeKind::ConditionalTable {
                    index,
                    states: states.clone(),
                    rows: order.iter().map(|&i| rows[i].probs.clone()).collect(),
                }
            }
            KindDoc::ConditionalDistribution { parents, rows } => {
                let givens: Vec<&[f64]> = rows.iter().map(|r| r.given.as_slice()).collect();
                let (index, order) = build_index(parents, &givens).map_err(NodeDocError::Table)?;
                NodeKind::ConditionalDistribution {
                    index,
                    rows: order.iter().map(|&i| rows[i].dist.clone()).collect(),
                }
            }
        };
        Ok(NodeSpec {
            id: self.id.clone(),
            category: self.category,
            period: self.period.clone(),
            kind,
        })
    }

    pub fn from_spec(spec: &NodeSpec) -> Self {
        let kind = match &spec.kind {
            NodeKind::Constant { value, label } => KindDoc::Constant {
                value: *value,
                label: label.clone(),
            },
            NodeKind::Prior { dist, labels } => KindDoc::Prior {
                dist: dist.clone(),
                labels: labels.clone(),
            },
            NodeKind::Deterministic { parents, expr } => KindDoc::Deterministic {
                parents: parents.clone(),
                expr: expr.to_string(),
            },
            NodeKind::ConditionalTable { index, states, rows } => KindDoc::ConditionalTable {
                parents: index.parents.clone(),
                states: states.clone(),
                rows: rows
                    .iter()
                    .enumerate()
                    .map(|(r, probs)| ProbRow {
                        given: index.values_for(r),
                        probs: probs.clone(),
                    })
                    .collect(),
            },
            NodeKind::ConditionalDistribution { index, rows } => KindDoc::ConditionalDistribution {
                parents: index.parents.clone(),
                rows: rows
                    .iter()
                    .enumerate()
                    .map(|(r, dist)| DistRow {
                        given: index.values_for(r),
                        dist: dist.clone(),
                    })
                    .collect(),
            },
        };
        NodeDoc {
            id: spec.id.clone(),
            category: spec.category,
            period: spec.period.clone(),
            kind,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattened_kind_field_order() {
        let doc = NodeDoc {
            id: "x".into(),
            category: Category::Price,
            period: "annual".into(),
            kind: KindDoc::Constant {
                value: 5.0,
                label: None,
            },
        };
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"id":"x","category":"price","period":"annual","kind":"constant","value":5.0}"#
        );
    }

    #[test]
    fn rows_are_reordered_canonically() {
        let doc: NodeDoc = serde_json::from_str(
            r#"{"id":"c","category":"politics","period":"annual","kind":"conditional_table",
                "parents":["p"],"states":[{"label":"lo","value":0},{"label":"hi","value":1}],
                "rows":[{"given":[2],"probs":[0.1,0.9]},{"given":[1],"probs":[0.6,0.4]}]}"#,
        )
        .unwrap();
        let spec = doc.to_spec().unwrap();
        let NodeKind::ConditionalTable { rows, index, .. } = &spec.kind else {
            panic!("expected table")
        };
        assert_eq!(index.keys, vec![vec![1.0, 2.0]]);
        assert_eq!(rows[0], vec![0.6, 0.4]);
        let back = NodeDoc::from_spec(&spec);
        let KindDoc::ConditionalTable { rows, .. } = back.kind else {
            panic!()
        };
        assert_eq!(rows[0].given, vec![1.0]);
    }

    #[test]
    fn incomplete_tables_are_rejected() {
        let doc: NodeDoc = serde_json::from_str(
            r#"{"id":"c","category":"politics","period":"annual","kind":"conditional_distribution",
                "parents":["p","q"],
                "rows":[{"given":[0,0],"dist":{"type":"uniform","lo":0,"hi":1}},
                        {"given":[1,1],"dist":{"type":"uniform","lo":0,"hi":1}}]}"#,
        )
        .unwrap();
        assert!(matches!(doc.to_spec(), Err(NodeDocError::Table(_))));
    }
}
