use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::dist::check_probability_row;
use super::document::{NetworkDocument, NodeDoc, NodeDocError};
use super::expr::{SyntaxError, MAX_DEPTH, MAX_NODES};
use super::node::{NodeId, NodeKind, NodeSpec, ANNUAL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("network has no nodes")]
    Empty,
    #[error("duplicate node id `{0}`")]
    DuplicateNode(NodeId),
    #[error("node `{node}`: unknown parent `{parent}`")]
    UnknownParent { node: NodeId, parent: NodeId },
    #[error("cycle detected: {}", display_path(.path))]
    CycleDetected { path: Vec<NodeId> },
    #[error("node `{node}`: {detail}")]
    ArityMismatch { node: NodeId, detail: String },
    #[error("node `{node}`: bad probability row {row}: {detail}")]
    BadProbabilityRow { node: NodeId, row: usize, detail: String },
    #[error("node `{node}`: bad distribution: {detail}")]
    BadDistribution { node: NodeId, detail: String },
    #[error("node `{node}`: parent `{parent}` is not discrete-valued")]
    NonDiscreteParent { node: NodeId, parent: NodeId },
    #[error("node `{node}`: table: {detail}")]
    BadTable { node: NodeId, detail: String },
    #[error("node `{node}`: expression {error}")]
    Syntax { node: NodeId, error: SyntaxError },
    #[error("node `{node}`: unknown period `{period}`")]
    UnknownPeriod { node: NodeId, period: String },
    #[error("node `{node}`: root nodes must be constant or prior, found {kind}")]
    RootNotExogenous { node: NodeId, kind: &'static str },
    #[error("node `{node}`: {detail}")]
    InvalidValue { node: NodeId, detail: String },
}

fn display_path(path: &[NodeId]) -> String {
    path.iter().map(NodeId::as_str).collect::<Vec<_>>().join(" -> ")
}

impl NetworkError {
    /// Node the diagnostic is about, when there is one.
    pub fn node(&self) -> Option<&NodeId> {
        match self {
            NetworkError::Malformed(_) | NetworkError::Empty => None,
            NetworkError::CycleDetected { path } => path.first(),
            NetworkError::DuplicateNode(node)
            | NetworkError::UnknownParent { node, .. }
            | NetworkError::ArityMismatch { node, .. }
            | NetworkError::BadProbabilityRow { node, .. }
            | NetworkError::BadDistribution { node, .. }
            | NetworkError::NonDiscreteParent { node, .. }
            | NetworkError::BadTable { node, .. }
            | NetworkError::Syntax { node, .. }
            | NetworkError::UnknownPeriod { node, .. }
            | NetworkError::RootNotExogenous { node, .. }
            | NetworkError::InvalidValue { node, .. } => Some(node),
        }
    }
}

/// Non-fatal lint produced by [`validate_parameters`].
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Node with neither parents nor children.
    Unreachable(NodeId),
    ZeroProbabilityState {
        node: NodeId,
        value: f64,
    },
    ConstantShadowsPrior {
        constant: NodeId,
        prior: NodeId,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Unreachable(id) => write!(f, "node `{id}` is not connected to any other node"),
            Warning::ZeroProbabilityState { node, value } => {
                write!(f, "node `{node}`: state {value} has zero probability")
            }
            Warning::ConstantShadowsPrior { constant, prior } => {
                write!(f, "constant `{constant}` shadows prior `{prior}` in the same period")
            }
        }
    }
}

/// Immutable, validated DAG of typed nodes.
#[derive(Debug, Clone)]
pub struct Network {
    name: String,
    periods: Vec<String>,
    /// Sorted by id.
    nodes: Vec<NodeSpec>,
    index: HashMap<NodeId, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.periods == other.periods && self.nodes == other.nodes
    }
}

/// Parse and validate a network document.
pub fn build_network(doc: &NetworkDocument) -> Result<Network, NetworkError> {
    Network::from_document(doc)
}

/// All validation errors in a document, in a stable order. Empty means valid.
pub fn validate_document(doc: &NetworkDocument) -> Vec<NetworkError> {
    let mut errors = Vec::new();
    let mut specs = Vec::with_capacity(doc.nodes.len());
    for node in &doc.nodes {
        match node.to_spec() {
            Ok(spec) => specs.push(spec),
            Err(NodeDocError::Syntax(error)) => errors.push(NetworkError::Syntax {
                node: node.id.clone(),
                error,
            }),
            Err(NodeDocError::Table(detail)) => errors.push(NetworkError::BadTable {
                node: node.id.clone(),
                detail,
            }),
        }
    }
    errors.extend(validate_specs(&doc.periods, &specs));
    errors
}

fn validate_specs(periods: &[String], specs: &[NodeSpec]) -> Vec<NetworkError> {
    let mut errors = Vec::new();
    if specs.is_empty() {
        errors.push(NetworkError::Empty);
        return errors;
    }
    let mut by_id: BTreeMap<&NodeId, &NodeSpec> = BTreeMap::new();
    for spec in specs {
        if by_id.insert(&spec.id, spec).is_some() {
            errors.push(NetworkError::DuplicateNode(spec.id.clone()));
        }
    }

    for spec in specs {
        let id = &spec.id;
        if spec.period != ANNUAL && !periods.contains(&spec.period) {
            errors.push(NetworkError::UnknownPeriod {
                node: id.clone(),
                period: spec.period.clone(),
            });
        }
        let parents = spec.parents();
        for (i, p) in parents.iter().enumerate() {
            if parents[..i].contains(p) {
                errors.push(NetworkError::ArityMismatch {
                    node: id.clone(),
                    detail: format!("parent `{p}` listed twice"),
                });
            }
            if !by_id.contains_key(p) {
                errors.push(NetworkError::UnknownParent {
                    node: id.clone(),
                    parent: p.clone(),
                });
            }
        }
        match &spec.kind {
            NodeKind::Constant { value, .. } => {
                if !value.is_finite() {
                    errors.push(NetworkError::InvalidValue {
                        node: id.clone(),
                        detail: "constant value must be finite".into(),
                    });
                }
            }
            NodeKind::Prior { dist, labels } => {
                if let Err(detail) = dist.check() {
                    errors.push(NetworkError::BadDistribution {
                        node: id.clone(),
                        detail,
                    });
                }
                if let Some(labels) = labels {
                    let n = dist.support().map(|(v, _)| v.len());
                    if n != Some(labels.len()) {
                        errors.push(NetworkError::BadDistribution {
                            node: id.clone(),
                            detail: "labels require a categorical prior with one label per value".into(),
                        });
                    }
                }
            }
            NodeKind::Deterministic { parents, expr } => {
                if parents.is_empty() {
                    errors.push(NetworkError::RootNotExogenous {
                        node: id.clone(),
                        kind: spec.kind.name(),
                    });
                }
                if expr.depth() > MAX_DEPTH || expr.node_count() > MAX_NODES {
                    errors.push(NetworkError::ArityMismatch {
                        node: id.clone(),
                        detail: "expression exceeds size limits".into(),
                    });
                }
                let idents = expr.identifiers();
                for ident in &idents {
                    if !parents.iter().any(|p| p == ident) {
                        errors.push(NetworkError::ArityMismatch {
                            node: id.clone(),
                            detail: format!("expression uses `{ident}` which is not a declared parent"),
                        });
                    }
                }
                for p in parents {
                    if !idents.contains(p.as_str()) {
                        errors.push(NetworkError::ArityMismatch {
                            node: id.clone(),
                            detail: format!("declared parent `{p}` is not used by the expression"),
                        });
                    }
                }
            }
            NodeKind::ConditionalTable { index, states, rows } => {
                if index.parents.is_empty() {
                    errors.push(NetworkError::RootNotExogenous {
                        node: id.clone(),
                        kind: spec.kind.name(),
                    });
                }
                if states.is_empty() {
                    errors.push(NetworkError::BadTable {
                        node: id.clone(),
                        detail: "no states".into(),
                    });
                }
                for (i, s) in states.iter().enumerate() {
                    if !s.value.is_finite() || states[..i].iter().any(|o| o.value == s.value) {
                        errors.push(NetworkError::BadTable {
                            node: id.clone(),
                            detail: format!("state `{}` has a duplicate or non-finite value", s.label),
                        });
                    }
                }
                for (r, row) in rows.iter().enumerate() {
                    if row.len() != states.len() {
                        errors.push(NetworkError::BadProbabilityRow {
                            node: id.clone(),
                            row: r,
                            detail: format!("{} entries for {} states", row.len(), states.len()),
                        });
                    } else if let Err(detail) = check_probability_row(row) {
                        errors.push(NetworkError::BadProbabilityRow {
                            node: id.clone(),
                            row: r,
                            detail,
                        });
                    }
                }
                check_parent_keys(spec, index, &by_id, &mut errors);
            }
            NodeKind::ConditionalDistribution { index, rows } => {
                if index.parents.is_empty() {
                    errors.push(NetworkError::RootNotExogenous {
                        node: id.clone(),
                        kind: spec.kind.name(),
                    });
                }
                for dist in rows {
                    if let Err(detail) = dist.check() {
                        errors.push(NetworkError::BadDistribution {
                            node: id.clone(),
                            detail,
                        });
                    }
                }
                check_parent_keys(spec, index, &by_id, &mut errors);
            }
        }
    }

    if !specs.iter().any(|s| s.parents().is_empty()) {
        errors.push(NetworkError::Empty);
    }
    if let Some(path) = find_cycle(&by_id) {
        errors.push(NetworkError::CycleDetected { path });
    }
    errors
}

fn check_parent_keys(
    spec: &NodeSpec,
    index: &super::node::ParentIndex,
    by_id: &BTreeMap<&NodeId, &NodeSpec>,
    errors: &mut Vec<NetworkError>,
) {
    for (k, p) in index.parents.iter().enumerate() {
        let Some(parent) = by_id.get(p) else { continue };
        match parent.kind.discrete_states() {
            None => errors.push(NetworkError::NonDiscreteParent {
                node: spec.id.clone(),
                parent: p.clone(),
            }),
            Some(states) => {
                for s in states {
                    if !index.keys[k].contains(&s.value) {
                        errors.push(NetworkError::BadTable {
                            node: spec.id.clone(),
                            detail: format!("no row for parent `{p}` = {}", s.value),
                        });
                    }
                }
            }
        }
    }
}

/// Depth-first search for a back edge; returns the witness `a -> ... -> a`.
fn find_cycle(by_id: &BTreeMap<&NodeId, &NodeSpec>) -> Option<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark: HashMap<&NodeId, Mark> = by_id.keys().map(|k| (*k, Mark::New)).collect();
    for &start in by_id.keys() {
        if mark[start] != Mark::New {
            continue;
        }
        // (node, next parent position)
        let mut stack: Vec<(&NodeId, usize)> = vec![(start, 0)];
        mark.insert(start, Mark::Active);
        while let Some((node, pos)) = stack.last_mut() {
            let parents = by_id[*node].parents();
            if *pos < parents.len() {
                let p = &parents[*pos];
                *pos += 1;
                let Some((&pid, _)) = by_id.get_key_value(p) else {
                    continue;
                };
                match mark[pid] {
                    Mark::New => {
                        mark.insert(pid, Mark::Active);
                        stack.push((pid, 0));
                    }
                    Mark::Active => {
                        let at = stack.iter().position(|(n, _)| *n == pid).unwrap();
                        // The stack walks child -> parent; report arcs parent -> child.
                        let mut path: Vec<NodeId> = stack[at..].iter().map(|(n, _)| (*n).clone()).collect();
                        path.push(pid.clone());
                        path.reverse();
                        return Some(path);
                    }
                    Mark::Done => {}
                }
            } else {
                mark.insert(node, Mark::Done);
                stack.pop();
            }
        }
    }
    None
}

impl Network {
    pub fn from_document(doc: &NetworkDocument) -> Result<Network, NetworkError> {
        if let Some(first) = validate_document(doc).into_iter().next() {
            return Err(first);
        }
        let specs = doc
            .nodes
            .iter()
            .map(|n| n.to_spec().expect("validated above"))
            .collect();
        Ok(Self::assemble(doc.name.clone(), doc.periods.clone(), specs))
    }

    pub fn from_json(text: &str) -> Result<Network, NetworkError> {
        let doc = NetworkDocument::from_json(text).map_err(|e| NetworkError::Malformed(e.to_string()))?;
        Self::from_document(&doc)
    }

    /// Validate already-parsed node specs.
    pub fn from_specs(
        name: impl Into<String>,
        periods: Vec<String>,
        specs: Vec<NodeSpec>,
    ) -> Result<Network, NetworkError> {
        if let Some(first) = validate_specs(&periods, &specs).into_iter().next() {
            return Err(first);
        }
        Ok(Self::assemble(name.into(), periods, specs))
    }

    fn assemble(name: String, periods: Vec<String>, mut nodes: Vec<NodeSpec>) -> Network {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let parents: Vec<Vec<usize>> = nodes
            .iter()
            .map(|n| n.parents().iter().map(|p| index[p]).collect())
            .collect();
        let mut children = vec![Vec::new(); nodes.len()];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        // Kahn's algorithm; the min-heap over sorted indices breaks ties lexicographically.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == 0)
            .map(|(i, _)| Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        debug_assert_eq!(order.len(), nodes.len());
        Network {
            name,
            periods,
            nodes,
            index,
            parents,
            children,
            order,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    /// Nodes sorted by id.
    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&NodeSpec> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn parent_indices(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub(crate) fn order_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn children(&self, id: &str) -> Vec<&NodeId> {
        self.index
            .get(id)
            .map(|&i| self.children[i].iter().map(|&c| &self.nodes[c].id).collect())
            .unwrap_or_default()
    }

    pub fn roots(&self) -> Vec<&NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.parents[i].is_empty())
            .map(|i| &self.nodes[i].id)
            .collect()
    }

    pub fn sinks(&self) -> Vec<&NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.children[i].is_empty())
            .map(|i| &self.nodes[i].id)
            .collect()
    }

    pub fn topological_order(&self) -> Vec<NodeId> {
        self.order.iter().map(|&i| self.nodes[i].id.clone()).collect()
    }

    /// Indices of `targets` and all their ancestors.
    pub(crate) fn ancestor_mask(&self, targets: &[usize]) -> Vec<bool> {
        let mut keep = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = targets.to_vec();
        while let Some(i) = stack.pop() {
            if !keep[i] {
                keep[i] = true;
                stack.extend(&self.parents[i]);
            }
        }
        keep
    }

    /// Ids of `target` and every node it depends on, sorted.
    pub fn ancestors(&self, target: &str) -> Vec<NodeId> {
        let Some(i) = self.position(target) else {
            return Vec::new();
        };
        let mask = self.ancestor_mask(&[i]);
        self.nodes
            .iter()
            .zip(mask)
            .filter(|(_, k)| *k)
            .map(|(n, _)| n.id.clone())
            .collect()
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            name: self.name.clone(),
            periods: self.periods.clone(),
            nodes: self.nodes.iter().map(NodeDoc::from_spec).collect(),
        }
    }

    /// Canonical serialization.
    pub fn to_json(&self) -> String {
        self.to_document().to_json()
    }

    /// SHA-256 (hex) of the canonical serialization.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn into_specs(self) -> (String, Vec<String>, Vec<NodeSpec>) {
        (self.name, self.periods, self.nodes)
    }
}

pub fn topological_order(net: &Network) -> Vec<NodeId> {
    net.topological_order()
}

/// Non-fatal lints over a valid network.
pub fn validate_parameters(net: &Network) -> Vec<Warning> {
    let mut out = Vec::new();
    if net.len() > 1 {
        for (i, n) in net.nodes.iter().enumerate() {
            if net.parents[i].is_empty() && net.children[i].is_empty() {
                out.push(Warning::Unreachable(n.id.clone()));
            }
        }
    }
    for n in &net.nodes {
        let dists: Vec<&super::dist::DistributionSpec> = match &n.kind {
            NodeKind::Prior { dist, .. } => vec![dist],
            NodeKind::ConditionalDistribution { rows, .. } => rows.iter().collect(),
            _ => Vec::new(),
        };
        for d in dists {
            if let Some((values, probs)) = d.support() {
                for (v, p) in values.iter().zip(probs) {
                    if *p == 0.0 {
                        out.push(Warning::ZeroProbabilityState {
                            node: n.id.clone(),
                            value: *v,
                        });
                    }
                }
            }
        }
    }
    for c in &net.nodes {
        if !matches!(c.kind, NodeKind::Constant { .. }) {
            continue;
        }
        for p in &net.nodes {
            if matches!(p.kind, NodeKind::Prior { .. }) && p.id.prefix() == c.id.prefix() && p.period == c.period {
                out.push(Warning::ConstantShadowsPrior {
                    constant: c.id.clone(),
                    prior: p.id.clone(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Category, DistributionSpec, Expr};
    use proptest::prelude::*;

    fn det(id: &str, expr: &str) -> NodeSpec {
        NodeSpec::deterministic(
            id,
            Category::Price,
            ANNUAL,
            crate::netcore::parse_expression(expr).unwrap(),
        )
    }

    fn c(id: &str, v: f64) -> NodeSpec {
        NodeSpec::constant(id, Category::Historical, ANNUAL, v)
    }

    #[test]
    fn single_constant_network() {
        let net = Network::from_json(
            r#"{"name":"one","periods":[],"nodes":[
                {"id":"x","category":"historical","period":"annual","kind":"constant","value":5}]}"#,
        )
        .unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.roots().len(), 1);
        assert!(validate_parameters(&net).is_empty());
    }

    #[test]
    fn two_cycle_is_rejected_with_witness() {
        let doc = NetworkDocument {
            name: "cyc".into(),
            periods: vec![],
            nodes: vec![
                NodeDoc::from_spec(&c("r", 1.0)),
                NodeDoc::from_spec(&det("a", "b + r")),
                NodeDoc::from_spec(&det("b", "a")),
            ],
        };
        match build_network(&doc) {
            Err(NetworkError::CycleDetected { path }) => {
                assert_eq!(path.first(), path.last());
                assert_eq!(path.len(), 3);
                assert!(path.contains(&"a".into()) && path.contains(&"b".into()));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn long_cycle_witness_follows_arcs() {
        let specs = vec![
            c("r", 1.0),
            det("a", "d + r"),
            det("b", "a"),
            det("c", "b"),
            det("d", "c"),
        ];
        let err = Network::from_specs("cyc", vec![], specs).unwrap_err();
        let NetworkError::CycleDetected { path } = err else {
            panic!()
        };
        assert_eq!(path.len(), 5);
        // every consecutive pair is an arc parent -> child
        let arcs = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")];
        for w in path.windows(2) {
            assert!(arcs.contains(&(w[0].as_str(), w[1].as_str())), "{path:?}");
        }
    }

    #[test]
    fn structural_errors() {
        let err = Network::from_specs("x", vec![], vec![c("r", 1.0), det("a", "r + zz")]);
        assert!(matches!(err, Err(NetworkError::UnknownParent { .. })));

        let mut d = det("a", "r");
        if let NodeKind::Deterministic { parents, .. } = &mut d.kind {
            parents.push("s".into());
        }
        let err = Network::from_specs("x", vec![], vec![c("r", 1.0), c("s", 2.0), d]);
        assert!(matches!(err, Err(NetworkError::ArityMismatch { .. })));

        let d = NodeSpec {
            id: "a".into(),
            category: Category::Price,
            period: ANNUAL.into(),
            kind: NodeKind::Deterministic {
                parents: vec![],
                expr: Expr::ident("r"),
            },
        };
        let err = Network::from_specs("x", vec![], vec![c("r", 1.0), d]);
        assert!(matches!(err, Err(NetworkError::RootNotExogenous { .. })));

        let err = Network::from_specs("x", vec![], vec![c("r", 1.0), c("r", 2.0)]);
        assert!(matches!(err, Err(NetworkError::DuplicateNode(_))));

        let mut q = c("r", 1.0);
        q.period = "91Q1".into();
        let err = Network::from_specs("x", vec!["90Q1".into()], vec![q]);
        assert!(matches!(err, Err(NetworkError::UnknownPeriod { .. })));

        assert!(matches!(
            Network::from_specs("x", vec![], vec![]),
            Err(NetworkError::Empty)
        ));
    }

    const CPT_DOC: &str = r#"{"name":"cpt","periods":[],"nodes":[
        {"id":"g","category":"tax","period":"annual","kind":"prior",
         "dist":{"type":"categorical","values":[0,1],"probs":[0.4,0.6]}},
        {"id":"f","category":"tax","period":"annual","kind":"conditional_table","parents":["g"],
         "states":[{"label":"no","value":0},{"label":"yes","value":1}],
         "rows":[{"given":[0],"probs":[0.65,0.35]},{"given":[1],"probs":[0.85,ROW]}]}]}"#;

    #[test]
    fn probability_rows_checked_at_1e9() {
        let ok = CPT_DOC.replace("ROW", "0.15");
        assert!(Network::from_json(&ok).is_ok());
        let slightly_off = CPT_DOC.replace("ROW", "0.1500000005");
        assert!(Network::from_json(&slightly_off).is_ok());
        let bad = CPT_DOC.replace("ROW", "0.150000002");
        assert!(matches!(
            Network::from_json(&bad),
            Err(NetworkError::BadProbabilityRow { row: 1, .. })
        ));
    }

    #[test]
    fn tables_need_discrete_parents_with_full_coverage() {
        let doc = CPT_DOC.replace("ROW", "0.15").replace(
            r#""values":[0,1],"probs":[0.4,0.6]"#,
            r#""values":[0,1,2],"probs":[0.4,0.3,0.3]"#,
        );
        assert!(matches!(Network::from_json(&doc), Err(NetworkError::BadTable { .. })));
        let doc = CPT_DOC.replace("ROW", "0.15").replace(
            r#"{"type":"categorical","values":[0,1],"probs":[0.4,0.6]}"#,
            r#"{"type":"uniform","lo":0,"hi":1}"#,
        );
        assert!(matches!(
            Network::from_json(&doc),
            Err(NetworkError::NonDiscreteParent { .. })
        ));
    }

    #[test]
    fn chain_and_diamond_orders() {
        let chain = Network::from_specs("chain", vec![], vec![det("c", "b"), det("b", "a"), c("a", 1.0)]).unwrap();
        assert_eq!(
            chain.topological_order(),
            vec!["a".into(), "b".into(), "c".into()] as Vec<NodeId>
        );

        let diamond = Network::from_specs(
            "diamond",
            vec![],
            vec![det("d", "c + b"), det("c", "a"), det("b", "a"), c("a", 1.0)],
        )
        .unwrap();
        let order: Vec<String> = diamond.topological_order().into_iter().map(|n| n.to_string()).collect();
        assert_eq!(order, ["a", "b", "c", "d"]);
    }

    #[test]
    fn warnings() {
        let net = Network::from_specs("w", vec![], vec![c("a", 1.0), det("b", "a"), c("iso", 3.0)]).unwrap();
        assert_eq!(validate_parameters(&net), vec![Warning::Unreachable("iso".into())]);

        let net = Network::from_specs(
            "w",
            vec![],
            vec![
                NodeSpec::prior(
                    "p",
                    Category::Supply,
                    ANNUAL,
                    DistributionSpec::Categorical {
                        values: vec![0.0, 1.0],
                        probs: vec![0.0, 1.0],
                    },
                ),
                det("b", "p"),
            ],
        )
        .unwrap();
        assert_eq!(
            validate_parameters(&net),
            vec![Warning::ZeroProbabilityState {
                node: "p".into(),
                value: 0.0
            }]
        );

        let mut shadow = c("X.1", 1.0);
        shadow.period = "90Q1".into();
        let mut prior = NodeSpec::prior("X.1b", Category::Supply, "90Q1", DistributionSpec::normal(0.0, 1.0));
        prior.period = "90Q1".into();
        let net = Network::from_specs("w", vec!["90Q1".into()], vec![shadow, prior, det("y", "X.1 + X.1b")]).unwrap();
        assert!(matches!(
            validate_parameters(&net)[..],
            [Warning::ConstantShadowsPrior { .. }]
        ));
    }

    #[test]
    fn serialization_round_trip_and_hash() {
        let net = Network::from_json(&CPT_DOC.replace("ROW", "0.15")).unwrap();
        let again = Network::from_json(&net.to_json()).unwrap();
        assert_eq!(net, again);
        assert_eq!(net.to_json(), again.to_json());
        assert_eq!(net.content_hash(), again.content_hash());
        assert_eq!(net.content_hash().len(), 64);
    }

    /// Random DAG: node i may depend on any j < i, then ids are shuffled so
    /// index order and id order disagree.
    fn arb_dag() -> impl Strategy<Value = Vec<NodeSpec>> {
        (2usize..24)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                )
            })
            .prop_map(|(adj, names)| {
                let n = names.len();
                (0..n)
                    .map(|i| {
                        let id = format!("n{:02}", names[i]);
                        let parents: Vec<String> = (0..i)
                            .filter(|&j| adj[i][j])
                            .map(|j| format!("n{:02}", names[j]))
                            .collect();
                        if parents.is_empty() {
                            c(&id, i as f64)
                        } else {
                            det(&id, &parents.join(" + "))
                        }
                    })
                    .collect()
            })
    }

    proptest! {
        #[test]
        fn topological_order_is_a_valid_permutation(specs in arb_dag()) {
            let net = Network::from_specs("rand", vec![], specs.clone()).unwrap();
            let order = net.topological_order();
            prop_assert_eq!(order.len(), specs.len());
            let pos: HashMap<&NodeId, usize> = order.iter().enumerate().map(|(i, id)| (id, i)).collect();
            prop_assert_eq!(pos.len(), specs.len());
            for s in &specs {
                for p in s.parents() {
                    prop_assert!(pos[p] < pos[&s.id]);
                }
            }
        }

        #[test]
        fn document_round_trip_is_structural_identity(specs in arb_dag()) {
            let net = Network::from_specs("rand", vec![], specs).unwrap();
            let back = build_network(&NetworkDocument::from_json(&net.to_json()).unwrap()).unwrap();
            prop_assert_eq!(back, net);
        }

        #[test]
        fn any_cycle_is_rejected(specs in arb_dag(), from in 0usize..24, to in 0usize..24) {
            // add an arc from a later node back to an earlier one
            let n = specs.len();
            let (early, late) = (from % n, to % n);
            prop_assume!(early < late);
            let mut specs = specs;
            // make `late` reachable from `early` through a fresh chain, then close the loop
            let early_id = specs[early].id.to_string();
            let late_id = specs[late].id.to_string();
            specs.push(det("zz_bridge", &early_id));
            let old = specs[late].kind.clone();
            let expr = match &old {
                NodeKind::Deterministic { expr, .. } => format!("{expr} + zz_bridge"),
                _ => "zz_bridge".to_string(),
            };
            specs[late] = det(&late_id, &expr);
            let closing = det(&early_id, &late_id);
            specs[early] = closing;
            let errors = validate_specs(&[], &specs);
            let has_cycle = errors.iter().any(|e| matches!(e, NetworkError::CycleDetected { .. }));
            prop_assert!(has_cycle);
            prop_assert!(Network::from_specs("cyc", vec![], specs).is_err());
        }
    }
}
