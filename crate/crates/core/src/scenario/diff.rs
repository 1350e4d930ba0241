use serde::{Deserialize, Serialize};

use crate::netcore::{Network, NodeDoc, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeChange {
    pub id: NodeId,
    pub before: NodeDoc,
    pub after: NodeDoc,
}

/// Node-level difference from `a` to `b`, each list sorted by id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NetworkDiff {
    pub added: Vec<NodeId>,
    pub removed: Vec<NodeId>,
    pub changed: Vec<NodeChange>,
}

impl NetworkDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.changed.is_empty()
    }
}

pub fn diff_networks(a: &Network, b: &Network) -> NetworkDiff {
    let mut d = NetworkDiff::default();
    for n in a.nodes() {
        match b.get(n.id.as_str()) {
            None => d.removed.push(n.id.clone()),
            Some(other) if other != n => d.changed.push(NodeChange {
                id: n.id.clone(),
                before: NodeDoc::from_spec(n),
                after: NodeDoc::from_spec(other),
            }),
            Some(_) => {}
        }
    }
    d.added = b
        .nodes()
        .iter()
        .filter(|n| !a.contains(n.id.as_str()))
        .map(|n| n.id.clone())
        .collect();
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Category, NodeSpec, ANNUAL};

    fn net(specs: Vec<NodeSpec>) -> Network {
        Network::from_specs("n", vec![], specs).unwrap()
    }

    #[test]
    fn self_diff_is_empty() {
        let a = net(vec![NodeSpec::constant("x", Category::Annual, ANNUAL, 1.0)]);
        assert!(diff_networks(&a, &a).is_empty());
    }

    #[test]
    fn added_removed_changed() {
        let a = net(vec![
            NodeSpec::constant("x", Category::Annual, ANNUAL, 1.0),
            NodeSpec::constant("y", Category::Annual, ANNUAL, 2.0),
        ]);
        let b = net(vec![
            NodeSpec::constant("x", Category::Annual, ANNUAL, 5.0),
            NodeSpec::constant("z", Category::Annual, ANNUAL, 2.0),
        ]);
        let d = diff_networks(&a, &b);
        assert_eq!(d.added, vec![NodeId::from("z")]);
        assert_eq!(d.removed, vec![NodeId::from("y")]);
        assert_eq!(d.changed.len(), 1);
        assert_eq!(d.changed[0].id, "x");
        let back = diff_networks(&b, &a);
        assert_eq!(back.added, d.removed);
        assert_eq!(back.removed, d.added);
    }
}
