//! Brute-force marginal of one node by enumerating every joint state of its
//! (finite, discrete) ancestors. Meant as a test oracle for the sampler.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::netcore::{DistributionSpec, EvalError, Network, NodeId, NodeKind};

/// Enumeration refuses joint state spaces above this size.
pub const MAX_JOINT_STATES: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("node `{0}` is not finitely enumerable")]
    NotFinitelyEnumerable(NodeId),
    #[error("joint state space has {0} states, above the limit")]
    StateSpaceTooLarge(u128),
    #[error("node `{node}`: {source}")]
    Eval { node: NodeId, source: EvalError },
    #[error("node `{0}`: no table row for its parent values")]
    NoMatchingRow(NodeId),
}

/// Exact marginal distribution: distinct values in ascending order with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub support: Vec<(f64, f64)>,
}

impl ExactDistribution {
    pub fn total_probability(&self) -> f64 {
        self.support.iter().map(|(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|(v, p)| v * p).sum()
    }

    pub fn stddev(&self) -> f64 {
        let m = self.mean();
        self.support
            .iter()
            .map(|(v, p)| p * (v - m) * (v - m))
            .sum::<f64>()
            .sqrt()
    }

    pub fn probability_of(&self, value: f64) -> f64 {
        self.support.iter().find(|(v, _)| *v == value).map_or(0.0, |(_, p)| *p)
    }
}

enum Plan<'a> {
    Fixed(f64),
    Choice(&'a [f64], &'a [f64]),
    Expr(&'a crate::netcore::Expr),
    Table(&'a crate::netcore::ParentIndex, Vec<f64>, &'a [Vec<f64>]),
    CondDist(&'a crate::netcore::ParentIndex, &'a [DistributionSpec]),
}

struct Enumerator<'a> {
    net: &'a Network,
    steps: Vec<(usize, Plan<'a>)>,
    values: Vec<f64>,
    target: usize,
    out: BTreeMap<u64, (f64, f64)>,
}

impl Enumerator<'_> {
    fn walk(&mut self, k: usize, weight: f64) -> Result<(), ExactError> {
        if k == self.steps.len() {
            let v = self.values[self.target];
            // +0.0 and -0.0 share a bucket
            let key = if v == 0.0 { 0u64 } else { v.to_bits() };
            self.out.entry(key).or_insert((v, 0.0)).1 += weight;
            return Ok(());
        }
        let i = self.steps[k].0;
        let id = || self.net.nodes()[i].id.clone();
        let parent_values =
            |values: &[f64]| -> Vec<f64> { self.net.parent_indices(i).iter().map(|&p| values[p]).collect() };
        let branches: Vec<(f64, f64)> = match &self.steps[k].1 {
            Plan::Fixed(v) => vec![(*v, 1.0)],
            Plan::Choice(vs, ps) => vs.iter().copied().zip(ps.iter().copied()).collect(),
            Plan::Expr(e) => {
                let mut lookup = |name: &str| self.net.position(name).map(|p| self.values[p]);
                let v = e
                    .eval_with(&mut lookup)
                    .map_err(|source| ExactError::Eval { node: id(), source })?;
                vec![(v, 1.0)]
            }
            Plan::Table(index, states, rows) => {
                let r = index
                    .row_for(&parent_values(&self.values))
                    .ok_or_else(|| ExactError::NoMatchingRow(id()))?;
                states.iter().copied().zip(rows[r].iter().copied()).collect()
            }
            Plan::CondDist(index, rows) => {
                let r = index
                    .row_for(&parent_values(&self.values))
                    .ok_or_else(|| ExactError::NoMatchingRow(id()))?;
                let (vs, ps) = rows[r].support().expect("checked discrete");
                vs.iter().copied().zip(ps.iter().copied()).collect()
            }
        };
        for (v, p) in branches {
            if p == 0.0 {
                continue;
            }
            self.values[i] = v;
            self.walk(k + 1, weight * p)?;
        }
        Ok(())
    }
}

/// Exact marginal of `target`.
pub fn enumerate_exact(net: &Network, target: &str) -> Result<ExactDistribution, ExactError> {
    let t = net
        .position(target)
        .ok_or_else(|| ExactError::UnknownTarget(target.to_string()))?;
    let mask = net.ancestor_mask(&[t]);
    let mut steps = Vec::new();
    let mut states: u128 = 1;
    for &i in net.order_indices() {
        if !mask[i] {
            continue;
        }
        let node = &net.nodes()[i];
        let not_finite = || ExactError::NotFinitelyEnumerable(node.id.clone());
        let (plan, width) = match &node.kind {
            NodeKind::Constant { value, .. } => (Plan::Fixed(*value), 1),
            NodeKind::Prior { dist, .. } => {
                let (vs, ps) = dist.support().ok_or_else(not_finite)?;
                (Plan::Choice(vs, ps), vs.len())
            }
            NodeKind::Deterministic { expr, .. } => (Plan::Expr(expr), 1),
            NodeKind::ConditionalTable {
                index,
                states: st,
                rows,
            } => (Plan::Table(index, st.iter().map(|s| s.value).collect(), rows), st.len()),
            NodeKind::ConditionalDistribution { index, rows } => {
                let mut w = 1;
                for r in rows {
                    w = w.max(r.support().ok_or_else(not_finite)?.0.len());
                }
                (Plan::CondDist(index, rows), w)
            }
        };
        states = states.saturating_mul(width as u128);
        steps.push((i, plan));
    }
    if states > MAX_JOINT_STATES {
        return Err(ExactError::StateSpaceTooLarge(states));
    }
    let mut e = Enumerator {
        net,
        steps,
        values: vec![0.0; net.len()],
        target: t,
        out: BTreeMap::new(),
    };
    e.walk(0, 1.0)?;
    let mut support: Vec<(f64, f64)> = e.out.into_values().collect();
    support.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ExactDistribution { support })
}
