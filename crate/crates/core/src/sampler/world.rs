use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use super::rng::{fnv1a64, RngState};
use super::sample::{categorical_inverse_cdf, sample_distribution, SampleError};
use super::summary::{summarize, Summary};
use crate::netcore::apply_binary;
use crate::netcore::{BinaryOp, DistributionSpec, EvalError, Expr, Network, NodeId, NodeKind, ParentIndex, UnaryOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("node `{node}`: {source}")]
    Eval { node: NodeId, source: EvalError },
    #[error("node `{node}`: {source}")]
    Sample { node: NodeId, source: SampleError },
    #[error("node `{node}`: no table row for parent values {values:?}")]
    NoMatchingRow { node: NodeId, values: Vec<f64> },
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("sample count must be at least 1")]
    ZeroSamples,
}

/// One fully specified world: a value for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSample {
    pub assignment: BTreeMap<NodeId, f64>,
    pub seed_stream_index: u64,
}

/// Expression with identifiers resolved to node positions.
#[derive(Debug, Clone)]
enum Compiled {
    Lit(f64),
    Var(usize),
    Unary(UnaryOp, Box<Compiled>),
    Binary(BinaryOp, Box<Compiled>, Box<Compiled>),
    If(Box<Compiled>, Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    fn new(e: &Expr, net: &Network) -> Compiled {
        match e {
            Expr::Literal(v) => Compiled::Lit(*v),
            Expr::Ident(n) => Compiled::Var(net.position(n).expect("validated parent")),
            Expr::Unary(op, a) => Compiled::Unary(*op, Box::new(Compiled::new(a, net))),
            Expr::Binary(op, a, b) => {
                Compiled::Binary(*op, Box::new(Compiled::new(a, net)), Box::new(Compiled::new(b, net)))
            }
            Expr::If(c, a, b) => Compiled::If(
                Box::new(Compiled::new(c, net)),
                Box::new(Compiled::new(a, net)),
                Box::new(Compiled::new(b, net)),
            ),
        }
    }

    fn eval(&self, values: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Compiled::Lit(v) => *v,
            Compiled::Var(i) => values[*i],
            Compiled::Unary(op, a) => {
                let a = a.eval(values)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Not => {
                        if a == 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
            Compiled::Binary(op, a, b) => apply_binary(*op, a.eval(values)?, b.eval(values)?)?,
            Compiled::If(c, a, b) => {
                if c.eval(values)? != 0.0 {
                    a.eval(values)?
                } else {
                    b.eval(values)?
                }
            }
        })
    }
}

#[derive(Debug, Clone)]
enum Step {
    Constant(f64),
    Prior(DistributionSpec),
    Deterministic(Compiled),
    Table {
        parents: Vec<usize>,
        index: ParentIndex,
        values: Vec<f64>,
        rows: Vec<Vec<f64>>,
    },
    Conditional {
        parents: Vec<usize>,
        index: ParentIndex,
        rows: Vec<DistributionSpec>,
    },
}

/// Evaluation plan for a network: nodes in topological order with
/// pre-resolved parents and per-node stream hashes.
#[derive(Debug, Clone)]
pub struct CompiledNetwork<'a> {
    net: &'a Network,
    /// (node position, id hash, step), topological order.
    steps: Vec<(usize, u64, Step)>,
}

impl<'a> CompiledNetwork<'a> {
    pub fn new(net: &'a Network) -> Self {
        Self::restricted(net, None)
    }

    /// Plan covering only `keep`-marked nodes (an ancestor-closed set).
    fn restricted(net: &'a Network, keep: Option<&[bool]>) -> Self {
        let mut steps = Vec::new();
        for &i in net.order_indices() {
            if keep.is_some_and(|k| !k[i]) {
                continue;
            }
            let node = &net.nodes()[i];
            let step = match &node.kind {
                NodeKind::Constant { value, .. } => Step::Constant(*value),
                NodeKind::Prior { dist, .. } => Step::Prior(dist.clone()),
                NodeKind::Deterministic { expr, .. } => Step::Deterministic(Compiled::new(expr, net)),
                NodeKind::ConditionalTable { index, states, rows } => Step::Table {
                    parents: net.parent_indices(i).to_vec(),
                    index: index.clone(),
                    values: states.iter().map(|s| s.value).collect(),
                    rows: rows.clone(),
                },
                NodeKind::ConditionalDistribution { index, rows } => Step::Conditional {
                    parents: net.parent_indices(i).to_vec(),
                    index: index.clone(),
                    rows: rows.clone(),
                },
            };
            steps.push((i, fnv1a64(node.id.as_str().as_bytes()), step));
        }
        CompiledNetwork { net, steps }
    }

    /// Fill `values` (indexed by node position) for one world.
    fn evaluate(&self, rng: RngState, values: &mut [f64]) -> Result<(), SimulationError> {
        let mut parent_buf = Vec::new();
        for (i, hash, step) in &self.steps {
            let node_id = || self.net.nodes()[*i].id.clone();
            let v = match step {
                Step::Constant(v) => *v,
                Step::Prior(dist) => {
                    let mut g = rng.node_generator(*hash);
                    sample_distribution(dist, &mut g).map_err(|source| SimulationError::Sample {
                        node: node_id(),
                        source,
                    })?
                }
                Step::Deterministic(expr) => expr.eval(values).map_err(|source| SimulationError::Eval {
                    node: node_id(),
                    source,
                })?,
                Step::Table {
                    parents,
                    index,
                    values: states,
                    rows,
                } => {
                    let row = select_row(parents, index, values, &mut parent_buf).ok_or_else(|| {
                        SimulationError::NoMatchingRow {
                            node: node_id(),
                            values: parent_buf.clone(),
                        }
                    })?;
                    let mut g = rng.node_generator(*hash);
                    categorical_inverse_cdf(states, &rows[row], g.next_f64())
                }
                Step::Conditional { parents, index, rows } => {
                    let row = select_row(parents, index, values, &mut parent_buf).ok_or_else(|| {
                        SimulationError::NoMatchingRow {
                            node: node_id(),
                            values: parent_buf.clone(),
                        }
                    })?;
                    let mut g = rng.node_generator(*hash);
                    sample_distribution(&rows[row], &mut g).map_err(|source| SimulationError::Sample {
                        node: node_id(),
                        source,
                    })?
                }
            };
            values[*i] = v;
        }
        Ok(())
    }
}

fn select_row(parents: &[usize], index: &ParentIndex, values: &[f64], buf: &mut Vec<f64>) -> Option<usize> {
    buf.clear();
    buf.extend(parents.iter().map(|&p| values[p]));
    index.row_for(buf)
}

/// Forward-sample every node once, in topological order.
pub fn instantiate_world(net: &Network, rng: RngState) -> Result<WorldSample, SimulationError> {
    let plan = CompiledNetwork::new(net);
    let mut values = vec![0.0; net.len()];
    plan.evaluate(rng, &mut values)?;
    Ok(WorldSample {
        assignment: net.nodes().iter().zip(values).map(|(n, v)| (n.id.clone(), v)).collect(),
        seed_stream_index: rng.stream_index,
    })
}

/// Forecast distribution of one target.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub target: NodeId,
    pub samples: Vec<f64>,
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
    pub histogram: BTreeMap<i64, u64>,
}

/// Results of one seeded Monte Carlo run, in the order targets were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    pub master_seed: u64,
    pub n: usize,
    pub results: Vec<ForecastResult>,
}

impl Forecast {
    pub fn get(&self, target: &str) -> Option<&ForecastResult> {
        self.results.iter().find(|r| r.target == target)
    }

    pub fn targets(&self) -> impl Iterator<Item = &NodeId> {
        self.results.iter().map(|r| &r.target)
    }
}

/// Sample `n` independent worlds (substreams `0..n`) and collect every target
/// from the same world at each index.
pub fn run_monte_carlo(
    net: &Network,
    targets: &[NodeId],
    n: usize,
    master_seed: u64,
) -> Result<Forecast, SimulationError> {
    if n == 0 {
        return Err(SimulationError::ZeroSamples);
    }
    let positions: Vec<usize> = targets
        .iter()
        .map(|t| {
            net.position(t.as_str())
                .ok_or_else(|| SimulationError::UnknownTarget(t.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mask = net.ancestor_mask(&positions);
    let plan = CompiledNetwork::restricted(net, Some(&mask));

    const CHUNK: usize = 256;
    let chunks: Vec<Result<Vec<f64>, SimulationError>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut values = vec![0.0; net.len()];
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut out = Vec::with_capacity((hi - lo) * positions.len());
            for i in lo..hi {
                plan.evaluate(RngState::new(master_seed, i as u64), &mut values)?;
                out.extend(positions.iter().map(|&p| values[p]));
            }
            Ok(out)
        })
        .collect();

    let mut per_target: Vec<Vec<f64>> = vec![Vec::with_capacity(n); positions.len()];
    for chunk in chunks {
        for world in chunk?.chunks(positions.len()) {
            for (t, v) in world.iter().enumerate() {
                per_target[t].push(*v);
            }
        }
    }

    let results = targets
        .iter()
        .zip(per_target)
        .map(|(target, samples)| {
            let Summary {
                mean,
                stddev,
                histogram,
            } = summarize(&samples).expect("n >= 1");
            ForecastResult {
                target: target.clone(),
                n: samples.len(),
                samples,
                mean,
                stddev,
                histogram,
            }
        })
        .collect();
    Ok(Forecast {
        master_seed,
        n,
        results,
    })
}
