//! Shared test helpers: a random all-discrete network generator with its own
//! brute-force oracle, plus small fixtures.
#![allow(dead_code)]

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde_json::{json, Value};

use beliefcast::netcore::Network;

/// One stochastic node of a generated model.
#[derive(Debug, Clone)]
pub enum RandomNode {
    Root {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
    /// Conditional table over earlier stochastic nodes; `table[row]` is the
    /// distribution over `values`, rows in mixed radix, first parent most
    /// significant.
    Table {
        parents: Vec<usize>,
        values: Vec<f64>,
        table: Vec<Vec<f64>>,
    },
}

impl RandomNode {
    pub fn values(&self) -> &[f64] {
        match self {
            RandomNode::Root { values, .. } | RandomNode::Table { values, .. } => values,
        }
    }
}

/// A small discrete model and a target
/// `y = sum_i w_i x_i + c * x_a * x_b + if(x_d > t, k, 0)`.
#[derive(Debug, Clone)]
pub struct RandomModel {
    pub nodes: Vec<RandomNode>,
    pub weights: Vec<f64>,
    pub product: (usize, usize, f64),
    pub step: (usize, f64, f64),
}

struct Gen(Xoshiro256PlusPlus);

impl Gen {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: usize) -> usize {
        (self.unit() * n as f64) as usize % n
    }

    /// Probability vector with every entry >= 0.02.
    fn simplex(&mut self, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| 0.1 + self.unit()).collect();
        let total: f64 = raw.iter().sum();
        let mut p: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let head: f64 = p[..k - 1].iter().sum();
        p[k - 1] = 1.0 - head;
        p
    }

    /// Distinct small integers (as f64), sorted.
    fn state_values(&mut self, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        while v.len() < k {
            let x = self.below(11) as f64 - 5.0;
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }
}

impl RandomModel {
    /// Deterministic draw: 2-6 stochastic nodes with 2-4 states each.
    pub fn generate(seed: u64) -> RandomModel {
        let mut g = Gen(Xoshiro256PlusPlus::seed_from_u64(seed));
        let count = 2 + g.below(5);
        let mut nodes: Vec<RandomNode> = Vec::new();
        for i in 0..count {
            let k = 2 + g.below(3);
            let values = g.state_values(k);
            let n_parents = if i == 0 { 0 } else { g.below(3.min(i + 1)) };
            if n_parents == 0 {
                nodes.push(RandomNode::Root {
                    values,
                    probs: g.simplex(k),
                });
            } else {
                let mut parents: Vec<usize> = Vec::new();
                while parents.len() < n_parents {
                    let p = g.below(i);
                    if !parents.contains(&p) {
                        parents.push(p);
                    }
                }
                let rows: usize = parents.iter().map(|p| nodes[*p].values().len()).product();
                let table = (0..rows).map(|_| g.simplex(k)).collect();
                nodes.push(RandomNode::Table { parents, values, table });
            }
        }
        let weights = (0..count).map(|_| (g.below(7) as f64 - 3.0) * 0.5).collect();
        let product = (g.below(count), g.below(count), (g.below(5) as f64 - 2.0) * 0.25);
        let step = (g.below(count), g.below(5) as f64 - 2.0, g.below(6) as f64 + 1.0);
        RandomModel {
            nodes,
            weights,
            product,
            step,
        }
    }

    fn id(i: usize) -> String {
        format!("x{i}")
    }

    pub fn target_expr(&self) -> String {
        let mut terms: Vec<String> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| format!("({w}) * {}", Self::id(i)))
            .collect();
        let (a, b, c) = self.product;
        terms.push(format!("({c}) * {} * {}", Self::id(a), Self::id(b)));
        let (d, t, k) = self.step;
        terms.push(format!("if({} > ({t}), {k}, 0)", Self::id(d)));
        terms.join(" + ")
    }

    pub fn document(&self) -> Value {
        let mut nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| match n {
                RandomNode::Root { values, probs } => json!({
                    "id": Self::id(i), "category": "supply", "period": "annual", "kind": "prior",
                    "dist": {"type": "categorical", "values": values, "probs": probs}
                }),
                RandomNode::Table { parents, values, table } => {
                    let radices: Vec<&[f64]> = parents.iter().map(|p| self.nodes[*p].values()).collect();
                    let rows: Vec<Value> = table
                        .iter()
                        .enumerate()
                        .map(|(r, probs)| json!({"given": mixed_radix(r, &radices), "probs": probs}))
                        .collect();
                    let states: Vec<Value> = values
                        .iter()
                        .map(|v| json!({"label": format!("s{v}"), "value": v}))
                        .collect();
                    json!({
                        "id": Self::id(i), "category": "politics", "period": "annual",
                        "kind": "conditional_table",
                        "parents": parents.iter().map(|p| Self::id(*p)).collect::<Vec<_>>(),
                        "states": states, "rows": rows
                    })
                }
            })
            .collect();
        nodes.push(json!({
            "id": "y", "category": "price", "period": "annual", "kind": "deterministic",
            "parents": (0..self.nodes.len()).map(Self::id).collect::<Vec<_>>(),
            "expr": self.target_expr()
        }));
        json!({"name": "random", "nodes": nodes})
    }

    pub fn network(&self) -> Network {
        Network::from_json(&self.document().to_string()).expect("generated network is valid")
    }

    fn target_value(&self, x: &[f64]) -> f64 {
        let mut y = 0.0;
        for (w, xi) in self.weights.iter().zip(x) {
            y += w * xi;
        }
        let (a, b, c) = self.product;
        y += c * x[a] * x[b];
        let (d, t, k) = self.step;
        if x[d] > t {
            y += k;
        }
        y
    }

    /// Exact (mean, population sd) of `y` by enumerating every joint state.
    pub fn exact_moments(&self) -> (f64, f64) {
        let mut states = vec![0usize; self.nodes.len()];
        let (mut m1, mut m2, mut total) = (0.0, 0.0, 0.0);
        loop {
            let x: Vec<f64> = states.iter().zip(&self.nodes).map(|(s, n)| n.values()[*s]).collect();
            let mut p = 1.0;
            for (i, n) in self.nodes.iter().enumerate() {
                p *= match n {
                    RandomNode::Root { probs, .. } => probs[states[i]],
                    RandomNode::Table { parents, table, .. } => {
                        let mut row = 0;
                        for q in parents {
                            row = row * self.nodes[*q].values().len() + states[*q];
                        }
                        table[row][states[i]]
                    }
                };
            }
            let y = self.target_value(&x);
            m1 += p * y;
            m2 += p * y * y;
            total += p;
            // odometer
            let mut k = 0;
            loop {
                if k == states.len() {
                    assert!((total - 1.0).abs() < 1e-9, "oracle probabilities sum to {total}");
                    return (m1, (m2 - m1 * m1).max(0.0).sqrt());
                }
                states[k] += 1;
                if states[k] < self.nodes[k].values().len() {
                    break;
                }
                states[k] = 0;
                k += 1;
            }
        }
    }
}

fn mixed_radix(mut r: usize, radices: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![0.0; radices.len()];
    for k in (0..radices.len()).rev() {
        let n = radices[k].len();
        out[k] = radices[k][r % n];
        r /= n;
    }
    out
}

/// Three-node cycle with an exogenous root.
pub const CYCLIC_FIXTURE: &str = r#"{"name": "cyclic", "nodes": [
  {"id": "r", "category": "annual", "period": "annual", "kind": "constant", "value": 1},
  {"id": "a", "category": "annual", "period": "annual", "kind": "deterministic", "parents": ["c", "r"], "expr": "c + r"},
  {"id": "b", "category": "annual", "period": "annual", "kind": "deterministic", "parents": ["a"], "expr": "a * 2"},
  {"id": "c", "category": "annual", "period": "annual", "kind": "deterministic", "parents": ["b"], "expr": "b - 1"}
]}"#;

/// CPT whose second row sums to 1 + 2e-9.
pub const BAD_ROW_FIXTURE: &str = r#"{"name": "bad-row", "nodes": [
  {"id": "p", "category": "politics", "period": "annual", "kind": "prior",
   "dist": {"type": "categorical", "values": [0, 1], "probs": [0.5, 0.5]}},
  {"id": "q", "category": "politics", "period": "annual", "kind": "conditional_table", "parents": ["p"],
   "states": [{"label": "lo", "value": 0}, {"label": "hi", "value": 1}],
   "rows": [{"given": [0], "probs": [0.3, 0.7]}, {"given": [1], "probs": [0.4, 0.600000002]}]}
]}"#;

pub fn models_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
}
