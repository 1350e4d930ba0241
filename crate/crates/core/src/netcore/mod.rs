//! Typed belief-network DAG: node kinds, validation, the JSON document format
//! and the expression language used by deterministic nodes.

mod dist;
mod document;
mod expr;
mod network;
mod node;

pub use dist::{check_probability_row, DistributionSpec, PROB_TOLERANCE};
pub use document::{DistRow, KindDoc, NetworkDocument, NodeDoc, ProbRow};
pub(crate) use expr::apply_binary;
pub use expr::{
    eval_expression, parse_expression, BinaryOp, EvalError, Expr, SyntaxError, UnaryOp, MAX_DEPTH, MAX_NODES,
};
pub use network::{
    build_network, topological_order, validate_document, validate_parameters, Network, NetworkError, Warning,
};
pub use node::{Category, NodeId, NodeKind, NodeSpec, ParentIndex, State, ANNUAL};
