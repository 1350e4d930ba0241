//! Belief-network scenario forecasting.
//!
//! A [`Network`](netcore::Network) is an immutable DAG of typed nodes. The
//! [`sampler`] draws fully specified worlds from it by forward Monte Carlo,
//! [`oilmodel`] builds the reference quarterly oil-market network,
//! [`scenario`] derives variants from it through edit overlays and
//! [`gateway`] exposes everything through a CLI and an HTTP service.

pub mod gateway;
pub mod netcore;
pub mod oilmodel;
pub mod sampler;
pub mod scenario;
