//! Quarterly-unrolled oil-market network: parameter file, the scalar
//! relationships between variables, and the base-case builder.

// Parameter checks are written as negated comparisons so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod build;
pub mod ops;
mod params;
mod quarter;

use thiserror::Error;

use crate::netcore::NetworkError;

pub use build::{build_base_case, fuel_switching_expr, ids, BASE_CASE_NAME};
pub use ops::PoliticalState;
pub use params::{
    Capacity, ChangelogEntry, CoreCapacity, DemandParams, FuelSwitchingBand, FuelSwitchingTable, GrowthComponents,
    HistoryQuarter, ImportFeeParams, MarketParameters, OpeningState, PoliticsParams, PriceParams, SsDiffParams,
    SupplyPriors, TaxParams, WorldGrowthParams,
};
pub use quarter::{period_labels, QuarterTag};

/// Shipped reference parameter file.
pub const REFERENCE_PARAMETERS_JSON: &str = include_str!("../../models/base_case.params.json");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OilModelError {
    #[error("incomplete parameters: missing `{0}`")]
    IncompleteParameters(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("cannot parse parameters: {0}")]
    Parse(String),
    #[error("gasoline tax {0} $/gal is outside [0.01, 0.50]")]
    OutOfRangeTax(f64),
    #[error("import fee must be less likely after a gas tax: P(fee|passed) = {given_passed}, P(fee|not passed) = {given_not_passed}")]
    MonotonicityViolation { given_passed: f64, given_not_passed: f64 },
    #[error("bad fuel-switching table: {0}")]
    BadTable(String),
    #[error("core capacity is zero")]
    ZeroCapacity,
    #[error("bad hedge map: {0}")]
    BadHedgeMap(String),
    #[error("bad sweet/sour coefficients: {0}")]
    BadCoefficients(String),
    #[error("missing period: {0}")]
    MissingPeriod(String),
    #[error("node `{node}`: generated expression does not parse: {detail}")]
    Expression { node: String, detail: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// The shipped reference parameters.
pub fn reference_parameters() -> MarketParameters {
    MarketParameters::from_json(REFERENCE_PARAMETERS_JSON).expect("shipped parameter file is valid")
}

/// Named model variables and the node-id prefix that carries each one.
pub const VARIABLE_CHECKLIST: [(&str, &str); 29] = [
    ("NC Cap", ids::NC_CAP),
    ("NC Prod", ids::NC_PROD),
    ("World Growth", ids::WORLD_GROWTH),
    ("OI Fee", ids::OI_FEE),
    ("GT", ids::GT),
    ("GT Impact", ids::GT_IMPACT),
    ("Level", ids::LEVEL),
    ("Duration", ids::DURATION),
    ("Fuel Switching", ids::FUEL_SWITCHING),
    ("Demand", ids::DEMAND),
    ("US Prod", ids::US_PROD),
    ("NO Prod", ids::NO_PROD),
    ("C Cap", ids::C_CAP),
    ("Delta I", ids::DELTA_I),
    ("O Call", ids::O_CALL),
    ("Core Demand", ids::CORE_DEMAND),
    ("Core Production", ids::CORE_PROD),
    ("Cap Ut", ids::CAP_UT),
    ("Supply", ids::SUPPLY),
    ("DeltaY Core Prod", ids::DELTA_Y_CORE_PROD),
    ("DeltaQ Core Prod", ids::DELTA_Q_CORE_PROD),
    ("DeltaY Sweet", ids::DELTA_Y_SWEET),
    ("Intragulf", ids::INTRAGULF),
    ("Market Share", ids::MARKET_SHARE),
    ("Politics", ids::POLITICS),
    ("OPEC", ids::OPEC),
    ("Time", ids::TIME),
    ("SS Diff", ids::SS_DIFF),
    ("WTI", ids::WTI),
];
