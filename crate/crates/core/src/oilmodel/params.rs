//! Reference parameter file for the oil-market network.
//!
//! Units: production, demand, capacity and inventory change in MMBD; prices in
//! $/bbl; gasoline tax in $/gal; growth rates and utilization as fractions.
//! Per-quarter tables are keyed by period label (`89Q1` .. `90Q4`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::quarter::QuarterTag;
use super::OilModelError;
use crate::netcore::DistributionSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParameters {
    pub version: String,
    #[serde(default)]
    pub changelog: Vec<ChangelogEntry>,
    /// 1989 actuals by quarter. Demand doubles as the seasonal base for the
    /// same quarter of the forecast year.
    pub history: BTreeMap<String, HistoryQuarter>,
    /// Opening state at the end of 89Q4.
    pub opening: OpeningState,
    pub capacity: Capacity,
    pub world_growth: WorldGrowthParams,
    pub demand: DemandParams,
    pub supply: SupplyPriors,
    pub politics: PoliticsParams,
    pub tax: TaxParams,
    pub fuel_switching: FuelSwitchingTable,
    pub price: PriceParams,
    pub ss_diff: SsDiffParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangelogEntry {
    pub version: String,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryQuarter {
    pub demand: f64,
    pub us_prod: f64,
    pub no_prod: f64,
    pub core_prod: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpeningState {
    pub opec: f64,
    pub wti: f64,
    /// Consecutive quarters below the fuel-switching threshold as of 89Q4.
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreCapacity {
    pub saudi_arabia: f64,
    pub iran: f64,
    pub iraq: f64,
    pub kuwait: f64,
    pub uae: f64,
    pub qatar: f64,
}

impl CoreCapacity {
    /// (node id suffix, capacity) per core country.
    pub fn by_country(&self) -> [(&'static str, f64); 6] {
        [
            ("Saudi", self.saudi_arabia),
            ("Iran", self.iran),
            ("Iraq", self.iraq),
            ("Kuwait", self.kuwait),
            ("UAE", self.uae),
            ("Qatar", self.qatar),
        ]
    }

    pub fn total(&self) -> f64 {
        self.by_country().iter().map(|(_, c)| c).sum()
    }

    /// Capacity of the producers outside a boycott of Iraq and Kuwait.
    pub fn without_iraq_kuwait(&self) -> f64 {
        self.saudi_arabia + self.iran + self.uae + self.qatar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Capacity {
    pub nc_cap: f64,
    /// Share of non-core capacity actually produced.
    pub nc_utilization: f64,
    pub core: CoreCapacity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthComponents<T> {
    pub ldc: T,
    pub we: T,
    pub us: T,
    pub japan: T,
}

impl<T: Copy> GrowthComponents<T> {
    pub fn as_array(&self) -> [T; 4] {
        [self.ldc, self.we, self.us, self.japan]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldGrowthParams {
    pub weights: GrowthComponents<f64>,
    pub priors: GrowthComponents<DistributionSpec>,
    /// Point inputs whose weighted growth is frozen in `golden_value`.
    pub reference_inputs: GrowthComponents<f64>,
    pub golden_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandParams {
    /// Demand response to world growth (fraction per fraction).
    pub sensitivity: f64,
    /// Growth lost per $/bbl of gasoline tax impact.
    pub gt_drag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplyPriors {
    pub us_prod: BTreeMap<String, DistributionSpec>,
    pub no_prod: BTreeMap<String, DistributionSpec>,
    /// Inventory build (+) or draw (−).
    pub delta_i: BTreeMap<String, DistributionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoliticsParams {
    /// P(Intragulf = 1..5) in the first forecast quarter.
    pub intragulf_prior: Vec<f64>,
    /// Weight on keeping last quarter's intragulf state; the rest follows the prior.
    pub intragulf_persistence: f64,
    /// Row i: P(MarketShare = 1..5 | Intragulf = i + 1).
    pub market_share_cpt: Vec<Vec<f64>>,
    /// Row i, column m: production hedge in MMBD at Intragulf i + 1, MarketShare m + 1.
    pub hedge_map: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportFeeParams {
    pub given_passed: f64,
    pub given_not_passed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxParams {
    pub gt_pass_probability: f64,
    /// Size of the gasoline tax increase in $/gal, if passed.
    pub gt_size: DistributionSpec,
    pub import_fee: ImportFeeParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuelSwitchingBand {
    /// Band applies when the level is below this price and at or above the next band's.
    pub below: f64,
    /// MMBD by duration 0, 1, 2, ...; the last entry covers longer durations.
    pub by_duration: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuelSwitchingTable {
    pub threshold: f64,
    pub bands: Vec<FuelSwitchingBand>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceParams {
    /// Reference utilization at which price pressure vanishes.
    pub u0: f64,
    /// Anchor price used to scale the pressure term.
    pub p0: f64,
    /// $/bbl per unit of utilization above `u0`, at the anchor price.
    pub slope: f64,
    /// $/bbl per MMBD of one-quarter change in core production.
    pub w_dq: f64,
    /// $/bbl per MMBD of one-year change in core production.
    pub w_dy: f64,
    /// $/bbl per MMBD of supply in excess of demand plus inventory build.
    pub w_bal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsDiffParams {
    pub intercept: f64,
    /// $/bbl per quarter since 89Q1.
    pub trend: f64,
    /// $/bbl per MMBD of one-year change in non-OPEC production.
    pub k: f64,
}

impl MarketParameters {
    /// Parse; a missing field is reported as [`OilModelError::IncompleteParameters`].
    pub fn from_json(text: &str) -> Result<Self, OilModelError> {
        let p: MarketParameters = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            match msg.strip_prefix("missing field `").and_then(|r| r.split_once('`')) {
                Some((field, _)) => OilModelError::IncompleteParameters(field.to_string()),
                None => OilModelError::Parse(msg),
            }
        })?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("parameters serialize");
        s.push('\n');
        s
    }

    pub fn history_at(&self, q: QuarterTag) -> Result<&HistoryQuarter, OilModelError> {
        self.history
            .get(&q.label())
            .ok_or_else(|| OilModelError::IncompleteParameters(format!("history.{q}")))
    }

    /// Completeness and range checks. Shape constraints on the political,
    /// tax, fuel-switching and price tables are checked by their operations.
    pub fn validate(&self) -> Result<(), OilModelError> {
        let invalid = |field: &str, reason: &str| {
            Err(OilModelError::InvalidParameter {
                field: field.to_string(),
                reason: reason.to_string(),
            })
        };
        for q in QuarterTag::history() {
            let h = self.history_at(q)?;
            if !(h.demand > 0.0) {
                return invalid(&format!("history.{q}.demand"), "seasonal base must be > 0");
            }
            for (name, v) in [
                ("us_prod", h.us_prod),
                ("no_prod", h.no_prod),
                ("core_prod", h.core_prod),
            ] {
                if !(v >= 0.0) {
                    return invalid(&format!("history.{q}.{name}"), "production must be >= 0");
                }
            }
        }
        for (name, table) in [
            ("us_prod", &self.supply.us_prod),
            ("no_prod", &self.supply.no_prod),
            ("delta_i", &self.supply.delta_i),
        ] {
            for q in QuarterTag::forecasts() {
                let d = table
                    .get(&q.label())
                    .ok_or_else(|| OilModelError::IncompleteParameters(format!("supply.{name}.{q}")))?;
                if let Err(e) = d.check() {
                    return invalid(&format!("supply.{name}.{q}"), &e);
                }
            }
        }
        if !(self.capacity.nc_cap > 0.0) {
            return invalid("capacity.nc_cap", "capacity must be > 0");
        }
        for (country, c) in self.capacity.core.by_country() {
            if !(c > 0.0) {
                return invalid(&format!("capacity.core.{country}"), "capacity must be > 0");
            }
        }
        if !(0.0..=1.0).contains(&self.capacity.nc_utilization) {
            return invalid("capacity.nc_utilization", "must be within [0, 1]");
        }
        let weights = self.world_growth.weights.as_array();
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return invalid("world_growth.weights", "weights must lie in [0, 1] and sum to 1");
        }
        for (name, d) in [
            ("ldc", &self.world_growth.priors.ldc),
            ("we", &self.world_growth.priors.we),
            ("us", &self.world_growth.priors.us),
            ("japan", &self.world_growth.priors.japan),
        ] {
            if let Err(e) = d.check() {
                return invalid(&format!("world_growth.priors.{name}"), &e);
            }
        }
        if !(0.0..=1.0).contains(&self.tax.gt_pass_probability) {
            return invalid("tax.gt_pass_probability", "must be a probability");
        }
        if let Err(e) = self.tax.gt_size.check() {
            return invalid("tax.gt_size", &e);
        }
        if !(self.price.p0 > 0.0) {
            return invalid("price.p0", "anchor price must be > 0");
        }
        if !(self.price.slope > 0.0) {
            return invalid("price.slope", "price must increase with utilization");
        }
        if !(self.opening.duration >= 0.0) {
            return invalid("opening.duration", "must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.politics.intragulf_persistence) {
            return invalid("politics.intragulf_persistence", "must be within [0, 1]");
        }
        Ok(())
    }
}
