//! Scalar relationships of the oil-market model. Each has a matching
//! deterministic node expression emitted by the builder; tests check that the
//! two agree.

use super::params::{FuelSwitchingTable, ImportFeeParams, PoliticsParams, PriceParams, SsDiffParams};
use super::quarter::QuarterTag;
use super::OilModelError;

/// US gallons per barrel.
pub const GALLONS_PER_BARREL: f64 = 42.0;
/// Floor placed on WTI when the import fee passes, $/bbl.
pub const IMPORT_FEE_FLOOR: f64 = 18.0;
pub const MIN_GAS_TAX: f64 = 0.01;
pub const MAX_GAS_TAX: f64 = 0.50;
pub const MAX_FUEL_SWITCHING: f64 = 2.0;
pub const SCALE_POINTS: usize = 5;

pub fn world_growth(components: [f64; 4], weights: [f64; 4]) -> f64 {
    components.iter().zip(weights).map(|(c, w)| c * w).sum()
}

/// Gasoline tax in $/gal translated to $/bbl.
pub fn gasoline_tax_impact(passed: bool, per_gallon: f64) -> Result<f64, OilModelError> {
    if !passed {
        return Ok(0.0);
    }
    if !(MIN_GAS_TAX..=MAX_GAS_TAX).contains(&per_gallon) {
        return Err(OilModelError::OutOfRangeTax(per_gallon));
    }
    Ok(GALLONS_PER_BARREL * per_gallon)
}

pub fn check_import_fee(p: &ImportFeeParams) -> Result<(), OilModelError> {
    let probs_ok = [p.given_passed, p.given_not_passed]
        .iter()
        .all(|x| (0.0..=1.0).contains(x));
    if !probs_ok || !(p.given_passed < p.given_not_passed) {
        return Err(OilModelError::MonotonicityViolation {
            given_passed: p.given_passed,
            given_not_passed: p.given_not_passed,
        });
    }
    Ok(())
}

/// P(import fee | gasoline tax outcome). A passed gas tax must make the fee less likely.
pub fn import_fee_prior(gas_tax_passed: bool, p: &ImportFeeParams) -> Result<f64, OilModelError> {
    check_import_fee(p)?;
    Ok(if gas_tax_passed {
        p.given_passed
    } else {
        p.given_not_passed
    })
}

impl FuelSwitchingTable {
    /// Bands must run from the threshold downward, with values in [0, 2] that
    /// never fall as prices fall or as the low-price spell lengthens.
    pub fn check(&self) -> Result<(), OilModelError> {
        let bad = |m: String| Err(OilModelError::BadTable(m));
        let Some(first) = self.bands.first() else {
            return bad("no bands".into());
        };
        if first.below != self.threshold {
            return bad(format!(
                "first band starts at {} but the threshold is {}",
                first.below, self.threshold
            ));
        }
        let width = first.by_duration.len();
        for (i, band) in self.bands.iter().enumerate() {
            if band.by_duration.len() != width || width == 0 {
                return bad(format!("band {i} has {} duration columns", band.by_duration.len()));
            }
            for (d, v) in band.by_duration.iter().enumerate() {
                if !(0.0..=MAX_FUEL_SWITCHING).contains(v) {
                    return bad(format!("band {i}, duration {d}: {v} outside [0, 2]"));
                }
                if d > 0 && *v < band.by_duration[d - 1] {
                    return bad(format!("band {i} decreases with duration at column {d}"));
                }
            }
            if i > 0 {
                let prev = &self.bands[i - 1];
                if !(band.below < prev.below) {
                    return bad(format!("band {i} bound {} is not below {}", band.below, prev.below));
                }
                if band.by_duration.iter().zip(&prev.by_duration).any(|(lo, hi)| lo < hi) {
                    return bad(format!("band {i} switches less than the higher-price band above it"));
                }
            }
        }
        Ok(())
    }

    /// Lookup without validation; [`fuel_switching`] validates first.
    pub fn lookup(&self, level: f64, duration: f64) -> f64 {
        if level >= self.threshold {
            return 0.0;
        }
        let band = self
            .bands
            .iter()
            .rposition(|b| level < b.below)
            .expect("level below the threshold falls in some band");
        let cols = &self.bands[band].by_duration;
        let col = (duration.max(0.0).floor() as usize).min(cols.len() - 1);
        cols[col]
    }
}

/// Extra demand in MMBD from dual-fired plants burning oil.
pub fn fuel_switching(level: f64, duration: f64, table: &FuelSwitchingTable) -> Result<f64, OilModelError> {
    table.check()?;
    Ok(table.lookup(level, duration))
}

pub fn demand_quarter(seasonal_base: f64, growth: f64, sensitivity: f64, fuel_switch: f64) -> f64 {
    seasonal_base * (1.0 + sensitivity * growth) + fuel_switch
}

/// Inventory builds raise the call on OPEC.
pub fn call_on_opec(demand: f64, us_prod: f64, no_prod: f64, delta_i: f64) -> f64 {
    demand + delta_i - us_prod - no_prod
}

pub fn core_demand(o_call: f64, nc_prod: f64) -> f64 {
    o_call - nc_prod
}

pub fn core_production(core_demand: f64, hedge: f64) -> f64 {
    (core_demand + hedge).max(0.0)
}

pub fn capacity_utilization(core_prod: f64, c_cap: f64) -> Result<f64, OilModelError> {
    if c_cap == 0.0 {
        return Err(OilModelError::ZeroCapacity);
    }
    Ok(core_prod / c_cap)
}

/// Gulf political state on the two five-point scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoliticalState {
    /// 1 = harmony .. 5 = war.
    pub intragulf: u8,
    /// 1 = strict compliance .. 5 = rampant cheating.
    pub market_share: u8,
}

pub const INTRAGULF_LABELS: [&str; 5] = ["harmony", "cordial", "strained", "hostile", "war"];
pub const MARKET_SHARE_LABELS: [&str; 5] = [
    "strict_compliance",
    "minor_slippage",
    "moderate_cheating",
    "widespread_cheating",
    "rampant_cheating",
];

impl PoliticsParams {
    pub fn check(&self) -> Result<(), OilModelError> {
        let bad_map = |m: String| Err(OilModelError::BadHedgeMap(m));
        if self.hedge_map.len() != SCALE_POINTS || self.hedge_map.iter().any(|r| r.len() != SCALE_POINTS) {
            return bad_map("hedge map must be 5 x 5".into());
        }
        for (i, row) in self.hedge_map.iter().enumerate() {
            if row[0] != 0.0 {
                return bad_map(format!("intragulf {}: strict compliance must map to 0", i + 1));
            }
            if row.windows(2).any(|w| w[1] < w[0]) {
                return bad_map(format!("intragulf {}: hedge falls as cheating rises", i + 1));
            }
            if row.iter().any(|h| !h.is_finite()) {
                return bad_map(format!("intragulf {}: non-finite hedge", i + 1));
            }
        }
        let bad_prob = |field: &str, e: String| {
            Err(OilModelError::InvalidParameter {
                field: field.to_string(),
                reason: e,
            })
        };
        if self.intragulf_prior.len() != SCALE_POINTS {
            return bad_prob("politics.intragulf_prior", "needs 5 probabilities".into());
        }
        if let Err(e) = crate::netcore::check_probability_row(&self.intragulf_prior) {
            return bad_prob("politics.intragulf_prior", e);
        }
        if self.market_share_cpt.len() != SCALE_POINTS {
            return bad_prob("politics.market_share_cpt", "needs 5 rows".into());
        }
        for (i, row) in self.market_share_cpt.iter().enumerate() {
            if row.len() != SCALE_POINTS {
                return bad_prob("politics.market_share_cpt", format!("row {} needs 5 entries", i + 1));
            }
            if let Err(e) = crate::netcore::check_probability_row(row) {
                return bad_prob("politics.market_share_cpt", format!("row {}: {e}", i + 1));
            }
        }
        Ok(())
    }

    /// P(Intragulf.q | Intragulf.(q-1) = from), for scale points 1..5.
    pub fn intragulf_transition(&self, from: usize) -> Vec<f64> {
        let p = self.intragulf_persistence;
        let mut row: Vec<f64> = self.intragulf_prior.iter().map(|x| (1.0 - p) * x).collect();
        row[from - 1] += p;
        let total: f64 = row.iter().sum();
        row.iter().map(|x| x / total).collect()
    }
}

/// Production hedge in MMBD for a political state.
pub fn political_hedge(state: PoliticalState, params: &PoliticsParams) -> Result<f64, OilModelError> {
    params.check()?;
    let in_range = |v: u8| (1..=SCALE_POINTS as u8).contains(&v);
    if !in_range(state.intragulf) || !in_range(state.market_share) {
        return Err(OilModelError::BadHedgeMap(format!(
            "state {state:?} is off the five-point scales"
        )));
    }
    Ok(params.hedge_map[usize::from(state.intragulf) - 1][usize::from(state.market_share) - 1])
}

/// Anchored price-pressure step: `prior + slope * (cap_ut - u0) * p0 / prior`.
///
/// The step is quoted in anchor-price dollars and shrinks as the prior price
/// rises above `p0`, so sustained tightness does not compound geometrically.
pub fn opec_price(cap_ut: f64, prior_price: f64, p: &PriceParams) -> f64 {
    prior_price + p.slope * (cap_ut - p.u0) * p.p0 / prior_price
}

impl SsDiffParams {
    pub fn check(&self) -> Result<(), OilModelError> {
        if !(self.trend >= 0.0) {
            return Err(OilModelError::BadCoefficients(format!("trend {} < 0", self.trend)));
        }
        if !(self.k >= 0.0) {
            return Err(OilModelError::BadCoefficients(format!("k {} < 0", self.k)));
        }
        Ok(())
    }
}

pub fn sweet_sour_diff(time_index: f64, delta_y_sweet: f64, c: &SsDiffParams) -> Result<f64, OilModelError> {
    c.check()?;
    Ok(c.intercept + c.trend * time_index - c.k * delta_y_sweet)
}

pub fn wti_price(opec_price: f64, ss_diff: f64) -> f64 {
    opec_price + ss_diff
}

pub fn wti_with_fee(wti: f64, fee_passed: bool) -> f64 {
    if fee_passed && wti <= IMPORT_FEE_FLOOR {
        IMPORT_FEE_FLOOR
    } else {
        wti
    }
}

pub fn period_delta(value_t: f64, value_t_minus_k: f64) -> f64 {
    value_t - value_t_minus_k
}

/// The quarter `k` steps before `q`.
pub fn lagged(q: QuarterTag, k: u8) -> Result<QuarterTag, OilModelError> {
    q.lag(k)
        .ok_or_else(|| OilModelError::MissingPeriod(format!("{k} quarter(s) before {q}")))
}

pub fn total_supply(us: f64, no: f64, nc: f64, core: f64) -> f64 {
    us + no + nc + core
}
