//! Constrained-capacity case: boycott of Iraqi and Kuwaiti oil with every
//! other producer at full capacity, starting from observed 90Q1/90Q2 data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::overlay::{apply_overlay, Edit, Overlay, ScenarioError};
use crate::netcore::{Network, NodeId};
use crate::oilmodel::ids::*;
use crate::oilmodel::{build_base_case, MarketParameters, OilModelError, QuarterTag};

pub const CONSTRAINED_CASE_NAME: &str = "oil-1990-constrained";
/// Quarters forecast by the constrained case.
pub const CONSTRAINED_TARGETS: [&str; 2] = ["WTI.3", "WTI.4"];

/// Observed values for one quarter ($/bbl and MMBD).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarterActuals {
    pub wti: f64,
    pub opec: f64,
    pub demand: f64,
    pub us_prod: f64,
    pub no_prod: f64,
    pub delta_i: f64,
    pub core_prod: f64,
}

impl QuarterActuals {
    fn pins(&self, q: QuarterTag) -> BTreeMap<NodeId, f64> {
        [
            (WTI, self.wti),
            (OPEC, self.opec),
            (DEMAND, self.demand),
            (US_PROD, self.us_prod),
            (NO_PROD, self.no_prod),
            (DELTA_I, self.delta_i),
            (CORE_PROD, self.core_prod),
        ]
        .into_iter()
        .map(|(prefix, v)| (NodeId::from(q.node(prefix)), v))
        .collect()
    }
}

/// Actuals keyed by period label; `90Q1` and `90Q2` are required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstrainedActuals {
    pub quarters: BTreeMap<String, QuarterActuals>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstrainedCaseError {
    #[error("incomplete actuals: missing `{0}`")]
    IncompleteActuals(String),
    #[error(transparent)]
    Model(#[from] OilModelError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

impl ConstrainedActuals {
    pub fn from_json(text: &str) -> Result<Self, ConstrainedCaseError> {
        let a: ConstrainedActuals = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .strip_prefix("missing field `")
                .and_then(|r| r.split_once('`'))
                .map_or(msg.clone(), |(f, _)| f.to_string());
            ConstrainedCaseError::IncompleteActuals(field)
        })?;
        a.quarter(QuarterTag::forecast(1))?;
        a.quarter(QuarterTag::forecast(2))?;
        Ok(a)
    }

    fn quarter(&self, q: QuarterTag) -> Result<&QuarterActuals, ConstrainedCaseError> {
        let a = self
            .quarters
            .get(&q.label())
            .ok_or_else(|| ConstrainedCaseError::IncompleteActuals(format!("quarters.{q}")))?;
        let all = [a.wti, a.opec, a.demand, a.us_prod, a.no_prod, a.delta_i, a.core_prod];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ConstrainedCaseError::IncompleteActuals(format!(
                "quarters.{q} (non-finite value)"
            )));
        }
        Ok(a)
    }
}

fn excise(node: String) -> Edit {
    Edit::Excise {
        node: node.into(),
        substitute: 0.0,
    }
}

/// The overlay that turns the base case into the constrained-capacity case.
pub fn constrained_overlay(
    params: &MarketParameters,
    actuals: &ConstrainedActuals,
) -> Result<Overlay, ConstrainedCaseError> {
    let base = build_base_case(params)?;
    let mut edits = Vec::new();

    for q in [1, 2].map(QuarterTag::forecast) {
        edits.push(Edit::InsertHistory {
            period: q.label(),
            values: actuals.quarter(q)?.pins(q),
        });
    }
    edits.push(Edit::Pin {
        node: NC_PROD.into(),
        value: params.capacity.nc_cap,
    });
    let boycott_capacity = params.capacity.core.without_iraq_kuwait();
    for q in [3, 4].map(QuarterTag::forecast) {
        edits.push(Edit::Pin {
            node: q.node(CORE_PROD).into(),
            value: boycott_capacity,
        });
        edits.push(Edit::Pin {
            node: q.node(CAP_UT).into(),
            value: 1.0,
        });
    }

    // Dependents before the nodes they depend on, so nothing is rewired twice.
    let quarters_desc = [4, 3, 2, 1].map(QuarterTag::forecast);
    for q in quarters_desc {
        edits.push(excise(q.node(WTIP)));
    }
    for id in [OI_FEE, GT_IMPACT, GT_SIZE, GT] {
        edits.push(excise(id.to_string()));
    }
    for q in quarters_desc {
        edits.push(excise(q.node(POLITICS)));
        edits.push(excise(q.node(MARKET_SHARE)));
        edits.push(excise(q.node(INTRAGULF)));
    }
    for q in quarters_desc {
        edits.push(excise(q.node(FUEL_SWITCHING)));
        edits.push(excise(q.node(DURATION)));
        edits.push(excise(q.node(LEVEL)));
    }
    let interim = apply_overlay(
        &base,
        &Overlay {
            name: CONSTRAINED_CASE_NAME.into(),
            base: base.name().into(),
            edits: edits.clone(),
        },
    )?;

    // Drop everything the two forecast quarters no longer depend on.
    let keep: Vec<NodeId> = CONSTRAINED_TARGETS.iter().flat_map(|t| interim.ancestors(t)).collect();
    let mut order = interim.topological_order();
    order.reverse();
    for id in order {
        if !keep.contains(&id) {
            edits.push(Edit::Excise {
                node: id,
                substitute: 0.0,
            });
        }
    }

    Ok(Overlay {
        name: CONSTRAINED_CASE_NAME.into(),
        base: base.name().into(),
        edits,
    })
}

/// Base case with the constrained-capacity overlay applied.
pub fn build_constrained_case(
    params: &MarketParameters,
    actuals: &ConstrainedActuals,
) -> Result<Network, ConstrainedCaseError> {
    let overlay = constrained_overlay(params, actuals)?;
    Ok(apply_overlay(&build_base_case(params)?, &overlay)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::Category;
    use crate::oilmodel::reference_parameters;
    use crate::scenario::reference_actuals;

    #[test]
    fn structure() {
        let net = build_constrained_case(&reference_parameters(), &reference_actuals()).unwrap();
        for n in net.nodes() {
            assert!(
                !matches!(n.category, Category::Politics | Category::Tax),
                "{} survived",
                n.id
            );
            for prefix in [FUEL_SWITCHING, LEVEL, DURATION, WTIP] {
                assert_ne!(n.id.prefix(), prefix);
            }
            assert!(
                !n.period.starts_with("89Q1") && !n.period.starts_with("89Q2"),
                "{}",
                n.id
            );
        }
        let sinks: Vec<&str> = net.sinks().iter().map(|s| s.as_str()).collect();
        assert_eq!(sinks, CONSTRAINED_TARGETS);
        let get = |id: &str| match &net.get(id).unwrap().kind {
            crate::netcore::NodeKind::Constant { value, .. } => *value,
            other => panic!("{id}: {other:?}"),
        };
        assert_eq!(get("CapUt.3"), 1.0);
        assert_eq!(
            get("CoreProd.4"),
            reference_parameters().capacity.core.without_iraq_kuwait()
        );
        assert_eq!(get("NCProd"), reference_parameters().capacity.nc_cap);
        assert!(!net.periods().contains(&"89Q1".to_string()));
    }

    #[test]
    fn missing_actuals() {
        let err = ConstrainedActuals::from_json(r#"{"quarters": {}}"#).unwrap_err();
        assert_eq!(err, ConstrainedCaseError::IncompleteActuals("quarters.90Q1".into()));
        let err = ConstrainedActuals::from_json(
            r#"{"quarters": {"90Q1": {"wti": 21.7, "opec": 20, "demand": 54, "us_prod": 9, "no_prod": 20, "delta_i": 0}}}"#,
        )
        .unwrap_err();
        assert_eq!(err, ConstrainedCaseError::IncompleteActuals("core_prod".into()));
    }
}
