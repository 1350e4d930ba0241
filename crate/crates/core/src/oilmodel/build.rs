use crate::netcore::{
    parse_expression, Category, DistributionSpec, Network, NodeId, NodeKind, NodeSpec, ParentIndex, State, ANNUAL,
};

use super::ops::{
    check_import_fee, lagged, GALLONS_PER_BARREL, IMPORT_FEE_FLOOR, INTRAGULF_LABELS, MARKET_SHARE_LABELS, SCALE_POINTS,
};
use super::params::{FuelSwitchingTable, MarketParameters};
use super::quarter::{period_labels, QuarterTag};
use super::OilModelError;

pub const BASE_CASE_NAME: &str = "oil-1990-base";

/// Canonical prefix of every node family the builder emits.
pub mod ids {
    pub const NC_CAP: &str = "NCCap";
    pub const NC_PROD: &str = "NCProd";
    pub const WORLD_GROWTH: &str = "WorldGrowth";
    pub const DEMAND_GROWTH: &str = "DemandGrowth";
    pub const C_CAP: &str = "CCap";
    pub const GT: &str = "GT";
    pub const GT_SIZE: &str = "GTSize";
    pub const GT_IMPACT: &str = "GTImpact";
    pub const OI_FEE: &str = "OIFee";
    pub const LEVEL: &str = "Level";
    pub const DURATION: &str = "Duration";
    pub const FUEL_SWITCHING: &str = "FuelSwitching";
    pub const DEMAND: &str = "Demand";
    pub const US_PROD: &str = "USProd";
    pub const NO_PROD: &str = "NOProd";
    pub const DELTA_I: &str = "DeltaI";
    pub const O_CALL: &str = "OCall";
    pub const CORE_DEMAND: &str = "CoreDemand";
    pub const CORE_PROD: &str = "CoreProd";
    pub const CAP_UT: &str = "CapUt";
    pub const SUPPLY: &str = "Supply";
    pub const DELTA_Y_CORE_PROD: &str = "DeltaYCoreProd";
    pub const DELTA_Q_CORE_PROD: &str = "DeltaQCoreProd";
    pub const DELTA_Y_SWEET: &str = "DeltaYSweet";
    pub const INTRAGULF: &str = "Intragulf";
    pub const MARKET_SHARE: &str = "MarketShare";
    pub const POLITICS: &str = "Politics";
    pub const OPEC: &str = "OPEC";
    pub const TIME: &str = "Time";
    pub const SS_DIFF: &str = "SSDiff";
    pub const WTI: &str = "WTI";
    pub const WTIP: &str = "WTIp";
    pub const GROWTH_COMPONENTS: [&str; 4] = ["LDCGrowth", "WEGrowth", "USGrowth", "JapanGrowth"];
}

use ids::*;

struct Builder<'a> {
    p: &'a MarketParameters,
    nodes: Vec<NodeSpec>,
}

impl Builder<'_> {
    fn push(&mut self, spec: NodeSpec) {
        self.nodes.push(spec);
    }

    fn constant(&mut self, id: String, category: Category, period: &str, value: f64) {
        self.push(NodeSpec::constant(id, category, period, value));
    }

    fn prior(&mut self, id: String, category: Category, period: &str, dist: DistributionSpec) {
        self.push(NodeSpec::prior(id, category, period, dist));
    }

    fn labeled_prior(&mut self, id: String, category: Category, period: &str, dist: DistributionSpec, labels: &[&str]) {
        let mut spec = NodeSpec::prior(id, category, period, dist);
        if let NodeKind::Prior { labels: l, .. } = &mut spec.kind {
            *l = Some(labels.iter().map(|s| s.to_string()).collect());
        }
        self.push(spec);
    }

    fn det(&mut self, id: String, category: Category, period: &str, expr: &str) -> Result<(), OilModelError> {
        let e = parse_expression(expr).map_err(|e| OilModelError::Expression {
            node: id.clone(),
            detail: e.to_string(),
        })?;
        self.push(NodeSpec::deterministic(id, category, period, e));
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn table(
        &mut self,
        id: String,
        category: Category,
        period: &str,
        parents: Vec<NodeId>,
        keys: Vec<Vec<f64>>,
        states: Vec<State>,
        rows: Vec<Vec<f64>>,
    ) {
        self.push(NodeSpec {
            id: id.into(),
            category,
            period: period.to_string(),
            kind: NodeKind::ConditionalTable {
                index: ParentIndex { parents, keys },
                states,
                rows,
            },
        });
    }
}

fn scale() -> Vec<f64> {
    (1..=SCALE_POINTS).map(|v| v as f64).collect()
}

fn scale_states(labels: &[&str; 5]) -> Vec<State> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| State {
            label: l.to_string(),
            value: (i + 1) as f64,
        })
        .collect()
}

/// `if(Level >= t0, 0, if(Level >= t1, row0, ...))` with each row a duration ladder.
pub fn fuel_switching_expr(table: &FuelSwitchingTable, level: &str, duration: &str) -> String {
    fn ladder(cols: &[f64], duration: &str) -> String {
        let (last, init) = cols.split_last().expect("checked non-empty");
        let mut e = format!("{last}");
        for (d, v) in init.iter().enumerate().rev() {
            e = format!("if({duration} <= {d}, {v}, {e})");
        }
        e
    }
    let bands = &table.bands;
    let mut e = ladder(&bands[bands.len() - 1].by_duration, duration);
    for i in (0..bands.len() - 1).rev() {
        e = format!(
            "if({level} >= {}, {}, {e})",
            bands[i + 1].below,
            ladder(&bands[i].by_duration, duration)
        );
    }
    format!("if({level} >= {}, 0, {e})", table.threshold)
}

/// Assemble the eight-quarter unrolled base-case network.
pub fn build_base_case(p: &MarketParameters) -> Result<Network, OilModelError> {
    p.validate()?;
    p.fuel_switching.check()?;
    p.politics.check()?;
    p.ss_diff.check()?;
    check_import_fee(&p.tax.import_fee)?;

    let mut b = Builder { p, nodes: Vec::new() };
    annual_nodes(&mut b)?;
    history_nodes(&mut b)?;
    for q in QuarterTag::forecasts() {
        quarter_nodes(&mut b, q)?;
    }
    Ok(Network::from_specs(BASE_CASE_NAME, period_labels(), b.nodes)?)
}

fn annual_nodes(b: &mut Builder) -> Result<(), OilModelError> {
    let p = b.p;
    b.constant(NC_CAP.into(), Category::Annual, ANNUAL, p.capacity.nc_cap);
    b.det(
        NC_PROD.into(),
        Category::Annual,
        ANNUAL,
        &format!("{} * {NC_CAP}", p.capacity.nc_utilization),
    )?;

    let priors = &p.world_growth.priors;
    let dists = [&priors.ldc, &priors.we, &priors.us, &priors.japan];
    let mut terms = Vec::new();
    for ((id, dist), w) in GROWTH_COMPONENTS
        .iter()
        .zip(dists)
        .zip(p.world_growth.weights.as_array())
    {
        b.prior(id.to_string(), Category::Annual, ANNUAL, dist.clone());
        terms.push(format!("{w} * {id}"));
    }
    b.det(WORLD_GROWTH.into(), Category::Annual, ANNUAL, &terms.join(" + "))?;
    b.det(
        DEMAND_GROWTH.into(),
        Category::Demand,
        ANNUAL,
        &format!("{WORLD_GROWTH} - {} * {GT_IMPACT}", p.demand.gt_drag),
    )?;

    let mut caps = Vec::new();
    for (country, cap) in p.capacity.core.by_country() {
        let id = format!("{C_CAP}{country}");
        b.constant(id.clone(), Category::Supply, ANNUAL, cap);
        caps.push(id);
    }
    b.det(C_CAP.into(), Category::Supply, ANNUAL, &caps.join(" + "))?;

    let pass = p.tax.gt_pass_probability;
    b.labeled_prior(
        GT.into(),
        Category::Tax,
        ANNUAL,
        DistributionSpec::Categorical {
            values: vec![0.0, 1.0],
            probs: vec![1.0 - pass, pass],
        },
        &["not_passed", "passed"],
    );
    b.prior(GT_SIZE.into(), Category::Tax, ANNUAL, p.tax.gt_size.clone());
    b.det(
        GT_IMPACT.into(),
        Category::Tax,
        ANNUAL,
        &format!("if({GT} = 1, {GALLONS_PER_BARREL} * {GT_SIZE}, 0)"),
    )?;
    let fee = p.tax.import_fee;
    b.table(
        OI_FEE.into(),
        Category::Tax,
        ANNUAL,
        vec![GT.into()],
        vec![vec![0.0, 1.0]],
        vec![
            State {
                label: "no_fee".into(),
                value: 0.0,
            },
            State {
                label: "fee".into(),
                value: 1.0,
            },
        ],
        vec![
            vec![1.0 - fee.given_not_passed, fee.given_not_passed],
            vec![1.0 - fee.given_passed, fee.given_passed],
        ],
    );
    Ok(())
}

fn history_nodes(b: &mut Builder) -> Result<(), OilModelError> {
    let p = b.p;
    for q in QuarterTag::history() {
        let h = *p.history_at(q)?;
        let period = q.label();
        for (prefix, v) in [
            (DEMAND, h.demand),
            (US_PROD, h.us_prod),
            (NO_PROD, h.no_prod),
            (CORE_PROD, h.core_prod),
        ] {
            b.constant(q.node(prefix), Category::Historical, &period, v);
        }
    }
    let last = QuarterTag::new(1989, 4);
    let period = last.label();
    b.constant(last.node(OPEC), Category::Historical, &period, p.opening.opec);
    b.constant(last.node(WTI), Category::Historical, &period, p.opening.wti);
    b.constant(last.node(DURATION), Category::Historical, &period, p.opening.duration);
    Ok(())
}

fn supply_prior(
    table: &std::collections::BTreeMap<String, DistributionSpec>,
    name: &str,
    q: QuarterTag,
) -> Result<DistributionSpec, OilModelError> {
    table
        .get(&q.label())
        .cloned()
        .ok_or_else(|| OilModelError::IncompleteParameters(format!("supply.{name}.{q}")))
}

fn quarter_nodes(b: &mut Builder, q: QuarterTag) -> Result<(), OilModelError> {
    let p = b.p;
    let period = q.label();
    let per = period.as_str();
    let n = |prefix: &str| q.node(prefix);
    let prev = lagged(q, 1)?;
    let year_ago = lagged(q, 4)?;
    let pn = |prefix: &str| prev.node(prefix);
    let yn = |prefix: &str| year_ago.node(prefix);

    b.constant(n(TIME), Category::Price, per, f64::from(q.ordinal()));

    // demand
    let fs = &p.fuel_switching;
    b.det(n(LEVEL), Category::Demand, per, &pn(WTI))?;
    b.det(
        n(DURATION),
        Category::Demand,
        per,
        &format!("if({} < {}, {} + 1, 0)", n(LEVEL), fs.threshold, pn(DURATION)),
    )?;
    b.det(
        n(FUEL_SWITCHING),
        Category::Demand,
        per,
        &fuel_switching_expr(fs, &n(LEVEL), &n(DURATION)),
    )?;
    b.det(
        n(DEMAND),
        Category::Demand,
        per,
        &format!(
            "{} * (1 + {} * {DEMAND_GROWTH}) + {}",
            yn(DEMAND),
            p.demand.sensitivity,
            n(FUEL_SWITCHING)
        ),
    )?;

    // supply
    b.prior(
        n(US_PROD),
        Category::Supply,
        per,
        supply_prior(&p.supply.us_prod, "us_prod", q)?,
    );
    b.prior(
        n(NO_PROD),
        Category::Supply,
        per,
        supply_prior(&p.supply.no_prod, "no_prod", q)?,
    );
    b.prior(
        n(DELTA_I),
        Category::Supply,
        per,
        supply_prior(&p.supply.delta_i, "delta_i", q)?,
    );
    b.det(
        n(O_CALL),
        Category::Supply,
        per,
        &format!("{} + {} - {} - {}", n(DEMAND), n(DELTA_I), n(US_PROD), n(NO_PROD)),
    )?;
    b.det(
        n(CORE_DEMAND),
        Category::Supply,
        per,
        &format!("{} - {NC_PROD}", n(O_CALL)),
    )?;

    // politics
    let pol = &p.politics;
    if q.quarter == 1 {
        b.labeled_prior(
            n(INTRAGULF),
            Category::Politics,
            per,
            DistributionSpec::Categorical {
                values: scale(),
                probs: pol.intragulf_prior.clone(),
            },
            &INTRAGULF_LABELS,
        );
    } else {
        b.table(
            n(INTRAGULF),
            Category::Politics,
            per,
            vec![pn(INTRAGULF).into()],
            vec![scale()],
            scale_states(&INTRAGULF_LABELS),
            (1..=SCALE_POINTS).map(|from| pol.intragulf_transition(from)).collect(),
        );
    }
    b.table(
        n(MARKET_SHARE),
        Category::Politics,
        per,
        vec![n(INTRAGULF).into()],
        vec![scale()],
        scale_states(&MARKET_SHARE_LABELS),
        pol.market_share_cpt.clone(),
    );
    b.push(NodeSpec {
        id: n(POLITICS).into(),
        category: Category::Politics,
        period: period.clone(),
        kind: NodeKind::ConditionalDistribution {
            index: ParentIndex {
                parents: vec![n(INTRAGULF).into(), n(MARKET_SHARE).into()],
                keys: vec![scale(), scale()],
            },
            rows: pol
                .hedge_map
                .iter()
                .flat_map(|row| row.iter().map(|h| DistributionSpec::point(*h)))
                .collect(),
        },
    });

    b.det(
        n(CORE_PROD),
        Category::Supply,
        per,
        &format!("max({} + {}, 0)", n(CORE_DEMAND), n(POLITICS)),
    )?;
    b.det(n(CAP_UT), Category::Supply, per, &format!("{} / {C_CAP}", n(CORE_PROD)))?;
    b.det(
        n(SUPPLY),
        Category::Supply,
        per,
        &format!("{} + {} + {NC_PROD} + {}", n(US_PROD), n(NO_PROD), n(CORE_PROD)),
    )?;
    b.det(
        n(DELTA_Y_CORE_PROD),
        Category::Supply,
        per,
        &format!("{} - {}", n(CORE_PROD), yn(CORE_PROD)),
    )?;
    b.det(
        n(DELTA_Q_CORE_PROD),
        Category::Supply,
        per,
        &format!("{} - {}", n(CORE_PROD), pn(CORE_PROD)),
    )?;
    b.det(
        n(DELTA_Y_SWEET),
        Category::Supply,
        per,
        &format!("{} + {} - ({} + {})", n(US_PROD), n(NO_PROD), yn(US_PROD), yn(NO_PROD)),
    )?;

    // price
    let pr = &p.price;
    b.det(
        n(OPEC),
        Category::Price,
        per,
        &format!(
            "{prev_opec} + {slope} * ({cap_ut} - {u0}) * {p0} / {prev_opec} + {w_dq} * {dq} + {w_dy} * {dy} + {w_bal} * ({supply} - {demand} - {di})",
            prev_opec = pn(OPEC),
            slope = pr.slope,
            cap_ut = n(CAP_UT),
            u0 = pr.u0,
            p0 = pr.p0,
            w_dq = pr.w_dq,
            dq = n(DELTA_Q_CORE_PROD),
            w_dy = pr.w_dy,
            dy = n(DELTA_Y_CORE_PROD),
            w_bal = pr.w_bal,
            supply = n(SUPPLY),
            demand = n(DEMAND),
            di = n(DELTA_I),
        ),
    )?;
    let ss = &p.ss_diff;
    b.det(
        n(SS_DIFF),
        Category::Price,
        per,
        &format!(
            "{} + {} * {} - {} * {}",
            ss.intercept,
            ss.trend,
            n(TIME),
            ss.k,
            n(DELTA_Y_SWEET)
        ),
    )?;
    b.det(n(WTI), Category::Price, per, &format!("{} + {}", n(OPEC), n(SS_DIFF)))?;
    b.det(
        n(WTIP),
        Category::Price,
        per,
        &format!(
            "if({OI_FEE} = 1 and {wti} <= {IMPORT_FEE_FLOOR}, {IMPORT_FEE_FLOOR}, {wti})",
            wti = n(WTI)
        ),
    )?;
    Ok(())
}
