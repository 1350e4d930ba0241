//! Goal-file driven calibration report. Reports only; never edits parameters.
//!
//! ```json
//! {
//!   "n": 10000, "seed": 1990,
//!   "tolerance": {"mean": 1.0, "stddev": 1.5},
//!   "targets": [{"target": "WTIp.1", "mean": 20.87, "stddev": 2.9}],
//!   "annual_mean": {"mean": 21.14, "tolerance": 1.0},
//!   "bucket_share": {"lo": 18, "hi": 21, "min": 0.45, "max": 0.75}
//! }
//! ```
//!
//! `annual_mean` compares the average of the target means; `bucket_share`
//! pools the histograms of every target.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::netcore::NodeId;
use crate::sampler::{bucket_share, Forecast};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub mean: f64,
    pub stddev: f64,
}

impl std::str::FromStr for Tolerance {
    type Err = String;

    /// `M` (both) or `M,S`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|e| format!("bad tolerance `{t}`: {e}"))?;
            if v < 0.0 || !v.is_finite() {
                return Err(format!("tolerance must be a finite value >= 0, got {v}"));
            }
            Ok(v)
        };
        match s.split_once(',') {
            Some((m, sd)) => Ok(Tolerance {
                mean: parse(m)?,
                stddev: parse(sd)?,
            }),
            None => {
                let v = parse(s)?;
                Ok(Tolerance { mean: v, stddev: v })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetGoal {
    pub target: NodeId,
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnualGoal {
    pub mean: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BucketGoal {
    pub lo: i64,
    pub hi: i64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goals {
    pub n: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub targets: Vec<TargetGoal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annual_mean: Option<AnnualGoal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket_share: Option<BucketGoal>,
}

impl Goals {
    pub fn from_json(text: &str) -> Result<Goals, String> {
        let g: Goals = serde_json::from_str(text).map_err(|e| format!("bad goals file: {e}"))?;
        if g.targets.is_empty() {
            return Err("bad goals file: no targets".into());
        }
        if g.n == 0 {
            return Err("bad goals file: n must be >= 1".into());
        }
        Ok(g)
    }

    pub fn target_ids(&self) -> Vec<NodeId> {
        self.targets.iter().map(|t| t.target.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub goal: String,
    pub achieved: f64,
    pub delta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub checks: Vec<Check>,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut s = format!(
            "{:<w$}  {:>14}  {:>10}  {:>8}  result\n",
            "check", "goal", "achieved", "delta"
        );
        for c in &self.checks {
            writeln!(
                s,
                "{:<w$}  {:>14}  {:>10.3}  {:>+8.3}  {}",
                c.name,
                c.goal,
                c.achieved,
                c.delta,
                if c.pass { "PASS" } else { "FAIL" }
            )
            .expect("write to string");
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        writeln!(s, "{} checks, {} failed", self.checks.len(), failed).expect("write to string");
        s
    }
}

fn within(name: String, goal: f64, tol: f64, achieved: f64) -> Check {
    let delta = achieved - goal;
    Check {
        name,
        goal: format!("{goal} ± {tol}"),
        achieved,
        delta,
        pass: delta.abs() <= tol && tol > 0.0,
    }
}

/// Compare a forecast against the goals. A zero tolerance always fails, so a
/// report can never pass by construction.
pub fn evaluate(forecast: &Forecast, goals: &Goals, tolerance: Tolerance) -> Result<CalibrationReport, String> {
    let mut checks = Vec::new();
    let mut pooled: BTreeMap<i64, u64> = BTreeMap::new();
    let mut means = Vec::new();
    for g in &goals.targets {
        let r = forecast
            .get(g.target.as_str())
            .ok_or_else(|| format!("forecast has no target `{}`", g.target))?;
        checks.push(within(format!("{} mean", g.target), g.mean, tolerance.mean, r.mean));
        checks.push(within(
            format!("{} stddev", g.target),
            g.stddev,
            tolerance.stddev,
            r.stddev,
        ));
        means.push(r.mean);
        for (k, v) in &r.histogram {
            *pooled.entry(*k).or_insert(0) += v;
        }
    }
    if let Some(a) = &goals.annual_mean {
        let avg = means.iter().sum::<f64>() / means.len() as f64;
        checks.push(within("annual mean".into(), a.mean, a.tolerance, avg));
    }
    if let Some(b) = &goals.bucket_share {
        let share = bucket_share(&pooled, b.lo, b.hi);
        checks.push(Check {
            name: format!("share in buckets {}-{}", b.lo, b.hi),
            goal: format!("[{}, {}]", b.min, b.max),
            achieved: share,
            delta: if share < b.min {
                share - b.min
            } else if share > b.max {
                share - b.max
            } else {
                0.0
            },
            pass: (b.min..=b.max).contains(&share),
        });
    }
    Ok(CalibrationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Category, DistributionSpec, Network, NodeSpec, ANNUAL};
    use crate::sampler::run_monte_carlo;

    fn forecast() -> Forecast {
        let net = Network::from_specs(
            "g",
            vec![],
            vec![NodeSpec::prior(
                "p",
                Category::Price,
                ANNUAL,
                DistributionSpec::Normal {
                    mu: 20.0,
                    sigma: 1.0,
                    trunc_lo: None,
                    trunc_hi: None,
                },
            )],
        )
        .unwrap();
        run_monte_carlo(&net, &["p".into()], 4000, 5).unwrap()
    }

    fn goals() -> Goals {
        Goals::from_json(
            r#"{"n": 4000, "seed": 5, "tolerance": {"mean": 0.2, "stddev": 0.2},
                "targets": [{"target": "p", "mean": 20.0, "stddev": 1.0}],
                "annual_mean": {"mean": 20.0, "tolerance": 0.2},
                "bucket_share": {"lo": 19, "hi": 21, "min": 0.8, "max": 1.0}}"#,
        )
        .unwrap()
    }

    #[test]
    fn passes_and_reports_deltas() {
        let g = goals();
        let rep = evaluate(&forecast(), &g, g.tolerance).unwrap();
        assert!(rep.passed(), "{}", rep.render());
        assert_eq!(rep.checks.len(), 4);
        let text = rep.render();
        assert!(text.contains("p mean") && text.contains("PASS"));
        assert!(rep.checks[0].delta.abs() < 0.2);
    }

    #[test]
    fn zero_tolerance_fails() {
        let g = goals();
        let rep = evaluate(&forecast(), &g, "0".parse().unwrap()).unwrap();
        assert!(!rep.passed());
        assert!(rep.render().contains("FAIL"));
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(
            "1.5".parse::<Tolerance>().unwrap(),
            Tolerance { mean: 1.5, stddev: 1.5 }
        );
        assert_eq!(
            "1,2".parse::<Tolerance>().unwrap(),
            Tolerance { mean: 1.0, stddev: 2.0 }
        );
        assert!("-1".parse::<Tolerance>().is_err());
        assert!("x".parse::<Tolerance>().is_err());
    }

    #[test]
    fn missing_target() {
        let mut g = goals();
        g.targets[0].target = "q".into();
        assert!(evaluate(&forecast(), &g, g.tolerance).is_err());
    }
}
