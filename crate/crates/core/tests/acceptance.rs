//! Acceptance suite. Runs every primary criterion, prints one line per
//! criterion and exits non-zero if any fails.

mod common;

use std::collections::HashMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use beliefcast::gateway::{evaluate, Goals};
use beliefcast::netcore::{Category, Network, NetworkError, NodeId, NodeKind};
use beliefcast::oilmodel::{build_base_case, ops, reference_parameters, VARIABLE_CHECKLIST};
use beliefcast::sampler::{enumerate_exact, run_monte_carlo};
use beliefcast::scenario::{build_constrained_case, reference_actuals};

use common::{RandomModel, BAD_ROW_FIXTURE, CYCLIC_FIXTURE};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ids(list: &[&str]) -> Vec<NodeId> {
    list.iter().map(|s| NodeId::from(*s)).collect()
}

fn oracle_equivalence() -> Outcome {
    const N: usize = 100_000;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let model = RandomModel::generate(0xACCE_0000 + k);
        let net = model.network();
        let (mean, sd) = model.exact_moments();
        let exact = enumerate_exact(&net, "y").map_err(|e| format!("net {k}: {e}"))?;
        if (exact.mean() - mean).abs() > 1e-9 || (exact.stddev() - sd).abs() > 1e-9 {
            return Err(format!(
                "net {k}: enumerate_exact ({}, {}) disagrees with the test oracle ({mean}, {sd})",
                exact.mean(),
                exact.stddev()
            ));
        }
        let f = run_monte_carlo(&net, &ids(&["y"]), N, 1000 + k).map_err(|e| e.to_string())?;
        let err = (f.results[0].mean - mean).abs();
        let bound = 4.0 * sd / (N as f64).sqrt();
        if err > bound {
            return Err(format!("net {k}: |MC - exact| = {err:.5} > {bound:.5}"));
        }
        if bound > 0.0 {
            worst = worst.max(err / bound);
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("took {elapsed:.2?} (limit 30 s)"));
    }
    Ok(format!(
        "20 networks at n=100000, worst error {worst:.2} of the 4-sigma bound, {elapsed:.2?}"
    ))
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_beliefcast");
    let net = common::models_dir().join("base_case.network.json");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let status = Command::new(exe)
            .arg("simulate")
            .arg("--network")
            .arg(&net)
            .args([
                "--targets",
                "WTIp.1,WTIp.2,WTIp.3,WTIp.4",
                "--n",
                "2000",
                "--seed",
                "77",
                "--out",
            ])
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        outputs.push(std::fs::read(dir.join("samples.csv")).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("two runs with the same seed produced different CSV".into());
    }
    Ok(format!("two CLI runs, {} identical bytes", outputs[0].len()))
}

fn deterministic_expr(net: &Network, id: &str) -> Result<beliefcast::netcore::Expr, String> {
    match &net.get(id).ok_or(format!("no node {id}"))?.kind {
        NodeKind::Deterministic { expr, .. } => Ok(expr.clone()),
        other => Err(format!("{id} is {other:?}")),
    }
}

fn floor_rule() -> Outcome {
    let net = build_base_case(&reference_parameters()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for q in 1..=4 {
        let expr = deterministic_expr(&net, &format!("WTIp.{q}"))?;
        for step in 0..=80 {
            let wti = 10.0 + 0.25 * step as f64;
            for fee in [false, true] {
                let want = if fee && wti <= 18.0 { 18.0 } else { wti };
                let lib = ops::wti_with_fee(wti, fee);
                let env = HashMap::from([
                    (format!("WTI.{q}"), wti),
                    ("OIFee".to_string(), if fee { 1.0 } else { 0.0 }),
                ]);
                let node = expr.eval(&env).map_err(|e| e.to_string())?;
                if lib != want || node != want {
                    return Err(format!(
                        "WTIp.{q} at wti={wti}, fee={fee}: library {lib}, node {node}, want {want}"
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} grid points over 4 quarters, exact"))
}

fn fuel_switching() -> Outcome {
    let p = reference_parameters();
    let net = build_base_case(&p).map_err(|e| e.to_string())?;
    let table = &p.fuel_switching;
    let expr = deterministic_expr(&net, "FuelSwitching.1")?;
    let levels: Vec<f64> = (0..=100).map(|i| 5.0 + 0.25 * i as f64).collect();
    let durations: Vec<f64> = (0..=8).map(f64::from).collect();
    let value = |level: f64, d: f64| -> Result<f64, String> {
        let lib = ops::fuel_switching(level, d, table).map_err(|e| e.to_string())?;
        let env = HashMap::from([("Level.1".to_string(), level), ("Duration.1".to_string(), d)]);
        let node = expr.eval(&env).map_err(|e| e.to_string())?;
        if lib != node {
            return Err(format!("level {level}, duration {d}: library {lib} != node {node}"));
        }
        Ok(lib)
    };
    for &level in &levels {
        for &d in &durations {
            let v = value(level, d)?;
            if !(0.0..=2.0).contains(&v) {
                return Err(format!("level {level}, duration {d}: {v} outside [0, 2]"));
            }
            if level >= 15.0 && v != 0.0 {
                return Err(format!("level {level}, duration {d}: {v} but level >= 15"));
            }
            if level + 0.25 <= 30.0 && value(level + 0.25, d)? > v {
                return Err(format!("increases with level at {level}, duration {d}"));
            }
            if d < 8.0 && value(level, d + 1.0)? < v {
                return Err(format!("decreases with duration at {level}, duration {d}"));
            }
        }
    }
    Ok(format!(
        "{} (level, duration) points, library and node agree",
        levels.len() * durations.len()
    ))
}

fn calibration() -> Outcome {
    let text = std::fs::read_to_string(common::models_dir().join("calibration_goals.json")).map_err(|e| e.to_string())?;
    let goals = Goals::from_json(&text)?;
    let start = Instant::now();
    let net = build_base_case(&reference_parameters()).map_err(|e| e.to_string())?;
    let f = run_monte_carlo(&net, &goals.target_ids(), goals.n, goals.seed).map_err(|e| e.to_string())?;
    let report = evaluate(&f, &goals, goals.tolerance)?;
    let elapsed = start.elapsed();
    print!("{}", report.render());
    if !report.passed() {
        return Err("calibration checks failed (table above)".into());
    }
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("took {elapsed:.2?} (limit 5 s)"));
    }
    let means: Vec<String> = f
        .results
        .iter()
        .map(|r| format!("{:.2}/{:.2}", r.mean, r.stddev))
        .collect();
    Ok(format!(
        "{} checks pass, WTIp mean/sd {}, {elapsed:.2?}",
        report.checks.len(),
        means.join(" ")
    ))
}

fn constrained_case() -> Outcome {
    let p = reference_parameters();
    let base = build_base_case(&p).map_err(|e| e.to_string())?;
    let net = build_constrained_case(&p, &reference_actuals()).map_err(|e| e.to_string())?;
    let targets = ids(&["WTI.3", "WTI.4"]);
    let c = run_monte_carlo(&net, &targets, 10_000, 1990).map_err(|e| e.to_string())?;
    let b = run_monte_carlo(&base, &targets, 10_000, 1990).map_err(|e| e.to_string())?;
    let (q3, q4) = (&c.results[0], &c.results[1]);
    if (q3.mean - 25.0).abs() > 2.0 {
        return Err(format!("WTI.3 mean {:.3} not within 25 ± 2", q3.mean));
    }
    if !(27.0..=33.0).contains(&q4.mean) {
        return Err(format!("WTI.4 mean {:.3} outside [27, 33]", q4.mean));
    }
    for (r, base_r) in c.results.iter().zip(&b.results) {
        if r.stddev > 1.0 || r.stddev > 0.25 * base_r.stddev {
            return Err(format!(
                "{} sd {:.3} exceeds min(1.0, 25% of base {:.3})",
                r.target, r.stddev, base_r.stddev
            ));
        }
    }
    Ok(format!(
        "WTI.3 {:.2} (sd {:.2}, base {:.2}), WTI.4 {:.2} (sd {:.2}, base {:.2})",
        q3.mean, q3.stddev, b.results[0].stddev, q4.mean, q4.stddev, b.results[1].stddev
    ))
}

fn structural_coverage() -> Outcome {
    let p = reference_parameters();
    let base = build_base_case(&p).map_err(|e| e.to_string())?;
    for (name, prefix) in VARIABLE_CHECKLIST {
        let found = base.nodes().iter().any(|n| {
            let id = n.id.as_str();
            id == prefix || id.strip_prefix(prefix).is_some_and(|rest| rest.starts_with('.'))
        });
        if !found {
            return Err(format!("variable {name} ({prefix}) has no node"));
        }
    }
    let net = build_constrained_case(&p, &reference_actuals()).map_err(|e| e.to_string())?;
    const FORBIDDEN: [&str; 8] = [
        "Politics",
        "Intragulf",
        "MarketShare",
        "OIFee",
        "GT",
        "Level",
        "Duration",
        "FuelSwitching",
    ];
    for n in net.nodes() {
        let stem = n.id.as_str().split('.').next().unwrap_or_default();
        if matches!(n.category, Category::Politics | Category::Tax) || FORBIDDEN.contains(&stem) {
            return Err(format!("constrained network still has {}", n.id));
        }
    }
    Ok(format!(
        "{} variables covered by {} base nodes; constrained network ({} nodes) has no politics, tax or fuel-switching nodes",
        VARIABLE_CHECKLIST.len(),
        base.len(),
        net.len()
    ))
}

fn validation() -> Outcome {
    match Network::from_json(CYCLIC_FIXTURE) {
        Err(NetworkError::CycleDetected { path }) => {
            let names: Vec<&str> = path.iter().map(|p| p.as_str()).collect();
            let doc: serde_json::Value = serde_json::from_str(CYCLIC_FIXTURE).expect("fixture parses");
            let parents_of = |id: &str| -> Vec<String> {
                doc["nodes"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .find(|n| n["id"] == id)
                    .and_then(|n| n["parents"].as_array())
                    .map(|ps| ps.iter().filter_map(|p| p.as_str().map(String::from)).collect())
                    .unwrap_or_default()
            };
            // The witness must be a closed walk along parent -> child edges.
            let closed = names.len() >= 3 && names.first() == names.last();
            let walk = names.windows(2).all(|w| parents_of(w[1]).iter().any(|p| p == w[0]));
            if !closed || !walk || names.contains(&"r") {
                return Err(format!("witness {names:?} is not a cycle of the fixture"));
            }
        }
        other => return Err(format!("cyclic fixture: expected a cycle error, got {other:?}")),
    }
    match Network::from_json(BAD_ROW_FIXTURE) {
        Err(NetworkError::BadProbabilityRow { node, row: 1, .. }) if node == "q" => {}
        other => return Err(format!("bad row fixture: got {other:?}")),
    }
    let near = BAD_ROW_FIXTURE.replace("0.600000002", "0.6000000005");
    Network::from_json(&near).map_err(|e| format!("row off by 5e-10 should pass: {e}"))?;
    let witness = Network::from_json(CYCLIC_FIXTURE).unwrap_err();
    Ok(format!("{witness}; row summing to 1+2e-9 rejected, 1+5e-10 accepted"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
        ("floor rule exactness", floor_rule),
        ("fuel switching", fuel_switching),
        ("calibration", calibration),
        ("constrained case", constrained_case),
        ("structural coverage", structural_coverage),
        ("validation", validation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
