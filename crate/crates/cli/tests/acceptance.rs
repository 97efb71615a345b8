//! Acceptance checks. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `--nocapture` to see the lines.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use powershift_cli::parse_config;
use powershift_core::accounting::total_income;
use powershift_core::models::{Elasticities, SpilloverParams, TranslogParams, VonThunenParams};
use powershift_core::oracle::sample_points;
use powershift_core::policy::PolicySpec;
use powershift_core::presets::reference_model;
use powershift_core::scenario::ScenarioPolicy;
use powershift_core::{run_scenario, Factor, FactorSnapshot, Family, ModelSpec, Scenario};

type Check = Result<String, String>;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_powershift")
}

fn example_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/table1.cfg")
}

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reference_scenario() -> Result<Scenario, String> {
    parse_config(&example_config()).map_err(|e| e.to_string())
}

fn only(scenario: &Scenario, family: Family, policies: Vec<ScenarioPolicy>) -> Scenario {
    Scenario {
        families: scenario
            .families
            .iter()
            .filter(|s| s.family == family)
            .cloned()
            .collect(),
        policies,
        ..scenario.clone()
    }
}

fn fd_oracle_suite() -> Check {
    let started = Instant::now();
    let out = Command::new(binary())
        .args([
            "validate", "--points", "100", "--tol", "1e-5", "--seed", "42",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}\n{stdout}", out.status.code())
    })?;
    let passed: Vec<&str> = stdout
        .lines()
        .filter(|l| l.ends_with(" PASS"))
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    let expected: Vec<&str> = Family::ALL
        .iter()
        .filter(|f| f.is_differentiable())
        .map(|f| f.name())
        .collect();
    ensure(passed == expected, || format!("passed {passed:?}"))?;
    ensure(elapsed < 5.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!(
        "{} families passed in {elapsed:.2} s",
        passed.len()
    ))
}

fn cobb_douglas_trajectory() -> Check {
    let scenario = reference_scenario()?;
    let cd = only(
        &scenario,
        Family::CobbDouglas,
        vec![ScenarioPolicy::baseline()],
    );
    let points = run_scenario(&cd).map_err(|e| e.to_string())?;
    let share = |i: usize| {
        points[i]
            .outcome
            .as_ref()
            .map(|o| o.reading.s_raw)
            .map_err(|e| e.to_string())
    };
    let first = share(0)?;
    let last = share(points.len() - 1)?;
    ensure(rel_close(first, 0.40625, 1e-12), || {
        format!("S(0) = {first}")
    })?;
    ensure(rel_close(last, 1.6 / 2.55, 1e-9), || {
        format!("S(T) = {last}")
    })?;
    Ok(format!("S(0) = {first:.12}, S(T) = {last:.12}"))
}

fn euler_identities() -> Check {
    let points = sample_points(50, 2024, 0.1, 10.0);
    let mut worst: f64 = 0.0;
    for (family, degree) in [
        (Family::Ces, 1.0),
        (Family::Power, 1.0),
        (Family::Linear, 1.0),
        (Family::CobbDouglas, 0.55 + 0.3 + 0.4 + 0.35),
    ] {
        let model = reference_model(family);
        for x in &points {
            let s = model.evaluate(x).map_err(|e| e.to_string())?;
            let y = total_income(&s, x);
            let q = degree * s.output;
            worst = worst.max((y - q).abs() / q.abs());
            ensure(rel_close(y, q, 1e-9), || {
                format!("{family} at {x:?}: Y={y} vs {q}")
            })?;
        }
    }
    Ok(format!(
        "4 families x 50 points, worst rel error {worst:.1e}"
    ))
}

fn snapshots_close(a: &FactorSnapshot, b: &FactorSnapshot, rtol: f64) -> bool {
    rel_close(a.output, b.output, rtol)
        && Factor::ALL
            .iter()
            .all(|&f| rel_close(a.price(f), b.price(f), rtol))
}

fn reductions() -> Check {
    let e = Elasticities::new(0.55, 0.3, 0.4, 0.35);
    let cd =
        |scale: f64| ModelSpec::from_values(Family::CobbDouglas, &[scale, 0.55, 0.3, 0.4, 0.35]);
    let cd = cd(1.8).map_err(|e| e.to_string())?;
    let translog = ModelSpec::Translog(TranslogParams {
        log_scale: 1.8f64.ln(),
        elasticities: e,
        lambda: [0.0; 6],
    });
    let von_thunen = ModelSpec::VonThunen(VonThunenParams {
        scale: 1.8,
        elasticities: e,
        c_decay: 0.0,
        d_decay: 0.0,
    });
    let spillover = ModelSpec::Spillover(SpilloverParams {
        scale: 1.8,
        elasticities: e,
        theta: 0.45,
    });
    let points = sample_points(20, 99, 0.1, 10.0);
    for (name, model) in [
        ("translog", &translog),
        ("vonthunen", &von_thunen),
        ("spillover", &spillover),
    ] {
        for x in &points {
            let x = x.with_knowledge_stock(1.0);
            let a = model.evaluate(&x).map_err(|e| e.to_string())?;
            let b = cd.evaluate(&x).map_err(|e| e.to_string())?;
            ensure(snapshots_close(&a, &b, 1e-12), || {
                format!("{name} differs at {x:?}: {a:?} vs {b:?}")
            })?;
        }
    }
    Ok("translog, vonthunen, spillover match cobb_douglas on 20 points".into())
}

fn policy_dominance() -> Check {
    let scenario = reference_scenario()?;
    let stack = scenario
        .policies
        .iter()
        .find(|p| p.spec == PolicySpec::full_stack())
        .cloned()
        .ok_or("reference config has no full policy stack")?;
    let proportional = ScenarioPolicy::new(
        "proportional",
        PolicySpec {
            proportional_tax: 0.25,
            uad_rate: 0.15,
            ..PolicySpec::default()
        },
    );
    let run = Scenario {
        policies: vec![ScenarioPolicy::baseline(), stack, proportional],
        ..scenario.clone()
    };
    let points = run_scenario(&run).map_err(|e| e.to_string())?;
    let steps = run.horizon as usize + 1;
    let factor = 0.75 * 0.85;
    let mut compared = 0;
    for family_block in points.chunks(3 * steps) {
        let (baseline, rest) = family_block.split_at(steps);
        let (stacked, prop) = rest.split_at(steps);
        for ((b, s), p) in baseline.iter().zip(stacked).zip(prop) {
            let (family, t) = (b.family, b.t);
            let (Ok(b), Ok(s), Ok(p)) = (&b.outcome, &s.outcome, &p.outcome) else {
                return Err(format!("{family} t={t} did not evaluate"));
            };
            let (sb, ss) = (b.reading.s_raw, s.reading.s_raw);
            ensure(ss <= sb + 1e-12, || {
                format!("{family} t={t}: policed {ss} > baseline {sb}")
            })?;
            let market_share = b.market.agi / b.market.total();
            if (0.0..=1.0).contains(&market_share) {
                let expected = factor * market_share;
                ensure(rel_close(p.reading.s_raw, expected, 1e-12), || {
                    format!("{family} t={t}: {} vs {expected}", p.reading.s_raw)
                })?;
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} steps over 10 families; proportional stages scale by (1-tax)(1-uad)"
    ))
}

fn ces_sigmoid() -> Check {
    let scenario = reference_scenario()?;
    let ces = only(&scenario, Family::Ces, vec![ScenarioPolicy::baseline()]);
    let points = run_scenario(&ces).map_err(|e| e.to_string())?;
    let s: Vec<f64> = points
        .iter()
        .map(|p| p.outcome.as_ref().map(|o| o.reading.s_norm))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let steps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(steps.iter().all(|&d| d >= 0.0), || {
        "S_norm decreases".into()
    })?;
    let (peak, _) =
        steps.iter().enumerate().fold(
            (0, f64::MIN),
            |best, (i, &d)| if d > best.1 { (i, d) } else { best },
        );
    let horizon = f64::from(ces.horizon);
    let t = peak as f64;
    ensure(t >= horizon / 3.0 && t < 2.0 * horizon / 3.0, || {
        format!("largest increment at t={peak}")
    })?;
    Ok(format!(
        "monotone, largest increment at t={peak} of {}",
        ces.horizon
    ))
}

fn read_outputs(dir: &Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let read = |name: &str| std::fs::read(dir.join(name)).map_err(|e| format!("{name}: {e}"));
    Ok((read("trajectory.csv")?, read("powershift.svg")?))
}

fn simulate_into(dir: &Path) -> Result<(), String> {
    let status = Command::new(binary())
        .arg("simulate")
        .arg(example_config())
        .arg("--out")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        String::from_utf8_lossy(&status.stderr).into_owned()
    })
}

fn determinism(first: &Path, second: &Path) -> Check {
    simulate_into(first)?;
    simulate_into(second)?;
    let (csv_a, svg_a) = read_outputs(first)?;
    let (csv_b, svg_b) = read_outputs(second)?;
    ensure(csv_a == csv_b, || "trajectory.csv differs".into())?;
    ensure(svg_a == svg_b, || "powershift.svg differs".into())?;
    Ok(format!(
        "{} CSV bytes and {} SVG bytes identical",
        csv_a.len(),
        svg_a.len()
    ))
}

/// Reads the CSV written by the determinism run, so the check covers what
/// actually reaches disk.
fn degeneracy(dir: &Path) -> Check {
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).map_err(|e| e.to_string())?;
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[1] != "cobb_douglas" && f[1] != "spillover" {
            continue;
        }
        rows += 1;
        ensure(f[13] == "true", || format!("flag not set: {line}"))?;
        for col in [6, 7] {
            let v: f64 = f[col].parse().map_err(|_| format!("bad share: {line}"))?;
            ensure(v.is_finite() && (0.0..=1.0).contains(&v), || {
                format!("share out of range: {line}")
            })?;
        }
    }
    ensure(rows == 2 * 101, || format!("found {rows} rows"))?;
    Ok(format!("{rows} rows flagged, shares finite in [0, 1]"))
}

#[test]
fn acceptance_criteria() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let criteria: Vec<(&str, Check)> = vec![
        ("finite-difference oracle suite", fd_oracle_suite()),
        (
            "Cobb-Douglas reference trajectory",
            cobb_douglas_trajectory(),
        ),
        ("Euler and adding-up identities", euler_identities()),
        ("reduction equalities", reductions()),
        ("policy dominance", policy_dominance()),
        ("CES sigmoid", ces_sigmoid()),
        (
            "simulate determinism",
            determinism(first.path(), second.path()),
        ),
        ("degeneracy handling", degeneracy(first.path())),
    ];
    println!();
    let mut failed = 0;
    for (i, (name, result)) in criteria.iter().enumerate() {
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {} {name}: {reason}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
