//! Command-line front end for the power-shift simulator.
//!
//! [`run`] takes argv and two output streams and returns the process exit
//! code, so the whole CLI can be driven in-process from tests.

pub mod config;
pub mod error;
pub mod format;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use powershift_core::oracle::validate_family;
use powershift_core::presets::{reference_model, reference_setup};
use powershift_core::scenario::RampKind;
use powershift_core::{run_policy_grid, run_scenario, Factor, Family, Ramp, TrajectoryPoint};
use serde_json::{json, Value};

pub use config::{parse_config, parse_config_str};
pub use error::{CliError, ConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VALIDATION_FAILED: i32 = 2;

/// Caps the rayon pool; `0` or unset lets rayon pick.
pub const THREADS_ENV: &str = "POWERSHIFT_THREADS";

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const PLOT_FILE: &str = "powershift.svg";
pub const GRID_FILE: &str = "policy_grid.csv";

/// Keys accepted in the `[inputs]` section.
pub const INPUT_KEYS: [&str; 5] = ["L", "L_agi", "K", "K_agi", "knowledge_stock"];

/// Keys accepted in a `[[policy]]` entry.
pub const POLICY_KEYS: [&str; 6] = ["id", "tax", "uad", "coop", "fixed_levy", "fixed_levy_share"];

#[derive(Debug, Parser)]
#[command(
    name = "powershift",
    version,
    about = "Simulate how income shifts towards AGI factors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the baseline scenario for every configured family.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check analytic marginal products against finite differences.
    Validate {
        /// Only check this family (default: every differentiable family).
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run every configured policy against the baseline.
    Policies {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// List production families and their parameter keys.
    Models {
        #[arg(long)]
        json: bool,
    },
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    if let Err(msg) = init_thread_pool(std::env::var(THREADS_ENV).ok().as_deref()) {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_ERROR;
    }
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out, stdout),
        Command::Policies { config, out } => policies(&config, &out, stdout),
        Command::Validate {
            family,
            points,
            tol,
            seed,
        } => validate(family.as_deref(), points, tol, seed, stdout),
        Command::Models { json } => models(json, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn init_thread_pool(value: Option<&str>) -> Result<(), String> {
    let threads = match value.map(str::trim) {
        None | Some("") => 0,
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))?,
    };
    // The global pool can only be built once per process; later calls keep it.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn started_at() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn read_config(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| {
        ConfigError::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn config_from_bytes(path: &Path, bytes: &[u8]) -> Result<powershift_core::Scenario, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|_| {
        ConfigError::validation(path.display().to_string(), "config is not valid UTF-8")
    })?;
    Ok(parse_config_str(text, &path.display().to_string())?)
}

fn report_failures(points: &[TrajectoryPoint], out: &mut dyn Write) {
    let failed: Vec<_> = points.iter().filter(|p| p.outcome.is_err()).collect();
    if let Some(first) = failed.first() {
        let err = first.outcome.as_ref().expect_err("filtered on errors");
        let _ = writeln!(
            out,
            "warning: {} of {} points did not evaluate (first: {} / {} at t={}: {err})",
            failed.len(),
            points.len(),
            first.family.name(),
            first.policy,
            first.t
        );
    }
}

fn simulate(config: &Path, out_dir: &Path, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let started = started_at();
    let bytes = read_config(config)?;
    let scenario = config_from_bytes(config, &bytes)?.baseline_only();
    let points = run_scenario(&scenario)?;

    let mut out = output::OutputDir::create(out_dir)?;
    out.write(TRAJECTORY_FILE, output::trajectory_csv(&points).as_bytes())?;
    out.write(PLOT_FILE, output::trajectory_svg(&points).as_bytes())?;
    let manifest = out.finish("simulate", config, &bytes, started)?;

    report_failures(&points, stdout);
    let _ = writeln!(
        stdout,
        "simulated {} families over {} steps; wrote {} files to {}",
        scenario.families.len(),
        scenario.horizon,
        manifest.files.len() + 1,
        out_dir.display()
    );
    Ok(EXIT_OK)
}

fn policies(config: &Path, out_dir: &Path, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let started = started_at();
    let bytes = read_config(config)?;
    let scenario = config_from_bytes(config, &bytes)?;
    if scenario.policies.len() < 2 {
        return Err(ConfigError::validation(
            "policy",
            "the policies command needs at least one [[policy]] entry",
        )
        .into());
    }
    let grid = run_policy_grid(&scenario)?;

    let mut out = output::OutputDir::create(out_dir)?;
    out.write(
        TRAJECTORY_FILE,
        output::trajectory_csv(&grid.trajectory).as_bytes(),
    )?;
    out.write(GRID_FILE, output::policy_grid_csv(&grid).as_bytes())?;
    out.write(
        PLOT_FILE,
        output::trajectory_svg(&grid.trajectory).as_bytes(),
    )?;
    let manifest = out.finish("policies", config, &bytes, started)?;

    report_failures(&grid.trajectory, stdout);
    let _ = writeln!(
        stdout,
        "ran {} families x {} policies over {} steps; wrote {} files to {}",
        scenario.families.len(),
        scenario.policies.len(),
        scenario.horizon,
        manifest.files.len() + 1,
        out_dir.display()
    );
    Ok(EXIT_OK)
}

fn validate(
    family: Option<&str>,
    points: usize,
    tol: f64,
    seed: u64,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let families: Vec<Family> = match family {
        Some(name) => {
            let f = name
                .parse::<Family>()
                .map_err(|e| ConfigError::validation("--family", e))?;
            if !f.is_differentiable() {
                return Err(powershift_core::Error::NonSmoothFamily(f).into());
            }
            vec![f]
        }
        None => Family::ALL
            .into_iter()
            .filter(|f| f.is_differentiable())
            .collect(),
    };
    if points == 0 {
        return Err(ConfigError::validation("--points", "must be at least 1").into());
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ConfigError::validation("--tol", "must be a positive number").into());
    }

    let _ = writeln!(
        stdout,
        "{:<14}{:>8}{:>12}{:>12}{:>12}{:>12}  result",
        "family", "points", "w_L", "w_agi", "r_K", "r_K_agi"
    );
    let mut passed = 0;
    let mut failures = Vec::new();
    for f in &families {
        let report = validate_family(&reference_model(*f), points, tol, seed)?;
        let [a, b, c, d] = report.max_rel_error;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            stdout,
            "{:<14}{:>8}{a:>12.2e}{b:>12.2e}{c:>12.2e}{d:>12.2e}  {verdict}",
            f.name(),
            report.points_tested
        );
        if report.passed() {
            passed += 1;
        } else {
            failures.push(report);
        }
    }
    for report in &failures {
        for fail in report.failures.iter().take(3) {
            let _ = writeln!(
                stdout,
                "  {} point {} {}: analytic {} numeric {} rel error {:.3e}",
                report.family.name(),
                fail.point_index,
                fail.factor.price_symbol(),
                format::fmt_g17(fail.analytic),
                format::fmt_g17(fail.numeric),
                fail.rel_error
            );
        }
    }
    let _ = writeln!(
        stdout,
        "{passed}/{} families passed (points {points}, tol {tol:e}, seed {seed})",
        families.len()
    );
    Ok(if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_VALIDATION_FAILED
    })
}

fn ramp_json(ramp: &Ramp) -> Value {
    match ramp.kind {
        RampKind::Constant => json!(ramp.start),
        RampKind::Linear => json!({"ramp": "linear", "start": ramp.start, "end": ramp.end}),
        RampKind::Logistic {
            midpoint,
            steepness,
        } => {
            let mut v = json!({"ramp": "logistic", "start": ramp.start, "end": ramp.end, "midpoint": midpoint});
            if let Some(k) = steepness {
                v["steepness"] = json!(k);
            }
            v
        }
    }
}

fn ramp_text(ramp: &Ramp) -> String {
    match ramp.kind {
        RampKind::Constant => ramp.start.to_string(),
        RampKind::Linear => format!("{}->{} linear", ramp.start, ramp.end),
        RampKind::Logistic { .. } => format!("{}->{} logistic", ramp.start, ramp.end),
    }
}

/// Machine-readable config schema: every key the config reader accepts.
pub fn models_schema() -> Value {
    let families: Vec<Value> = Family::ALL
        .into_iter()
        .map(|f| {
            let setup = reference_setup(f);
            let params: Vec<Value> = f
                .param_names()
                .iter()
                .zip(&setup.params)
                .map(|(name, ramp)| json!({"name": name, "default": ramp_json(ramp)}))
                .collect();
            json!({
                "family": f.name(),
                "differentiable": f.is_differentiable(),
                "params": params,
            })
        })
        .collect();
    let defaults = powershift_core::presets::default_inputs();
    let inputs: Vec<Value> = INPUT_KEYS
        .iter()
        .zip([
            defaults.labor,
            defaults.agi_labor,
            defaults.capital,
            defaults.agi_capital,
            defaults.knowledge_stock,
        ])
        .map(|(name, ramp)| json!({"name": name, "default": ramp_json(&ramp)}))
        .collect();
    json!({
        "families": families,
        "inputs": inputs,
        "policy": POLICY_KEYS,
        "prices": Factor::ALL.map(Factor::price_symbol),
    })
}

fn models(as_json: bool, stdout: &mut dyn Write) -> Result<i32, CliError> {
    if as_json {
        let text = serde_json::to_string_pretty(&models_schema()).expect("schema serializes");
        let _ = writeln!(stdout, "{text}");
        return Ok(EXIT_OK);
    }
    for f in Family::ALL {
        let setup = reference_setup(f);
        let params: Vec<String> = f
            .param_names()
            .iter()
            .zip(&setup.params)
            .map(|(name, ramp)| format!("{name}={}", ramp_text(ramp)))
            .collect();
        let note = if f.is_differentiable() {
            ""
        } else {
            "  (not differentiable)"
        };
        let _ = writeln!(stdout, "{:<14}{}{note}", f.name(), params.join(" "));
    }
    Ok(EXIT_OK)
}
