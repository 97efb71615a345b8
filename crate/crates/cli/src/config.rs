//! Scenario config files.
//!
//! The format is TOML. Every key is checked: anything the reader does not
//! consume is rejected, so a typo such as `linearr.b` fails loudly instead of
//! silently falling back to a default.
//!
//! ```toml
//! horizon = 100
//! families = ["cobb_douglas", "linear"]      # optional, default: all ten
//!
//! [inputs]                                   # optional, per-input defaults
//! L_agi = { ramp = "logistic", start = 0.1, end = 10.0 }
//!
//! [cobb_douglas]                             # one section per family
//! beta = { ramp = "linear", start = 0.3, end = 0.85 }
//!
//! [[policy]]                                 # the baseline is implicit
//! id = "full_stack"
//! tax = 0.25
//! uad = 0.15
//! coop = 0.20
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use powershift_core::policy::PolicySpec;
use powershift_core::presets;
use powershift_core::scenario::{FamilySetup, InputPaths, ScenarioPolicy};
use powershift_core::{Family, Ramp, Scenario};
use toml::{Table, Value};

use crate::error::ConfigError;

type Result<T> = std::result::Result<T, ConfigError>;

/// Reads and validates a scenario config.
pub fn parse_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text, &path.display().to_string())
}

pub fn parse_config_str(text: &str, source_name: &str) -> Result<Scenario> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e
            .span()
            .map(|span| line_column(text, span.start))
            .unwrap_or((1, 1));
        ConfigError::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    scenario_from_table(&table)
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// A table whose keys must all be consumed before [`Section::finish`].
struct Section<'a> {
    prefix: String,
    table: &'a Table,
    used: BTreeSet<&'a str>,
}

impl<'a> Section<'a> {
    fn new(prefix: impl Into<String>, table: &'a Table) -> Self {
        Section {
            prefix: prefix.into(),
            table,
            used: BTreeSet::new(),
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.table.get_key_value(key)?;
        self.used.insert(k.as_str());
        Some(v)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                as_number(v)
                    .ok_or_else(|| ConfigError::validation(self.path(key), "expected a number"))
            })
            .transpose()
    }

    fn string(&mut self, key: &str) -> Result<Option<&'a str>> {
        self.get(key)
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| ConfigError::validation(self.path(key), "expected a string"))
            })
            .transpose()
    }

    fn subtable(&mut self, key: &str) -> Result<Option<&'a Table>> {
        self.get(key)
            .map(|v| {
                v.as_table()
                    .ok_or_else(|| ConfigError::validation(self.path(key), "expected a table"))
            })
            .transpose()
    }

    /// A bare number is a constant; an inline table describes a ramp.
    fn ramp(&mut self, key: &str) -> Result<Option<Ramp>> {
        let path = self.path(key);
        let Some(value) = self.get(key) else {
            return Ok(None);
        };
        let ramp = if let Some(v) = as_number(value) {
            Ramp::constant(v)
        } else if let Some(table) = value.as_table() {
            parse_ramp(&path, table)?
        } else {
            return Err(ConfigError::validation(
                path,
                "expected a number or a ramp table",
            ));
        };
        ramp.validate()
            .map_err(|e| ConfigError::validation(&path, e.to_string()))?;
        Ok(Some(ramp))
    }

    fn finish(self) -> Result<()> {
        match self.table.keys().find(|k| !self.used.contains(k.as_str())) {
            Some(key) => Err(ConfigError::validation(self.path(key), "unknown key")),
            None => Ok(()),
        }
    }
}

fn as_number(value: &Value) -> Option<f64> {
    match value {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn parse_ramp(path: &str, table: &Table) -> Result<Ramp> {
    let mut s = Section::new(path, table);
    let kind = s
        .string("ramp")?
        .ok_or_else(|| ConfigError::validation(s.path("ramp"), "missing ramp kind"))?;
    let required = |s: &mut Section, key: &str| {
        s.number(key)?
            .ok_or_else(|| ConfigError::validation(s.path(key), format!("missing {key}")))
    };
    let ramp = match kind {
        "constant" => Ramp::constant(required(&mut s, "value")?),
        "linear" => Ramp::linear(required(&mut s, "start")?, required(&mut s, "end")?),
        "logistic" => {
            let start = required(&mut s, "start")?;
            let end = required(&mut s, "end")?;
            let midpoint = s
                .number("midpoint")?
                .unwrap_or(powershift_core::scenario::DEFAULT_MIDPOINT);
            let steepness = s.number("steepness")?;
            Ramp::logistic_with(start, end, midpoint, steepness)
        }
        other => {
            return Err(ConfigError::validation(
                s.path("ramp"),
                format!("unknown ramp kind `{other}` (constant, linear, logistic)"),
            ))
        }
    };
    s.finish()?;
    Ok(ramp)
}

fn parse_inputs(table: Option<&Table>) -> Result<InputPaths> {
    let mut paths = presets::default_inputs();
    let Some(table) = table else {
        return Ok(paths);
    };
    let mut s = Section::new("inputs", table);
    for (key, slot) in [
        ("L", &mut paths.labor),
        ("L_agi", &mut paths.agi_labor),
        ("K", &mut paths.capital),
        ("K_agi", &mut paths.agi_capital),
        ("knowledge_stock", &mut paths.knowledge_stock),
    ] {
        if let Some(ramp) = s.ramp(key)? {
            if ramp.start < 0.0 || ramp.end < 0.0 {
                return Err(ConfigError::validation(
                    s.path(key),
                    "inputs must be non-negative",
                ));
            }
            *slot = ramp;
        }
    }
    s.finish()?;
    Ok(paths)
}

fn parse_family(family: Family, table: Option<&Table>, horizon: u32) -> Result<FamilySetup> {
    let mut setup = presets::reference_setup(family);
    if let Some(table) = table {
        let mut s = Section::new(family.name(), table);
        let mut given = BTreeSet::new();
        for &name in family.param_names() {
            if let Some(ramp) = s.ramp(name)? {
                setup
                    .set_ramp(name, ramp)
                    .map_err(|e| ConfigError::validation(s.path(name), e.to_string()))?;
                given.insert(name);
            }
        }
        // Hybrid capital weight follows the labor weight unless set.
        if family == Family::Hybrid && given.contains("lambda") && !given.contains("mu") {
            let lambda = *setup.param("lambda").expect("hybrid has lambda");
            setup.set_ramp("mu", lambda).expect("hybrid has mu");
        }
        s.finish()?;
    }
    for t in [0, horizon] {
        setup
            .model_at(t, horizon)
            .map_err(|e| ConfigError::validation(family.name(), format!("at t={t}: {e}")))?;
    }
    Ok(setup)
}

fn valid_policy_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn parse_policy(index: usize, table: &Table) -> Result<ScenarioPolicy> {
    let mut s = Section::new(format!("policy[{index}]"), table);
    let id = s
        .string("id")?
        .ok_or_else(|| ConfigError::validation(s.path("id"), "missing id"))?;
    if !valid_policy_id(id) {
        return Err(ConfigError::validation(
            s.path("id"),
            "ids may only contain ASCII letters, digits, `_` and `-`",
        ));
    }
    if id == ScenarioPolicy::BASELINE_ID {
        return Err(ConfigError::validation(
            s.path("id"),
            "`baseline` is reserved for the implicit no-policy run",
        ));
    }
    let spec = PolicySpec {
        proportional_tax: s.number("tax")?.unwrap_or(0.0),
        uad_rate: s.number("uad")?.unwrap_or(0.0),
        coop_share: s.number("coop")?.unwrap_or(0.0),
        fixed_levy: s.number("fixed_levy")?.unwrap_or(0.0),
    };
    let share = s.number("fixed_levy_share")?;
    if share.is_some() && s.table.contains_key("fixed_levy") {
        return Err(ConfigError::validation(
            s.path("fixed_levy_share"),
            "set either fixed_levy or fixed_levy_share, not both",
        ));
    }
    let prefix = s.prefix.clone();
    s.finish()?;
    spec.validate()
        .map_err(|e| ConfigError::validation(&prefix, e.to_string()))?;
    let mut policy = ScenarioPolicy::new(id, spec);
    if let Some(share) = share {
        if !(share >= 0.0 && share.is_finite()) {
            return Err(ConfigError::validation(
                format!("{prefix}.fixed_levy_share"),
                "must be non-negative",
            ));
        }
        policy = policy.with_levy_share(share);
    }
    Ok(policy)
}

fn scenario_from_table(table: &Table) -> Result<Scenario> {
    let mut root = Section::new("", table);

    let horizon = match root.get("horizon") {
        None => return Err(ConfigError::validation("horizon", "missing horizon")),
        Some(Value::Integer(h)) if *h >= 1 && *h <= i64::from(u32::MAX) => *h as u32,
        Some(_) => {
            return Err(ConfigError::validation(
                "horizon",
                "expected a positive integer step count",
            ))
        }
    };

    let families: Vec<Family> = match root.get("families") {
        None => Family::ALL.to_vec(),
        Some(Value::Array(items)) => {
            let mut out = Vec::new();
            for item in items {
                let name = item
                    .as_str()
                    .ok_or_else(|| ConfigError::validation("families", "expected family names"))?;
                let family = name
                    .parse::<Family>()
                    .map_err(|e| ConfigError::validation("families", e))?;
                if out.contains(&family) {
                    return Err(ConfigError::validation(
                        "families",
                        format!("`{name}` listed twice"),
                    ));
                }
                out.push(family);
            }
            if out.is_empty() {
                return Err(ConfigError::validation("families", "no families listed"));
            }
            out
        }
        Some(_) => return Err(ConfigError::validation("families", "expected an array")),
    };

    let inputs = parse_inputs(root.subtable("inputs")?)?;

    let mut setups = Vec::new();
    for family in Family::ALL {
        let section = root.subtable(family.name())?;
        if families.contains(&family) {
            setups.push((family, parse_family(family, section, horizon)?));
        } else if section.is_some() {
            return Err(ConfigError::validation(
                family.name(),
                "section given for a family that is not listed in `families`",
            ));
        }
    }
    // Keep the order the user listed.
    let families = families
        .iter()
        .map(|f| {
            setups
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, s)| s.clone())
                .expect("every listed family was parsed")
        })
        .collect();

    let mut policies = vec![ScenarioPolicy::baseline()];
    match root.get("policy") {
        None => {}
        Some(Value::Array(items)) => {
            for (i, item) in items.iter().enumerate() {
                let t = item.as_table().ok_or_else(|| {
                    ConfigError::validation(format!("policy[{i}]"), "expected a table")
                })?;
                let policy = parse_policy(i, t)?;
                if policies.iter().any(|p| p.id == policy.id) {
                    return Err(ConfigError::validation(
                        format!("policy[{i}].id"),
                        format!("duplicate id `{}`", policy.id),
                    ));
                }
                policies.push(policy);
            }
        }
        Some(_) => {
            return Err(ConfigError::validation(
                "policy",
                "expected an array of tables ([[policy]])",
            ))
        }
    }

    root.finish()?;

    let scenario = Scenario {
        horizon,
        families,
        inputs,
        policies,
    };
    scenario
        .validate()
        .map_err(|e| ConfigError::validation("scenario", e.to_string()))?;
    Ok(scenario)
}
