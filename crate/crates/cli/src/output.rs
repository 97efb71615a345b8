//! CSV, SVG and manifest writers.
//!
//! Everything here renders to bytes first so that tests can compare output
//! without touching the filesystem, and so the manifest hashes exactly what
//! was written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use powershift_core::scenario::{PolicyGrid, ShareMetric};
use powershift_core::{Family, TrajectoryPoint};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::format::fmt_g17;

pub const TRAJECTORY_HEADER: [&str; 14] = [
    "t",
    "family",
    "policy",
    "Q",
    "Y",
    "P",
    "S_raw",
    "S_norm",
    "w_L",
    "w_agi",
    "r_K",
    "r_K_agi",
    "clamped",
    "degenerate",
];

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn into_string(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory writer cannot fail");
    String::from_utf8(bytes).expect("fields are UTF-8")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

/// One row per trajectory point, in trajectory order. Points that failed to
/// evaluate keep their key columns and leave every value field empty.
pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut w = csv_writer();
    w.write_record(TRAJECTORY_HEADER).expect("in-memory write");
    for p in points {
        let mut row = vec![
            p.t.to_string(),
            p.family.name().to_string(),
            p.policy.clone(),
        ];
        match &p.outcome {
            Ok(o) => {
                let r = &o.reading;
                let s = &o.snapshot;
                row.extend([
                    fmt_g17(s.output),
                    fmt_g17(r.total_income),
                    opt(r.productivity),
                    fmt_g17(r.s_raw),
                    fmt_g17(r.s_norm),
                    fmt_g17(s.wage_labor),
                    fmt_g17(s.wage_agi),
                    fmt_g17(s.return_capital),
                    fmt_g17(s.return_agi_capital),
                    r.clamped.to_string(),
                    r.degenerate_normalization.to_string(),
                ]);
            }
            Err(_) => row.resize(TRAJECTORY_HEADER.len(), String::new()),
        }
        w.write_record(&row).expect("in-memory write");
    }
    into_string(w)
}

pub const GRID_HEADER: [&str; 7] = [
    "family",
    "policy",
    "S_raw_final",
    "S_raw_max",
    "S_norm_final",
    "S_norm_max",
    "S_raw_final_minus_baseline",
];

/// Per-cell summary of a policy grid. The last column compares the cell's
/// final raw share with the first policy of the same family.
pub fn policy_grid_csv(grid: &PolicyGrid) -> String {
    let mut w = csv_writer();
    w.write_record(GRID_HEADER).expect("in-memory write");
    for column in &grid.columns {
        let baseline = grid
            .columns
            .iter()
            .find(|c| c.family == column.family)
            .and_then(|c| c.final_value(ShareMetric::Raw));
        let delta = match (column.final_value(ShareMetric::Raw), baseline) {
            (Some(v), Some(b)) => Some(v - b),
            _ => None,
        };
        w.write_record([
            column.family.name().to_string(),
            column.policy.clone(),
            opt(column.final_value(ShareMetric::Raw)),
            opt(column.max_value(ShareMetric::Raw)),
            opt(column.final_value(ShareMetric::Normalized)),
            opt(column.max_value(ShareMetric::Normalized)),
            opt(delta),
        ])
        .expect("in-memory write");
    }
    into_string(w)
}

/// A family × policy run of consecutive trajectory points.
struct Series<'a> {
    family: Family,
    policy: &'a str,
    points: Vec<(u32, f64)>,
}

fn collect_series(points: &[TrajectoryPoint]) -> Vec<Series<'_>> {
    let mut series: Vec<Series> = Vec::new();
    for p in points {
        let same = series
            .last()
            .is_some_and(|s| s.family == p.family && s.policy == p.policy);
        if !same {
            series.push(Series {
                family: p.family,
                policy: &p.policy,
                points: Vec::new(),
            });
        }
        if let Ok(o) = &p.outcome {
            series
                .last_mut()
                .expect("just pushed")
                .points
                .push((p.t, o.reading.s_norm));
        }
    }
    series
}

// Okabe-Ito plus a few extras; indexed by family.
const PALETTE: [&str; 10] = [
    "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9", "#000000", "#8c564b",
    "#7f7f7f", "#bcbd22",
];

const DASHES: [&str; 5] = ["6,3", "2,2", "8,3,2,3", "12,4", "1,3"];

fn family_color(family: Family) -> &'static str {
    let i = Family::ALL.iter().position(|f| *f == family).unwrap_or(0);
    PALETTE[i % PALETTE.len()]
}

const WIDTH: f64 = 860.0;
const PLOT_LEFT: f64 = 60.0;
const PLOT_TOP: f64 = 20.0;
const PLOT_WIDTH: f64 = 560.0;
const PLOT_HEIGHT: f64 = 400.0;
const LEGEND_LEFT: f64 = 640.0;
const LEGEND_ROW: f64 = 16.0;

/// Plots S_norm against t for every family × policy series.
///
/// Style contract: colour identifies the family; the first policy of each
/// family (the baseline in every run the CLI produces) is solid and later
/// policies are dashed with a per-policy pattern.
pub fn trajectory_svg(points: &[TrajectoryPoint]) -> String {
    let series = collect_series(points);
    let horizon = points.iter().map(|p| p.t).max().unwrap_or(0).max(1);
    let mut policies: Vec<&str> = Vec::new();
    for s in &series {
        if !policies.contains(&s.policy) {
            policies.push(s.policy);
        }
    }

    let legend_height = PLOT_TOP + LEGEND_ROW * series.len() as f64 + 10.0;
    let height = (PLOT_TOP + PLOT_HEIGHT + 50.0).max(legend_height);
    let x_of = |t: u32| PLOT_LEFT + PLOT_WIDTH * f64::from(t) / f64::from(horizon);
    let y_of = |s: f64| PLOT_TOP + PLOT_HEIGHT * (1.0 - s.clamp(0.0, 1.0));
    let bottom = PLOT_TOP + PLOT_HEIGHT;

    let mut out = String::new();
    writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##).unwrap();
    writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"##
    )
    .unwrap();
    writeln!(
        out,
        r##"<title>Normalized AGI income share over time</title>"##
    )
    .unwrap();
    writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##).unwrap();

    writeln!(out, r##"<g id="axes" stroke="#333" stroke-width="1">"##).unwrap();
    writeln!(
        out,
        r##"<line x1="{PLOT_LEFT}" y1="{bottom}" x2="{:.2}" y2="{bottom}"/>"##,
        PLOT_LEFT + PLOT_WIDTH
    )
    .unwrap();
    writeln!(
        out,
        r##"<line x1="{PLOT_LEFT}" y1="{PLOT_TOP}" x2="{PLOT_LEFT}" y2="{bottom}"/>"##
    )
    .unwrap();
    for i in 0..=4 {
        let t = (horizon * i) / 4;
        let x = x_of(t);
        writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}"/>"##,
            bottom + 4.0
        )
        .unwrap();
        let s = f64::from(i) / 4.0;
        let y = y_of(s);
        writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{PLOT_LEFT}" y2="{y:.2}"/>"##,
            PLOT_LEFT - 4.0
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r##"<g id="tick-labels" fill="#333">"##).unwrap();
    for i in 0..=4 {
        let t = (horizon * i) / 4;
        writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"##,
            x_of(t),
            bottom + 16.0
        )
        .unwrap();
        let s = f64::from(i) / 4.0;
        writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{s:.2}</text>"##,
            PLOT_LEFT - 7.0,
            y_of(s) + 4.0
        )
        .unwrap();
    }
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"##,
        PLOT_LEFT + PLOT_WIDTH / 2.0,
        bottom + 34.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">S_norm</text>"##,
        PLOT_TOP + PLOT_HEIGHT / 2.0,
        PLOT_TOP + PLOT_HEIGHT / 2.0
    )
    .unwrap();
    writeln!(out, "</g>").unwrap();

    let dash_of = |policy: &str| {
        let i = policies.iter().position(|p| *p == policy).unwrap_or(0);
        (i > 0).then(|| DASHES[(i - 1) % DASHES.len()])
    };

    writeln!(out, r##"<g id="series" fill="none" stroke-width="1.5">"##).unwrap();
    for s in &series {
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", x_of(t), y_of(v)))
            .collect();
        let dash = dash_of(s.policy)
            .map(|d| format!(r##" stroke-dasharray="{d}""##))
            .unwrap_or_default();
        writeln!(
            out,
            r##"<polyline data-family="{}" data-policy="{}" stroke="{}"{dash} points="{}"/>"##,
            s.family.name(),
            s.policy,
            family_color(s.family),
            coords.join(" ")
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r##"<g id="legend">"##).unwrap();
    for (i, s) in series.iter().enumerate() {
        let y = PLOT_TOP + LEGEND_ROW * i as f64 + 8.0;
        let dash = dash_of(s.policy)
            .map(|d| format!(r##" stroke-dasharray="{d}""##))
            .unwrap_or_default();
        writeln!(
            out,
            r##"<line x1="{LEGEND_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="1.5"{dash}/>"##,
            LEGEND_LEFT + 24.0,
            family_color(s.family)
        )
        .unwrap();
        let label = if policies.len() > 1 {
            format!("{} / {}", s.family.name(), s.policy)
        } else {
            s.family.name().to_string()
        };
        writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}">{label}</text>"##,
            LEGEND_LEFT + 30.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Field order is alphabetical so the serialized keys come out sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: String,
    pub config_sha256: String,
    pub files: Vec<ManifestFile>,
    pub started_at: String,
    pub tool_version: String,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Collects emitted files and writes them, then the manifest, to `dir`.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<ManifestFile>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Write { path, source })?;
        self.files.push(ManifestFile {
            path: name.to_string(),
            bytes: contents.len() as u64,
            sha256: sha256_hex(contents),
        });
        Ok(())
    }

    pub fn finish(
        mut self,
        command: &str,
        config_path: &Path,
        config_bytes: &[u8],
        started_at: String,
    ) -> Result<RunManifest, CliError> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            command: command.to_string(),
            config_path: config_path.display().to_string(),
            config_sha256: sha256_hex(config_bytes),
            files: self.files,
            started_at,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        let path = self.dir.join(MANIFEST_NAME);
        std::fs::write(&path, json).map_err(|source| CliError::Write { path, source })?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use powershift_core::presets::reference_setup;
    use powershift_core::scenario::ScenarioPolicy;
    use powershift_core::{run_scenario, Scenario};

    fn cobb_douglas_run(horizon: u32) -> Vec<TrajectoryPoint> {
        let scenario = Scenario {
            horizon,
            families: vec![reference_setup(Family::CobbDouglas)],
            inputs: powershift_core::presets::default_inputs(),
            policies: vec![ScenarioPolicy::baseline()],
        };
        run_scenario(&scenario).unwrap()
    }

    #[test]
    fn csv_first_row_carries_reference_share() {
        let csv = trajectory_csv(&cobb_douglas_run(4));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_HEADER.join(",").as_str()));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 14);
        assert_eq!(&row[..3], &["0", "cobb_douglas", "baseline"]);
        let s_raw: f64 = row[6].parse().unwrap();
        assert!((s_raw - 0.40625).abs() <= 1e-12 * 0.40625, "{s_raw}");
        assert_eq!(row[13], "true");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn single_point_gives_two_lines() {
        let points = &cobb_douglas_run(1)[..1];
        assert_eq!(trajectory_csv(points).lines().count(), 2);
    }

    #[test]
    fn failed_points_leave_value_fields_empty() {
        let mut points = cobb_douglas_run(1);
        points[1].outcome = Err(powershift_core::Error::ZeroTotalIncome);
        let csv = trajectory_csv(&points);
        let last = csv.lines().last().unwrap();
        assert_eq!(last, "1,cobb_douglas,baseline,,,,,,,,,,,");
        assert_eq!(last.split(',').count(), 14);
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let svg = trajectory_svg(&cobb_douglas_run(10));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("stroke-dasharray"));
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn hashes_are_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
