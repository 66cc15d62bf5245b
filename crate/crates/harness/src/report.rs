//! CSV, summary JSON and SVG outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::compare::{ComparisonTable, ScenarioSummary};
use crate::error::{HarnessError, Result};
use crate::format::write_json;
use crate::runner::RunRecord;

/// One CSV row; timing columns sit together so reproducibility checks can
/// skip them.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    instance_id: &'a str,
    algorithm: &'a str,
    scenario_u: f64,
    scenario_p: f64,
    plans: usize,
    objective: f64,
    lp_time_mean: f64,
    plan_time_mean: f64,
    total_time_mean: f64,
    total_time_max: f64,
    seed: u64,
}

pub const TIMING_COLUMNS: [&str; 4] = ["lp_time_mean", "plan_time_mean", "total_time_mean", "total_time_max"];

pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(HarnessError::Invalid("no run records to report".into()));
    }
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in records {
        w.serialize(CsvRow {
            instance_id: &r.instance_id,
            algorithm: r.algorithm.as_str(),
            scenario_u: r.scenario_u,
            scenario_p: r.scenario_p,
            plans: r.plans,
            objective: r.objective,
            lp_time_mean: r.lp_time_mean,
            plan_time_mean: r.plan_time_mean,
            total_time_mean: r.total_time_mean,
            total_time_max: r.total_time_max,
            seed: r.seed,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_summary(path: &Path, table: &ComparisonTable) -> Result<()> {
    write_json(path, table)
}

/// One strip chart of objectives per scenario, algorithms side by side.
/// Returns the written paths.
pub fn write_plots(dir: &Path, table: &ComparisonTable, records: &[RunRecord]) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(HarnessError::Invalid("no run records to plot".into()));
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut paths = Vec::new();
    for scenario in &table.scenarios {
        let path = dir.join(format!(
            "objective_u{}_p{}.svg",
            scenario.utilization, scenario.track_proportion
        ));
        fs::write(&path, scenario_svg(scenario, records)).map_err(|e| HarnessError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

fn scenario_svg(scenario: &ScenarioSummary, records: &[RunRecord]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const LEFT: f64 = 60.0;
    const BOTTOM: f64 = 40.0;
    const TOP: f64 = 30.0;
    let in_scenario = |r: &&RunRecord| {
        r.scenario_u == scenario.utilization && r.scenario_p == scenario.track_proportion
    };
    let max = records
        .iter()
        .filter(in_scenario)
        .map(|r| r.objective)
        .fold(0.0, f64::max)
        .max(1e-9);
    let y = |v: f64| H - BOTTOM - (v / max) * (H - BOTTOM - TOP);
    let slot = (W - LEFT) / scenario.algorithms.len() as f64;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle">Objective, U = {}, p = {}</text>"#,
        W / 2.0,
        scenario.utilization,
        scenario.track_proportion
    );
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{}" x2="{W}" y2="{}" stroke="black"/>"#, H - BOTTOM, H - BOTTOM);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#, H - BOTTOM);
    for k in 0..=4 {
        let v = max * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.3}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0
        );
    }
    for (i, summary) in scenario.algorithms.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{}" text-anchor="middle">{}</text>"#,
            H - BOTTOM + 18.0,
            summary.algorithm
        );
        for r in records.iter().filter(in_scenario).filter(|r| r.algorithm == summary.algorithm) {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.1}" cy="{:.1}" r="3" fill="none" stroke="steelblue"/>"#,
                y(r.objective)
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{m:.1}" x2="{:.1}" y2="{m:.1}" stroke="firebrick" stroke-width="2"/>"#,
            cx - slot / 4.0,
            cx + slot / 4.0,
            m = y(summary.mean)
        );
    }
    s.push_str("</svg>\n");
    s
}
