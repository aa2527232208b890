use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{builtin_scenario, load_config, BUILTIN_SCENARIOS};
use super::trace::{
    create_dir, pretty, read_ca_series, read_trace_file, write_file, write_run_outputs, RunSummary,
};
use crate::assessor::discounted_mean;
use crate::decision::Checkpoint;
use crate::error::{Error, Result};
use crate::sim::{run_scenario, HumanPolicy, RunTrace};

/// Discount factors swept in the suite report.
pub const DEFAULT_SWEEP: [f64; 10] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.92, 0.94, 0.96, 0.98, 0.99];

pub const SUITE_FILE: &str = "suite.json";
pub const TABLE_FILE: &str = "table.txt";
pub const SWEEP_FILE: &str = "gamma_sweep.csv";

/// Where a run's config comes from.
#[derive(Debug, Clone)]
pub enum ConfigSource {
    File(PathBuf),
    Builtin(String),
}

pub fn load_source(source: &ConfigSource, overrides: &[String]) -> Result<crate::sim::ScenarioConfig> {
    let text = match source {
        ConfigSource::File(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        ConfigSource::Builtin(name) => builtin_scenario(name)
            .ok_or_else(|| Error::config("scenario", format!("no built-in scenario named `{name}`")))?
            .to_owned(),
    };
    load_config(&text, overrides)
}

/// Runs one scenario and writes its outputs to `out/<scenario name>/`.
pub fn cmd_run(source: &ConfigSource, out: &Path, overrides: &[String]) -> Result<(RunTrace, RunSummary)> {
    let cfg = load_source(source, overrides)?;
    let trace = run_scenario(&cfg)?;
    let summary = write_run_outputs(&out.join(&cfg.name), &trace)?;
    Ok((trace, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub gamma: f64,
    /// The discounted mean is only defined for gamma in (0, 1).
    pub outside_domain: bool,
    pub cm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSweep {
    pub scenarios: Vec<String>,
    pub rows: Vec<GammaRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub gamma: f64,
    pub tau_cm: f64,
    pub rows: Vec<RunSummary>,
    pub gamma_sweep: GammaSweep,
}

impl SuiteReport {
    pub fn row(&self, scenario: &str) -> Option<&RunSummary> {
        self.rows.iter().find(|r| r.scenario == scenario)
    }

    pub fn any_timeout(&self) -> bool {
        self.rows.iter().any(|r| r.timed_out)
    }
}

pub fn validate_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::invalid("gammas", "need at least one value"));
    }
    for g in gammas {
        if !(*g > 0.0 && *g <= 1.05) {
            return Err(Error::invalid("gammas", format!("{g} is outside (0, 1.05]")));
        }
    }
    Ok(())
}

pub fn sweep(names: Vec<String>, series: &[Vec<f64>], gammas: &[f64]) -> Result<GammaSweep> {
    validate_gammas(gammas)?;
    let rows = gammas
        .iter()
        .map(|&g| {
            let cm = series
                .iter()
                .map(|ca| if ca.is_empty() { Ok(0.0) } else { discounted_mean(ca, g) })
                .collect::<Result<Vec<_>>>()?;
            Ok(GammaRow {
                gamma: g,
                outside_domain: g >= 1.0,
                cm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaSweep { scenarios: names, rows })
}

/// Corridors as rows, human policies as columns.
pub fn format_table(report: &SuiteReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "CM values (gamma = {}, tau = {})", report.gamma, report.tau_cm);
    let _ = writeln!(s, "{:<8}{:>24}{:>16}", "", HumanPolicy::MinimallyContributing.label(), HumanPolicy::Facilitating.label());
    for corridor in ["Open", "Narrow"] {
        let cell = |policy: HumanPolicy| {
            report
                .rows
                .iter()
                .find(|r| r.corridor == corridor && r.human_policy == policy.label())
                .map(|r| {
                    let flag = if r.timed_out { " (timeout)" } else { "" };
                    format!("{:.2}{flag}", r.final_cm)
                })
                .unwrap_or_else(|| "-".to_owned())
        };
        let _ = writeln!(
            s,
            "{:<8}{:>24}{:>16}",
            corridor,
            cell(HumanPolicy::MinimallyContributing),
            cell(HumanPolicy::Facilitating)
        );
    }
    s
}

fn format_sweep(sw: &GammaSweep) -> String {
    let mut s = String::from("gamma,outside_domain");
    for n in &sw.scenarios {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for r in &sw.rows {
        let _ = write!(s, "{},{}", r.gamma, r.outside_domain);
        for v in &r.cm {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Runs the built-in scenarios in parallel and writes per-scenario outputs,
/// `suite.json` and `table.txt` under `out`.
pub fn cmd_suite(out: &Path, overrides: &[String]) -> Result<SuiteReport> {
    let configs = BUILTIN_SCENARIOS
        .iter()
        .map(|(_, text)| load_config(text, overrides))
        .collect::<Result<Vec<_>>>()?;
    create_dir(out)?;
    let results: Vec<Result<(RunSummary, Vec<f64>)>> = configs
        .par_iter()
        .map(|cfg| {
            let trace = run_scenario(cfg)?;
            let summary = write_run_outputs(&out.join(&cfg.name), &trace)?;
            Ok((summary, trace.ca_final))
        })
        .collect();
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for r in results {
        let (summary, ca) = r?;
        rows.push(summary);
        series.push(ca);
    }
    let names = rows.iter().map(|r| r.scenario.clone()).collect();
    let th = &configs[0].thresholds;
    let report = SuiteReport {
        gamma: th.gamma,
        tau_cm: th.tau_cm,
        gamma_sweep: sweep(names, &series, &DEFAULT_SWEEP)?,
        rows,
    };
    write_file(&out.join(SUITE_FILE), pretty(&report).as_bytes())?;
    write_file(&out.join(TABLE_FILE), format_table(&report).as_bytes())?;
    Ok(report)
}

/// Recomputes the metric of every stored suite CA series for each gamma and
/// writes `gamma_sweep.csv` under `out`.
pub fn cmd_gamma_sweep(gammas: &[f64], out: &Path) -> Result<GammaSweep> {
    validate_gammas(gammas)?;
    let mut names = Vec::new();
    let mut series = Vec::new();
    for (name, _) in BUILTIN_SCENARIOS {
        let ca = read_ca_series(&out.join(name))?;
        names.push(name.to_owned());
        series.push(ca.ca_final);
    }
    let sw = sweep(names, &series, gammas)?;
    write_file(&out.join(SWEEP_FILE), format_sweep(&sw).as_bytes())?;
    Ok(sw)
}

#[derive(Debug, Serialize)]
struct TrajectoryRow {
    tick: usize,
    time: f64,
    robot_x: f64,
    robot_y: f64,
    human_x: f64,
    human_y: f64,
}

#[derive(Debug, Serialize)]
struct CaRow {
    time: f64,
    ca: f64,
    cm: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EventRow {
    time: f64,
    checkpoint: String,
    kind: String,
    direction: String,
    robot_x: f64,
    robot_y: f64,
    human_x: f64,
    human_y: f64,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    write_file(path, &bytes)
}

fn svg(trace: &RunTrace) -> String {
    let b = trace.config.world.bounds;
    let scale = 60.0;
    let (w, h) = ((b.max.x - b.min.x) * scale, (b.max.y - b.min.y) * scale);
    let tx = |x: f64| (x - b.min.x) * scale;
    let ty = |y: f64| (b.max.y - y) * scale;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#);
    for r in &trace.config.world.walls {
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#888"/>"##,
            tx(r.min.x),
            ty(r.max.y),
            (r.max.x - r.min.x) * scale,
            (r.max.y - r.min.y) * scale
        );
    }
    for (color, pick) in [("#1f77b4", 0), ("#d62728", 1)] {
        let pts: Vec<String> = trace
            .ticks
            .iter()
            .map(|t| {
                let p = if pick == 0 { t.robot.position() } else { t.human.position() };
                format!("{:.2},{:.2}", tx(p.x), ty(p.y))
            })
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.join(" "));
    }
    for e in &trace.events {
        if let Some(t) = trace.ticks.iter().find(|t| t.time == e.time) {
            let p = t.robot.position();
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"><title>{}</title></circle>"#,
                tx(p.x),
                ty(p.y),
                super::trace::event_label(e)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `trajectory.csv`, `ca.csv` and `events.csv` (and optionally
/// `trajectory.svg`) for the trace at `trace_path`. Returns the number of
/// event markers.
pub fn cmd_plotdata(trace_path: &Path, out: &Path, with_svg: bool) -> Result<usize> {
    let trace = read_trace_file(trace_path)?;
    create_dir(out)?;
    let traj: Vec<TrajectoryRow> = trace
        .ticks
        .iter()
        .map(|t| TrajectoryRow {
            tick: t.tick,
            time: t.time,
            robot_x: t.robot.pose.x,
            robot_y: t.robot.pose.y,
            human_x: t.human.pose.x,
            human_y: t.human.pose.y,
        })
        .collect();
    write_csv(&out.join("trajectory.csv"), &traj, &["tick", "time", "robot_x", "robot_y", "human_x", "human_y"])?;
    let ca: Vec<CaRow> = trace
        .ticks
        .iter()
        .filter_map(|t| t.ca.map(|ca| CaRow { time: t.time, ca, cm: t.cm }))
        .collect();
    write_csv(&out.join("ca.csv"), &ca, &["time", "ca", "cm"])?;
    let events: Vec<EventRow> = trace
        .events
        .iter()
        .map(|e| {
            let t = trace.ticks.iter().find(|t| t.time == e.time);
            let (r, h) = t.map_or((Default::default(), Default::default()), |t| (t.robot.position(), t.human.position()));
            EventRow {
                time: e.time,
                checkpoint: match e.checkpoint {
                    Checkpoint::First => "first",
                    Checkpoint::Second => "second",
                    Checkpoint::PostCross => "post_cross",
                }
                .to_owned(),
                kind: e.kind.name().to_owned(),
                direction: e.kind.direction().map(|d| format!("{d:?}")).unwrap_or_default(),
                robot_x: r.x,
                robot_y: r.y,
                human_x: h.x,
                human_y: h.y,
            }
        })
        .collect();
    write_csv(
        &out.join("events.csv"),
        &events,
        &["time", "checkpoint", "kind", "direction", "robot_x", "robot_y", "human_x", "human_y"],
    )?;
    if with_svg {
        write_file(&out.join("trajectory.svg"), svg(&trace).as_bytes())?;
    }
    Ok(events.len())
}

/// Process exit code for an error: 4 for file-system problems, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::MissingCaSeries(_) => 4,
        _ => 2,
    }
}
