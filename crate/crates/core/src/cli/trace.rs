//! Line-delimited JSON traces and the per-run output files.
//!
//! A trace starts with a `meta` record holding the full scenario config,
//! continues with one `tick` record per tick (each followed by the cue
//! events emitted during that tick) and ends with a `summary` record.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decision::CueEvent;
use crate::error::{Error, Result};
use crate::sim::{RunTrace, ScenarioConfig, TickRecord};

pub const TRACE_FORMAT: &str = "coopnav-trace";
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub ca_full: Vec<f64>,
    pub ca_final: Vec<f64>,
    pub final_cm: f64,
    pub is_contributing: bool,
    pub crossing_time: Option<f64>,
    pub timed_out: bool,
    pub reached_goals: bool,
    pub min_separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    Meta {
        format: String,
        version: u32,
        config: ScenarioConfig,
    },
    Tick(TickRecord),
    Event(CueEvent),
    Summary(Summary),
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("trace records serialize")
}

/// The trace as a string of JSON lines.
pub fn trace_to_string(trace: &RunTrace) -> String {
    let mut out = String::new();
    let mut push = |r: &TraceRecord| {
        out.push_str(&json_line(r));
        out.push('\n');
    };
    push(&TraceRecord::Meta {
        format: TRACE_FORMAT.to_owned(),
        version: TRACE_VERSION,
        config: trace.config.clone(),
    });
    let mut events = trace.events.iter().peekable();
    for (k, tick) in trace.ticks.iter().enumerate() {
        push(&TraceRecord::Tick(tick.clone()));
        let next_time = trace.ticks.get(k + 1).map(|t| t.time);
        while let Some(e) = events.next_if(|e| next_time.is_none_or(|t| e.time < t)) {
            push(&TraceRecord::Event(e.clone()));
        }
    }
    for e in events {
        push(&TraceRecord::Event(e.clone()));
    }
    push(&TraceRecord::Summary(Summary {
        ca_full: trace.ca_full.clone(),
        ca_final: trace.ca_final.clone(),
        final_cm: trace.final_cm,
        is_contributing: trace.is_contributing,
        crossing_time: trace.crossing_time,
        timed_out: trace.timed_out,
        reached_goals: trace.reached_goals,
        min_separation: trace.min_separation,
    }));
    out
}

/// Parses a trace written by [`trace_to_string`]. Errors carry the 1-based
/// line number.
pub fn read_trace(reader: impl BufRead) -> Result<RunTrace> {
    let mut config = None;
    let mut summary = None;
    let mut ticks = Vec::new();
    let mut events = Vec::new();
    let mut last_line = 0;
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        last_line = n;
        let line = line.map_err(|e| Error::TraceParse {
            line: n,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord = serde_json::from_str(&line).map_err(|e| Error::TraceParse {
            line: n,
            message: e.to_string(),
        })?;
        let misplaced = |what: &str| Error::TraceParse {
            line: n,
            message: format!("unexpected {what} record"),
        };
        match record {
            TraceRecord::Meta { format, version, config: c } => {
                if config.is_some() || n != 1 {
                    return Err(misplaced("meta"));
                }
                if format != TRACE_FORMAT || version != TRACE_VERSION {
                    return Err(Error::TraceParse {
                        line: n,
                        message: format!("unsupported trace format {format} v{version}"),
                    });
                }
                config = Some(c);
            }
            _ if config.is_none() => return Err(misplaced("leading non-meta")),
            _ if summary.is_some() => return Err(misplaced("post-summary")),
            TraceRecord::Tick(t) => ticks.push(t),
            TraceRecord::Event(e) => events.push(e),
            TraceRecord::Summary(s) => summary = Some(s),
        }
    }
    let config = config.ok_or(Error::TraceParse {
        line: last_line.max(1),
        message: "missing meta record".to_owned(),
    })?;
    let s = summary.ok_or(Error::TraceParse {
        line: last_line,
        message: "missing summary record".to_owned(),
    })?;
    Ok(RunTrace {
        config,
        ticks,
        events,
        ca_full: s.ca_full,
        ca_final: s.ca_final,
        final_cm: s.final_cm,
        is_contributing: s.is_contributing,
        crossing_time: s.crossing_time,
        timed_out: s.timed_out,
        reached_goals: s.reached_goals,
        min_separation: s.min_separation,
    })
}

pub fn read_trace_file(path: &Path) -> Result<RunTrace> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(std::io::BufReader::new(f))
}

/// Stored contribution series of one run, read back by the gamma sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaSeries {
    pub scenario: String,
    pub gamma: f64,
    pub final_cm: f64,
    pub ca_final: Vec<f64>,
    pub ca_full: Vec<f64>,
}

/// Machine-readable outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub corridor: String,
    pub human_policy: String,
    pub gamma: f64,
    pub tau_cm: f64,
    pub final_cm: f64,
    pub is_contributing: bool,
    pub crossing_time: Option<f64>,
    pub timed_out: bool,
    pub reached_goals: bool,
    pub min_separation: f64,
    pub collided: bool,
    pub events: Vec<String>,
}

pub fn corridor_class(trace: &RunTrace) -> &'static str {
    if trace.config.world.is_open() {
        "Open"
    } else if trace.config.world.is_narrow() {
        "Narrow"
    } else {
        "Borderline"
    }
}

pub fn event_label(e: &CueEvent) -> String {
    match e.kind.direction() {
        Some(d) => format!("{:?}:{}({:?})", e.checkpoint, e.kind.name(), d),
        None => format!("{:?}:{}", e.checkpoint, e.kind.name()),
    }
}

pub fn run_summary(trace: &RunTrace) -> RunSummary {
    RunSummary {
        scenario: trace.config.name.clone(),
        corridor: corridor_class(trace).to_owned(),
        human_policy: trace.config.human_policy.label().to_owned(),
        gamma: trace.config.thresholds.gamma,
        tau_cm: trace.config.thresholds.tau_cm,
        final_cm: trace.final_cm,
        is_contributing: trace.is_contributing,
        crossing_time: trace.crossing_time,
        timed_out: trace.timed_out,
        reached_goals: trace.reached_goals,
        min_separation: trace.min_separation,
        collided: trace.collided(),
        events: trace.events.iter().map(event_label).collect(),
    }
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(contents))
        .map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub const TRACE_FILE: &str = "trace.jsonl";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const CA_FILE: &str = "ca.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Writes `trace.jsonl`, `events.jsonl`, `ca.json` and `summary.json`
/// into `dir`.
pub fn write_run_outputs(dir: &Path, trace: &RunTrace) -> Result<RunSummary> {
    create_dir(dir)?;
    write_file(&dir.join(TRACE_FILE), trace_to_string(trace).as_bytes())?;
    let events: String = trace.events.iter().map(|e| json_line(e) + "\n").collect();
    write_file(&dir.join(EVENTS_FILE), events.as_bytes())?;
    let ca = CaSeries {
        scenario: trace.config.name.clone(),
        gamma: trace.config.thresholds.gamma,
        final_cm: trace.final_cm,
        ca_final: trace.ca_final.clone(),
        ca_full: trace.ca_full.clone(),
    };
    write_file(&dir.join(CA_FILE), pretty(&ca).as_bytes())?;
    let summary = run_summary(trace);
    write_file(&dir.join(SUMMARY_FILE), pretty(&summary).as_bytes())?;
    Ok(summary)
}

pub fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn read_ca_series(dir: &Path) -> Result<CaSeries> {
    let path = dir.join(CA_FILE);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingCaSeries(path)),
        Err(e) => return Err(Error::io(path, e)),
    };
    serde_json::from_str(&text).map_err(|e| Error::TraceParse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}
