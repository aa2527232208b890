//! Command-line front end: `run`, `suite`, `gamma-sweep` and `plotdata`.
//!
//! Exit codes: 0 success, 2 invalid input or config, 3 timeout, 4 I/O.

mod commands;
pub mod config;
pub mod trace;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_gamma_sweep, cmd_plotdata, cmd_run, cmd_suite, exit_code, format_table, load_source, sweep,
    validate_gammas, ConfigSource, GammaRow, GammaSweep, SuiteReport, DEFAULT_SWEEP, SUITE_FILE, SWEEP_FILE,
    TABLE_FILE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "coopnav", version, about = "Corridor crossing simulation and human contribution assessment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output root directory.
    #[arg(long, env = "COOPNAV_OUT", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct OverrideArgs {
    /// Discount factor of the contribution metric.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Contribution threshold.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Threshold on the anticipated human deviation.
    #[arg(long = "tau-h")]
    pub tau_h: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Config override, `section.key=value` or `key=value`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl OverrideArgs {
    pub fn to_overrides(&self) -> Vec<String> {
        let mut v = Vec::new();
        if let Some(g) = self.gamma {
            v.push(format!("thresholds.gamma={g:?}"));
        }
        if let Some(t) = self.tau {
            v.push(format!("thresholds.tau_cm={t:?}"));
        }
        if let Some(t) = self.tau_h {
            v.push(format!("thresholds.tau_h={t:?}"));
        }
        if let Some(s) = self.seed {
            v.push(format!("scenario.seed={s}"));
        }
        v.extend(self.overrides.iter().cloned());
        v
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario.
    Run {
        /// Scenario config file.
        #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
        config: Option<PathBuf>,
        /// Name of a built-in scenario.
        #[arg(long)]
        scenario: Option<String>,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the four built-in scenarios and write the report.
    Suite {
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Recompute the metric of stored suite CA series for several discount factors.
    GammaSweep {
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Write plot-ready tables from a trace.
    Plotdata {
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        out: OutArg,
        /// Also draw the trajectories as an SVG file.
        #[arg(long)]
        svg: bool,
    },
}

fn report(e: &crate::Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Run {
            config,
            scenario,
            out,
            overrides,
        } => {
            let source = match (config, scenario) {
                (Some(p), _) => ConfigSource::File(p),
                (None, Some(n)) => ConfigSource::Builtin(n),
                (None, None) => unreachable!("clap requires one of them"),
            };
            match cmd_run(&source, &out.out, &overrides.to_overrides()) {
                Ok((trace, summary)) => {
                    println!("scenario {}: final CM = {} (IsContributing = {})", summary.scenario, summary.final_cm, summary.is_contributing);
                    for e in &summary.events {
                        println!("  {e}");
                    }
                    println!("outputs in {}", out.out.join(&summary.scenario).display());
                    if trace.timed_out {
                        eprintln!("timeout: no crossing within {} ticks", trace.config.max_ticks);
                        EXIT_TIMEOUT
                    } else {
                        EXIT_OK
                    }
                }
                Err(e) => report(&e),
            }
        }
        Command::Suite { out, overrides } => match cmd_suite(&out.out, &overrides.to_overrides()) {
            Ok(r) => {
                print!("{}", format_table(&r));
                if r.any_timeout() {
                    eprintln!("timeout in at least one scenario");
                    EXIT_TIMEOUT
                } else {
                    EXIT_OK
                }
            }
            Err(e) => report(&e),
        },
        Command::GammaSweep { gammas, out } => match cmd_gamma_sweep(&gammas, &out.out) {
            Ok(sw) => {
                println!("gamma  {}", sw.scenarios.join("  "));
                for r in &sw.rows {
                    let cms: Vec<String> = r.cm.iter().map(|v| format!("{v:.4}")).collect();
                    let flag = if r.outside_domain { "  (gamma >= 1)" } else { "" };
                    println!("{}  {}{flag}", r.gamma, cms.join("  "));
                }
                EXIT_OK
            }
            Err(e) => report(&e),
        },
        Command::Plotdata { trace, out, svg } => match cmd_plotdata(&trace, &out.out, svg) {
            Ok(n) => {
                println!("wrote plot data with {n} event markers to {}", out.out.display());
                EXIT_OK
            }
            Err(e) => report(&e),
        },
    }
}
