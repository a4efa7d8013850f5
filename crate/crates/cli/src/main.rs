//! `persona-sched`: validate templates, generate schedule collections,
//! compare them with Levenshtein similarity metrics, render location
//! traces on grid floorplans, and draw SVG timelines.
//!
//! Exit codes: 0 success, 1 validation/generation/metric failure,
//! 2 usage or format error.

mod timeline;

use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use persona_sched_core::environment::{generate_trace, load_location_sidecar, trace_to_csv};
use persona_sched_core::generator::generate_collection;
use persona_sched_core::io::{load_reference_collection, load_template, save_schedules};
use persona_sched_core::similarity::{baseline_collection, sim_cross, sim_self};
use persona_sched_core::validator::{validate_template, Severity};
use persona_sched_core::{parse_time, ActivityId, ScheduleCollection, TimePoint};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "persona-sched", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a schedule template for chronological, under-, and
    /// over-constrained errors
    Validate {
        template: PathBuf,
        /// Emit the report as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Generate a collection of daily schedules from a template
    Generate {
        template: PathBuf,
        #[arg(long)]
        days: usize,
        #[arg(long, env = "PERSONA_SCHED_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a generated collection against reference data
    Evaluate {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 0)]
        baseline_seed: u64,
        /// Comparison window as HH:MM-HH:MM; defaults to the intersection
        /// of both collections' day spans
        #[arg(long)]
        window: Option<String>,
    },
    /// Render one day of a schedule collection as a location trace CSV
    Trace {
        schedule: PathBuf,
        /// ASCII floorplan; its location sidecar is expected at
        /// `<floorplan>.json`
        floorplan: PathBuf,
        #[arg(long)]
        day: usize,
        #[arg(long, default_value_t = 1.2)]
        speed: f64,
        #[arg(long, default_value_t = 1.0)]
        hz: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw schedule collections as an SVG timeline, one panel per file
    Timeline {
        collections: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

struct CmdError {
    code: u8,
    message: String,
}

fn usage_err(message: impl Into<String>) -> CmdError {
    CmdError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn failure(message: impl Into<String>) -> CmdError {
    CmdError {
        code: EXIT_FAILURE,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, CmdError> {
    fs::read_to_string(path).map_err(|e| usage_err(format!("{}: {e}", path.display())))
}

/// Writes via a temp file in the target directory so a failure never
/// leaves a partial output behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CmdError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| usage_err(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| usage_err(format!("{}: {e}", path.display())))
}

fn load_collection(path: &Path) -> Result<ScheduleCollection, CmdError> {
    let gap = ActivityId::new("other").expect("valid token");
    load_reference_collection(&read(path)?, &gap)
        .map_err(|e| usage_err(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Validate { template, json } => cmd_validate(&template, json),
        Command::Generate {
            template,
            days,
            seed,
            out,
        } => cmd_generate(&template, days, seed, &out),
        Command::Evaluate {
            generated,
            reference,
            baseline_seed,
            window,
        } => cmd_evaluate(&generated, &reference, baseline_seed, window.as_deref()),
        Command::Trace {
            schedule,
            floorplan,
            day,
            speed,
            hz,
            out,
        } => cmd_trace(&schedule, &floorplan, day, speed, hz, &out),
        Command::Timeline { collections, out } => cmd_timeline(&collections, &out),
    }
}

fn cmd_validate(template_path: &Path, json: bool) -> Result<(), CmdError> {
    let template = load_template(&read(template_path)?)
        .map_err(|e| usage_err(format!("{}: {e}", template_path.display())))?;
    let report = validate_template(&template);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else if report.findings.is_empty() {
        println!("valid");
    } else {
        println!("{}", if report.valid { "valid" } else { "invalid" });
        for f in &report.findings {
            let severity = match f.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            match f.entry_index {
                Some(i) => println!("  {severity} [{:?}] entry {i}: {}", f.kind, f.message),
                None => println!("  {severity} [{:?}]: {}", f.kind, f.message),
            }
        }
    }
    if report.valid {
        Ok(())
    } else {
        Err(failure("template is invalid".to_string()))
    }
}

fn cmd_generate(template_path: &Path, days: usize, seed: u64, out: &Path) -> Result<(), CmdError> {
    if days == 0 {
        return Err(usage_err("--days must be at least 1"));
    }
    let template = load_template(&read(template_path)?)
        .map_err(|e| usage_err(format!("{}: {e}", template_path.display())))?;
    let collection = generate_collection(&template, days, seed).map_err(|e| failure(e.to_string()))?;
    write_atomic(out, &save_schedules(&collection))
}

fn parse_window(text: &str) -> Result<(TimePoint, TimePoint), CmdError> {
    let (a, b) = text
        .split_once('-')
        .ok_or_else(|| usage_err(format!("window `{text}`: expected HH:MM-HH:MM")))?;
    let lo = parse_time(a).map_err(|e| usage_err(format!("window: {e}")))?;
    let hi = parse_time(b).map_err(|e| usage_err(format!("window: {e}")))?;
    if lo >= hi {
        return Err(usage_err(format!("window `{text}`: start must precede end")));
    }
    Ok((lo, hi))
}

fn cmd_evaluate(
    generated_path: &Path,
    reference_path: &Path,
    baseline_seed: u64,
    window: Option<&str>,
) -> Result<(), CmdError> {
    let generated = load_collection(generated_path)?;
    let reference = load_collection(reference_path)?;
    let window = match window {
        Some(text) => parse_window(text)?,
        None => {
            let g = generated.common_span();
            let r = reference.common_span();
            match (g, r) {
                (Some((gs, ge)), Some((rs, re))) if gs.max(rs) < ge.min(re) => {
                    (gs.max(rs), ge.min(re))
                }
                _ => return Err(failure("collections share no common time window")),
            }
        }
    };

    let cross = sim_cross(&generated, &reference, window).map_err(|e| failure(e.to_string()))?;
    let self_ref = sim_self(&reference, window).map_err(|e| failure(e.to_string()))?;
    // Baseline: 10 random days over the reference vocabulary.
    let baseline = baseline_collection(&reference.activity_vocabulary, 10, baseline_seed)
        .map_err(|e| failure(e.to_string()))?;
    let cross_baseline =
        sim_cross(&baseline, &reference, window).map_err(|e| failure(e.to_string()))?;

    println!(
        "{{\"sim_cross\": {cross:.6}, \"sim_self_reference\": {self_ref:.6}, \"sim_cross_baseline\": {cross_baseline:.6}}}"
    );
    Ok(())
}

fn cmd_trace(
    schedule_path: &Path,
    floorplan_path: &Path,
    day: usize,
    speed: f64,
    hz: f64,
    out: &Path,
) -> Result<(), CmdError> {
    if speed <= 0.0 || hz <= 0.0 {
        return Err(usage_err("--speed and --hz must be positive"));
    }
    let collection = load_collection(schedule_path)?;
    let schedule = collection
        .days
        .get(day)
        .ok_or_else(|| {
            usage_err(format!(
                "--day {day} out of range: file has {} days",
                collection.days.len()
            ))
        })?;
    let sidecar_path = PathBuf::from(format!("{}.json", floorplan_path.display()));
    let (grid, locations) = load_location_sidecar(&read(floorplan_path)?, &read(&sidecar_path)?)
        .map_err(|e| usage_err(e.to_string()))?;
    let trace =
        generate_trace(schedule, &grid, &locations, speed, hz).map_err(|e| failure(e.to_string()))?;
    for warning in &trace.warnings {
        eprintln!("warning: {warning}");
    }
    write_atomic(out, &trace_to_csv(&trace))
}

fn cmd_timeline(paths: &[PathBuf], out: &Path) -> Result<(), CmdError> {
    if paths.is_empty() {
        return Err(usage_err("timeline needs at least one collection file"));
    }
    let mut collections = Vec::with_capacity(paths.len());
    for path in paths {
        let c = load_collection(path)?;
        if c.days.is_empty() {
            return Err(usage_err(format!("{}: collection has no days", path.display())));
        }
        collections.push(c);
    }
    write_atomic(out, &timeline::render_timeline(&collections))
}
