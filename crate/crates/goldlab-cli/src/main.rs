//! Command-line front end: runs scenario configs, reproduces the built-in
//! battery, lists it, and replays single monitors over dumped traces.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use goldlab::descriptor::LangDescriptor;
use goldlab::hypothesis::Space;
use goldlab::learner::Trace;
use goldlab::monitor::MonitorSpec;
use goldlab::scenario::{
    built_in, built_ins, run_scenario, write_artifacts, Scenario, ScenarioRun, SEED_ENV,
};
use goldlab::trace_io::load_trace;

const SEMANTICS: &str = "semantics: every monitor is a falsifier; a violation is a fact about \
     this trace, a pass only says no counterexample exists below the horizon.";

#[derive(Parser)]
#[command(
    name = "goldlab",
    version,
    about = "Desk-scale laboratory for limit learning from informants",
    after_help = "Monitors are falsifiers: violations are facts about the trace at hand, \
                  passes are horizon-relative. Set GOLDLAB_SEED to pin seeded schedules."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run scenario files and compare the verdicts against their expectations.
    ///
    /// Exits 0 only if every scenario met every expectation.
    Run {
        /// Scenario config files (JSON).
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Directory artifacts are written under, one subdirectory per scenario.
        #[arg(long, default_value = "goldlab-out")]
        out: PathBuf,
        /// Scenarios run in parallel; each single trace stays sequential.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-run built-in scenarios by name, or the whole battery.
    Reproduce {
        /// Built-in names (all of them when none are given); see `list`.
        names: Vec<String>,
        /// Directory artifacts are written under, one subdirectory per scenario.
        #[arg(long, default_value = "goldlab-out")]
        out: PathBuf,
        /// Scenarios run in parallel; each single trace stays sequential.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List the built-in scenarios.
    List,
    /// Replay one monitor over a dumped trace.
    ///
    /// Exits 0 on a pass, 1 on a violation, 2 on errors.
    Check {
        /// A trace file produced by `run` or `reproduce` (trace.jsonl).
        trace: PathBuf,
        /// Monitor to apply: a restriction name or Lim(a,b).
        #[arg(long)]
        monitor: String,
        /// Target descriptor (JSON), overriding the one stored with the trace.
        #[arg(long)]
        target: Option<String>,
        /// Judge only the first T steps of the trace.
        #[arg(long)]
        horizon: Option<usize>,
        /// Oracle bound for extension comparisons.
        #[arg(long, default_value_t = 200)]
        bound: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Run { files, out, jobs } => run_files(&files, &out, jobs),
        Cmd::Reproduce { names, out, jobs } => reproduce(&names, &out, jobs),
        Cmd::List => {
            list();
            Ok(true)
        }
        Cmd::Check {
            trace,
            monitor,
            target,
            horizon,
            bound,
        } => check(&trace, &monitor, target.as_deref(), horizon, bound),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let raw = fs::read_to_string(path)
        .with_context(|| format!("could not read {}", path.display()))?;
    let scenario: Scenario = serde_json::from_str(&raw)
        .with_context(|| format!("{} is not a scenario config", path.display()))?;
    Ok(scenario)
}

/// Runs scenarios (in parallel across scenarios when jobs > 1), writes each
/// one's artifacts, prints the reports in input order, and says whether all
/// expectations were met.
fn run_batch(scenarios: Vec<Scenario>, out: &Path, jobs: usize) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("could not start the scenario pool")?;
    let runs: Vec<Result<ScenarioRun>> = pool.install(|| {
        use rayon::prelude::*;
        scenarios
            .par_iter()
            .map(|s| {
                let run = run_scenario(s).with_context(|| format!("scenario {}", s.name))?;
                let dir = out.join(&s.name);
                fs::create_dir_all(&dir)
                    .with_context(|| format!("could not create {}", dir.display()))?;
                write_artifacts(&run, &dir)
                    .with_context(|| format!("artifacts for {}", s.name))?;
                Ok(run)
            })
            .collect()
    });

    let mut all_met = true;
    let mut first_err = None;
    for (s, result) in scenarios.iter().zip(runs) {
        match result {
            Ok(run) => {
                print!("{}", run.report);
                println!("artifacts: {}", out.join(&s.name).display());
                println!();
                all_met &= run.expectations_met();
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(all_met),
    }
}

fn run_files(files: &[PathBuf], out: &Path, jobs: usize) -> Result<bool> {
    let scenarios = files
        .iter()
        .map(|f| load_scenario(f))
        .collect::<Result<Vec<_>>>()?;
    run_batch(scenarios, out, jobs)
}

fn reproduce(names: &[String], out: &Path, jobs: usize) -> Result<bool> {
    let scenarios = if names.is_empty() {
        built_ins()
    } else {
        names
            .iter()
            .map(|n| {
                built_in(n).ok_or_else(|| {
                    anyhow!("unknown scenario {n:?}; `goldlab list` shows the built-ins")
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    run_batch(scenarios, out, jobs)
}

fn list() {
    for s in built_ins() {
        let stages = match s.learner.pipeline.len() {
            0 => String::new(),
            1 => " (+1 rewrite stage)".to_string(),
            n => format!(" (+{n} rewrite stages)"),
        };
        let monitors = s
            .monitors
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        println!(
            "{:<24} {}{} on {}; monitors: {}",
            s.name, s.learner.id, stages, s.informant.target, monitors
        );
    }
}

fn check(
    path: &Path,
    monitor: &str,
    target: Option<&str>,
    horizon: Option<usize>,
    bound: u64,
) -> Result<bool> {
    let spec: MonitorSpec = monitor
        .parse()
        .map_err(|e| anyhow!("{e}"))
        .context("unrecognized monitor")?;
    let space = Space::new();
    let mut tr = load_trace(&space, path)
        .with_context(|| format!("could not load the trace {}", path.display()))?;
    if let Some(raw) = target {
        let d: LangDescriptor =
            serde_json::from_str(raw).context("--target is not a descriptor")?;
        tr.set_target(Some(d));
    }
    if let Some(t) = horizon {
        if t > tr.len() {
            bail!("--horizon {t} exceeds the trace length {}", tr.len());
        }
        tr = Trace::from_parts(
            tr.prefix().take(t),
            tr.hyps()[..t].to_vec(),
            tr.target().cloned(),
        );
    }
    if std::env::var_os(SEED_ENV).is_some() {
        // Replaying a stored trace involves no schedules; note the no-op.
        eprintln!("note: {SEED_ENV} does not affect `check`");
    }
    let verdict = goldlab::monitor::run_monitor(&spec, &tr, bound)?;
    println!("{SEMANTICS}");
    println!("{}", verdict.render_line());
    Ok(verdict.is_pass())
}
