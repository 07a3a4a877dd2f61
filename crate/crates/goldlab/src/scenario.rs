//! Runnable experiment configs: a learner (plus rewrite pipeline), an
//! informant, a monitor battery, and the verdicts the run is expected to
//! produce. Scenarios serialize to JSON, run deterministically, and leave
//! artifacts (trace file, verdicts, report) behind for inspection.

use std::collections::BTreeMap;
use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::descriptor::LangDescriptor;
use crate::hypothesis::Space;
use crate::informant::{Informant, Schedule, ScheduleError};
use crate::learner::{run_trace, Learner, Trace};
use crate::learners::{by_name, LearnerConfigError};
use crate::monitor::{
    check_delayable, run_monitor, MonitorError, MonitorSpec, Outcome, Restriction, Verdict,
};
use crate::program::FnProgram;
use crate::trace_io::{dump_trace, TraceIoError};
use crate::transform::{
    conv_sdec_transform, delay_simulate, pad_cycle, set_driven_wrap, syn_dec_pad, totalize,
    vacillation_collapse, with_step_cost, SimulatingFunction, TransformError,
};

/// Environment variable that fixes the base seed for randomized schedules.
pub const SEED_ENV: &str = "GOLDLAB_SEED";

/// Base seed used when [`SEED_ENV`] is unset.
pub const DEFAULT_SEED: u64 = 0x601D_1AB;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario {name}: {message}")]
    Invalid { name: String, message: String },
    #[error("{SEED_ENV} is set to {value:?}, which is not a decimal u64")]
    BadSeedEnv { value: String },
    #[error(transparent)]
    Learner(#[from] LearnerConfigError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    TraceIo(#[from] TraceIoError),
    #[error("could not write {path}: {source}")]
    Artifact {
        path: String,
        source: std::io::Error,
    },
}

/// A learner rewrite applied to the catalogue learner, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "camelCase", deny_unknown_fields)]
pub enum PipelineStage {
    /// Charges `slope·|σ|` evaluation steps per answer, making the learner
    /// partial. Must be followed by `totalize`.
    Charge { slope: u64 },
    Totalize,
    SynDecPad,
    /// The conservative + strongly decisive rewrite. Its prerequisites —
    /// totalizing and the code-padding discipline — are applied
    /// automatically, mirroring the reduction chain.
    ConvSdec,
    SetDrivenWrap,
    /// Re-codes answers by prefix length mod `period`: a deliberate
    /// vacillator for `collapse` to straighten.
    PadCycle { period: u64 },
    Collapse { a: u64 },
}

impl PipelineStage {
    fn apply(&self, space: &Space, m: Learner) -> Result<Learner, ScenarioError> {
        Ok(match *self {
            PipelineStage::Charge { slope } => {
                with_step_cost(&m, move |sigma| slope.saturating_mul(sigma.len() as u64))
            }
            PipelineStage::Totalize => totalize(&m)?,
            PipelineStage::SynDecPad => syn_dec_pad(space, &m),
            PipelineStage::ConvSdec => {
                let m = if m.is_total() { m } else { totalize(&m)? };
                conv_sdec_transform(space, &syn_dec_pad(space, &m))
            }
            PipelineStage::SetDrivenWrap => set_driven_wrap(&m),
            PipelineStage::PadCycle { period } => pad_cycle(space, &m, period),
            PipelineStage::Collapse { a } => vacillation_collapse(space, &m, a),
        })
    }
}

/// A catalogue learner by id, with parameters and an optional rewrite
/// pipeline applied left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct LearnerSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipeline: Vec<PipelineStage>,
}

/// A target language with an optional presentation schedule (canonical when
/// absent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct InformantSpec {
    pub target: LangDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

impl InformantSpec {
    pub fn canonical(target: LangDescriptor) -> Self {
        InformantSpec {
            target,
            schedule: None,
        }
    }

    pub fn build(&self) -> Result<Informant, ScheduleError> {
        match &self.schedule {
            None => Ok(Informant::canonical(self.target.clone())),
            Some(s) => Informant::scheduled(self.target.clone(), s.clone()),
        }
    }
}

/// Extra seeded block-permutation schedules run alongside the configured
/// informant; verdicts aggregate over all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Sweep {
    pub seeds: u64,
    pub width: usize,
}

/// Runs the learner with simulated delay `𝔰` and judges the base and delayed
/// traces side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DelaySpec {
    pub rule: SimulatingFunction,
    /// Informant presented to the delayed run; the scenario informant when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faster: Option<InformantSpec>,
}

/// One verdict the run must reproduce. `trace` picks the labeled trace in
/// delay runs ("base"/"delayed"); `witness` additionally pins the violation
/// indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Expectation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    pub monitor: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[usize; 3]>,
}

/// A complete experiment: who learns what, how it is judged, and what the
/// verdicts must be.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Scenario {
    pub name: String,
    pub learner: LearnerSpec,
    pub informant: InformantSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<DelaySpec>,
    pub horizon: usize,
    pub bound: u64,
    pub monitors: Vec<MonitorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Expectation>,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |message: String| {
            Err(ScenarioError::Invalid {
                name: self.name.clone(),
                message,
            })
        };
        if self.name.is_empty()
            || self
                .name
                .contains(|c: char| c == '/' || c == '\\' || c.is_whitespace())
        {
            return fail("names must be non-empty and free of separators".into());
        }
        if self.horizon == 0 {
            return fail("horizon must be positive".into());
        }
        if self.bound == 0 {
            return fail("bound must be positive".into());
        }
        if self.monitors.is_empty() {
            return fail("at least one monitor is required".into());
        }
        if self.sweep.is_some() && self.delay.is_some() {
            return fail("sweep and delay do not combine".into());
        }
        if let Some(sw) = &self.sweep {
            if sw.seeds == 0 || sw.width == 0 {
                return fail("sweep needs positive seeds and width".into());
            }
        }
        if let Some(schedule) = &self.informant.schedule {
            schedule.validate()?;
        }
        let mut total = true;
        for stage in &self.learner.pipeline {
            match stage {
                PipelineStage::Charge { .. } => {
                    total = false;
                    continue;
                }
                PipelineStage::Totalize | PipelineStage::ConvSdec => {
                    total = true;
                    continue;
                }
                _ => {}
            }
            if !total {
                return fail(format!(
                    "stage {stage:?} expects a total learner; totalize first"
                ));
            }
            if let PipelineStage::PadCycle { period: 0 } = stage {
                return fail("padCycle needs a positive period".into());
            }
        }
        if !total {
            return fail("the pipeline leaves the learner partial; end with totalize".into());
        }
        let delay_monitor = self.delay.as_ref().map(|d| format!("Delayable[{}]", d.rule));
        for e in &self.expect {
            let is_pair_check = delay_monitor.as_deref() == Some(e.monitor.as_str());
            let configured = self.monitors.iter().any(|m| m.to_string() == e.monitor);
            if !configured && !is_pair_check {
                return fail(format!(
                    "expectation names unconfigured monitor {:?}",
                    e.monitor
                ));
            }
            match (&self.delay, e.trace.as_deref()) {
                (Some(_), Some("base" | "delayed")) => {}
                (Some(_), Some(other)) => {
                    return fail(format!(
                        "unknown trace label {other:?}; delay runs label \"base\" and \"delayed\""
                    ));
                }
                (Some(_), None) if !is_pair_check => {
                    return fail(format!(
                        "expectation on {:?} needs a trace label in a delay run",
                        e.monitor
                    ));
                }
                (None, Some(other)) => {
                    return fail(format!("trace label {other:?} without a delay section"));
                }
                _ => {}
            }
            if is_pair_check && e.trace.is_some() {
                return fail("the delay-contract verdict is not per-trace".into());
            }
        }
        if let Some(d) = &self.delay {
            d.rule.validate()?;
            if let Some(f) = &d.faster {
                if let Some(schedule) = &f.schedule {
                    schedule.validate()?;
                }
            }
        }
        Ok(())
    }
}

/// A monitor verdict tagged with the trace it judged. Single-trace runs
/// leave `trace` empty; delay runs label "base" and "delayed".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledVerdict {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl LabeledVerdict {
    pub fn render_line(&self) -> String {
        match &self.trace {
            None => self.verdict.render_line(),
            Some(label) => format!("[{label}] {}", self.verdict.render_line()),
        }
    }
}

/// Everything a finished run leaves behind, in memory.
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub verdicts: Vec<LabeledVerdict>,
    /// Every trace the run produced, labeled. The first one is primary.
    pub traces: Vec<(String, Trace)>,
    pub report: String,
    /// One line per expectation the verdicts failed to reproduce.
    pub mismatches: Vec<String>,
}

impl ScenarioRun {
    pub fn expectations_met(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The base seed for randomized schedules: [`SEED_ENV`] when set, else
/// [`DEFAULT_SEED`].
pub fn seed_base() -> Result<u64, ScenarioError> {
    match env::var(SEED_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| ScenarioError::BadSeedEnv { value: raw }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn build_learner(space: &Space, spec: &LearnerSpec) -> Result<Learner, ScenarioError> {
    let mut m = by_name(space, &spec.id, &spec.params)?;
    for stage in &spec.pipeline {
        m = stage.apply(space, m)?;
    }
    Ok(m)
}

/// Folds one monitor's verdicts across a sweep: the first failure wins, a
/// clean sweep keeps the primary informant's verdict. Either way the verdict
/// says how wide the sweep was.
fn aggregate(mut verdicts: Vec<Verdict>) -> Verdict {
    let n = verdicts.len();
    match verdicts.iter().position(|v| !v.is_pass()) {
        Some(i) if n > 1 => verdicts
            .swap_remove(i)
            .with_caveat(format!("violated on informant {i} of {n}")),
        None if n > 1 => verdicts
            .swap_remove(0)
            .with_caveat(format!("uniform over {n} informants")),
        _ => verdicts.swap_remove(0),
    }
}

/// Runs a scenario with the ambient seed (see [`seed_base`]).
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioRun, ScenarioError> {
    run_scenario_with_seed(scenario, seed_base()?)
}

/// Runs a scenario with an explicit base seed for its sweep schedules.
pub fn run_scenario_with_seed(
    scenario: &Scenario,
    seed: u64,
) -> Result<ScenarioRun, ScenarioError> {
    scenario.validate()?;
    let mut verdicts = Vec::new();
    let mut traces = Vec::new();
    let learner_name;

    if let Some(delay) = &scenario.delay {
        let informant = scenario.informant.build()?;
        let space = Space::new();
        let m = build_learner(&space, &scenario.learner)?;
        learner_name = m.name().to_string();
        let faster = delay.faster.as_ref().map(InformantSpec::build).transpose()?;
        let sim = delay_simulate(&m, &informant, faster.as_ref(), &delay.rule, scenario.horizon)?;
        verdicts.push(LabeledVerdict {
            trace: None,
            verdict: check_delayable(&sim.base, &sim.delayed, &delay.rule)?,
        });
        for spec in &scenario.monitors {
            verdicts.push(LabeledVerdict {
                trace: Some("base".into()),
                verdict: run_monitor(spec, &sim.base, scenario.bound)?,
            });
            verdicts.push(LabeledVerdict {
                trace: Some("delayed".into()),
                verdict: run_monitor(spec, &sim.delayed, scenario.bound)?,
            });
        }
        traces.push(("base".to_string(), sim.base));
        traces.push(("delayed".to_string(), sim.delayed));
    } else {
        let mut informants = vec![scenario.informant.build()?];
        if let Some(sw) = &scenario.sweep {
            for i in 0..sw.seeds {
                informants.push(Informant::scheduled(
                    scenario.informant.target.clone(),
                    Schedule::SeededBlocks {
                        seed: seed.wrapping_add(i),
                        width: sw.width,
                    },
                )?);
            }
        }
        let mut per_monitor: Vec<Vec<Verdict>> = vec![Vec::new(); scenario.monitors.len()];
        let mut name = String::new();
        for (i, informant) in informants.iter().enumerate() {
            // A fresh space per informant: rewrite transforms memoize per
            // run, and codes must not leak across runs.
            let space = Space::new();
            let m = build_learner(&space, &scenario.learner)?;
            name = m.name().to_string();
            let tr = run_trace(&m, informant, scenario.horizon);
            for (j, spec) in scenario.monitors.iter().enumerate() {
                per_monitor[j].push(run_monitor(spec, &tr, scenario.bound)?);
            }
            let label = if informants.len() == 1 {
                "trace".to_string()
            } else {
                format!("informant-{i}")
            };
            traces.push((label, tr));
        }
        learner_name = name;
        for vs in per_monitor {
            verdicts.push(LabeledVerdict {
                trace: None,
                verdict: aggregate(vs),
            });
        }
    }

    let mismatches = check_expectations(scenario, &verdicts);
    let report = render_report(scenario, &learner_name, &verdicts, &mismatches, seed);
    Ok(ScenarioRun {
        scenario: scenario.clone(),
        verdicts,
        traces,
        report,
        mismatches,
    })
}

fn outcome_word(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Violation => "violation",
    }
}

fn check_expectations(scenario: &Scenario, verdicts: &[LabeledVerdict]) -> Vec<String> {
    let mut out = Vec::new();
    for e in &scenario.expect {
        let slot = match &e.trace {
            None => String::new(),
            Some(label) => format!(" on {label}"),
        };
        let found = verdicts
            .iter()
            .find(|v| v.trace == e.trace && v.verdict.monitor == e.monitor);
        let Some(v) = found else {
            out.push(format!(
                "{}{slot}: expected a verdict, none was produced",
                e.monitor
            ));
            continue;
        };
        if v.verdict.outcome != e.outcome {
            out.push(format!(
                "{}{slot}: expected {}, got: {}",
                e.monitor,
                outcome_word(e.outcome),
                v.verdict.render_line()
            ));
            continue;
        }
        if let Some([r, s, t]) = e.witness {
            if v.verdict.witness() != Some((r, s, t)) {
                out.push(format!(
                    "{}{slot}: expected witness (r,s,t)=({r},{s},{t}), got: {}",
                    e.monitor,
                    v.verdict.render_line()
                ));
            }
        }
    }
    out
}

fn describe_schedule(schedule: Option<&Schedule>) -> String {
    match schedule {
        None | Some(Schedule::Identity) => "canonical".into(),
        Some(Schedule::BlockPermutation { perm }) => {
            format!("blockwise permutation {perm:?}")
        }
        Some(Schedule::Duplicate { factor }) => format!("each value {factor} times"),
        Some(Schedule::SeededBlocks { seed, width }) => {
            format!("seeded blocks (seed {seed}, width {width})")
        }
    }
}

/// The implication backbone a verdict table is checked against: every
/// antecedent passing should force the consequent to pass.
const BACKBONE: &[(&[Restriction], Restriction)] = &[
    (&[Restriction::Conv], Restriction::SNU),
    (&[Restriction::Conv], Restriction::WMon),
    (&[Restriction::SDec], Restriction::Dec),
    (&[Restriction::SDec], Restriction::SNU),
    (&[Restriction::SMon], Restriction::Caut),
    (&[Restriction::SMon], Restriction::Dec),
    (&[Restriction::SMon], Restriction::Mon),
    (&[Restriction::SMon], Restriction::WMon),
    (&[Restriction::Dec, Restriction::SNU], Restriction::NU),
];

fn relation_status(
    outcomes: &BTreeMap<&str, Outcome>,
    antecedents: &[Restriction],
    consequent: Restriction,
) -> String {
    let mut ant = Vec::new();
    for a in antecedents {
        match outcomes.get(a.name()) {
            Some(o) => ant.push((a, *o)),
            None => return "unchecked".into(),
        }
    }
    let Some(cons) = outcomes.get(consequent.name()) else {
        return "unchecked".into();
    };
    if let Some((a, _)) = ant.iter().find(|(_, o)| *o == Outcome::Violation) {
        return format!("vacuous ({a} violated)");
    }
    match cons {
        Outcome::Pass => "witnessed".into(),
        Outcome::Violation => "CONTRADICTED".into(),
    }
}

fn render_backbone(out: &mut String, verdicts: &[LabeledVerdict]) {
    let mut labels: Vec<Option<&str>> = Vec::new();
    for v in verdicts {
        let label = v.trace.as_deref();
        if !labels.contains(&label) {
            labels.push(label);
        }
    }
    for label in labels {
        let outcomes: BTreeMap<&str, Outcome> = verdicts
            .iter()
            .filter(|v| v.trace.as_deref() == label)
            .map(|v| (v.verdict.monitor.as_str(), v.verdict.outcome))
            .collect();
        // Only groups that judged at least one restriction have a table.
        if !outcomes
            .keys()
            .any(|name| name.parse::<Restriction>().is_ok())
        {
            continue;
        }
        match label {
            None => {
                let _ = writeln!(out, "backbone (antecedent passes must carry over):");
            }
            Some(l) => {
                let _ = writeln!(out, "backbone on {l} (antecedent passes must carry over):");
            }
        }
        for (antecedents, consequent) in BACKBONE {
            let lhs = antecedents
                .iter()
                .map(|a| a.name())
                .collect::<Vec<_>>()
                .join(" & ");
            let _ = writeln!(
                out,
                "  {lhs} => {consequent}: {}",
                relation_status(&outcomes, antecedents, *consequent)
            );
        }
    }
}

fn render_report(
    scenario: &Scenario,
    learner_name: &str,
    verdicts: &[LabeledVerdict],
    mismatches: &[String],
    seed: u64,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", scenario.name);
    let _ = writeln!(out, "learner: {learner_name}");
    let _ = writeln!(
        out,
        "informant: {} ({})",
        scenario.informant.target,
        describe_schedule(scenario.informant.schedule.as_ref())
    );
    if let Some(sw) = &scenario.sweep {
        let _ = writeln!(
            out,
            "sweep: plus {} seeded block schedules of width {} (base seed {seed})",
            sw.seeds, sw.width
        );
    }
    if let Some(d) = &scenario.delay {
        let presented = match &d.faster {
            None => "the same informant".to_string(),
            Some(f) => format!("{} ({})", f.target, describe_schedule(f.schedule.as_ref())),
        };
        let _ = writeln!(out, "delay: s(t) = {}, presented: {presented}", d.rule);
    }
    let _ = writeln!(out, "horizon: {}   bound: {}", scenario.horizon, scenario.bound);
    let _ = writeln!(
        out,
        "semantics: every monitor is a falsifier; a violation is a fact about this \
         trace, a pass only says no counterexample exists below the horizon."
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "verdicts:");
    for v in verdicts {
        let _ = writeln!(out, "  {}", v.render_line());
    }
    let _ = writeln!(out);
    render_backbone(&mut out, verdicts);
    let _ = writeln!(out);
    if scenario.expect.is_empty() {
        let _ = writeln!(out, "expectations: none declared");
    } else if mismatches.is_empty() {
        let _ = writeln!(
            out,
            "expectations: {} declared, all met",
            scenario.expect.len()
        );
    } else {
        let _ = writeln!(
            out,
            "expectations: {} of {} MISSED",
            mismatches.len(),
            scenario.expect.len()
        );
        for m in mismatches {
            let _ = writeln!(out, "  {m}");
        }
    }
    out
}

/// Writes `trace.jsonl` (+ code sidecar), `verdicts.json`, and `report.txt`
/// into `dir`, which must already exist. Delay runs also leave the second
/// trace as `trace-delayed.jsonl`.
pub fn write_artifacts(run: &ScenarioRun, dir: &Path) -> Result<(), ScenarioError> {
    let write = |name: &str, contents: &str| {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|source| ScenarioError::Artifact {
            path: path.display().to_string(),
            source,
        })
    };
    dump_trace(&run.traces[0].1, &dir.join("trace.jsonl"))?;
    if run.traces.len() == 2 {
        let (label, tr) = &run.traces[1];
        dump_trace(tr, &dir.join(format!("trace-{label}.jsonl")))?;
    }
    let mut verdicts =
        serde_json::to_string_pretty(&run.verdicts).expect("verdicts serialize");
    verdicts.push('\n');
    write("verdicts.json", &verdicts)?;
    write("report.txt", &run.report)
}

fn mons(names: &[&str]) -> Vec<MonitorSpec> {
    names
        .iter()
        .map(|s| s.parse().expect("built-in monitor specs parse"))
        .collect()
}

fn pass(monitor: &str) -> Expectation {
    Expectation {
        trace: None,
        monitor: monitor.to_string(),
        outcome: Outcome::Pass,
        witness: None,
    }
}

fn violation(monitor: &str, witness: [usize; 3]) -> Expectation {
    Expectation {
        trace: None,
        monitor: monitor.to_string(),
        outcome: Outcome::Violation,
        witness: Some(witness),
    }
}

fn at(label: &str, e: Expectation) -> Expectation {
    Expectation {
        trace: Some(label.to_string()),
        ..e
    }
}

fn plain(id: &str) -> LearnerSpec {
    LearnerSpec {
        id: id.to_string(),
        params: Value::Null,
        pipeline: Vec::new(),
    }
}

fn piped(id: &str, params: Value, pipeline: Vec<PipelineStage>) -> LearnerSpec {
    LearnerSpec {
        id: id.to_string(),
        params,
        pipeline,
    }
}

/// A U-shaped learner of the evens dips to `2ℕ ∪ {1}` and returns: NU fails
/// with the least dip witness while WMon and convergence hold. The descent
/// out of the dip is incautious, and the abandoned code recurs verbatim.
fn wmon_not_nu() -> Scenario {
    Scenario {
        name: "wmon-not-nu".into(),
        learner: plain("evens-wmon"),
        informant: InformantSpec::canonical(LangDescriptor::Evens),
        sweep: None,
        delay: None,
        horizon: 50,
        bound: 200,
        monitors: mons(&["NU", "SNU", "Dec", "WMon", "Caut", "SynDec", "Lim(0,1)"]),
        expect: vec![
            violation("NU", [0, 2, 3]),
            violation("SNU", [0, 2, 3]),
            violation("Dec", [0, 2, 3]),
            pass("WMon"),
            violation("Caut", [2, 2, 3]),
            violation("SynDec", [0, 2, 3]),
            pass("Lim(0,1)"),
        ],
    }
}

/// The cofinite guesser only ever shrinks `ℕ` toward the target: monotone on
/// positives, but never cautious once a negative datum lands.
fn mon_not_caut() -> Scenario {
    Scenario {
        name: "mon-not-caut".into(),
        learner: plain("cofinite"),
        informant: InformantSpec::canonical(LangDescriptor::cofinite([5])),
        sweep: None,
        delay: None,
        horizon: 30,
        bound: 200,
        monitors: mons(&["Caut", "Mon", "SMon", "Cons", "Lim(0,1)"]),
        expect: vec![
            violation("Caut", [0, 0, 6]),
            pass("Mon"),
            violation("SMon", [0, 0, 6]),
            pass("Cons"),
            pass("Lim(0,1)"),
        ],
    }
}

/// The split-family learner abandons its blanket even guess for an
/// incomparable split language, dropping the positive 14 on the way: cautious
/// but not monotone (and visibly inconsistent at the first stray even).
fn caut_not_mon() -> Scenario {
    Scenario {
        name: "caut-not-mon".into(),
        learner: plain("split-family"),
        informant: InformantSpec::canonical(LangDescriptor::split([0, 1, 2, 3, 7])),
        sweep: None,
        delay: None,
        horizon: 30,
        bound: 200,
        monitors: mons(&["Mon", "Caut", "Cons", "Lim(0,1)"]),
        expect: vec![
            violation("Mon", [0, 0, 10]),
            pass("Caut"),
            violation("Cons", [9, 9, 9]),
            pass("Lim(0,1)"),
        ],
    }
}

/// The conservative rewrite (with its totalizing, code-discipline prelude)
/// straightens a U-shaped evens learner into a conservative, strongly
/// decisive one that still converges — on the canonical informant and on 50
/// seeded shufflings alike.
fn conv_sdec_equiv() -> Scenario {
    Scenario {
        name: "conv-sdec-equiv".into(),
        learner: piped(
            "evens-wmon",
            Value::Null,
            vec![PipelineStage::ConvSdec, PipelineStage::SetDrivenWrap],
        ),
        informant: InformantSpec::canonical(LangDescriptor::Evens),
        sweep: Some(Sweep {
            seeds: 50,
            width: 4,
        }),
        delay: None,
        horizon: 200,
        bound: 200,
        monitors: mons(&["Conv", "SDec", "Lim(0,1)"]),
        expect: vec![pass("Conv"), pass("SDec"), pass("Lim(0,1)")],
    }
}

/// Delaying the split-level learner by `t/2` honors the delay contract, yet
/// consistency — alone among the restrictions — does not survive the delay.
fn cons_not_delayable() -> Scenario {
    Scenario {
        name: "cons-not-delayable".into(),
        learner: piped("split-level", json!({ "divisor": 2 }), Vec::new()),
        informant: InformantSpec {
            target: LangDescriptor::Evens,
            schedule: Some(Schedule::Duplicate { factor: 2 }),
        },
        sweep: None,
        delay: Some(DelaySpec {
            rule: SimulatingFunction::FloorDiv { divisor: 2 },
            faster: Some(InformantSpec::canonical(LangDescriptor::Evens)),
        }),
        horizon: 20,
        bound: 200,
        monitors: mons(&["Cons"]),
        expect: vec![
            pass("Delayable[t/2]"),
            at("base", pass("Cons")),
            at("delayed", violation("Cons", [2, 2, 2])),
        ],
    }
}

/// A pad cycle forces eternal vacillation between two codes of the evens;
/// the collapse vote settles on one union code and stays there.
fn collapse_vacillation() -> Scenario {
    Scenario {
        name: "collapse-vacillation".into(),
        learner: piped(
            "enumeration",
            json!({ "family": [{ "kind": "evens" }] }),
            vec![
                PipelineStage::PadCycle { period: 2 },
                PipelineStage::Collapse { a: 0 },
            ],
        ),
        informant: InformantSpec::canonical(LangDescriptor::Evens),
        sweep: None,
        delay: None,
        horizon: 40,
        bound: 200,
        monitors: mons(&["SynDec", "Lim(0,1)"]),
        expect: vec![pass("SynDec"), pass("Lim(0,1)")],
    }
}

/// Growing a language by one certified exception keeps the guess chain
/// `∅ ⊆ L ⊆ L ∪ {x}` strongly monotone, and both the single-code and the
/// unbounded-vacillation convergence checks pass.
fn smon_liminfty_positive() -> Scenario {
    Scenario {
        name: "smon-liminfty-positive".into(),
        learner: piped(
            "min-union-exception",
            json!({ "resolve": { "0": { "kind": "evens" } } }),
            Vec::new(),
        ),
        informant: InformantSpec::canonical(LangDescriptor::Evens.with_exception(5)),
        sweep: None,
        delay: None,
        horizon: 30,
        bound: 200,
        monitors: mons(&[
            "SMon",
            "Caut",
            "Dec",
            "Mon",
            "WMon",
            "Lim(0,1)",
            "Lim(0,inf)",
        ]),
        expect: vec![
            pass("SMon"),
            pass("Caut"),
            pass("Dec"),
            pass("Mon"),
            pass("WMon"),
            pass("Lim(0,1)"),
            pass("Lim(0,inf)"),
        ],
    }
}

/// A program learner fed the graph of `x mod 3` eliminates the identity and
/// the constant and converges to the right graph code.
fn fn_bridge_roundtrip() -> Scenario {
    Scenario {
        name: "fn-bridge-roundtrip".into(),
        learner: piped(
            "fn-enumeration",
            json!({
                "programs": [
                    { "kind": "identity" },
                    { "kind": "constant", "value": 0 },
                    { "kind": "mod", "modulus": 3 }
                ]
            }),
            Vec::new(),
        ),
        informant: InformantSpec::canonical(LangDescriptor::graph(FnProgram::Mod {
            modulus: 3,
        })),
        sweep: None,
        delay: None,
        horizon: 300,
        bound: 600,
        monitors: mons(&["SynDec", "Lim(0,1)"]),
        expect: vec![pass("SynDec"), pass("Lim(0,1)")],
    }
}

/// Set-driven wrapping answers from the canonical rearrangement: still
/// convergent under a blockwise shuffle, but consistency and caution go.
fn set_driven_wrap_demo() -> Scenario {
    Scenario {
        name: "set-driven-wrap".into(),
        learner: piped("cofinite", Value::Null, vec![PipelineStage::SetDrivenWrap]),
        informant: InformantSpec {
            target: LangDescriptor::cofinite([5]),
            schedule: Some(Schedule::BlockPermutation {
                perm: vec![2, 0, 1],
            }),
        },
        sweep: None,
        delay: None,
        horizon: 30,
        bound: 200,
        monitors: mons(&["Cons", "Caut", "Lim(0,1)"]),
        expect: vec![
            violation("Cons", [4, 4, 4]),
            violation("Caut", [0, 0, 6]),
            pass("Lim(0,1)"),
        ],
    }
}

/// Totalizing a learner that charges two steps per datum answers from the
/// half-length prefix: convergence survives with delay, consistency does not.
fn totalize_demo() -> Scenario {
    Scenario {
        name: "totalize-demo".into(),
        learner: piped(
            "cofinite",
            Value::Null,
            vec![PipelineStage::Charge { slope: 2 }, PipelineStage::Totalize],
        ),
        informant: InformantSpec::canonical(LangDescriptor::cofinite([5])),
        sweep: None,
        delay: None,
        horizon: 40,
        bound: 200,
        monitors: mons(&["Cons", "Lim(0,1)"]),
        expect: vec![violation("Cons", [6, 6, 6]), pass("Lim(0,1)")],
    }
}

/// Padding each mind change with the prefix length leaves the dip's semantic
/// returns in place (SDec, NU still fail) but no abandoned code ever recurs.
fn syndec_pad_demo() -> Scenario {
    Scenario {
        name: "syndec-pad".into(),
        learner: piped("evens-wmon", Value::Null, vec![PipelineStage::SynDecPad]),
        informant: InformantSpec::canonical(LangDescriptor::Evens),
        sweep: None,
        delay: None,
        horizon: 50,
        bound: 200,
        monitors: mons(&["SynDec", "SDec", "NU", "Lim(0,1)"]),
        expect: vec![
            pass("SynDec"),
            violation("SDec", [0, 2, 3]),
            violation("NU", [0, 2, 3]),
            pass("Lim(0,1)"),
        ],
    }
}

/// The built-in scenario battery. Every entry declares the verdicts it must
/// reproduce, so the battery doubles as a regression suite.
pub fn built_ins() -> Vec<Scenario> {
    vec![
        wmon_not_nu(),
        mon_not_caut(),
        caut_not_mon(),
        conv_sdec_equiv(),
        cons_not_delayable(),
        collapse_vacillation(),
        smon_liminfty_positive(),
        fn_bridge_roundtrip(),
        set_driven_wrap_demo(),
        totalize_demo(),
        syndec_pad_demo(),
    ]
}

/// Looks up a built-in scenario by name.
pub fn built_in(name: &str) -> Option<Scenario> {
    built_ins().into_iter().find(|s| s.name == name)
}
