//! Horizon-bounded judges for learning restrictions, convergence, the delay
//! relation, and locking sequences.
//!
//! Every monitor is a falsifier over a finite trace. A violation names
//! concrete indices and, under the exact oracle, is a theorem about the
//! trace; a pass only certifies that no counterexample exists below the
//! horizon. Witnesses are the lexicographically least in `(t, s, r)` scan
//! order, so reruns reproduce verdicts byte for byte.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{InfoPair, Prefix};
use crate::descriptor::{LangDescriptor, UltPeriodic};
use crate::hypothesis::{sym_diff_count, Hypothesis, SpaceError, SymDiff};
use crate::learner::{Learner, Trace};
use crate::registry::Code;
use crate::transform::SimulatingFunction;

/// The trace-level learning restrictions.
///
/// Each name abbreviates a universally quantified predicate over the
/// hypothesis sequence `h` and the input `I` of a trace, with all index
/// variables ranging over `r ≤ s ≤ t` below the horizon. `W_i` is the
/// extension of `h_i`; `Cons(I[t], W)` says `W` agrees with the first `t`
/// labelled pairs. The monitor searches for the least counterexample rather
/// than proving the quantifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Restriction {
    /// `Cons(I[t], W_t)` for all `t`.
    Cons,
    /// `Cons(I[t], W_s) ⇒ h_s = h_t` for all `s ≤ t`.
    Conv,
    /// `W_r = W_t ⇒ W_r = W_s` for all `r ≤ s ≤ t`.
    Dec,
    /// `¬(W_t ⊊ W_s)` for all `s ≤ t`.
    Caut,
    /// `Cons(I[t], W_s) ⇒ W_s ⊆ W_t` for all `s ≤ t`.
    WMon,
    /// `W_s ∩ pos(I) ⊆ W_t ∩ pos(I)` for all `s ≤ t`.
    Mon,
    /// `W_s ⊆ W_t` for all `s ≤ t`.
    SMon,
    /// `W_r = W_t = pos(I) ⇒ W_r = W_s` for all `r ≤ s ≤ t`.
    NU,
    /// `W_r = W_t = pos(I) ⇒ h_r = h_s` for all `r ≤ s ≤ t`.
    SNU,
    /// `W_r = W_t ⇒ h_r = h_s` for all `r ≤ s ≤ t`.
    SDec,
    /// `h_r = h_t ⇒ h_r = h_s` for all `r ≤ s ≤ t`.
    SynDec,
}

impl Restriction {
    pub const ALL: [Restriction; 11] = [
        Restriction::Cons,
        Restriction::Conv,
        Restriction::Dec,
        Restriction::Caut,
        Restriction::WMon,
        Restriction::Mon,
        Restriction::SMon,
        Restriction::NU,
        Restriction::SNU,
        Restriction::SDec,
        Restriction::SynDec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Restriction::Cons => "Cons",
            Restriction::Conv => "Conv",
            Restriction::Dec => "Dec",
            Restriction::Caut => "Caut",
            Restriction::WMon => "WMon",
            Restriction::Mon => "Mon",
            Restriction::SMon => "SMon",
            Restriction::NU => "NU",
            Restriction::SNU => "SNU",
            Restriction::SDec => "SDec",
            Restriction::SynDec => "SynDec",
        }
    }

    /// Does the predicate mention `pos(I)`? Those monitors need the trace to
    /// record its target language.
    pub fn requires_target(self) -> bool {
        matches!(self, Restriction::Mon | Restriction::NU | Restriction::SNU)
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Restriction {
    type Err = ParseMonitorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Restriction::ALL
            .iter()
            .copied()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ParseMonitorError(format!("unknown restriction {s:?}")))
    }
}

#[derive(Debug, Error)]
pub enum MonitorError {
    /// The exact oracle cannot decide a comparison this check needs.
    #[error("exact oracle unavailable: {context}")]
    OracleUnavailable { context: String },
    /// The monitor's predicate mentions `pos(I)` but the trace has no target.
    #[error("monitor {monitor} needs a trace with a recorded target")]
    TargetRequired { monitor: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    /// The locking-sequence seed contradicts the language it should describe.
    #[error("seed prefix contradicts the language at value {value}")]
    InconsistentSeed { value: u64 },
    /// A delay check asked for a base step past the recorded trace.
    #[error("base trace records {have} steps but step {needed} is needed at t={t}")]
    BaseTraceTooShort { t: usize, needed: usize, have: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Outcome {
    Pass,
    Violation,
}

/// Outcome of one monitor over one trace.
///
/// Serializes flat, witness indices only when present:
/// `{"monitor":"NU","outcome":"violation","r":0,"s":2,"t":3,"horizon":50}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub monitor: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
}

impl Verdict {
    pub fn pass(monitor: impl Into<String>, horizon: usize) -> Self {
        Verdict {
            monitor: monitor.into(),
            outcome: Outcome::Pass,
            r: None,
            s: None,
            t: None,
            horizon,
            detail: None,
            caveats: Vec::new(),
        }
    }

    pub fn violation(
        monitor: impl Into<String>,
        horizon: usize,
        (r, s, t): (usize, usize, usize),
        detail: Option<String>,
    ) -> Self {
        Verdict {
            monitor: monitor.into(),
            outcome: Outcome::Violation,
            r: Some(r),
            s: Some(s),
            t: Some(t),
            horizon,
            detail,
            caveats: Vec::new(),
        }
    }

    pub fn is_pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn witness(&self) -> Option<(usize, usize, usize)> {
        Some((self.r?, self.s?, self.t?))
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveats.push(caveat.into());
        self
    }

    /// One report line. A violation names its indices; a pass claims nothing
    /// beyond the horizon it searched.
    pub fn render_line(&self) -> String {
        let mut line = match (self.outcome, self.witness(), self.t) {
            (Outcome::Pass, ..) => {
                format!("{}: no violation below horizon {}", self.monitor, self.horizon)
            }
            (Outcome::Violation, Some((r, s, t)), _) => {
                format!("{}: violation at (r,s,t)=({r},{s},{t})", self.monitor)
            }
            (Outcome::Violation, None, Some(t)) => {
                format!("{}: violation at t={t}", self.monitor)
            }
            (Outcome::Violation, None, None) => format!("{}: violation", self.monitor),
        };
        if let Some(detail) = &self.detail {
            line.push_str(&format!(" ({detail})"));
        }
        if !self.caveats.is_empty() {
            line.push_str(&format!(" [{}]", self.caveats.join("; ")));
        }
        line
    }
}

/// How extensions are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "camelCase")]
pub enum EqOracle {
    /// Decide equality and inclusion in the descriptor algebra. Refuses
    /// traces whose hypotheses it cannot place in that algebra.
    Exact,
    /// Compare extensions restricted to `[0, bound)`, enumerated at a budget
    /// proportional to the bound. Sound for violations on what it sees;
    /// passes and equalities are relative to the window.
    Horizon { bound: u64 },
}

fn decide(v: Option<bool>, context: impl FnOnce() -> String) -> Result<bool, MonitorError> {
    v.ok_or_else(|| MonitorError::OracleUnavailable { context: context() })
}

fn exact_descriptor(h: &Hypothesis) -> Result<&LangDescriptor, MonitorError> {
    h.descriptor().ok_or_else(|| MonitorError::OracleUnavailable {
        context: format!("hypothesis {:?} carries no exact descriptor", h.code()),
    })
}

fn normal_form_of(d: &LangDescriptor) -> Result<UltPeriodic, MonitorError> {
    d.normal_form().ok_or_else(|| MonitorError::OracleUnavailable {
        context: format!("{d} is outside the ultimately periodic algebra"),
    })
}

/// The extension of `h` as seen on `[0, bound)` at an enumeration budget
/// proportional to the bound.
fn window_view(h: &Hypothesis, bound: u64) -> Result<BTreeSet<u64>, MonitorError> {
    let budget = h.inflation().max(1).saturating_mul(bound);
    let mut view = h.enum_up_to(budget)?;
    view.retain(|&x| x < bound);
    Ok(view)
}

fn target_window(target: &LangDescriptor, bound: u64) -> BTreeSet<u64> {
    (0..bound).filter(|&x| target.member(x)).collect()
}

/// The trace's hypotheses partitioned into extension-equality classes under
/// one oracle, with the comparisons the restriction scans need.
struct Classes {
    /// Class of the hypothesis at each step.
    of: Vec<usize>,
    /// First hypothesis seen per class.
    reps: Vec<Hypothesis>,
    sem: Sem,
}

enum Sem {
    Exact(Vec<LangDescriptor>),
    Window { views: Vec<BTreeSet<u64>>, bound: u64 },
}

impl Classes {
    fn build(tr: &Trace, eq: EqOracle) -> Result<Classes, MonitorError> {
        let mut of = Vec::with_capacity(tr.len());
        let mut reps: Vec<Hypothesis> = Vec::new();
        let mut by_code: HashMap<Code, usize> = HashMap::new();
        let mut sem = match eq {
            EqOracle::Exact => Sem::Exact(Vec::new()),
            EqOracle::Horizon { bound } => Sem::Window { views: Vec::new(), bound },
        };
        for t in 0..tr.len() {
            let h = tr.hyp(t);
            if let Some(&c) = by_code.get(&h.code()) {
                of.push(c);
                continue;
            }
            let class = match &mut sem {
                Sem::Exact(descs) => {
                    let d = exact_descriptor(h)?.clone();
                    let mut found = None;
                    for (i, known) in descs.iter().enumerate() {
                        let eq = decide(known.equal_exact(&d), || {
                            format!("extension equality of {known} and {d}")
                        })?;
                        if eq {
                            found = Some(i);
                            break;
                        }
                    }
                    found.unwrap_or_else(|| {
                        descs.push(d);
                        descs.len() - 1
                    })
                }
                Sem::Window { views, bound } => {
                    let v = window_view(h, *bound)?;
                    match views.iter().position(|w| *w == v) {
                        Some(i) => i,
                        None => {
                            views.push(v);
                            views.len() - 1
                        }
                    }
                }
            };
            if class == reps.len() {
                reps.push(h.clone());
            }
            by_code.insert(h.code(), class);
            of.push(class);
        }
        Ok(Classes { of, reps, sem })
    }

    fn count(&self) -> usize {
        self.reps.len()
    }

    /// Membership of class `c` at `x`. Under the horizon oracle, values past
    /// the bound fall back to a budgeted query on the class representative.
    fn member(&self, c: usize, x: u64) -> Result<bool, MonitorError> {
        match &self.sem {
            Sem::Exact(descs) => Ok(descs[c].member(x)),
            Sem::Window { views, bound } => {
                if x < *bound {
                    Ok(views[c].contains(&x))
                } else {
                    Ok(self.reps[c].member_horizon(x, *bound)?)
                }
            }
        }
    }

    /// For each class, the length of the longest input prefix it is
    /// consistent with; `Cons(I[t], W_c)` holds iff `ok_lens[c] ≥ t`.
    fn ok_lens(&self, prefix: &Prefix) -> Result<Vec<usize>, MonitorError> {
        let mut out = Vec::with_capacity(self.count());
        for c in 0..self.count() {
            let mut ok = prefix.len();
            for (i, item) in prefix.items().iter().enumerate() {
                if self.member(c, item.x)? != item.label {
                    ok = i;
                    break;
                }
            }
            out.push(ok);
        }
        Ok(out)
    }

    /// Inclusion matrix between class extensions.
    fn subset_matrix(&self) -> Result<Vec<Vec<bool>>, MonitorError> {
        let n = self.count();
        let mut matrix = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                matrix[a][b] = if a == b {
                    true
                } else {
                    match &self.sem {
                        Sem::Exact(descs) => decide(descs[a].subset_exact(&descs[b]), || {
                            format!("inclusion of {} in {}", descs[a], descs[b])
                        })?,
                        Sem::Window { views, .. } => views[a].is_subset(&views[b]),
                    }
                };
            }
        }
        Ok(matrix)
    }

    /// Which classes denote exactly the target language.
    fn target_classes(&self, target: &LangDescriptor) -> Result<Vec<bool>, MonitorError> {
        match &self.sem {
            Sem::Exact(descs) => descs
                .iter()
                .map(|d| {
                    decide(d.equal_exact(target), || {
                        format!("equality of {d} and the target {target}")
                    })
                })
                .collect(),
            Sem::Window { views, bound } => {
                let pos = target_window(target, *bound);
                Ok(views.iter().map(|v| *v == pos).collect())
            }
        }
    }

    /// Least member of `(W_a ∩ pos(I)) ∖ W_b`, or `None` when the
    /// pos-restricted inclusion of `a` in `b` holds.
    fn mon_gap(
        &self,
        a: usize,
        b: usize,
        target: &LangDescriptor,
    ) -> Result<Option<u64>, MonitorError> {
        if a == b {
            return Ok(None);
        }
        match &self.sem {
            Sem::Exact(descs) => {
                let nf_a = normal_form_of(&descs[a])?;
                let nf_b = normal_form_of(&descs[b])?;
                let nf_pos = normal_form_of(target)?;
                let gap = nf_a
                    .zip_with(&nf_pos, |u, v| u && v)
                    .zip_with(&nf_b, |u, v| u && !v);
                // An ultimately periodic set is nonempty iff it has a member
                // below threshold + period.
                Ok((0..gap.threshold() + gap.period()).find(|&x| gap.member(x)))
            }
            Sem::Window { views, bound } => {
                let pos = target_window(target, *bound);
                Ok(views[a]
                    .intersection(&pos)
                    .find(|x| !views[b].contains(*x))
                    .copied())
            }
        }
    }
}

/// Searches the trace for the least counterexample to a restriction,
/// scanning `t`, then `s ≤ t`, then `r ≤ s`. The reported witness collapses
/// unused indices onto the used ones (`r = s` for pair predicates,
/// `r = s = t` for per-step predicates).
pub fn check_restriction(
    name: Restriction,
    tr: &Trace,
    eq: EqOracle,
) -> Result<Verdict, MonitorError> {
    let monitor = name.to_string();
    let horizon = tr.len();
    if name.requires_target() && tr.target().is_none() {
        return Err(MonitorError::TargetRequired { monitor });
    }
    let codes = tr.codes();

    // Purely syntactic: no oracle, so it works on opaque reloads too.
    if name == Restriction::SynDec {
        for t in 0..horizon {
            for s in 0..=t {
                for r in 0..=s {
                    if codes[r] == codes[t] && codes[s] != codes[r] {
                        return Ok(Verdict::violation(monitor, horizon, (r, s, t), None));
                    }
                }
            }
        }
        return Ok(Verdict::pass(monitor, horizon));
    }

    let classes = Classes::build(tr, eq)?;
    let cls = &classes.of;

    match name {
        Restriction::Cons => {
            let ok = classes.ok_lens(tr.prefix())?;
            for t in 0..horizon {
                if ok[cls[t]] < t {
                    return Ok(Verdict::violation(monitor, horizon, (t, t, t), None));
                }
            }
        }
        Restriction::Conv => {
            let ok = classes.ok_lens(tr.prefix())?;
            for t in 0..horizon {
                for s in 0..=t {
                    if codes[s] != codes[t] && ok[cls[s]] >= t {
                        return Ok(Verdict::violation(monitor, horizon, (s, s, t), None));
                    }
                }
            }
        }
        Restriction::Dec => {
            for t in 0..horizon {
                for s in 0..=t {
                    for r in 0..=s {
                        if cls[r] == cls[t] && cls[s] != cls[r] {
                            return Ok(Verdict::violation(monitor, horizon, (r, s, t), None));
                        }
                    }
                }
            }
        }
        Restriction::Caut => {
            let sub = classes.subset_matrix()?;
            for t in 0..horizon {
                for s in 0..=t {
                    if cls[t] != cls[s] && sub[cls[t]][cls[s]] {
                        return Ok(Verdict::violation(monitor, horizon, (s, s, t), None));
                    }
                }
            }
        }
        Restriction::WMon => {
            let ok = classes.ok_lens(tr.prefix())?;
            let sub = classes.subset_matrix()?;
            for t in 0..horizon {
                for s in 0..=t {
                    if ok[cls[s]] >= t && !sub[cls[s]][cls[t]] {
                        return Ok(Verdict::violation(monitor, horizon, (s, s, t), None));
                    }
                }
            }
        }
        Restriction::Mon => {
            let target = tr.target().expect("target checked above");
            let mut gap_memo: HashMap<(usize, usize), Option<u64>> = HashMap::new();
            for t in 0..horizon {
                for s in 0..=t {
                    let key = (cls[s], cls[t]);
                    let gap = match gap_memo.get(&key) {
                        Some(g) => *g,
                        None => {
                            let g = classes.mon_gap(key.0, key.1, target)?;
                            gap_memo.insert(key, g);
                            g
                        }
                    };
                    if let Some(x) = gap {
                        let detail =
                            format!("positive value {x} was guessed at s={s} and dropped at t={t}");
                        return Ok(Verdict::violation(monitor, horizon, (s, s, t), Some(detail)));
                    }
                }
            }
        }
        Restriction::SMon => {
            let sub = classes.subset_matrix()?;
            for t in 0..horizon {
                for s in 0..=t {
                    if !sub[cls[s]][cls[t]] {
                        return Ok(Verdict::violation(monitor, horizon, (s, s, t), None));
                    }
                }
            }
        }
        Restriction::NU | Restriction::SNU => {
            let target = tr.target().expect("target checked above");
            let is_target = classes.target_classes(target)?;
            let syntactic = name == Restriction::SNU;
            for t in 0..horizon {
                for s in 0..=t {
                    for r in 0..=s {
                        if is_target[cls[r]] && is_target[cls[t]] {
                            let dip = if syntactic {
                                codes[s] != codes[r]
                            } else {
                                cls[s] != cls[r]
                            };
                            if dip {
                                return Ok(Verdict::violation(monitor, horizon, (r, s, t), None));
                            }
                        }
                    }
                }
            }
        }
        Restriction::SDec => {
            for t in 0..horizon {
                for s in 0..=t {
                    for r in 0..=s {
                        if cls[r] == cls[t] && codes[s] != codes[r] {
                            return Ok(Verdict::violation(monitor, horizon, (r, s, t), None));
                        }
                    }
                }
            }
        }
        Restriction::SynDec => unreachable!("handled before class building"),
    }
    Ok(Verdict::pass(monitor, horizon))
}

/// Tries the exact oracle first and falls back to the horizon oracle when
/// the descriptor algebra cannot decide a comparison, flagging the fallback
/// as a caveat on the verdict. A missing target is not retried: the horizon
/// oracle needs it just as much.
pub fn check_restriction_auto(
    name: Restriction,
    tr: &Trace,
    bound: u64,
) -> Result<Verdict, MonitorError> {
    match check_restriction(name, tr, EqOracle::Exact) {
        Err(MonitorError::OracleUnavailable { .. }) => {
            let v = check_restriction(name, tr, EqOracle::Horizon { bound })?;
            Ok(v.with_caveat(format!(
                "exact algebra unavailable; extensions compared on [0,{bound}) at the horizon"
            )))
        }
        other => other,
    }
}

/// Anomaly budget of a convergence check: a fixed count, or `*` for
/// "finitely many".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anomalies {
    Exactly(u64),
    Finite,
}

impl fmt::Display for Anomalies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Anomalies::Exactly(n) => write!(f, "{n}"),
            Anomalies::Finite => f.write_str("*"),
        }
    }
}

impl FromStr for Anomalies {
    type Err = ParseMonitorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "*" => Ok(Anomalies::Finite),
            n => n.parse().map(Anomalies::Exactly).map_err(|_| {
                ParseMonitorError(format!("bad anomaly budget {s:?}: expected a count or *"))
            }),
        }
    }
}

/// Vacillation budget of a convergence check: at most `b` distinct limit
/// hypotheses, `*` for finitely many, or `inf` for unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vacillation {
    AtMost(u64),
    Finite,
    Unbounded,
}

impl fmt::Display for Vacillation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Vacillation::AtMost(n) => write!(f, "{n}"),
            Vacillation::Finite => f.write_str("*"),
            Vacillation::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Vacillation {
    type Err = ParseMonitorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "*" => Ok(Vacillation::Finite),
            "inf" | "∞" => Ok(Vacillation::Unbounded),
            n => match n.parse() {
                Ok(0) | Err(_) => Err(ParseMonitorError(format!(
                    "bad vacillation budget {s:?}: expected a count >= 1, *, or inf"
                ))),
                Ok(b) => Ok(Vacillation::AtMost(b)),
            },
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct ParseMonitorError(String);

/// A parsed monitor request: a restriction name or a convergence check
/// `Lim(a,b)`. Round-trips through its display form, e.g. `"Lim(0,1)"`,
/// `"Lim(*,inf)"`, `"WMon"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MonitorSpec {
    Restriction(Restriction),
    Lim { a: Anomalies, b: Vacillation },
}

impl fmt::Display for MonitorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonitorSpec::Restriction(r) => r.fmt(f),
            MonitorSpec::Lim { a, b } => write!(f, "Lim({a},{b})"),
        }
    }
}

impl From<MonitorSpec> for String {
    fn from(spec: MonitorSpec) -> String {
        spec.to_string()
    }
}

impl FromStr for MonitorSpec {
    type Err = ParseMonitorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(r) = s.parse::<Restriction>() {
            return Ok(MonitorSpec::Restriction(r));
        }
        let lower = s.to_ascii_lowercase();
        if let Some(args) = lower.strip_prefix("lim(").and_then(|rest| rest.strip_suffix(')')) {
            let mut parts = args.splitn(2, ',');
            let a = parts.next().unwrap_or("").parse()?;
            let b = parts
                .next()
                .ok_or_else(|| ParseMonitorError(format!("bad monitor {s:?}: expected Lim(a,b)")))?
                .parse()?;
            return Ok(MonitorSpec::Lim { a, b });
        }
        Err(ParseMonitorError(format!("unknown monitor {s:?}")))
    }
}

impl TryFrom<String> for MonitorSpec {
    type Error = ParseMonitorError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Runs one monitor over a trace: restrictions through the auto oracle,
/// convergence through [`check_lim`].
pub fn run_monitor(spec: &MonitorSpec, tr: &Trace, bound: u64) -> Result<Verdict, MonitorError> {
    match *spec {
        MonitorSpec::Restriction(name) => check_restriction_auto(name, tr, bound),
        MonitorSpec::Lim { a, b } => check_lim(tr, a, b, bound),
    }
}

/// Searches for the least settling index `t0` below the horizon such that
/// every hypothesis from `t0` on differs from the target in at most `a`
/// points and at most `b` distinct codes appear from `t0` on. Accuracy is
/// decided symbolically where the hypothesis allows it and counted on
/// `[0, bound)` otherwise. Any finite trace vacillates and errs only
/// finitely, so `a = *` and `b = *` hold up to a caveat; `b = inf` waives
/// the vacillation clause.
pub fn check_lim(
    tr: &Trace,
    a: Anomalies,
    b: Vacillation,
    bound: u64,
) -> Result<Verdict, MonitorError> {
    let monitor = format!("Lim({a},{b})");
    let target = tr
        .target()
        .ok_or_else(|| MonitorError::TargetRequired { monitor: monitor.clone() })?;
    let horizon = tr.len();

    // accurate_from[t]: every hypothesis at an index >= t is within budget.
    // Traces repeat a handful of codes, so count each code once.
    let mut diff_of: HashMap<Code, SymDiff> = HashMap::new();
    let mut accurate_from = vec![true; horizon + 1];
    for t in (0..horizon).rev() {
        let diff = match diff_of.get(&tr.code(t)) {
            Some(d) => *d,
            None => {
                let d = sym_diff_count(tr.hyp(t), target, bound)?;
                diff_of.insert(tr.code(t), d);
                d
            }
        };
        let ok = match a {
            Anomalies::Exactly(n) => diff.within(n),
            Anomalies::Finite => matches!(diff, SymDiff::Count(_)),
        };
        accurate_from[t] = ok && accurate_from[t + 1];
    }

    // distinct_from[t]: distinct codes appearing at indices >= t.
    let mut distinct_from = vec![0usize; horizon + 1];
    let mut seen: HashSet<Code> = HashSet::new();
    for t in (0..horizon).rev() {
        seen.insert(tr.code(t));
        distinct_from[t] = seen.len();
    }

    let settle = (0..horizon.max(1)).find(|&t0| {
        let vacillation_ok = match b {
            Vacillation::AtMost(n) => distinct_from[t0] as u64 <= n,
            Vacillation::Finite | Vacillation::Unbounded => true,
        };
        accurate_from[t0] && vacillation_ok
    });

    let mut verdict = match settle {
        Some(t0) => {
            let mut v = Verdict::pass(monitor, horizon);
            v.detail = Some(format!("t0={t0}"));
            v
        }
        None => Verdict {
            monitor,
            outcome: Outcome::Violation,
            r: None,
            s: None,
            t: None,
            horizon,
            detail: Some("no settling index below the horizon satisfies both clauses".into()),
            caveats: Vec::new(),
        },
    };
    if matches!(a, Anomalies::Finite) {
        verdict.caveats.push(format!(
            "a=*: finite-horizon-trivial; anomaly count certified finite only on [0,{bound})"
        ));
    }
    if matches!(b, Vacillation::Finite) {
        verdict.caveats.push(
            "b=*: finite-horizon-trivial; any finite trace vacillates boundedly".into(),
        );
    }
    Ok(verdict)
}

/// Verifies that `delayed` simulates `base` under the simulating function
/// `rule`: at every step `t` of the delayed trace, the presented input must
/// contain the simulated one positively and negatively, and the delayed
/// hypothesis must equal the base hypothesis at `s(t)`.
pub fn check_delayable(
    base: &Trace,
    delayed: &Trace,
    rule: &SimulatingFunction,
) -> Result<Verdict, MonitorError> {
    let monitor = format!("Delayable[{rule}]");
    let horizon = delayed.len();
    for t in 0..horizon {
        let st = rule.apply(t);
        if st >= base.len() {
            return Err(MonitorError::BaseTraceTooShort {
                t,
                needed: st + 1,
                have: base.len(),
            });
        }
        let simulated = base.input_at(st);
        let presented = delayed.input_at(t);
        let broken = if !simulated.pos().is_subset(presented.pos()) {
            Some(format!("pos(I[s({t})]) is not within pos(I'[{t}])"))
        } else if !simulated.ng().is_subset(presented.ng()) {
            Some(format!("ng(I[s({t})]) is not within ng(I'[{t}])"))
        } else if base.code(st) != delayed.code(t) {
            Some(format!("M'(I'[{t}]) differs from M(I[s({t})])"))
        } else {
            None
        };
        if let Some(detail) = broken {
            return Ok(Verdict {
                monitor,
                outcome: Outcome::Violation,
                r: None,
                s: None,
                t: Some(t),
                horizon,
                detail: Some(detail),
                caveats: Vec::new(),
            });
        }
    }
    Ok(Verdict::pass(monitor, horizon))
}

/// Outcome of a bounded locking-sequence search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum LockVerdict {
    /// A language-consistent extension within the bounds that moves the
    /// guess: the first one in length-then-lexicographic order.
    CounterexampleExtension { tau: Vec<InfoPair> },
    /// Every searched extension leaves the guess unchanged.
    LockedUpTo { depth: usize, bound: u64 },
}

/// Searches every extension `τ` of `sigma` with `1 ≤ |τ| ≤ depth` and values
/// below `bound`, labelled by the language, for one that changes the guess.
/// The seed must itself be consistent with the language.
pub fn locking_falsifier(
    m: &Learner,
    lang: &LangDescriptor,
    sigma: &Prefix,
    depth: usize,
    bound: u64,
) -> Result<LockVerdict, MonitorError> {
    if let Some(item) = sigma.items().iter().find(|p| lang.member(p.x) != p.label) {
        return Err(MonitorError::InconsistentSeed { value: item.x });
    }
    let base_code = m.guess(sigma).code();
    for len in 1..=depth {
        if bound == 0 {
            break;
        }
        let mut values = vec![0u64; len];
        loop {
            let mut extended = sigma.clone();
            for &v in &values {
                extended
                    .push(InfoPair::new(v, lang.member(v)))
                    .expect("language labels never contradict a consistent seed");
            }
            if m.guess(&extended).code() != base_code {
                let tau = values
                    .iter()
                    .map(|&v| InfoPair::new(v, lang.member(v)))
                    .collect();
                return Ok(LockVerdict::CounterexampleExtension { tau });
            }
            // Odometer step: least significant digit last, so tuples come in
            // lexicographic order.
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                values[i] += 1;
                if values[i] < bound {
                    break;
                }
                values[i] = 0;
            }
            if values.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    Ok(LockVerdict::LockedUpTo { depth, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::Space;
    use crate::informant::{Informant, Schedule};
    use crate::learner::run_trace;
    use crate::learners::{
        cofinite_learner, enumeration_learner, enumeration_learner_lifted, evens_wmon_learner,
        split_family_learner, split_level_learner,
    };
    use crate::transform::delay_simulate;

    fn exact_trace(space: &Space, target: LangDescriptor, hyps: Vec<LangDescriptor>) -> Trace {
        let prefix = Informant::canonical(target.clone()).prefix(hyps.len());
        let hyps = hyps.into_iter().map(|d| space.exact(d)).collect();
        Trace::from_parts(prefix, hyps, Some(target))
    }

    fn dip_trace(space: &Space, horizon: usize) -> Trace {
        run_trace(
            &evens_wmon_learner(space),
            &Informant::canonical(LangDescriptor::Evens),
            horizon,
        )
    }

    #[test]
    fn monitor_specs_parse_and_render() {
        for r in Restriction::ALL {
            let spec: MonitorSpec = r.name().parse().unwrap();
            assert_eq!(spec, MonitorSpec::Restriction(r));
            assert_eq!(spec.to_string(), r.name());
        }
        let lim: MonitorSpec = "Lim(0,1)".parse().unwrap();
        assert_eq!(
            lim,
            MonitorSpec::Lim {
                a: Anomalies::Exactly(0),
                b: Vacillation::AtMost(1)
            }
        );
        assert_eq!(lim.to_string(), "Lim(0,1)");
        let starry: MonitorSpec = "lim(*,inf)".parse().unwrap();
        assert_eq!(starry.to_string(), "Lim(*,inf)");
        assert!("Lim(0,0)".parse::<MonitorSpec>().is_err());
        assert!("Frob".parse::<MonitorSpec>().is_err());

        let json = serde_json::to_string(&vec![
            lim.clone(),
            MonitorSpec::Restriction(Restriction::NU),
        ])
        .unwrap();
        assert_eq!(json, r#"["Lim(0,1)","NU"]"#);
        let back: Vec<MonitorSpec> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![lim, MonitorSpec::Restriction(Restriction::NU)]);
    }

    #[test]
    fn nu_reports_the_least_dip_with_pinned_json() {
        let space = Space::new();
        let tr = dip_trace(&space, 5);
        let v = check_restriction(Restriction::NU, &tr, EqOracle::Exact).unwrap();
        assert_eq!(v.witness(), Some((0, 2, 3)));
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(
            json,
            r#"{"monitor":"NU","outcome":"violation","r":0,"s":2,"t":3,"horizon":5}"#
        );
        let back: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        assert_eq!(v.render_line(), "NU: violation at (r,s,t)=(0,2,3)");
    }

    #[test]
    fn the_dip_splits_the_restrictions_as_expected() {
        let space = Space::new();
        let tr = dip_trace(&space, 50);
        let wmon = check_restriction(Restriction::WMon, &tr, EqOracle::Exact).unwrap();
        assert!(wmon.is_pass());
        assert_eq!(
            serde_json::to_string(&wmon).unwrap(),
            r#"{"monitor":"WMon","outcome":"pass","horizon":50}"#
        );
        assert_eq!(wmon.render_line(), "WMon: no violation below horizon 50");

        let short = dip_trace(&space, 5);
        let pin = |name| {
            check_restriction(name, &short, EqOracle::Exact)
                .unwrap()
                .witness()
        };
        assert_eq!(pin(Restriction::Conv), Some((0, 0, 2)));
        assert_eq!(pin(Restriction::Cons), Some((2, 2, 2)));
        assert_eq!(pin(Restriction::Dec), Some((0, 2, 3)));
        assert_eq!(pin(Restriction::SDec), Some((0, 2, 3)));
        assert_eq!(pin(Restriction::SNU), Some((0, 2, 3)));
        // Climbing back down from the dip is itself incautious, and the
        // abandoned code recurs verbatim.
        assert_eq!(pin(Restriction::Caut), Some((2, 2, 3)));
        assert_eq!(pin(Restriction::SynDec), Some((0, 2, 3)));
    }

    #[test]
    fn consistent_learners_pass_cons_at_every_step() {
        let space = Space::new();
        let cof = run_trace(
            &cofinite_learner(&space),
            &Informant::canonical(LangDescriptor::cofinite([5u64])),
            30,
        );
        assert!(check_restriction(Restriction::Cons, &cof, EqOracle::Exact)
            .unwrap()
            .is_pass());
        let family = vec![
            LangDescriptor::finite([]),
            LangDescriptor::finite([0]),
            LangDescriptor::finite([0, 1]),
        ];
        let chain = run_trace(
            &enumeration_learner(&space, family),
            &Informant::canonical(LangDescriptor::finite([0, 1])),
            10,
        );
        assert!(check_restriction(Restriction::Cons, &chain, EqOracle::Exact)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn cautiousness_fails_when_the_cofinite_guess_shrinks() {
        let space = Space::new();
        let tr = run_trace(
            &cofinite_learner(&space),
            &Informant::canonical(LangDescriptor::cofinite([5u64])),
            10,
        );
        let caut = check_restriction(Restriction::Caut, &tr, EqOracle::Exact).unwrap();
        assert_eq!(caut.witness(), Some((0, 0, 6)));
        assert_eq!(caut.render_line(), "Caut: violation at (r,s,t)=(0,0,6)");
        // The shrink also breaks strong monotonicity at the same pair, but
        // the learner stays target-monotone, conservative, and consistent.
        let smon = check_restriction(Restriction::SMon, &tr, EqOracle::Exact).unwrap();
        assert_eq!(smon.witness(), Some((0, 0, 6)));
        for name in [
            Restriction::Mon,
            Restriction::WMon,
            Restriction::Conv,
            Restriction::Dec,
            Restriction::SDec,
            Restriction::NU,
            Restriction::SNU,
            Restriction::Cons,
        ] {
            let v = check_restriction(name, &tr, EqOracle::Exact).unwrap();
            assert!(v.is_pass(), "{name} should pass on the cofinite trace");
        }
    }

    #[test]
    fn monotonicity_violations_name_the_dropped_value() {
        let space = Space::new();
        let target = LangDescriptor::split([0, 1, 2, 3, 7]);
        let tr = run_trace(
            &split_family_learner(&space),
            &Informant::canonical(target),
            12,
        );
        let mon = check_restriction(Restriction::Mon, &tr, EqOracle::Exact).unwrap();
        assert_eq!(mon.witness(), Some((0, 0, 10)));
        assert_eq!(
            mon.detail.as_deref(),
            Some("positive value 14 was guessed at s=0 and dropped at t=10")
        );
        assert_eq!(
            mon.render_line(),
            "Mon: violation at (r,s,t)=(0,0,10) (positive value 14 was guessed at s=0 and dropped at t=10)"
        );
        // Split languages are pairwise incomparable, so dropping 14 is not a
        // cautiousness violation.
        assert!(check_restriction(Restriction::Caut, &tr, EqOracle::Exact)
            .unwrap()
            .is_pass());
    }

    #[test]
    fn strong_monotonicity_accepts_a_growing_enumeration() {
        let space = Space::new();
        let family = vec![
            LangDescriptor::finite([]),
            LangDescriptor::finite([0]),
            LangDescriptor::finite([0, 1]),
        ];
        let tr = run_trace(
            &enumeration_learner(&space, family),
            &Informant::canonical(LangDescriptor::finite([0, 1])),
            8,
        );
        for name in [
            Restriction::SMon,
            Restriction::Caut,
            Restriction::Dec,
            Restriction::Mon,
            Restriction::WMon,
        ] {
            let v = check_restriction(name, &tr, EqOracle::Exact).unwrap();
            assert!(v.is_pass(), "{name} should pass on the growing chain");
        }
    }

    #[test]
    fn strong_decisiveness_counts_padded_repeats_as_returns() {
        let space = Space::new();
        let evens = space.exact(LangDescriptor::Evens);
        let padded = space.pad(&evens, 1);
        assert_ne!(evens.code(), padded.code());
        let two = Trace::from_parts(
            Informant::canonical(LangDescriptor::Evens).prefix(2),
            vec![evens.clone(), padded.clone()],
            Some(LangDescriptor::Evens),
        );
        // Same extension under a fresh code: the semantic sequence never
        // moves, the syntactic one does.
        let sdec = check_restriction(Restriction::SDec, &two, EqOracle::Exact).unwrap();
        assert_eq!(sdec.witness(), Some((0, 1, 1)));
        let snu = check_restriction(Restriction::SNU, &two, EqOracle::Exact).unwrap();
        assert_eq!(snu.witness(), Some((0, 1, 1)));
        assert!(check_restriction(Restriction::Dec, &two, EqOracle::Exact)
            .unwrap()
            .is_pass());
        assert!(check_restriction(Restriction::SynDec, &two, EqOracle::Exact)
            .unwrap()
            .is_pass());
        // A genuine syntactic return is what SynDec rejects.
        let three = Trace::from_parts(
            Informant::canonical(LangDescriptor::Evens).prefix(3),
            vec![evens.clone(), padded, evens],
            Some(LangDescriptor::Evens),
        );
        let syn = check_restriction(Restriction::SynDec, &three, EqOracle::Exact).unwrap();
        assert_eq!(syn.witness(), Some((0, 1, 2)));
    }

    #[test]
    fn lim_settles_at_the_first_accurate_suffix() {
        let space = Space::new();
        let tr = exact_trace(
            &space,
            LangDescriptor::Evens,
            vec![
                LangDescriptor::EvensPlusOne,
                LangDescriptor::EvensPlusOne,
                LangDescriptor::Evens,
                LangDescriptor::Evens,
                LangDescriptor::Evens,
            ],
        );
        let v = check_lim(&tr, Anomalies::Exactly(0), Vacillation::AtMost(1), 50).unwrap();
        assert!(v.is_pass());
        assert_eq!(v.monitor, "Lim(0,1)");
        assert_eq!(v.detail.as_deref(), Some("t0=2"));
        assert_eq!(v.render_line(), "Lim(0,1): no violation below horizon 5 (t0=2)");
        assert!(v.caveats.is_empty());
    }

    #[test]
    fn lim_blames_vacillation_only_when_accuracy_holds() {
        let space = Space::new();
        // Alternate between the target and a one-point enlargement of it, so
        // every guess is within one anomaly but two codes recur forever.
        let near = LangDescriptor::Evens.with_exception(1);
        let alternating_near = exact_trace(
            &space,
            LangDescriptor::Evens,
            vec![
                LangDescriptor::Evens,
                near.clone(),
                LangDescriptor::Evens,
                near.clone(),
                LangDescriptor::Evens,
                near,
            ],
        );

        // With no anomaly budget the alternation never settles: every suffix
        // ends in the off guess.
        let v1 = check_lim(
            &alternating_near,
            Anomalies::Exactly(0),
            Vacillation::AtMost(1),
            50,
        )
        .unwrap();
        assert!(!v1.is_pass());
        assert_eq!(
            v1.detail.as_deref(),
            Some("no settling index below the horizon satisfies both clauses")
        );
        // Tolerating one anomaly, b=1 settles only at the singleton tail...
        let v2 = check_lim(
            &alternating_near,
            Anomalies::Exactly(1),
            Vacillation::AtMost(1),
            50,
        )
        .unwrap();
        assert!(v2.is_pass());
        assert_eq!(v2.detail.as_deref(), Some("t0=5"));
        // ...while b=2 admits the whole alternation from the start.
        let v3 = check_lim(
            &alternating_near,
            Anomalies::Exactly(1),
            Vacillation::AtMost(2),
            50,
        )
        .unwrap();
        assert!(v3.is_pass());
        assert_eq!(v3.detail.as_deref(), Some("t0=0"));
        let v4 = check_lim(
            &alternating_near,
            Anomalies::Exactly(1),
            Vacillation::Unbounded,
            50,
        )
        .unwrap();
        assert!(v4.is_pass());
        assert!(v4.caveats.is_empty());
        let v5 = check_lim(
            &alternating_near,
            Anomalies::Exactly(1),
            Vacillation::Finite,
            50,
        )
        .unwrap();
        assert!(v5.is_pass());
        assert!(v5.caveats.iter().any(|c| c.contains("finite-horizon-trivial")));
    }

    #[test]
    fn lim_anomaly_star_separates_finite_from_infinite_error() {
        let space = Space::new();
        let way_off = exact_trace(
            &space,
            LangDescriptor::Evens,
            vec![LangDescriptor::cofinite([]); 4],
        );
        let v = check_lim(&way_off, Anomalies::Finite, Vacillation::AtMost(1), 50).unwrap();
        assert!(!v.is_pass());
        assert!(v.caveats.iter().any(|c| c.starts_with("a=*")));

        let near = exact_trace(
            &space,
            LangDescriptor::Evens,
            vec![LangDescriptor::Evens.with_exception(1); 4],
        );
        let v2 = check_lim(&near, Anomalies::Finite, Vacillation::AtMost(1), 50).unwrap();
        assert!(v2.is_pass());
        assert_eq!(v2.detail.as_deref(), Some("t0=0"));
    }

    #[test]
    fn lim_passes_survive_shrinking_bounds() {
        let space = Space::new();
        let m = enumeration_learner_lifted(
            &space,
            vec![LangDescriptor::finite([0]), LangDescriptor::Evens],
        );
        let tr = run_trace(&m, &Informant::canonical(LangDescriptor::Evens), 12);
        for bound in [200, 120, 60, 24] {
            let v = check_lim(&tr, Anomalies::Exactly(0), Vacillation::AtMost(1), bound).unwrap();
            assert!(v.is_pass(), "bound {bound} should not flip the verdict");
            assert_eq!(v.detail.as_deref(), Some("t0=3"));
        }
    }

    #[test]
    fn empty_traces_pass_every_monitor() {
        let empty = Trace::from_parts(Prefix::empty(), Vec::new(), Some(LangDescriptor::Evens));
        for name in Restriction::ALL {
            let v = check_restriction(name, &empty, EqOracle::Exact).unwrap();
            assert!(v.is_pass());
            assert_eq!(v.horizon, 0);
        }
        let lim = check_lim(&empty, Anomalies::Exactly(0), Vacillation::AtMost(1), 10).unwrap();
        assert!(lim.is_pass());
        assert_eq!(lim.detail.as_deref(), Some("t0=0"));
    }

    #[test]
    fn target_monitors_demand_a_target() {
        let space = Space::new();
        let mut tr = dip_trace(&space, 4);
        tr.set_target(None);
        for name in [Restriction::Mon, Restriction::NU, Restriction::SNU] {
            assert!(matches!(
                check_restriction(name, &tr, EqOracle::Exact),
                Err(MonitorError::TargetRequired { .. })
            ));
        }
        assert!(matches!(
            check_lim(&tr, Anomalies::Exactly(0), Vacillation::AtMost(1), 10),
            Err(MonitorError::TargetRequired { .. })
        ));
    }

    #[test]
    fn delay_clauses_hold_and_consistency_breaks_only_delayed() {
        let space = Space::new();
        let m = split_level_learner(&space, 2);
        let doubled = Informant::scheduled(
            LangDescriptor::Evens,
            Schedule::Duplicate { factor: 2 },
        )
        .unwrap();
        let prime = Informant::canonical(LangDescriptor::Evens);
        let rule = SimulatingFunction::FloorDiv { divisor: 2 };
        let sim = delay_simulate(&m, &doubled, Some(&prime), &rule, 12).unwrap();

        let clauses = check_delayable(&sim.base, &sim.delayed, &rule).unwrap();
        assert!(clauses.is_pass());
        assert_eq!(clauses.monitor, "Delayable[t/2]");

        assert!(check_restriction(Restriction::Cons, &sim.base, EqOracle::Exact)
            .unwrap()
            .is_pass());
        let broken = check_restriction(Restriction::Cons, &sim.delayed, EqOracle::Exact).unwrap();
        assert_eq!(broken.witness(), Some((2, 2, 2)));
    }

    #[test]
    fn delay_checks_reject_lookahead() {
        let space = Space::new();
        let m = split_level_learner(&space, 2);
        let doubled = Informant::scheduled(
            LangDescriptor::Evens,
            Schedule::Duplicate { factor: 2 },
        )
        .unwrap();
        let prime = Informant::canonical(LangDescriptor::Evens);
        let base = run_trace(&m, &doubled, 16);
        // A fabricated record that claims to run ahead of its input fails the
        // containment clause at the very first step.
        let ahead = SimulatingFunction::Affine { slope: 1, intercept: 3 };
        let hyps = (0..4).map(|t| base.hyp(ahead.apply(t)).clone()).collect();
        let fake = Trace::from_parts(prime.prefix(4), hyps, Some(LangDescriptor::Evens));
        let v = check_delayable(&base, &fake, &ahead).unwrap();
        assert!(!v.is_pass());
        assert_eq!(v.t, Some(0));
        assert!(v.detail.unwrap().contains("pos"));
        // And a delayed record shorter than the rule demands is an error, not
        // a verdict.
        let too_short = run_trace(&m, &doubled, 2);
        assert!(matches!(
            check_delayable(&too_short, &fake, &ahead),
            Err(MonitorError::BaseTraceTooShort { t: 0, needed: 4, have: 2 })
        ));
    }

    #[test]
    fn locking_falsifier_matches_an_exhaustive_oracle() {
        let space = Space::new();
        let seed = Prefix::from_pairs(&[(0, 1)]).unwrap();

        // A single-language enumerator never moves on consistent data.
        let single = enumeration_learner(&space, vec![LangDescriptor::Evens]);
        assert_eq!(
            locking_falsifier(&single, &LangDescriptor::Evens, &seed, 2, 4).unwrap(),
            LockVerdict::LockedUpTo { depth: 2, bound: 4 }
        );

        // The dip learner moves as soon as it sees the first odd non-member.
        let dip = evens_wmon_learner(&space);
        assert_eq!(
            locking_falsifier(&dip, &LangDescriptor::Evens, &seed, 1, 3).unwrap(),
            LockVerdict::CounterexampleExtension { tau: vec![InfoPair::ng(1)] }
        );

        // The cofinite learner is locked once its exception is on the tape.
        let cof = cofinite_learner(&space);
        let cof_seed = Prefix::from_pairs(&[(2, 0)]).unwrap();
        assert_eq!(
            locking_falsifier(&cof, &LangDescriptor::cofinite([2u64]), &cof_seed, 3, 5).unwrap(),
            LockVerdict::LockedUpTo { depth: 3, bound: 5 }
        );

        // An inconsistent seed is refused up front.
        let bad = Prefix::from_pairs(&[(1, 1)]).unwrap();
        assert!(matches!(
            locking_falsifier(&dip, &LangDescriptor::Evens, &bad, 1, 2),
            Err(MonitorError::InconsistentSeed { value: 1 })
        ));

        // Cross-check the search order against a naive recursive enumeration.
        fn all_tuples(len: usize, bound: u64) -> Vec<Vec<u64>> {
            if len == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for shorter in all_tuples(len - 1, bound) {
                for v in 0..bound {
                    let mut tuple = shorter.clone();
                    tuple.push(v);
                    out.push(tuple);
                }
            }
            out
        }
        let oracle = |m: &Learner, lang: &LangDescriptor, depth: usize, bound: u64| {
            let base = m.guess(&seed).code();
            for len in 1..=depth {
                for tuple in all_tuples(len, bound) {
                    let mut ext = seed.clone();
                    for &v in &tuple {
                        ext.push(InfoPair::new(v, lang.member(v))).unwrap();
                    }
                    if m.guess(&ext).code() != base {
                        let tau: Vec<InfoPair> = tuple
                            .iter()
                            .map(|&v| InfoPair::new(v, lang.member(v)))
                            .collect();
                        return LockVerdict::CounterexampleExtension { tau };
                    }
                }
            }
            LockVerdict::LockedUpTo { depth, bound }
        };
        for (learner, lang) in [
            (&single, LangDescriptor::Evens),
            (&dip, LangDescriptor::Evens),
        ] {
            assert_eq!(
                locking_falsifier(learner, &lang, &seed, 2, 3).unwrap(),
                oracle(learner, &lang, 2, 3)
            );
        }
        // The lock verdict serializes with its searched bounds.
        let locked = locking_falsifier(&single, &LangDescriptor::Evens, &seed, 2, 4).unwrap();
        assert_eq!(
            serde_json::to_string(&locked).unwrap(),
            r#"{"outcome":"lockedUpTo","depth":2,"bound":4}"#
        );
    }

    #[test]
    fn exact_oracle_refusals_fall_back_with_a_flag() {
        let space = Space::new();
        let m = enumeration_learner_lifted(
            &space,
            vec![LangDescriptor::finite([0]), LangDescriptor::Evens],
        );
        let tr = run_trace(&m, &Informant::canonical(LangDescriptor::Evens), 8);
        assert!(matches!(
            check_restriction(Restriction::Dec, &tr, EqOracle::Exact),
            Err(MonitorError::OracleUnavailable { .. })
        ));
        let v = check_restriction_auto(Restriction::Dec, &tr, 100).unwrap();
        assert!(v.is_pass());
        assert_eq!(v.caveats.len(), 1);
        assert!(v.render_line().contains("exact algebra unavailable"));

        // Exact traces never pick up the caveat through the auto oracle.
        let exact = dip_trace(&space, 5);
        let nu = check_restriction_auto(Restriction::NU, &exact, 100).unwrap();
        assert_eq!(nu.witness(), Some((0, 2, 3)));
        assert!(nu.caveats.is_empty());
    }

    #[test]
    fn exact_and_horizon_oracles_agree_on_symbolic_traces() {
        let space = Space::new();
        let cases = vec![
            dip_trace(&space, 12),
            run_trace(
                &cofinite_learner(&space),
                &Informant::canonical(LangDescriptor::cofinite([5u64])),
                10,
            ),
            run_trace(
                &split_family_learner(&space),
                &Informant::canonical(LangDescriptor::split([0, 1, 2, 3, 7])),
                12,
            ),
            run_trace(
                &enumeration_learner(
                    &space,
                    vec![
                        LangDescriptor::finite([]),
                        LangDescriptor::finite([0]),
                        LangDescriptor::finite([0, 1]),
                    ],
                ),
                &Informant::canonical(LangDescriptor::finite([0, 1])),
                8,
            ),
        ];
        for tr in &cases {
            for name in Restriction::ALL {
                let exact = check_restriction(name, tr, EqOracle::Exact).unwrap();
                let windowed =
                    check_restriction(name, tr, EqOracle::Horizon { bound: 64 }).unwrap();
                assert_eq!(exact, windowed, "{name} diverged between oracles");
            }
        }
    }

    #[test]
    fn exact_violations_replay_by_direct_membership() {
        let space = Space::new();
        let window = 256u64;

        // NU (0,2,3) on the dip: ends points 0 and 3 denote the target, the
        // middle differs from them.
        let dip = dip_trace(&space, 5);
        let d = |t: usize| dip.hyp(t).descriptor().unwrap().clone();
        let target = LangDescriptor::Evens;
        assert!((0..window).all(|x| d(0).member(x) == target.member(x)));
        assert!((0..window).all(|x| d(3).member(x) == target.member(x)));
        assert!((0..window).any(|x| d(2).member(x) != d(0).member(x)));

        // Conv (0,0,2): the early guess is still consistent with I[2] yet the
        // code moved.
        assert!(dip.input_at(2).consistent_with(|x| d(0).member(x)));
        assert_ne!(dip.code(0), dip.code(2));

        // Cons (2,2,2): the step-2 guess contradicts I[2].
        assert!(!dip.input_at(2).consistent_with(|x| d(2).member(x)));

        // Caut (0,0,6) on the cofinite shrink: the later guess is a proper
        // subset of the earlier one.
        let cof = run_trace(
            &cofinite_learner(&space),
            &Informant::canonical(LangDescriptor::cofinite([5u64])),
            10,
        );
        let c = |t: usize| cof.hyp(t).descriptor().unwrap().clone();
        assert!((0..window).all(|x| !c(6).member(x) || c(0).member(x)));
        assert!((0..window).any(|x| c(0).member(x) && !c(6).member(x)));

        // Mon (0,0,10) on the split family: 14 is a target positive guessed
        // at 0 and dropped at 10.
        let split = run_trace(
            &split_family_learner(&space),
            &Informant::canonical(LangDescriptor::split([0, 1, 2, 3, 7])),
            12,
        );
        let target = LangDescriptor::split([0, 1, 2, 3, 7]);
        assert!(target.member(14));
        assert!(split.hyp(0).descriptor().unwrap().member(14));
        assert!(!split.hyp(10).descriptor().unwrap().member(14));
    }
}
