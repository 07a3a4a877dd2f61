//! The learner abstraction and the traces it produces.
//!
//! A [`Learner`] maps finite prefixes to hypotheses. Total learners answer on
//! every prefix; partial learners are step-costed and may report divergence
//! under a budget, which is what gives the totalizing transform real work to
//! do. Running a learner along an informant yields a [`Trace`]: the sequence
//! `h_t = M(I[t])` together with the consumed prefix, the object every
//! monitor judges.

use std::sync::Arc;

use crate::data::{InfoPair, Prefix};
use crate::descriptor::LangDescriptor;
use crate::hypothesis::Hypothesis;
use crate::informant::Informant;
use crate::registry::Code;

/// Outcome of querying a learner under a step budget.
#[derive(Clone, Debug)]
pub enum LearnerAnswer {
    Guess(Hypothesis),
    /// The computation was still running when the budget ran out.
    Diverge { cost: u64 },
}

impl LearnerAnswer {
    pub fn guess(self) -> Option<Hypothesis> {
        match self {
            LearnerAnswer::Guess(h) => Some(h),
            LearnerAnswer::Diverge { .. } => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Total,
    Partial,
}

/// An incremental cursor over a growing input: each push appends one datum
/// and returns the guess on the extended prefix, which must equal what the
/// owning learner answers on that prefix.
pub struct LearnerStream {
    push: Box<dyn FnMut(InfoPair) -> Hypothesis + Send>,
}

impl LearnerStream {
    pub fn new<F>(push: F) -> Self
    where
        F: FnMut(InfoPair) -> Hypothesis + Send + 'static,
    {
        LearnerStream { push: Box::new(push) }
    }

    pub fn push(&mut self, pair: InfoPair) -> Hypothesis {
        (self.push)(pair)
    }
}

/// A deterministic map from prefixes to hypotheses.
///
/// The closure receives the query budget; total learners ignore it. Partial
/// learners must be halt-stable: once a budget suffices for a `Guess`, every
/// larger budget returns the same guess.
#[derive(Clone)]
pub struct Learner {
    name: String,
    kind: Kind,
    step: Arc<dyn Fn(&Prefix, u64) -> LearnerAnswer + Send + Sync>,
    stream: Option<Arc<dyn Fn() -> LearnerStream + Send + Sync>>,
}

impl Learner {
    pub fn total<F>(name: impl Into<String>, step: F) -> Self
    where
        F: Fn(&Prefix) -> Hypothesis + Send + Sync + 'static,
    {
        Learner {
            name: name.into(),
            kind: Kind::Total,
            step: Arc::new(move |sigma, _| LearnerAnswer::Guess(step(sigma))),
            stream: None,
        }
    }

    pub fn partial<F>(name: impl Into<String>, step: F) -> Self
    where
        F: Fn(&Prefix, u64) -> LearnerAnswer + Send + Sync + 'static,
    {
        Learner {
            name: name.into(),
            kind: Kind::Partial,
            step: Arc::new(step),
            stream: None,
        }
    }

    /// Declares an incremental cursor implementation. Each cursor from the
    /// factory must answer pushes exactly like [`Learner::guess`] on the
    /// prefix consumed so far.
    pub fn with_stream<F>(mut self, factory: F) -> Self
    where
        F: Fn() -> LearnerStream + Send + Sync + 'static,
    {
        self.stream = Some(Arc::new(factory));
        self
    }

    /// A fresh incremental cursor, where the implementation offers one.
    pub fn open_stream(&self) -> Option<LearnerStream> {
        self.stream.as_ref().map(|f| f())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_total(&self) -> bool {
        self.kind == Kind::Total
    }

    /// The learner's answer, assuming it halts. Panics if a partial learner
    /// diverges even under an unlimited budget; call sites that can handle
    /// divergence use [`Learner::eval_with_budget`].
    pub fn guess(&self, sigma: &Prefix) -> Hypothesis {
        match (self.step)(sigma, u64::MAX) {
            LearnerAnswer::Guess(h) => h,
            LearnerAnswer::Diverge { .. } => {
                panic!("learner {:?} diverged on a prefix of length {}", self.name, sigma.len())
            }
        }
    }

    pub fn eval_with_budget(&self, sigma: &Prefix, budget: u64) -> LearnerAnswer {
        (self.step)(sigma, budget)
    }
}

impl std::fmt::Debug for Learner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Learner")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

/// Where a budgeted run stopped because the learner was still computing.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DivergePoint {
    /// The step whose hypothesis never arrived.
    pub t: usize,
    /// Steps spent before the budget ran out.
    pub cost: u64,
}

/// The learning sequence `h_t = M(I[t])` for `t < T`, with the informant
/// prefix `I[T]` that drove it.
#[derive(Clone, Debug)]
pub struct Trace {
    prefix: Prefix,
    hyps: Vec<Hypothesis>,
    target: Option<LangDescriptor>,
    diverged_at: Option<DivergePoint>,
}

impl Trace {
    /// Assembles a trace from recorded parts, e.g. when loading from disk.
    pub fn from_parts(
        prefix: Prefix,
        hyps: Vec<Hypothesis>,
        target: Option<LangDescriptor>,
    ) -> Self {
        assert_eq!(prefix.len(), hyps.len(), "one datum per hypothesis");
        Trace {
            prefix,
            hyps,
            target,
            diverged_at: None,
        }
    }

    /// Number of recorded hypotheses.
    pub fn len(&self) -> usize {
        self.hyps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyps.is_empty()
    }

    pub fn hyp(&self, t: usize) -> &Hypothesis {
        &self.hyps[t]
    }

    pub fn hyps(&self) -> &[Hypothesis] {
        &self.hyps
    }

    pub fn code(&self, t: usize) -> Code {
        self.hyps[t].code()
    }

    pub fn codes(&self) -> Vec<Code> {
        self.hyps.iter().map(Hypothesis::code).collect()
    }

    /// The full consumed prefix `I[T]`.
    pub fn prefix(&self) -> &Prefix {
        &self.prefix
    }

    /// The input `I[t]` that produced `h_t`.
    pub fn input_at(&self, t: usize) -> Prefix {
        self.prefix.take(t)
    }

    pub fn target(&self) -> Option<&LangDescriptor> {
        self.target.as_ref()
    }

    pub fn set_target(&mut self, target: Option<LangDescriptor>) {
        self.target = target;
    }

    pub fn diverged_at(&self) -> Option<DivergePoint> {
        self.diverged_at
    }
}

/// Runs a total learner along an informant: `h_t = M(I[t])` for `t < horizon`.
pub fn run_trace(m: &Learner, informant: &Informant, horizon: usize) -> Trace {
    let mut prefix = Prefix::empty();
    let mut hyps = Vec::with_capacity(horizon);
    for t in 0..horizon {
        hyps.push(m.guess(&prefix));
        prefix
            .push(informant.pair_at(t as u64))
            .expect("informants never contradict themselves");
    }
    Trace {
        prefix,
        hyps,
        target: Some(informant.target.clone()),
        diverged_at: None,
    }
}

/// Runs a possibly partial learner under a per-step budget. If the learner is
/// still computing at some step, the trace is truncated there and carries the
/// divergence marker.
pub fn run_trace_budgeted(
    m: &Learner,
    informant: &Informant,
    horizon: usize,
    budget: impl Fn(usize) -> u64,
) -> Trace {
    let mut prefix = Prefix::empty();
    let mut hyps = Vec::new();
    let mut diverged_at = None;
    for t in 0..horizon {
        match m.eval_with_budget(&prefix, budget(t)) {
            LearnerAnswer::Guess(h) => hyps.push(h),
            LearnerAnswer::Diverge { cost } => {
                diverged_at = Some(DivergePoint { t, cost });
                break;
            }
        }
        prefix
            .push(informant.pair_at(t as u64))
            .expect("informants never contradict themselves");
    }
    Trace {
        prefix,
        hyps,
        target: Some(informant.target.clone()),
        diverged_at,
    }
}
