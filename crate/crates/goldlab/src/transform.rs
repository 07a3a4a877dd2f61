//! Learner-to-learner constructions: set-driven wrapping, totalization,
//! padding for syntactic decisiveness, the conservative + strongly decisive
//! rewrite, delay simulation, and vacillation collapse.
//!
//! Every construction takes a learner and produces a learner; none looks
//! ahead of the prefix it is handed, so all internal step budgets derive
//! from `|σ|` alone.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{InfoPair, Prefix};
use crate::hypothesis::{Enumerator, Hypothesis, Space};
use crate::informant::Informant;
use crate::learner::{run_trace, Learner, LearnerAnswer, LearnerStream, Trace};
use crate::registry::Code;

#[derive(Debug, Error)]
pub enum TransformError {
    /// The simulating-function rule has a zero slope or divisor and would
    /// not be unbounded (or even well defined).
    #[error("simulating function needs {field} >= 1")]
    DegenerateSimulatingFunction { field: &'static str },
    /// Totalization needs a first answer to fall back on.
    #[error("totalization requires the learner to halt on the empty prefix")]
    DivergentOnEmpty,
    /// The fast informant is missing data the simulated learner consumed.
    #[error("delay contract violated at step {t}: simulated input is not contained in the fast prefix")]
    DelayContractViolation { t: usize },
}

/// A closed-form simulating function `𝔰: time → time`. All three rule forms
/// are non-decreasing, and they are unbounded whenever [`validate`] accepts
/// them, so admissibility is a static check.
///
/// [`validate`]: SimulatingFunction::validate
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "camelCase")]
pub enum SimulatingFunction {
    /// `𝔰(t) = slope·t + intercept` with `slope ≥ 1`.
    Affine { slope: u64, intercept: u64 },
    /// `𝔰(t) = ⌊t/divisor⌋` with `divisor ≥ 1`.
    FloorDiv { divisor: u64 },
    /// `𝔰(t) = max(0, t − delay)`.
    Staircase { delay: u64 },
}

impl fmt::Display for SimulatingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SimulatingFunction::Affine { slope, intercept } => {
                write!(f, "{slope}t+{intercept}")
            }
            SimulatingFunction::FloorDiv { divisor } => write!(f, "t/{divisor}"),
            SimulatingFunction::Staircase { delay } => write!(f, "t-{delay}"),
        }
    }
}

impl SimulatingFunction {
    pub fn validate(&self) -> Result<(), TransformError> {
        match self {
            SimulatingFunction::Affine { slope: 0, .. } => {
                Err(TransformError::DegenerateSimulatingFunction { field: "slope" })
            }
            SimulatingFunction::FloorDiv { divisor: 0 } => {
                Err(TransformError::DegenerateSimulatingFunction { field: "divisor" })
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, t: usize) -> usize {
        let t = t as u64;
        let out = match *self {
            SimulatingFunction::Affine { slope, intercept } => {
                t.saturating_mul(slope).saturating_add(intercept)
            }
            SimulatingFunction::FloorDiv { divisor } => t / divisor.max(1),
            SimulatingFunction::Staircase { delay } => t.saturating_sub(delay),
        };
        out as usize
    }
}

/// `M'(σ) = M(Σ(σ))`: the learner sees only the determined canonical
/// rearrangement of its input, so its output depends on `(pos(σ), ng(σ))`
/// alone.
pub fn set_driven_wrap(m: &Learner) -> Learner {
    assert!(m.is_total(), "set-driven wrapping expects a total learner");
    let inner = m.clone();
    Learner::total(format!("setDriven({})", m.name()), move |sigma| {
        inner.guess(&sigma.sigma_canonical())
    })
}

/// Charges `cost(σ)` steps for each answer, turning a total learner into a
/// partial one that diverges whenever the budget is smaller.
pub fn with_step_cost<F>(m: &Learner, cost: F) -> Learner
where
    F: Fn(&Prefix) -> u64 + Send + Sync + 'static,
{
    let inner = m.clone();
    Learner::partial(format!("costed({})", m.name()), move |sigma, budget| {
        let c = cost(sigma);
        if c > budget {
            LearnerAnswer::Diverge { cost: c }
        } else {
            LearnerAnswer::Guess(inner.guess(sigma))
        }
    })
}

/// Totalization: `M'(σ) = M(σ[s])` for the largest `s ≤ |σ|` whose
/// evaluation halts within `|σ|` steps. When not even `σ[0]` is affordable,
/// the answer on the empty prefix (whose termination is checked once, at
/// wrap time) fills in.
pub fn totalize(m: &Learner) -> Result<Learner, TransformError> {
    let on_empty = match m.eval_with_budget(&Prefix::empty(), u64::MAX) {
        LearnerAnswer::Guess(h) => h,
        LearnerAnswer::Diverge { .. } => return Err(TransformError::DivergentOnEmpty),
    };
    let inner = m.clone();
    Ok(Learner::total(
        format!("totalize({})", m.name()),
        move |sigma| {
            let budget = sigma.len() as u64;
            (0..=sigma.len())
                .rev()
                .find_map(|s| inner.eval_with_budget(&sigma.take(s), budget).guess())
                .unwrap_or_else(|| on_empty.clone())
        },
    ))
}

/// One memoized prefix: the wrapped learner's answer there and the padded
/// answer derived from it.
struct PadNode {
    raw: Hypothesis,
    out: Hypothesis,
}

/// Prefix trie over decided inputs, so a lookup hashes one pair per step
/// instead of the whole prefix at every length.
struct PadMemo {
    /// Child of node `n` under datum `p`, as `(n, p) → child`.
    children: HashMap<(usize, InfoPair), usize>,
    /// Node 0 is the empty prefix.
    nodes: Vec<PadNode>,
}

impl PadMemo {
    fn ensure_root(&mut self, inner: &Learner, space: &Space) {
        if self.nodes.is_empty() {
            let raw = inner.guess(&Prefix::empty());
            let out = space.pad(&raw, 0);
            self.nodes.push(PadNode { raw, out });
        }
    }

    /// Decides the child of `node` under `pair`; `pfx` is the node's prefix
    /// extended by exactly that pair.
    fn extend(
        &mut self,
        inner: &Learner,
        space: &Space,
        node: usize,
        pair: InfoPair,
        pfx: &Prefix,
    ) -> usize {
        let raw = inner.guess(pfx);
        let out = if raw.code() == self.nodes[node].raw.code() {
            self.nodes[node].out.clone()
        } else {
            space.pad(&raw, pfx.len() as u64)
        };
        let child = self.nodes.len();
        self.nodes.push(PadNode { raw, out });
        self.children.insert((node, pair), child);
        child
    }
}

/// Pads every mind change with the current length: `M'(σ) = pad(M(σ), |σ|)`
/// when `|σ| = 0` or `M(σ⁻) ≠ M(σ)`, else `M'(σ⁻)`. Lengths strictly grow
/// along a run, so an abandoned code can never recur.
pub fn syn_dec_pad(space: &Space, m: &Learner) -> Learner {
    assert!(m.is_total(), "padding expects a total learner");
    let memo = Arc::new(Mutex::new(PadMemo {
        children: HashMap::new(),
        nodes: Vec::new(),
    }));
    let inner = m.clone();
    let space = space.clone();
    let (g_memo, g_inner, g_space) = (Arc::clone(&memo), inner.clone(), space.clone());
    Learner::total(format!("synDecPad({})", m.name()), move |sigma| {
        let mut memo = g_memo.lock().expect("padding memo lock");
        memo.ensure_root(&g_inner, &g_space);
        let mut node = 0;
        for (i, &pair) in sigma.items().iter().enumerate() {
            node = match memo.children.get(&(node, pair)) {
                Some(&child) => child,
                None => memo.extend(&g_inner, &g_space, node, pair, &sigma.take(i + 1)),
            };
        }
        memo.nodes[node].out.clone()
    })
    .with_stream(move || {
        let memo = Arc::clone(&memo);
        let (inner, space) = (inner.clone(), space.clone());
        let mut pfx = Prefix::empty();
        let mut node = 0;
        LearnerStream::new(move |pair| {
            let mut memo = memo.lock().expect("padding memo lock");
            memo.ensure_root(&inner, &space);
            pfx.push(pair).expect("cursor inputs never relabel a value");
            node = match memo.children.get(&(node, pair)) {
                Some(&child) => child,
                None => memo.extend(&inner, &space, node, pair, &pfx),
            };
            memo.nodes[node].out.clone()
        })
    })
}

/// One finite-approximation chain `A^0, A^1, …` for a decided prefix. The
/// chain only ever grows, so the recorded deltas reconstruct any earlier
/// stage.
struct Chain {
    ng: BTreeSet<u64>,
    /// Latched once a negative datum lands in `cur`; `cur` only grows, so
    /// the disjointness test never flips back.
    ng_hit: bool,
    sigma_len: usize,
    base: Hypothesis,
    cur_t: u64,
    cur: BTreeSet<u64>,
    deltas: Vec<(u64, Vec<u64>)>,
    /// Sorted view of the base enumeration, grown stage by stage on the
    /// exact path where `W^r = {x < r : member(x)}`.
    window: Vec<u64>,
    window_to: u64,
    /// `window \ cur`, kept in sync so a step only touches what changed
    /// (exact path only).
    missing: BTreeSet<u64>,
    /// `|cur \ window|`; the growth case needs the window to cover `cur`,
    /// i.e. this to be zero (exact path only).
    stray: usize,
    /// Number of window prefixes whose stage test has run; tape answers
    /// never change, so each length is tested once (exact path only).
    tested_to: usize,
    /// Largest tested prefix length whose stage test re-answered the base
    /// code (exact path only).
    best_k: Option<usize>,
}

impl Chain {
    fn new(sigma: &Prefix, base: Hypothesis) -> Self {
        let pos = sigma.pos().clone();
        Chain {
            ng: sigma.ng().clone(),
            ng_hit: !sigma.ng().is_disjoint(&pos),
            sigma_len: sigma.len(),
            base,
            cur_t: 0,
            stray: pos.len(),
            cur: pos.clone(),
            deltas: vec![(0, pos.into_iter().collect())],
            window: Vec::new(),
            window_to: 0,
            missing: BTreeSet::new(),
            tested_to: 0,
            best_k: None,
        }
    }

    /// `{x < u : member(x)}` for a descriptor-backed base, reused across
    /// stages.
    fn grow_window(&mut self, u: u64) {
        let d = self.base.descriptor().expect("exact path only");
        while self.window_to < u {
            let x = self.window_to;
            if d.member(x) {
                self.window.push(x);
                if self.cur.contains(&x) {
                    self.stray -= 1;
                } else {
                    self.missing.insert(x);
                }
            }
            self.window_to += 1;
        }
    }

    /// `A^t` for any already-computed stage `t ≤ cur_t`.
    fn set_at(&self, t: u64) -> BTreeSet<u64> {
        debug_assert!(t <= self.cur_t, "chain must be advanced before reading");
        if t >= self.cur_t {
            return self.cur.clone();
        }
        self.deltas
            .iter()
            .take_while(|(u, _)| *u <= t)
            .flat_map(|(_, adds)| adds.iter().copied())
            .collect()
    }
}

/// Guesses of the wrapped learner along the canonical arrangement of a
/// hypothesis' enumeration, grown on demand: `codes[k] = M(W[k])` where
/// `W[k]` labels each value below `k` by membership.
struct Tape {
    canon: Prefix,
    codes: Vec<Code>,
    /// Incremental cursor on the wrapped learner, where it offers one;
    /// growing a long tape through it skips re-reading the whole prefix.
    cursor: Option<LearnerStream>,
}

/// One decided prefix: the emitted hypothesis together with the prefix that
/// minted it and the wrapped learner's answer there.
#[derive(Clone)]
struct Decision {
    hyp: Hypothesis,
    birth: Vec<InfoPair>,
    birth_base: Hypothesis,
}

/// Shared chain/tape store for one conservative rewrite. Minted hypotheses
/// hold this (never the decision memo), so nothing here points back at a
/// minted hypothesis and the whole graph frees when the traces drop.
struct ChainBank {
    space: Space,
    m: Learner,
    chains: HashMap<Vec<InfoPair>, Chain>,
    tapes: HashMap<Code, Tape>,
}

impl ChainBank {
    /// The wrapped learner's code on the canonical arrangement of `h`'s
    /// enumeration, truncated to `len` values.
    fn tape_code(&mut self, h: &Hypothesis, len: usize) -> Code {
        let ChainBank { m, tapes, .. } = self;
        let tape = tapes.entry(h.code()).or_insert_with(|| Tape {
            canon: Prefix::empty(),
            codes: vec![m.guess(&Prefix::empty()).code()],
            cursor: m.open_stream(),
        });
        while tape.codes.len() <= len {
            let v = tape.canon.len() as u64;
            let bit = match h.descriptor() {
                Some(d) => d.member(v),
                None => h
                    .member_horizon(v, v + 1)
                    .expect("chain base hypotheses are semantic"),
            };
            let pair = InfoPair::new(v, bit);
            tape.canon.push(pair).expect("each value is labeled once");
            let code = match &mut tape.cursor {
                Some(cursor) => cursor.push(pair).code(),
                None => m.guess(&tape.canon).code(),
            };
            tape.codes.push(code);
        }
        tape.codes[len]
    }

    /// `A^t` for the chain of `key`, advancing it as far as needed.
    fn chain_set(&mut self, key: &[InfoPair], t: u64) -> BTreeSet<u64> {
        let mut chain = self
            .chains
            .remove(key)
            .expect("every minted code has a chain");
        while chain.cur_t < t {
            self.step_chain(&mut chain);
        }
        let out = chain.set_at(t);
        self.chains.insert(key.to_vec(), chain);
        out
    }

    /// Computes `A^{u+1}` from `A^u` by the three-case rule: follow the full
    /// enumeration once a negative datum is inside, otherwise grow to the
    /// largest initial subset of some already-complete stage `W^r` (`r < u`)
    /// on which the wrapped learner re-answers the base code, otherwise
    /// stay.
    fn step_chain(&mut self, chain: &mut Chain) {
        let u = chain.cur_t;
        if chain.base.descriptor().is_some() {
            self.step_chain_exact(chain, u);
        } else {
            self.step_chain_general(chain, u);
        }
        chain.cur_t = u + 1;
    }

    /// Exact path: the window is positional (`W^r = {x < r : member(x)}`),
    /// so cover times are read off the largest element, each prefix length
    /// is stage-tested exactly once, and a step only handles the elements
    /// that actually change hands.
    fn step_chain_exact(&mut self, chain: &mut Chain, u: u64) {
        chain.grow_window(u);
        if !chain.ng_hit && !chain.ng.is_disjoint(&chain.cur) {
            chain.ng_hit = true;
        }
        let mut added: Vec<u64> = Vec::new();
        if chain.ng_hit {
            added = chain.missing.iter().copied().collect();
        } else {
            let floor = chain.sigma_len as u64;
            if u > floor {
                // Prefix lengths whose cover stage lies strictly below u.
                let hi = chain.window.partition_point(|&x| x + 1 < u);
                for k in chain.tested_to + 1..=hi {
                    let r = floor.max(chain.window[k - 1] + 1);
                    if self.tape_code(&chain.base, r as usize + 1) == chain.base.code() {
                        chain.best_k = Some(k);
                    }
                }
                chain.tested_to = chain.tested_to.max(hi);
            }
            if u >= floor && chain.stray == 0 {
                let lo = match chain.cur.iter().next_back() {
                    Some(&mx) => chain.window.partition_point(|&y| y <= mx),
                    None => 1,
                };
                let k_min = lo.max(chain.cur.len() + 1).max(1);
                if let Some(bk) = chain.best_k.filter(|&bk| bk >= k_min) {
                    added = chain
                        .missing
                        .range(..=chain.window[bk - 1])
                        .copied()
                        .collect();
                }
            }
        }
        if !added.is_empty() {
            for x in &added {
                chain.missing.remove(x);
            }
            chain.cur.extend(added.iter().copied());
            chain.deltas.push((u + 1, added));
        }
    }

    /// General path: enumerated bases have no positional window, so the
    /// stage view is rebuilt and cover times are found by bisection.
    fn step_chain_general(&mut self, chain: &mut Chain, u: u64) {
        let sorted: Vec<u64> = chain
            .base
            .enum_up_to(u)
            .expect("chain base hypotheses are semantic")
            .into_iter()
            .collect();
        let covers = |xs: &BTreeSet<u64>| xs.iter().all(|x| sorted.binary_search(x).is_ok());
        let mut added: Vec<u64> = Vec::new();
        if !chain.ng.is_disjoint(&chain.cur) {
            added = sorted
                .iter()
                .filter(|x| !chain.cur.contains(x))
                .copied()
                .collect();
        } else if u >= chain.sigma_len as u64 && covers(&chain.cur) {
            let lo = match chain.cur.iter().next_back() {
                Some(&mx) => sorted.partition_point(|&y| y <= mx),
                None => 1,
            };
            let k_min = lo.max(chain.cur.len() + 1).max(1);
            for k in (k_min..=sorted.len()).rev() {
                let candidate = &sorted[..k];
                let Some(r) = self.covering_stage(chain, candidate, u) else {
                    continue;
                };
                if self.tape_code(&chain.base, r as usize + 1) == chain.base.code() {
                    added = candidate
                        .iter()
                        .copied()
                        .filter(|x| !chain.cur.contains(x))
                        .collect();
                    break;
                }
            }
        }
        if !added.is_empty() {
            chain.cur.extend(added.iter().copied());
            chain.deltas.push((u + 1, added));
        }
    }

    /// `min { |σ| ≤ r < u : X ⊆ W^r }`, or None when no stage strictly
    /// below `u` covers the candidate.
    fn covering_stage(&self, chain: &Chain, candidate: &[u64], u: u64) -> Option<u64> {
        let floor = chain.sigma_len as u64;
        if floor >= u {
            return None;
        }
        let covered = |r: u64| {
            let wr = chain
                .base
                .enum_up_to(r)
                .expect("chain base hypotheses are semantic");
            candidate.iter().all(|x| wr.contains(x))
        };
        if !covered(u - 1) {
            return None;
        }
        // Bisect for the first covering stage.
        let (mut lo, mut good) = (floor, u - 1);
        while lo < good {
            let mid = lo + (good - lo) / 2;
            if covered(mid) {
                good = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(good)
    }

    fn mint(
        &mut self,
        pfx: &Prefix,
        cur: Hypothesis,
        bank: &Arc<Mutex<ChainBank>>,
    ) -> Decision {
        let birth = pfx.items().to_vec();
        if !self.chains.contains_key(&birth) {
            self.chains
                .insert(birth.clone(), Chain::new(pfx, cur.clone()));
        }
        let provenance = format!("conv({:?})", pfx.items());
        let origin = Arc::clone(bank);
        let key = birth.clone();
        // A growing chain trails its limit by the mint time plus one stage,
        // so twice the horizon leaves the whole second half as slack.
        let enumerator = Enumerator::from_set_fn(provenance.clone(), 2, move |t| {
            origin.lock().expect("chain bank lock").chain_set(&key, t)
        });
        let hyp = self.space.enumerated(&provenance, enumerator);
        Decision {
            hyp,
            birth,
            birth_base: cur,
        }
    }
}

fn decide_up_to(
    bank: &Arc<Mutex<ChainBank>>,
    memo: &mut HashMap<Vec<InfoPair>, Decision>,
    sigma: &Prefix,
) -> Hypothesis {
    // Decisions land in ascending prefix order, so the longest decided
    // prefix bounds everything already known.
    let start = (0..=sigma.len())
        .rev()
        .find(|&k| memo.contains_key(&sigma.items()[..k]))
        .map_or(0, |k| k + 1);
    for k in start..=sigma.len() {
        let pfx = sigma.take(k);
        let mut guard = bank.lock().expect("chain bank lock");
        let cur = guard.m.guess(&pfx);
        let decision = if k == 0 {
            guard.mint(&pfx, cur, bank)
        } else {
            let parent = memo[&sigma.items()[..k - 1]].clone();
            let fresh = parent.birth_base.code() != cur.code() && {
                let approx = guard.chain_set(&parent.birth, k as u64);
                !pfx.consistent_with(|x| approx.contains(&x))
            };
            if fresh {
                guard.mint(&pfx, cur, bank)
            } else {
                parent
            }
        };
        drop(guard);
        memo.insert(pfx.items().to_vec(), decision);
    }
    memo[sigma.items()].hyp.clone()
}

/// The conservative + strongly decisive rewrite. Each answer is a fresh
/// code `p(σ)` enumerating the finite-approximation chain `∪_t A^t_σ`; a new
/// code is minted exactly when the wrapped learner has changed its mind
/// since the current code's minting prefix and the input has become
/// inconsistent with the chain's current stage. Expects input already made
/// total and syntactically decisive.
pub fn conv_sdec_transform(space: &Space, m: &Learner) -> Learner {
    assert!(m.is_total(), "the conservative rewrite expects a total learner");
    let bank = Arc::new(Mutex::new(ChainBank {
        space: space.clone(),
        m: m.clone(),
        chains: HashMap::new(),
        tapes: HashMap::new(),
    }));
    let memo: Mutex<HashMap<Vec<InfoPair>, Decision>> = Mutex::new(HashMap::new());
    Learner::total(format!("convSDec({})", m.name()), move |sigma| {
        let mut memo = memo.lock().expect("decision memo lock");
        decide_up_to(&bank, &mut memo, sigma)
    })
}

/// A delayed run `h'_t = M(I[𝔰(t)])` against a (possibly faster) informant,
/// paired with the undelayed run for side-by-side judgment.
#[derive(Clone, Debug)]
pub struct DelaySimulation {
    pub base: Trace,
    pub delayed: Trace,
    pub informant_prime: Informant,
}

/// Simulates `M` with delay `𝔰` over `I`, presenting the delayed guesses as
/// a run on `faster` (default: `I` itself). Every step checks that the
/// simulated input is contained in what the presented informant has shown.
pub fn delay_simulate(
    m: &Learner,
    informant: &Informant,
    faster: Option<&Informant>,
    s: &SimulatingFunction,
    horizon: usize,
) -> Result<DelaySimulation, TransformError> {
    s.validate()?;
    let prime = faster.unwrap_or(informant).clone();
    let mut hyps = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let fast = prime.prefix(t);
        let slow = informant.prefix(s.apply(t));
        if !slow.pos().is_subset(fast.pos()) || !slow.ng().is_subset(fast.ng()) {
            return Err(TransformError::DelayContractViolation { t });
        }
        hyps.push(m.guess(&slow));
    }
    let delayed = Trace::from_parts(
        prime.prefix(horizon),
        hyps,
        Some(informant.target.clone()),
    );
    Ok(DelaySimulation {
        base: run_trace(m, informant, horizon),
        delayed,
        informant_prime: prime,
    })
}

/// Collapses vacillation by voting: every index guessed so far keeps a vote
/// unless it shows more than `a` commission errors against the current
/// negative data; the vote is the union of the survivors' guarded
/// extensions, coded by the surviving index set.
pub fn vacillation_collapse(space: &Space, m: &Learner, a: u64) -> Learner {
    assert!(m.is_total(), "vacillation collapse expects a total learner");
    let inner = m.clone();
    let space = space.clone();
    Learner::total(
        format!("collapse(a={a}, {})", m.name()),
        move |sigma| {
            let horizon = sigma.len() as u64;
            let mut kept = Vec::new();
            for i in 0..=sigma.len() {
                let h = inner.guess(&sigma.take(i));
                let visible = h
                    .enum_up_to(horizon)
                    .expect("vote hypotheses are semantic");
                let commission = visible.intersection(sigma.ng()).count() as u64;
                if commission <= a {
                    kept.push(
                        space
                            .guard_xi(sigma, &h)
                            .expect("vote hypotheses are semantic"),
                    );
                }
            }
            space
                .union_vote(&kept)
                .expect("guarded hypotheses are semantic")
        },
    )
}

/// Re-codes every answer by padding with `|σ| mod period`, leaving extensions
/// untouched. The result vacillates between `period` codes per limit guess: a
/// deliberate misbehaver for [`vacillation_collapse`] to straighten out.
pub fn pad_cycle(space: &Space, m: &Learner, period: u64) -> Learner {
    assert!(m.is_total(), "pad cycling expects a total learner");
    assert!(period >= 1, "pad cycling needs a positive period");
    let inner = m.clone();
    let space = space.clone();
    Learner::total(format!("padCycle({period}, {})", m.name()), move |sigma| {
        space.pad(&inner.guess(sigma), sigma.len() as u64 % period)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::LangDescriptor;
    use crate::learners::{cofinite_learner, detoured_cofinite_learner, enumeration_learner, enumeration_learner_lifted, evens_wmon_learner};

    fn pairs(items: &[(u64, bool)]) -> Prefix {
        Prefix::new(items.iter().map(|&(x, b)| InfoPair::new(x, b))).unwrap()
    }

    #[test]
    fn simulating_function_rules_apply_pointwise() {
        assert_eq!(SimulatingFunction::FloorDiv { divisor: 2 }.apply(5), 2);
        assert_eq!(SimulatingFunction::Staircase { delay: 3 }.apply(1), 0);
        assert_eq!(SimulatingFunction::Staircase { delay: 3 }.apply(10), 7);
        assert_eq!(
            SimulatingFunction::Affine {
                slope: 2,
                intercept: 1
            }
            .apply(3),
            7
        );
    }

    #[test]
    fn degenerate_simulating_functions_are_rejected() {
        assert!(matches!(
            SimulatingFunction::Affine {
                slope: 0,
                intercept: 9
            }
            .validate(),
            Err(TransformError::DegenerateSimulatingFunction { field: "slope" })
        ));
        assert!(matches!(
            SimulatingFunction::FloorDiv { divisor: 0 }.validate(),
            Err(TransformError::DegenerateSimulatingFunction { field: "divisor" })
        ));
        assert!(SimulatingFunction::Staircase { delay: 0 }.validate().is_ok());
    }

    #[test]
    fn simulating_functions_round_trip_through_json() {
        let s = SimulatingFunction::FloorDiv { divisor: 2 };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"rule":"floorDiv","divisor":2}"#);
        assert_eq!(serde_json::from_str::<SimulatingFunction>(&json).unwrap(), s);
    }

    #[test]
    fn set_driven_wrapping_reduces_to_the_determined_canonical_prefix() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let wrapped = set_driven_wrap(&m);
        // Value 0 is unlabeled, so the canonical rearrangement is empty.
        assert_eq!(
            wrapped.guess(&pairs(&[(3, true)])).code(),
            m.guess(&Prefix::empty()).code()
        );
        // Equal content in different orders lands on the same code.
        let a = pairs(&[(1, false), (0, true), (2, true)]);
        let b = pairs(&[(0, true), (2, true), (1, false)]);
        assert_eq!(wrapped.guess(&a).code(), wrapped.guess(&b).code());
        // Canonical prefixes are fixed points.
        let canon = pairs(&[(0, true), (1, false), (2, true)]);
        assert_eq!(wrapped.guess(&canon).code(), m.guess(&canon).code());
    }

    #[test]
    fn pad_cycling_vacillates_and_collapse_straightens_it() {
        let space = Space::new();
        let m = enumeration_learner(&space, vec![LangDescriptor::Evens]);
        let informant = Informant::canonical(LangDescriptor::Evens);
        let flip = pad_cycle(&space, &m, 2);
        let tr = run_trace(&flip, &informant, 6);
        // Two codes alternate by prefix parity; both spell the evens.
        assert_ne!(tr.code(0), tr.code(1));
        assert_eq!(tr.code(0), tr.code(2));
        assert_eq!(tr.code(1), tr.code(3));
        assert!(tr.hyps()[0].member_up_to(4, 64).unwrap());
        assert!(tr.hyps()[1].member_up_to(4, 64).unwrap());

        let collapsed = vacillation_collapse(&space, &flip, 0);
        let ct = run_trace(&collapsed, &informant, 6);
        // Once both padded codes have voted, the union code never moves.
        assert!(
            (1..ct.len() - 1).all(|t| ct.code(t) == ct.code(t + 1)),
            "collapse keeps vacillating: {:?}",
            (0..ct.len()).map(|t| ct.code(t)).collect::<Vec<_>>()
        );
        let last = &ct.hyps()[5];
        assert!(last.member_up_to(4, 64).unwrap());
        assert!(!last.member_up_to(3, 64).unwrap());
    }

    #[test]
    fn totalization_answers_from_the_largest_affordable_prefix() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let slow = with_step_cost(&m, |sigma| 2 * sigma.len() as u64);
        let total = totalize(&slow).unwrap();
        // Eight data points afford a budget of eight steps, which pays for
        // the length-four prefix only.
        let informant = Informant::canonical(LangDescriptor::cofinite([2, 6]));
        let sigma = informant.prefix(8);
        let expect = m.guess(&sigma.take(4));
        let got = total.guess(&sigma);
        assert_eq!(got.code(), expect.code());
        assert_ne!(got.code(), m.guess(&sigma).code());
        assert_eq!(
            total.guess(&Prefix::empty()).code(),
            m.guess(&Prefix::empty()).code()
        );
    }

    #[test]
    fn totalization_falls_back_to_the_empty_answer_when_nothing_is_affordable() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let slow = with_step_cost(&m, |_| 5);
        let total = totalize(&slow).unwrap();
        let informant = Informant::canonical(LangDescriptor::cofinite([1]));
        // Budget three cannot pay for any evaluation, not even the empty one.
        assert_eq!(
            total.guess(&informant.prefix(3)).code(),
            m.guess(&Prefix::empty()).code()
        );
        // Budget five pays for the full prefix again.
        assert_eq!(
            total.guess(&informant.prefix(5)).code(),
            m.guess(&informant.prefix(5)).code()
        );
    }

    #[test]
    fn totalization_rejects_learners_that_never_answer_on_empty() {
        let never = Learner::partial("never", |_, _| LearnerAnswer::Diverge { cost: u64::MAX });
        assert!(matches!(
            totalize(&never),
            Err(TransformError::DivergentOnEmpty)
        ));
    }

    #[test]
    fn totalization_is_pointwise_identity_on_cheap_total_learners() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let total = totalize(&m).unwrap();
        let informant = Informant::canonical(LangDescriptor::cofinite([2]));
        for t in 0..6 {
            let sigma = informant.prefix(t);
            assert_eq!(total.guess(&sigma).code(), m.guess(&sigma).code());
        }
    }

    #[test]
    fn padding_keeps_one_code_per_run_of_equal_answers() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let padded = syn_dec_pad(&space, &m);
        let informant = Informant::canonical(LangDescriptor::cofinite([]));
        let tr = run_trace(&padded, &informant, 5);
        let codes = tr.codes();
        assert!(codes.iter().all(|&c| c == codes[0]));
    }

    #[test]
    fn padding_mints_a_fresh_code_on_every_mind_change() {
        let space = Space::new();
        let m = detoured_cofinite_learner(&space);
        let padded = syn_dec_pad(&space, &m);
        // The detour makes the underlying answers go p, p, q, p, p, ...
        let informant = Informant::canonical(LangDescriptor::cofinite([7]));
        let tr = run_trace(&padded, &informant, 6);
        let codes = tr.codes();
        assert_eq!(codes[0], codes[1]);
        assert_ne!(codes[2], codes[0]);
        assert_ne!(codes[3], codes[0]);
        assert_ne!(codes[3], codes[2]);
        assert!(codes[3..].iter().all(|&c| c == codes[3]));
        // Extensions survive the padding even though the codes split.
        assert_eq!(
            tr.hyp(0).descriptor(),
            Some(&LangDescriptor::cofinite([]))
        );
        assert_eq!(
            tr.hyp(2).descriptor(),
            Some(&LangDescriptor::cofinite([19]))
        );
        assert_eq!(
            tr.hyp(3).descriptor(),
            Some(&LangDescriptor::cofinite([]))
        );
        // No abandoned code ever returns.
        for s in 0..codes.len() {
            for t in s + 1..codes.len() {
                if codes[s] == codes[t] {
                    assert!(codes[s..=t].iter().all(|&c| c == codes[s]));
                }
            }
        }
    }

    /// The three-case chain rule, written as literally as possible, as an
    /// independent oracle for the incremental implementation.
    fn oracle_chain(
        m: &Learner,
        base: &Hypothesis,
        sigma: &Prefix,
        t_max: u64,
    ) -> Vec<BTreeSet<u64>> {
        let mut stages = vec![sigma.pos().clone()];
        for u in 0..t_max {
            let a = stages[u as usize].clone();
            let w = base.enum_up_to(u).unwrap();
            let sorted: Vec<u64> = w.iter().copied().collect();
            let mut next = a.clone();
            if !a.is_disjoint(sigma.ng()) {
                next = w.clone();
            } else {
                for k in (1..=sorted.len()).rev() {
                    let x: BTreeSet<u64> = sorted[..k].iter().copied().collect();
                    if !(a.is_subset(&x) && a.len() < x.len()) {
                        continue;
                    }
                    let r = (sigma.len() as u64..u)
                        .find(|&r| x.is_subset(&base.enum_up_to(r).unwrap()));
                    let Some(r) = r else { continue };
                    let arrangement =
                        Prefix::new((0..=r).map(|v| InfoPair::new(v, w.contains(&v)))).unwrap();
                    if m.guess(&arrangement).code() == base.code() {
                        next = x;
                        break;
                    }
                }
            }
            stages.push(next);
        }
        stages
    }

    #[test]
    fn the_literal_rule_stabilizes_on_the_consistent_seed() {
        // One positive datum, a base answer enumerating exactly {0}: the
        // chain starts at the positive data and never finds a strictly
        // larger initial subset, so it stays put.
        let space = Space::new();
        let m = enumeration_learner_lifted(
            &space,
            vec![LangDescriptor::finite([0]), LangDescriptor::finite([0, 1])],
        );
        let sigma = pairs(&[(0, true)]);
        let base = m.guess(&sigma);
        let oracle = oracle_chain(&m, &base, &sigma, 20);
        assert_eq!(oracle[0], *sigma.pos());
        assert_eq!(
            oracle.iter().flatten().copied().collect::<BTreeSet<u64>>(),
            BTreeSet::from([0])
        );
    }

    #[test]
    fn chain_stages_match_a_literal_evaluation_of_the_rule() {
        let space = Space::new();
        let m = enumeration_learner_lifted(
            &space,
            vec![LangDescriptor::finite([0]), LangDescriptor::finite([0, 1])],
        );
        let rewritten = conv_sdec_transform(&space, &m);
        let informant = Informant::canonical(LangDescriptor::finite([0, 1]));
        let tr = run_trace(&rewritten, &informant, 4);
        // The second positive datum forces a mind change whose
        // inconsistency is already exposed, so step two mints afresh.
        assert_eq!(tr.code(1), tr.code(0));
        assert_ne!(tr.code(2), tr.code(1));
        assert_eq!(tr.code(3), tr.code(2));
        let sigma = tr.input_at(2);
        let base = m.guess(&sigma);
        let oracle = oracle_chain(&m, &base, &sigma, 20);
        for t in 0..=20u64 {
            assert_eq!(
                tr.hyp(2).enum_up_to(t).unwrap(),
                oracle[t as usize],
                "stage {t} disagrees with the literal rule"
            );
        }
        // Same comparison for the code minted on the empty prefix.
        let empty_base = m.guess(&Prefix::empty());
        let empty_oracle = oracle_chain(&m, &empty_base, &Prefix::empty(), 20);
        for t in 0..=20u64 {
            assert_eq!(
                tr.hyp(0).enum_up_to(t).unwrap(),
                empty_oracle[t as usize],
                "empty-prefix stage {t} disagrees with the literal rule"
            );
        }
    }

    #[test]
    fn a_poisoned_chain_follows_the_base_enumeration() {
        // A learner that switches answers after two data points mints a
        // code whose chain grows into the negatively labeled 0; from then
        // on the chain follows the base enumeration outright.
        let space = Space::new();
        let sp = space.clone();
        let m = Learner::total("two-phase", move |sigma| {
            if sigma.len() <= 1 {
                sp.lift_exact(LangDescriptor::finite([5]))
            } else {
                sp.lift_exact(LangDescriptor::finite([0, 1]))
            }
        });
        let rewritten = conv_sdec_transform(&space, &m);
        let informant = Informant::canonical(LangDescriptor::finite([1]));
        let tr = run_trace(&rewritten, &informant, 3);
        assert_ne!(tr.code(2), tr.code(1));
        let sigma = tr.input_at(2);
        let base = m.guess(&sigma);
        let oracle = oracle_chain(&m, &base, &sigma, 12);
        for t in 0..=12u64 {
            assert_eq!(
                tr.hyp(2).enum_up_to(t).unwrap(),
                oracle[t as usize],
                "stage {t} disagrees with the literal rule"
            );
        }
        // The growth step swallowed the negative datum, and the chain then
        // settles on the base extension.
        let stage = tr.hyp(2).enum_up_to(4).unwrap();
        assert!(stage.contains(&0) && sigma.ng().contains(&0));
        assert_eq!(tr.hyp(2).enum_up_to(12).unwrap(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn rewrite_mints_codes_exactly_at_exposed_mind_changes() {
        let space = Space::new();
        let m = syn_dec_pad(&space, &evens_wmon_learner(&space));
        let rewritten = conv_sdec_transform(&space, &m);
        let informant = Informant::canonical(LangDescriptor::Evens);
        let tr = run_trace(&rewritten, &informant, 8);
        let codes = tr.codes();
        // The wrapped learner dips to a wrong guess at length two and
        // returns at length three; the rewrite re-mints at both points once
        // the chain exposes the inconsistency.
        assert_eq!(codes[0], codes[1]);
        assert_ne!(codes[2], codes[1]);
        assert_ne!(codes[3], codes[2]);
        assert!(codes[3..].iter().all(|&c| c == codes[3]));
        // The final hypothesis enumerates the target.
        let last = tr.hyp(7);
        for x in 0..60 {
            assert_eq!(
                last.member_horizon(x, 60).unwrap(),
                x % 2 == 0,
                "value {x}"
            );
        }
    }

    #[test]
    fn minted_codes_remember_the_prefix_that_minted_them() {
        let space = Space::new();
        let m = syn_dec_pad(&space, &evens_wmon_learner(&space));
        let rewritten = conv_sdec_transform(&space, &m);
        let informant = Informant::canonical(LangDescriptor::Evens);
        let tr = run_trace(&rewritten, &informant, 8);
        // For each code, its first appearance must be the prefix recorded
        // in its provenance: the incremental bookkeeping equals the
        // recomputed value.
        let codes = tr.codes();
        for t in 0..tr.len() {
            if codes[..t].contains(&codes[t]) {
                continue;
            }
            let summary = space.registry().summary(codes[t]).unwrap();
            let provenance = match summary {
                crate::registry::CodeSummary::Enumerated { provenance, .. } => provenance,
                other => panic!("minted codes are enumerated, got {other:?}"),
            };
            assert_eq!(
                provenance,
                format!("conv({:?})", tr.input_at(t).items()),
                "code first seen at step {t}"
            );
        }
    }

    #[test]
    fn identity_delay_reproduces_the_plain_run() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let informant = Informant::canonical(LangDescriptor::cofinite([2]));
        let sim = delay_simulate(
            &m,
            &informant,
            None,
            &SimulatingFunction::Staircase { delay: 0 },
            10,
        )
        .unwrap();
        assert_eq!(sim.base.codes(), sim.delayed.codes());
    }

    #[test]
    fn halved_delay_against_a_duplicating_informant_keeps_the_contract() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let doubled = Informant::scheduled(
            LangDescriptor::Evens,
            crate::informant::Schedule::Duplicate { factor: 2 },
        )
        .unwrap();
        let canonical = Informant::canonical(LangDescriptor::Evens);
        let sim = delay_simulate(
            &m,
            &doubled,
            Some(&canonical),
            &SimulatingFunction::FloorDiv { divisor: 2 },
            12,
        )
        .unwrap();
        // h'_t is the guess on the duplicated prefix of length ⌊t/2⌋.
        for t in 0..12 {
            assert_eq!(
                sim.delayed.code(t),
                m.guess(&doubled.prefix(t / 2)).code()
            );
        }
    }

    #[test]
    fn lookahead_without_a_faster_informant_violates_the_contract() {
        let space = Space::new();
        let m = cofinite_learner(&space);
        let informant = Informant::canonical(LangDescriptor::Evens);
        let err = delay_simulate(
            &m,
            &informant,
            None,
            &SimulatingFunction::Affine {
                slope: 1,
                intercept: 3,
            },
            10,
        )
        .unwrap_err();
        assert!(matches!(err, TransformError::DelayContractViolation { t: 0 }));
    }

    #[test]
    fn collapse_settles_on_one_code_for_oscillating_equal_extensions() {
        let space = Space::new();
        let sp = space.clone();
        let osc = Learner::total("oscillator", move |sigma| {
            sp.pad(&sp.exact(LangDescriptor::Evens), (sigma.len() % 2 + 1) as u64)
        });
        let collapsed = vacillation_collapse(&space, &osc, 0);
        let informant = Informant::canonical(LangDescriptor::Evens);
        let tr = run_trace(&collapsed, &informant, 10);
        let codes = tr.codes();
        // The underlying learner never settles on a code.
        let raw = run_trace(&osc, &informant, 10).codes();
        assert_ne!(raw[4], raw[5]);
        // Once both padded variants have been seen, the vote is constant.
        assert!(codes[1..].iter().all(|&c| c == codes[1]));
        assert!(tr.hyp(9).member_horizon(4, 20).unwrap());
        assert!(!tr.hyp(9).member_horizon(5, 20).unwrap());
    }

    #[test]
    fn collapse_withdraws_exposed_indices_for_good() {
        let space = Space::new();
        let m = detoured_cofinite_learner(&space);
        let collapsed = vacillation_collapse(&space, &m, 0);
        let informant = Informant::canonical(LangDescriptor::cofinite([7]));
        let tr = run_trace(&collapsed, &informant, 13);
        // From step eight on, the negative datum 7 exposes every guess that
        // still contains it, leaving only the corrected cofinite answer.
        let correct = space.exact(LangDescriptor::cofinite([7]));
        for t in 8..13 {
            let sigma = informant.prefix(t);
            let guard = space.guard_xi(&sigma, &correct).unwrap();
            let expect = space.union_vote(&[guard]).unwrap();
            assert_eq!(tr.code(t), expect.code(), "step {t}");
        }
        // Before the datum arrives, the detour still participates.
        assert_ne!(tr.code(2), tr.code(8));
    }
}
