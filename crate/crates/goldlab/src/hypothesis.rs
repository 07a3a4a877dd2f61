//! Hypotheses: interned codes bound to exact descriptors or step-bounded
//! enumerations.
//!
//! A [`Space`] owns a [`Registry`] and constructs hypotheses so that equal
//! construction keys receive equal codes. Two backends coexist:
//!
//! - **Exact**: the code is bound to a [`LangDescriptor`]; membership is
//!   decided outright and, when asked for a step-`t` enumeration, the
//!   descriptor behaves like its lift `W^t = {x < t : member(x)}`.
//! - **Enumerated**: the code is bound to an [`Enumerator`], a monotone
//!   bounded enumeration `t ↦ W^t`; membership is budget-relative. Each
//!   enumerator declares a budget inflation factor: a horizon-`B` membership
//!   query runs the enumeration to budget `inflation · B`, so that slow
//!   enumerations (such as graph encodings, whose element ⟨x, f(x)⟩ appears
//!   only at budget (x+1)²) still answer correctly below the horizon.
//!
//! Hypotheses reloaded from trace files without a descriptor are **Opaque**:
//! codes compare syntactically but semantic queries report the backend as
//! unavailable.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::data::Prefix;
use crate::descriptor::LangDescriptor;
use crate::pairing::{pair_decode, pair_encode};
use crate::program::{Eval, FnProgram};
use crate::registry::{Code, CodeSummary, Registry};

/// Default budget inflation factor for enumerated hypotheses.
pub const DEFAULT_INFLATION: u64 = 4;

#[derive(Debug, Error)]
pub enum SpaceError {
    /// A semantic query reached a code with no usable binding.
    #[error("hypothesis {code} is opaque ({context}); semantic backend unavailable")]
    OpaqueBinding { code: Code, context: String },
}

/// A monotone, bounded, step-indexed enumeration `t ↦ W^t`.
#[derive(Clone)]
pub struct Enumerator {
    provenance: String,
    set_fn: Arc<dyn Fn(u64) -> BTreeSet<u64> + Send + Sync>,
    mem_fn: Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
    inflation: u64,
}

impl Enumerator {
    /// Builds from the enumeration function alone; membership queries fall
    /// back to materializing the set.
    pub fn from_set_fn<F>(provenance: impl Into<String>, inflation: u64, set_fn: F) -> Self
    where
        F: Fn(u64) -> BTreeSet<u64> + Send + Sync + 'static,
    {
        let set_fn = Arc::new(set_fn);
        let mem_set = Arc::clone(&set_fn);
        Enumerator {
            provenance: provenance.into(),
            set_fn,
            mem_fn: Arc::new(move |x, t| mem_set(t).contains(&x)),
            inflation,
        }
    }

    /// Builds from both functions; `mem_fn(x, t)` must agree with
    /// `set_fn(t).contains(&x)` (checked by the constructor's callers'
    /// property tests, not at runtime).
    pub fn from_parts<S, M>(
        provenance: impl Into<String>,
        inflation: u64,
        set_fn: S,
        mem_fn: M,
    ) -> Self
    where
        S: Fn(u64) -> BTreeSet<u64> + Send + Sync + 'static,
        M: Fn(u64, u64) -> bool + Send + Sync + 'static,
    {
        Enumerator {
            provenance: provenance.into(),
            set_fn: Arc::new(set_fn),
            mem_fn: Arc::new(mem_fn),
            inflation,
        }
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn inflation(&self) -> u64 {
        self.inflation
    }

    /// The step-`t` enumeration `W^t`.
    pub fn enum_up_to(&self, t: u64) -> BTreeSet<u64> {
        (self.set_fn)(t)
    }

    /// Has `x` been enumerated within budget `t`?
    pub fn member_at(&self, x: u64, t: u64) -> bool {
        (self.mem_fn)(x, t)
    }
}

impl fmt::Debug for Enumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enumerator")
            .field("provenance", &self.provenance)
            .field("inflation", &self.inflation)
            .finish()
    }
}

/// What a hypothesis code is bound to.
#[derive(Clone, Debug)]
pub enum Binding {
    Exact(LangDescriptor),
    Enumerated(Enumerator),
    /// Reloaded code with no semantic backend.
    Opaque { provenance: String },
}

/// An interned code together with its binding.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    code: Code,
    binding: Binding,
    salt: Option<u64>,
}

impl Hypothesis {
    pub fn code(&self) -> Code {
        self.code
    }

    pub fn binding(&self) -> &Binding {
        &self.binding
    }

    pub fn salt(&self) -> Option<u64> {
        self.salt
    }

    /// The bound descriptor, for exact hypotheses.
    pub fn descriptor(&self) -> Option<&LangDescriptor> {
        match &self.binding {
            Binding::Exact(d) => Some(d),
            _ => None,
        }
    }

    /// Declared budget inflation (1 for exact bindings).
    pub fn inflation(&self) -> u64 {
        match &self.binding {
            Binding::Enumerated(e) => e.inflation(),
            _ => 1,
        }
    }

    /// Exact membership, where the binding supports it.
    pub fn member_exact(&self, x: u64) -> Option<bool> {
        self.descriptor().map(|d| d.member(x))
    }

    /// The step-`t` enumeration `W^t` (exact bindings behave as their lift).
    pub fn enum_up_to(&self, t: u64) -> Result<BTreeSet<u64>, SpaceError> {
        match &self.binding {
            Binding::Exact(d) => Ok((0..t).filter(|&x| d.member(x)).collect()),
            Binding::Enumerated(e) => Ok(e.enum_up_to(t)),
            Binding::Opaque { provenance } => Err(SpaceError::OpaqueBinding {
                code: self.code,
                context: provenance.clone(),
            }),
        }
    }

    /// Membership within an explicit enumeration budget.
    pub fn member_up_to(&self, x: u64, t: u64) -> Result<bool, SpaceError> {
        match &self.binding {
            Binding::Exact(d) => Ok(x < t && d.member(x)),
            Binding::Enumerated(e) => Ok(e.member_at(x, t)),
            Binding::Opaque { provenance } => Err(SpaceError::OpaqueBinding {
                code: self.code,
                context: provenance.clone(),
            }),
        }
    }

    /// Membership as seen at horizon `bound`: exact bindings answer outright
    /// (any value), enumerated ones run to budget `inflation · max(bound, x+1)`.
    pub fn member_horizon(&self, x: u64, bound: u64) -> Result<bool, SpaceError> {
        match &self.binding {
            Binding::Exact(d) => Ok(d.member(x)),
            Binding::Enumerated(e) => {
                Ok(e.member_at(x, e.inflation().max(1) * bound.max(x + 1)))
            }
            Binding::Opaque { provenance } => Err(SpaceError::OpaqueBinding {
                code: self.code,
                context: provenance.clone(),
            }),
        }
    }

    /// Do the two hypotheses agree on every value below `bound` (as seen at
    /// that horizon)?
    pub fn agree_up_to(&self, other: &Hypothesis, bound: u64) -> Result<bool, SpaceError> {
        for x in 0..bound {
            if self.member_horizon(x, bound)? != other.member_horizon(x, bound)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Result of a symmetric-difference count at a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymDiff {
    Count(u64),
    MoreThan(u64),
}

impl SymDiff {
    /// Is the counted difference at most `a`?
    pub fn within(self, a: u64) -> bool {
        match self {
            SymDiff::Count(c) => c <= a,
            SymDiff::MoreThan(_) => false,
        }
    }
}

/// Size of the symmetric difference between a hypothesis and a descriptor.
///
/// When the hypothesis is exact and both sides normalize, the true count is
/// computed symbolically ([`SymDiff::MoreThan`] for an infinite difference).
/// Otherwise the difference is counted on `[0, bound)` at the horizon.
/// Counts shrink with the bound only on the counting path, so a verdict that
/// tolerates a given count never worsens when the bound is lowered.
pub fn sym_diff_count(
    h: &Hypothesis,
    target: &LangDescriptor,
    bound: u64,
) -> Result<SymDiff, SpaceError> {
    if let (Some(d), Some(nf_t)) = (h.descriptor(), target.normal_form()) {
        if let Some(nf_h) = d.normal_form() {
            let diff = nf_h.zip_with(&nf_t, |a, b| a != b);
            return Ok(match diff.count() {
                Some(c) => SymDiff::Count(c),
                None => SymDiff::MoreThan(bound),
            });
        }
    }
    let mut count = 0;
    if let Some(d) = h.descriptor() {
        for x in 0..bound {
            if d.member(x) != target.member(x) {
                count += 1;
            }
        }
    } else {
        // One enumeration serves every point; per-point horizon queries
        // would rerun it `bound` times.
        let budget = h.inflation().max(1).saturating_mul(bound);
        let view = h.enum_up_to(budget)?;
        for x in 0..bound {
            if view.contains(&x) != target.member(x) {
                count += 1;
            }
        }
    }
    Ok(SymDiff::Count(count))
}

/// Hypothesis constructors over a shared registry.
#[derive(Clone)]
pub struct Space {
    registry: Arc<Registry>,
}

impl Space {
    pub fn new() -> Self {
        Space {
            registry: Arc::new(Registry::new()),
        }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    fn key_of(prefix: &str, payload: &str) -> String {
        format!("{prefix}:{payload}")
    }

    /// An exact hypothesis for a descriptor. Equal descriptors (by canonical
    /// serialization) receive equal codes.
    pub fn exact(&self, d: LangDescriptor) -> Hypothesis {
        let key = Self::key_of(
            "exact",
            &serde_json::to_string(&d).expect("descriptor serializes"),
        );
        let code = self.registry.intern(key, || CodeSummary::Exact {
            descriptor: d.clone(),
            salt: None,
        });
        Hypothesis {
            code,
            binding: Binding::Exact(d),
            salt: None,
        }
    }

    /// The canonical index for a finite set: `exact(Finite(xs))`.
    pub fn ind_finite<I: IntoIterator<Item = u64>>(&self, xs: I) -> Hypothesis {
        self.exact(LangDescriptor::finite(xs))
    }

    /// The lift of an exact descriptor into the enumerated backend:
    /// `W^t = {x < t : member(x)}`.
    pub fn lift_exact(&self, d: LangDescriptor) -> Hypothesis {
        let key = Self::key_of(
            "lift",
            &serde_json::to_string(&d).expect("descriptor serializes"),
        );
        let provenance = format!("lift({})", d.render());
        let code = self.registry.intern(key, || CodeSummary::Enumerated {
            provenance: provenance.clone(),
            salt: None,
        });
        let d_set = d.clone();
        let d_mem = d;
        Hypothesis {
            code,
            binding: Binding::Enumerated(Enumerator::from_parts(
                provenance,
                DEFAULT_INFLATION,
                move |t| (0..t).filter(|&x| d_set.member(x)).collect(),
                move |x, t| x < t && d_mem.member(x),
            )),
            salt: None,
        }
    }

    /// An enumerated hypothesis built from a caller-supplied enumerator.
    /// Equal `key_seed` strings receive equal codes, so the caller's key
    /// discipline decides which constructions count as the same index.
    pub fn enumerated(&self, key_seed: &str, enumerator: Enumerator) -> Hypothesis {
        let key = Self::key_of("enum", key_seed);
        let provenance = enumerator.provenance().to_string();
        let code = self.registry.intern(key, || CodeSummary::Enumerated {
            provenance: provenance.clone(),
            salt: None,
        });
        Hypothesis {
            code,
            binding: Binding::Enumerated(enumerator),
            salt: None,
        }
    }

    /// The same extension under a fresh code salted by `salt`. Injective on
    /// `(code, salt)`.
    pub fn pad(&self, h: &Hypothesis, salt: u64) -> Hypothesis {
        let key = Self::key_of("pad", &format!("{}:{salt}", h.code));
        let inner = h.clone();
        let code = self.registry.intern(key, || match &inner.binding {
            Binding::Exact(d) => CodeSummary::Exact {
                descriptor: d.clone(),
                salt: Some(salt),
            },
            Binding::Enumerated(e) => CodeSummary::Enumerated {
                provenance: e.provenance().to_string(),
                salt: Some(salt),
            },
            Binding::Opaque { provenance } => CodeSummary::Enumerated {
                provenance: provenance.clone(),
                salt: Some(salt),
            },
        });
        Hypothesis {
            code,
            binding: h.binding.clone(),
            salt: Some(salt),
        }
    }

    /// The guarded hypothesis: the extension of `h` minus the commission
    /// errors already realized against `sigma`, namely
    /// `K = W^{|σ|} ∩ ng(σ)`. The code depends only on `(h.code, K)`, so the
    /// guard is stable across prefixes that realize the same errors.
    pub fn guard_xi(&self, sigma: &Prefix, h: &Hypothesis) -> Result<Hypothesis, SpaceError> {
        let horizon = sigma.len() as u64;
        let enumerated = h.enum_up_to(horizon)?;
        let k: BTreeSet<u64> = enumerated.intersection(sigma.ng()).copied().collect();
        let k_list: Vec<u64> = k.iter().copied().collect();
        let key = Self::key_of("guard", &format!("{}:{k_list:?}", h.code));
        let provenance = format!("guard({}, K={k_list:?})", h.code);
        let code = self.registry.intern(key, || CodeSummary::Enumerated {
            provenance: provenance.clone(),
            salt: None,
        });
        let inner_set = h.clone();
        let inner_mem = h.clone();
        let k_mem = k.clone();
        Ok(Hypothesis {
            code,
            binding: Binding::Enumerated(Enumerator::from_parts(
                provenance,
                h.inflation().max(DEFAULT_INFLATION),
                move |t| {
                    let mut w = inner_set.enum_up_to(t).expect("guarded binding is semantic");
                    w.retain(|x| !k.contains(x));
                    w
                },
                move |x, t| {
                    !k_mem.contains(&x)
                        && inner_mem
                            .member_up_to(x, t)
                            .expect("guarded binding is semantic")
                },
            )),
            salt: None,
        })
    }

    /// The union of the given hypotheses' enumerations, coded by the sorted
    /// tuple of member codes.
    pub fn union_vote(&self, hs: &[Hypothesis]) -> Result<Hypothesis, SpaceError> {
        let mut codes: Vec<Code> = hs.iter().map(|h| h.code()).collect();
        codes.sort();
        codes.dedup();
        for h in hs {
            if let Binding::Opaque { provenance } = &h.binding {
                return Err(SpaceError::OpaqueBinding {
                    code: h.code,
                    context: provenance.clone(),
                });
            }
        }
        let key = Self::key_of("union", &format!("{codes:?}"));
        let provenance = format!("union{codes:?}");
        let code = self.registry.intern(key, || CodeSummary::Enumerated {
            provenance: provenance.clone(),
            salt: None,
        });
        let members_set: Vec<Hypothesis> = hs.to_vec();
        let members_mem: Vec<Hypothesis> = hs.to_vec();
        let inflation = hs
            .iter()
            .map(|h| h.inflation())
            .max()
            .unwrap_or(1)
            .max(DEFAULT_INFLATION);
        Ok(Hypothesis {
            code,
            binding: Binding::Enumerated(Enumerator::from_parts(
                provenance,
                inflation,
                move |t| {
                    members_set
                        .iter()
                        .flat_map(|h| h.enum_up_to(t).expect("union binding is semantic"))
                        .collect()
                },
                move |x, t| {
                    members_mem.iter().any(|h| {
                        h.member_up_to(x, t).expect("union binding is semantic")
                    })
                },
            )),
            salt: None,
        })
    }

    /// Encodes a program's graph as an enumerated hypothesis:
    /// `W^t = {⟨x, f(x)⟩ : cost(x) ≤ t}`.
    pub fn graph_encode(&self, program: &FnProgram) -> Hypothesis {
        let key = Self::key_of(
            "graph",
            &serde_json::to_string(program).expect("program serializes"),
        );
        let provenance = format!("graph({})", program.tag());
        let code = self.registry.intern(key, || CodeSummary::Enumerated {
            provenance: provenance.clone(),
            salt: None,
        });
        let p_set = program.clone();
        let p_mem = program.clone();
        Hypothesis {
            code,
            binding: Binding::Enumerated(Enumerator::from_parts(
                provenance,
                DEFAULT_INFLATION,
                move |t| {
                    // cost(x) = (x+1)² ≤ t bounds the inputs enumerable at t.
                    let mut out = BTreeSet::new();
                    let mut x = 0;
                    while p_set.cost(x) <= t {
                        if let Eval::Halt(v) = p_set.eval_with_budget(x, t) {
                            out.insert(pair_encode(x, v));
                        }
                        x += 1;
                    }
                    out
                },
                move |n, t| {
                    let (x, v) = pair_decode(n);
                    p_mem.eval_with_budget(x, t) == Eval::Halt(v)
                },
            )),
            salt: None,
        }
    }

    /// Rebuilds a hypothesis recorded in a trace sidecar under `old` in some
    /// other registry. Keyed by the recorded code, so distinct recorded codes
    /// stay distinct here even when their summaries coincide (as with
    /// repeated padding). Exact summaries come back fully usable; enumerated
    /// ones come back opaque.
    pub fn reload(&self, old: Code, summary: &CodeSummary) -> Hypothesis {
        let key = Self::key_of("reload", &old.to_string());
        let code = self.registry.intern(key, || summary.clone());
        match summary {
            CodeSummary::Exact { descriptor, salt } => Hypothesis {
                code,
                binding: Binding::Exact(descriptor.clone()),
                salt: *salt,
            },
            CodeSummary::Enumerated { provenance, salt } => Hypothesis {
                code,
                binding: Binding::Opaque {
                    provenance: provenance.clone(),
                },
                salt: *salt,
            },
        }
    }
}

impl Default for Space {
    fn default() -> Self {
        Space::new()
    }
}

/// A function recovered from a graph-coded hypothesis by dovetailed search.
///
/// `eval_with_budget(x, t)` halts with the `v` of the least dovetail index
/// `i = ⟨⟨x, v⟩, b⟩ < t` whose pair has been enumerated within budget `b`,
/// and keeps running if no such index exists below `t`. For a hypothesis
/// produced by [`Space::graph_encode`] from `p`, the search halts with
/// `p(x)` within budget `10 · (cost_p(x) + x)²`.
#[derive(Clone)]
pub struct DecodedFn {
    h: Hypothesis,
}

/// Wraps a hypothesis as a program computing `x ↦ v` from its graph codes.
pub fn graph_decode(h: &Hypothesis) -> DecodedFn {
    DecodedFn { h: h.clone() }
}

impl DecodedFn {
    /// Budgeted evaluation; see the type docs for the search order.
    pub fn eval_with_budget(&self, x: u64, t: u64) -> Result<Eval, SpaceError> {
        // The scan over i < t decoding i = ⟨m, b⟩, m = ⟨x', v⟩ and testing
        // x' = x ∧ m ∈ W^b is computed in closed form: for each candidate v
        // (m grows with v, and ⟨m, 0⟩ ≤ any index with that m), find the
        // least enumeration budget b via the monotonicity of W^b, giving
        // that candidate's least index ⟨m, b⟩.
        let mut best: Option<(u64, u64)> = None; // (index, value)
        let mut v = 0;
        loop {
            let m = pair_encode(x, v);
            if pair_encode(m, 0) >= t {
                break;
            }
            if let Some(b) = self.least_budget(m, t)? {
                let idx = pair_encode(m, b);
                if idx < t && best.map_or(true, |(bi, _)| idx < bi) {
                    best = Some((idx, v));
                }
            }
            v += 1;
        }
        Ok(match best {
            Some((_, v)) => Eval::Halt(v),
            None => Eval::Running,
        })
    }

    /// Least `b` with `m ∈ W^b` and `⟨m, b⟩ < t`, if any.
    fn least_budget(&self, m: u64, t: u64) -> Result<Option<u64>, SpaceError> {
        // Largest admissible budget first: ⟨m, b⟩ is strictly increasing
        // in b, so binary search the boundary.
        let (mut lo, mut hi) = (0u64, 1u64);
        while pair_encode(m, hi) < t {
            lo = hi;
            hi *= 2;
        }
        // Invariant: ⟨m, lo⟩ < t ∨ lo = 0; ⟨m, hi⟩ ≥ t.
        if pair_encode(m, lo) >= t {
            return Ok(None);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if pair_encode(m, mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b_max = lo;
        if !self.h.member_up_to(m, b_max)? {
            return Ok(None);
        }
        // Monotone membership: binary search the least budget enumerating m.
        let (mut lo, mut hi) = (0u64, b_max);
        if self.h.member_up_to(m, 0)? {
            return Ok(Some(0));
        }
        // Invariant: ¬member(m, lo), member(m, hi).
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.h.member_up_to(m, mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }
}
