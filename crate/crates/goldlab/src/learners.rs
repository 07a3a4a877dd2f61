//! The learner catalogue: every concrete learner the scenarios run.
//!
//! Each constructor returns a total [`Learner`] over a shared [`Space`], so
//! equal guesses get equal codes and syntactic convergence is observable.
//! [`by_name`] builds catalogue learners from string identifiers plus JSON
//! parameter blocks, which is how scenario configs refer to them.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::data::Prefix;
use crate::descriptor::{DoubledException, LangDescriptor};
use crate::hypothesis::Space;
use crate::learner::Learner;
use crate::pairing::pair_decode;
use crate::program::FnProgram;

/// Guesses the cofinite language excluding exactly the values seen negative:
/// `M(σ) = Cofinite(ng(σ))`.
pub fn cofinite_learner(space: &Space) -> Learner {
    let sp = space.clone();
    Learner::total("cofinite", move |sigma| {
        sp.exact(LangDescriptor::cofinite(sigma.ng().iter().copied()))
    })
}

/// Guesses all evens while only evens are positive, and otherwise the split
/// language generated by the even positives: `Split({x : 2x ∈ pos(σ)})`.
pub fn split_family_learner(space: &Space) -> Learner {
    let sp = space.clone();
    Learner::total("split-family", move |sigma| {
        sp.exact(split_guess(sigma))
    })
}

fn split_guess(sigma: &Prefix) -> LangDescriptor {
    if sigma.pos().iter().all(|x| x % 2 == 0) {
        LangDescriptor::split_all()
    } else {
        LangDescriptor::split(sigma.pos().iter().filter(|x| *x % 2 == 0).map(|x| x / 2))
    }
}

/// Guesses the evens, except for a brief flirt with `2ℕ ∪ {1}` while 1 is
/// known negative and 2 has not yet appeared positive. The flirt makes the
/// learner weakly monotone but visibly U-shaped on the canonical evens
/// informant.
pub fn evens_wmon_learner(space: &Space) -> Learner {
    let sp = space.clone();
    Learner::total("evens-wmon", move |sigma| {
        if sigma.ng().contains(&1) && !sigma.pos().contains(&2) {
            sp.exact(LangDescriptor::EvensPlusOne)
        } else {
            sp.exact(LangDescriptor::Evens)
        }
    })
}

/// Learns the doubled pair family over a fixed base: guesses the plain
/// doubling of `base` until some `x` has `2x` negative and `2x+1` positive,
/// then the variant carrying that odd-side exception (smallest such `x`).
pub fn doubled_pair_learner(space: &Space, base: LangDescriptor) -> Learner {
    let sp = space.clone();
    Learner::total("doubled-pair", move |sigma| {
        let exception = sigma
            .ng()
            .iter()
            .filter(|x| *x % 2 == 0)
            .map(|x| x / 2)
            .find(|x| sigma.pos().contains(&(2 * x + 1)));
        let exc = exception.map(|x| DoubledException::Odd { x });
        sp.exact(LangDescriptor::doubled(base.clone(), exc))
    })
}

/// Distinguishes `ℕ` from a fixed alternative: guesses `ℕ` while no negative
/// datum has appeared, and `base` afterwards.
pub fn pair_distinguisher_learner(space: &Space, base: LangDescriptor) -> Learner {
    let sp = space.clone();
    Learner::total("pair-distinguisher", move |sigma| {
        if sigma.ng().is_empty() {
            sp.exact(LangDescriptor::cofinite([]))
        } else {
            sp.exact(base.clone())
        }
    })
}

/// Whether `σ` pins `m` as the minimum of the presented doubled language:
/// some of `2m, 2m+1` is positive and every smaller candidate is blocked by
/// a negative datum. Returns the smallest such `m`.
fn min_presented(sigma: &Prefix) -> Option<u64> {
    for m in 0.. {
        if sigma.pos().contains(&(2 * m)) || sigma.pos().contains(&(2 * m + 1)) {
            return Some(m);
        }
        if !(sigma.ng().contains(&(2 * m)) || sigma.ng().contains(&(2 * m + 1))) {
            return None;
        }
    }
    unreachable!("negative data are finite")
}

/// Learns doubled languages self-coded by their minimum: once the minimum `m`
/// of the presented set is certain, guesses the doubling of `resolve[m]`,
/// upgraded with an even-side exception when some `2x` is positive while
/// `2x+1` is negative (smallest such `x`). Before the minimum is certain,
/// guesses the empty language.
///
/// Panics if the minimum resolves outside the registry; that is a
/// misconfigured family, not a learnable situation.
pub fn min_coded_learner(space: &Space, resolve: BTreeMap<u64, LangDescriptor>) -> Learner {
    let sp = space.clone();
    Learner::total("min-coded", move |sigma| {
        let Some(m) = min_presented(sigma) else {
            return sp.ind_finite([]);
        };
        let base = resolve
            .get(&m)
            .unwrap_or_else(|| panic!("no language with minimum {m} in the resolve registry"))
            .clone();
        let exception = sigma
            .pos()
            .iter()
            .filter(|x| *x % 2 == 0)
            .map(|x| x / 2)
            .find(|x| sigma.ng().contains(&(2 * x + 1)));
        let exc = exception.map(|x| DoubledException::Even { x });
        sp.exact(LangDescriptor::doubled(base, exc))
    })
}

/// Learns `L` and its one-point extensions for languages self-coded by their
/// minimum: guesses the empty language until a positive datum arrives, then
/// `resolve[min(pos)]`, then that base with the smallest positive value the
/// base cannot have enumerated by step `|σ|` adjoined as an exception.
///
/// Panics if `min(pos)` resolves outside the registry.
pub fn min_union_exception_learner(
    space: &Space,
    resolve: BTreeMap<u64, LangDescriptor>,
) -> Learner {
    let sp = space.clone();
    Learner::total("min-union-exception", move |sigma| {
        let Some(&m) = sigma.pos().first() else {
            return sp.ind_finite([]);
        };
        let base = resolve
            .get(&m)
            .unwrap_or_else(|| panic!("no language with minimum {m} in the resolve registry"))
            .clone();
        let horizon = sigma.len() as u64;
        let stray = sigma
            .pos()
            .iter()
            .copied()
            .find(|&x| x >= horizon || !base.member(x));
        match stray {
            None => sp.exact(base),
            Some(x) => sp.exact(base.with_exception(x)),
        }
    })
}

/// Learns a finite family by enumeration: guesses the first descriptor
/// consistent with the prefix, and the empty language when none is.
pub fn enumeration_learner(space: &Space, family: Vec<LangDescriptor>) -> Learner {
    enumeration_learner_with(space, family, false)
}

/// As [`enumeration_learner`], but guesses step-bounded enumerator codes for
/// the family members instead of exact descriptors.
pub fn enumeration_learner_lifted(space: &Space, family: Vec<LangDescriptor>) -> Learner {
    enumeration_learner_with(space, family, true)
}

fn enumeration_learner_with(space: &Space, family: Vec<LangDescriptor>, lifted: bool) -> Learner {
    let sp = space.clone();
    Learner::total("enumeration", move |sigma| {
        match family
            .iter()
            .find(|d| sigma.consistent_with(|x| d.member(x)))
        {
            Some(d) if lifted => sp.lift_exact(d.clone()),
            Some(d) => sp.exact(d.clone()),
            None => sp.ind_finite([]),
        }
    })
}

/// Learns a family of programs from their graph codes: guesses the encoded
/// graph of the first program consistent with the decoded data, and the empty
/// language when none is.
pub fn fn_enumeration_learner(space: &Space, programs: Vec<FnProgram>) -> Learner {
    let sp = space.clone();
    Learner::total("fn-enumeration", move |sigma| {
        let fits = |p: &&FnProgram| {
            sigma.consistent_with(|n| {
                let (x, y) = pair_decode(n);
                p.value(x) == Some(y)
            })
        };
        match programs.iter().find(fits) {
            Some(p) => sp.graph_encode(p),
            None => sp.ind_finite([]),
        }
    })
}

/// Guesses the split-level language at level `⌊|σ|/divisor⌋`. Consistent on
/// an informant that presents each value `divisor` times in order, and the
/// raw material for the delay-contract counterexample.
pub fn split_level_learner(space: &Space, divisor: u64) -> Learner {
    assert!(divisor >= 1, "divisor must be positive");
    let sp = space.clone();
    Learner::total("split-level", move |sigma| {
        sp.exact(LangDescriptor::split_level(sigma.len() as u64 / divisor))
    })
}

/// [`cofinite_learner`] with a one-step detour: at prefix length 2 it also
/// excludes 19. On targets whose small values are all members this abandons
/// and then re-adopts `ℕ`, a deliberate U shape for the rewrite transforms to
/// straighten out.
pub fn detoured_cofinite_learner(space: &Space) -> Learner {
    let sp = space.clone();
    Learner::total("detoured-cofinite", move |sigma| {
        let mut xs = sigma.ng().clone();
        if sigma.len() == 2 {
            xs.insert(19);
        }
        sp.exact(LangDescriptor::cofinite(xs))
    })
}

/// [`split_family_learner`] with a one-step detour: at prefix length 2 it
/// guesses the finite-split reading with 9 adjoined, again a deliberate
/// U shape on targets that keep the natural guess stable around length 2.
pub fn detoured_split_learner(space: &Space) -> Learner {
    let sp = space.clone();
    Learner::total("detoured-split", move |sigma| {
        if sigma.len() == 2 {
            let mut xs: std::collections::BTreeSet<u64> = sigma
                .pos()
                .iter()
                .filter(|x| *x % 2 == 0)
                .map(|x| x / 2)
                .collect();
            xs.insert(9);
            sp.exact(LangDescriptor::split(xs))
        } else {
            sp.exact(split_guess(sigma))
        }
    })
}

/// Learns the pair `{2ℕ, 2ℕ∪{1}}`: guesses the plus-one variant when 1 is
/// positive, or provisionally while 1 is negative and 2 unseen; otherwise the
/// evens. U-shaped on the canonical evens informant.
pub fn evens_pair_learner(space: &Space) -> Learner {
    let sp = space.clone();
    Learner::total("evens-pair", move |sigma| {
        let provisional = sigma.ng().contains(&1) && !sigma.pos().contains(&2);
        if provisional || sigma.pos().contains(&1) {
            sp.exact(LangDescriptor::EvensPlusOne)
        } else {
            sp.exact(LangDescriptor::Evens)
        }
    })
}

#[derive(Debug, Error)]
pub enum LearnerConfigError {
    #[error("unknown learner id {0:?}")]
    UnknownLearner(String),
    #[error("bad parameters for learner {id:?}: {source}")]
    BadParams {
        id: String,
        source: serde_json::Error,
    },
}

#[derive(Deserialize)]
struct BaseParam {
    base: LangDescriptor,
}

#[derive(Deserialize)]
struct ResolveParam {
    resolve: BTreeMap<u64, LangDescriptor>,
}

#[derive(Deserialize)]
struct FamilyParam {
    family: Vec<LangDescriptor>,
    #[serde(default)]
    lifted: bool,
}

#[derive(Deserialize)]
struct DivisorParam {
    divisor: u64,
}

#[derive(Deserialize)]
struct ProgramsParam {
    programs: Vec<FnProgram>,
}

/// Builds a catalogue learner from its config identifier and JSON parameters.
pub fn by_name(
    space: &Space,
    id: &str,
    params: &serde_json::Value,
) -> Result<Learner, LearnerConfigError> {
    fn parse<T: serde::de::DeserializeOwned>(
        id: &str,
        params: &serde_json::Value,
    ) -> Result<T, LearnerConfigError> {
        serde_json::from_value(params.clone()).map_err(|source| LearnerConfigError::BadParams {
            id: id.to_string(),
            source,
        })
    }

    Ok(match id {
        "cofinite" => cofinite_learner(space),
        "split-family" => split_family_learner(space),
        "evens-wmon" => evens_wmon_learner(space),
        "doubled-pair" => {
            let p: BaseParam = parse(id, params)?;
            doubled_pair_learner(space, p.base)
        }
        "pair-distinguisher" => {
            let p: BaseParam = parse(id, params)?;
            pair_distinguisher_learner(space, p.base)
        }
        "min-coded" => {
            let p: ResolveParam = parse(id, params)?;
            min_coded_learner(space, p.resolve)
        }
        "min-union-exception" => {
            let p: ResolveParam = parse(id, params)?;
            min_union_exception_learner(space, p.resolve)
        }
        "enumeration" => {
            let p: FamilyParam = parse(id, params)?;
            enumeration_learner_with(space, p.family, p.lifted)
        }
        "fn-enumeration" => {
            let p: ProgramsParam = parse(id, params)?;
            fn_enumeration_learner(space, p.programs)
        }
        "split-level" => {
            let p: DivisorParam = parse(id, params)?;
            split_level_learner(space, p.divisor)
        }
        "detoured-cofinite" => detoured_cofinite_learner(space),
        "detoured-split" => detoured_split_learner(space),
        "evens-pair" => evens_pair_learner(space),
        other => return Err(LearnerConfigError::UnknownLearner(other.to_string())),
    })
}
