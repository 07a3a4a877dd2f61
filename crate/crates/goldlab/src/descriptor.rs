//! Language descriptors with a decidable symbolic algebra.
//!
//! A [`LangDescriptor`] names a subset of ℕ by structure. Membership is
//! decidable for every variant. For every variant except function graphs,
//! the denoted set is ultimately periodic, and [`LangDescriptor::normal_form`]
//! computes the canonical [`UltPeriodic`] presentation (minimal eventual
//! period in absolute phase, minimal threshold). Canonical forms are unique,
//! so extension equality and inclusion between such descriptors are decided
//! exactly; graph descriptors fall outside the algebra and are compared
//! structurally or at a horizon by the callers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pairing::pair_decode;
use crate::program::FnProgram;

/// The finite parameter of a two-sided split, or the degenerate "all" split.
///
/// `Split(X)` denotes `2X ∪ 2(ℕ∖X)+1`: even slots follow `X`, odd slots
/// follow its complement. `Split(All)` degenerates to the even numbers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitSet {
    All,
    Finite(BTreeSet<u64>),
}

impl Serialize for SplitSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SplitSet::All => s.serialize_str("all"),
            SplitSet::Finite(xs) => xs.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SplitSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Set(BTreeSet<u64>),
        }
        match Repr::deserialize(d)? {
            Repr::Tag(t) if t == "all" => Ok(SplitSet::All),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!(
                "expected \"all\" or a set, got \"{t}\""
            ))),
            Repr::Set(xs) => Ok(SplitSet::Finite(xs)),
        }
    }
}

/// Which half of a doubled pair carries the exception.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "side", rename_all = "camelCase")]
pub enum DoubledException {
    /// Adds `2x+1` to the odd half.
    Odd { x: u64 },
    /// Adds `2x` to the even half.
    Even { x: u64 },
}

/// Named uniformly decidable families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum UniformFamily {
    /// `L_m = {x even : x ≤ m} ∪ {x odd : x > m}`.
    SplitLevel,
}

impl UniformFamily {
    pub fn member(self, index: u64, x: u64) -> bool {
        match self {
            UniformFamily::SplitLevel => {
                if x % 2 == 0 {
                    x <= index
                } else {
                    x > index
                }
            }
        }
    }
}

/// A structural name for a decidable subset of ℕ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum LangDescriptor {
    /// Exactly the listed values.
    Finite {
        #[serde(rename = "X")]
        xs: BTreeSet<u64>,
    },
    /// Everything except the listed values.
    Cofinite {
        #[serde(rename = "X")]
        xs: BTreeSet<u64>,
    },
    /// The even numbers.
    Evens,
    /// The even numbers together with 1.
    EvensPlusOne,
    /// `2X ∪ 2(ℕ∖X)+1`.
    Split {
        #[serde(rename = "X")]
        xs: SplitSet,
    },
    /// The base language with one extra element.
    BaseWithException { base: Box<LangDescriptor>, x: u64 },
    /// `2·base ∪ (2·base+1)`, optionally with one exception on either half.
    DoubledPair {
        base: Box<LangDescriptor>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exception: Option<DoubledException>,
    },
    /// `{⟨x, f(x)⟩ : f(x) defined}` for a sample program `f`.
    Graph { program: FnProgram },
    /// Member `index` of a named uniformly decidable family.
    Uniform { family: UniformFamily, index: u64 },
}

impl LangDescriptor {
    pub fn finite<I: IntoIterator<Item = u64>>(xs: I) -> Self {
        LangDescriptor::Finite {
            xs: xs.into_iter().collect(),
        }
    }

    pub fn cofinite<I: IntoIterator<Item = u64>>(xs: I) -> Self {
        LangDescriptor::Cofinite {
            xs: xs.into_iter().collect(),
        }
    }

    pub fn split<I: IntoIterator<Item = u64>>(xs: I) -> Self {
        LangDescriptor::Split {
            xs: SplitSet::Finite(xs.into_iter().collect()),
        }
    }

    pub fn split_all() -> Self {
        LangDescriptor::Split { xs: SplitSet::All }
    }

    pub fn with_exception(self, x: u64) -> Self {
        LangDescriptor::BaseWithException {
            base: Box::new(self),
            x,
        }
    }

    pub fn doubled(base: LangDescriptor, exception: Option<DoubledException>) -> Self {
        LangDescriptor::DoubledPair {
            base: Box::new(base),
            exception,
        }
    }

    pub fn graph(program: FnProgram) -> Self {
        LangDescriptor::Graph { program }
    }

    pub fn split_level(index: u64) -> Self {
        LangDescriptor::Uniform {
            family: UniformFamily::SplitLevel,
            index,
        }
    }

    /// Decides membership of `x` in the denoted set.
    pub fn member(&self, x: u64) -> bool {
        match self {
            LangDescriptor::Finite { xs } => xs.contains(&x),
            LangDescriptor::Cofinite { xs } => !xs.contains(&x),
            LangDescriptor::Evens => x % 2 == 0,
            LangDescriptor::EvensPlusOne => x % 2 == 0 || x == 1,
            LangDescriptor::Split { xs } => {
                let half = x / 2;
                let in_x = match xs {
                    SplitSet::All => true,
                    SplitSet::Finite(set) => set.contains(&half),
                };
                if x % 2 == 0 {
                    in_x
                } else {
                    !in_x
                }
            }
            LangDescriptor::BaseWithException { base, x: exc } => x == *exc || base.member(x),
            LangDescriptor::DoubledPair { base, exception } => {
                let half = x / 2;
                let excepted = match (x % 2, exception) {
                    (1, Some(DoubledException::Odd { x: e })) => half == *e,
                    (0, Some(DoubledException::Even { x: e })) => half == *e,
                    _ => false,
                };
                excepted || base.member(half)
            }
            LangDescriptor::Graph { program } => {
                let (u, v) = pair_decode(x);
                program.value(u) == Some(v)
            }
            LangDescriptor::Uniform { family, index } => family.member(*index, x),
        }
    }

    /// The canonical ultimately periodic presentation, where one exists.
    ///
    /// Graph descriptors (and only those) are outside the algebra.
    pub fn normal_form(&self) -> Option<UltPeriodic> {
        let (n, p) = self.periodicity_bound()?;
        Some(UltPeriodic::from_fn(|x| self.member(x), n, p))
    }

    /// A valid (not necessarily minimal) threshold and period.
    fn periodicity_bound(&self) -> Option<(u64, u64)> {
        match self {
            LangDescriptor::Finite { xs } | LangDescriptor::Cofinite { xs } => {
                Some((xs.last().map_or(0, |m| m + 1), 1))
            }
            LangDescriptor::Evens => Some((0, 2)),
            LangDescriptor::EvensPlusOne => Some((2, 2)),
            LangDescriptor::Split { xs } => match xs {
                SplitSet::All => Some((0, 2)),
                SplitSet::Finite(set) => Some((set.last().map_or(0, |m| 2 * m + 2), 2)),
            },
            LangDescriptor::BaseWithException { base, x } => {
                let (n, p) = base.periodicity_bound()?;
                Some((n.max(x + 1), p))
            }
            LangDescriptor::DoubledPair { base, exception } => {
                let (n, p) = base.periodicity_bound()?;
                let exc_bound = match exception {
                    Some(DoubledException::Odd { x }) => 2 * x + 2,
                    Some(DoubledException::Even { x }) => 2 * x + 1,
                    None => 0,
                };
                Some(((2 * n + 1).max(exc_bound), 2 * p))
            }
            LangDescriptor::Graph { .. } => None,
            LangDescriptor::Uniform {
                family: UniformFamily::SplitLevel,
                index,
            } => Some((index + 1, 2)),
        }
    }

    /// Decides extension equality where possible.
    ///
    /// `None` means the symbolic algebra cannot decide (some graph descriptor
    /// is involved and the two are not structurally identical).
    pub fn equal_exact(&self, other: &LangDescriptor) -> Option<bool> {
        match (self.normal_form(), other.normal_form()) {
            (Some(a), Some(b)) => Some(a == b),
            _ if self == other => Some(true),
            _ => None,
        }
    }

    /// Decides extension inclusion `self ⊆ other` where possible.
    pub fn subset_exact(&self, other: &LangDescriptor) -> Option<bool> {
        match (self.normal_form(), other.normal_form()) {
            (Some(a), Some(b)) => Some(a.subset_of(&b)),
            _ if self == other => Some(true),
            _ => None,
        }
    }

    /// Short human-readable rendering for reports.
    pub fn render(&self) -> String {
        fn set(xs: &BTreeSet<u64>) -> String {
            let inner: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", inner.join(","))
        }
        match self {
            LangDescriptor::Finite { xs } => format!("Finite{}", set(xs)),
            LangDescriptor::Cofinite { xs } => format!("Cofinite{}", set(xs)),
            LangDescriptor::Evens => "Evens".into(),
            LangDescriptor::EvensPlusOne => "Evens+1".into(),
            LangDescriptor::Split { xs: SplitSet::All } => "Split{all}".into(),
            LangDescriptor::Split {
                xs: SplitSet::Finite(s),
            } => format!("Split{}", set(s)),
            LangDescriptor::BaseWithException { base, x } => {
                format!("{}+exc({x})", base.render())
            }
            LangDescriptor::DoubledPair { base, exception } => {
                let exc = match exception {
                    None => String::new(),
                    Some(DoubledException::Odd { x }) => format!("+odd({x})"),
                    Some(DoubledException::Even { x }) => format!("+even({x})"),
                };
                format!("Doubled[{}]{exc}", base.render())
            }
            LangDescriptor::Graph { program } => format!("Graph[{}]", program.tag()),
            LangDescriptor::Uniform { family, index } => {
                format!("{family:?}({index})")
            }
        }
    }
}

impl fmt::Display for LangDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Canonical presentation of an ultimately periodic subset of ℕ.
///
/// Membership of `x < threshold` is `head[x]`; membership of `x ≥ threshold`
/// is `(x mod period) ∈ residues` (absolute phase). Canonical means the
/// period is the minimal eventual period and the threshold is minimal for
/// that period, which makes the presentation unique: equality of canonical
/// forms is extension equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltPeriodic {
    head: Vec<bool>,
    period: u64,
    residues: BTreeSet<u64>,
}

impl UltPeriodic {
    /// Samples `member` given a valid threshold/period pair, then
    /// canonicalizes.
    pub fn from_fn<F: FnMut(u64) -> bool>(mut member: F, threshold: u64, period: u64) -> Self {
        assert!(period >= 1, "period must be positive");
        let head: Vec<bool> = (0..threshold).map(&mut member).collect();
        let residues: BTreeSet<u64> = (threshold..threshold + period)
            .filter(|&x| member(x))
            .map(|x| x % period)
            .collect();
        let mut up = UltPeriodic {
            head,
            period,
            residues,
        };
        up.canonicalize();
        up
    }

    fn canonicalize(&mut self) {
        // Minimal eventual period divides any valid period, so scanning the
        // divisors in increasing order finds it.
        for d in 1..=self.period {
            if self.period % d != 0 {
                continue;
            }
            let periodic = (0..self.period)
                .all(|r| self.residues.contains(&r) == self.residues.contains(&(r % d)));
            if periodic {
                self.residues.retain(|&r| r < d);
                self.period = d;
                break;
            }
        }
        // Minimal threshold: fold head bits into the periodic tail while they
        // already agree with it.
        while let Some(&last) = self.head.last() {
            let x = self.head.len() as u64 - 1;
            if last == self.residues.contains(&(x % self.period)) {
                self.head.pop();
            } else {
                break;
            }
        }
    }

    pub fn member(&self, x: u64) -> bool {
        match self.head.get(x as usize) {
            Some(&bit) => bit,
            None => self.residues.contains(&(x % self.period)),
        }
    }

    pub fn threshold(&self) -> u64 {
        self.head.len() as u64
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Is the denoted set finite?
    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    /// Cardinality, where finite.
    pub fn count(&self) -> Option<u64> {
        self.is_finite()
            .then(|| self.head.iter().filter(|&&b| b).count() as u64)
    }

    /// Pointwise combination under `op`, re-canonicalized.
    pub fn zip_with<F: Fn(bool, bool) -> bool>(&self, other: &UltPeriodic, op: F) -> UltPeriodic {
        let period = lcm(self.period, other.period);
        let threshold = self.threshold().max(other.threshold());
        UltPeriodic::from_fn(|x| op(self.member(x), other.member(x)), threshold, period)
    }

    /// Extension inclusion `self ⊆ other`, decided exactly.
    pub fn subset_of(&self, other: &UltPeriodic) -> bool {
        let bound = self.threshold().max(other.threshold())
            + lcm(self.period, other.period);
        (0..bound).all(|x| !self.member(x) || other.member(x))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
