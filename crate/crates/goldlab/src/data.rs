//! Labelled data and contradiction-free prefixes.
//!
//! An informant presents pairs `(x, label)` where `label = 1` asserts
//! membership of `x` in the target language and `label = 0` asserts
//! non-membership. A [`Prefix`] is a finite sequence of such pairs that never
//! labels the same value both ways; repetitions with the same label are fine.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One informant datum: a value together with its membership label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InfoPair {
    pub x: u64,
    pub label: bool,
}

impl InfoPair {
    pub fn new(x: u64, label: bool) -> Self {
        InfoPair { x, label }
    }

    /// A positive datum `(x, 1)`.
    pub fn pos(x: u64) -> Self {
        InfoPair { x, label: true }
    }

    /// A negative datum `(x, 0)`.
    pub fn ng(x: u64) -> Self {
        InfoPair { x, label: false }
    }
}

impl fmt::Debug for InfoPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, u8::from(self.label))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DataError {
    /// The same value appears with both labels.
    #[error("contradictory labels for value {0}")]
    Contradiction(u64),
}

/// A contradiction-free finite sequence of labelled data.
///
/// Maintains its positive and negative value sets alongside the raw sequence,
/// so consistency checks are set lookups.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Prefix {
    items: Vec<InfoPair>,
    pos: BTreeSet<u64>,
    ng: BTreeSet<u64>,
}

impl Prefix {
    pub fn empty() -> Self {
        Prefix::default()
    }

    /// Builds a prefix from a sequence, rejecting contradictory labels.
    pub fn new<I: IntoIterator<Item = InfoPair>>(items: I) -> Result<Self, DataError> {
        let mut p = Prefix::empty();
        for item in items {
            p.push(item)?;
        }
        Ok(p)
    }

    /// Convenience constructor from `(value, label-bit)` pairs.
    pub fn from_pairs(pairs: &[(u64, u8)]) -> Result<Self, DataError> {
        Prefix::new(pairs.iter().map(|&(x, b)| InfoPair::new(x, b != 0)))
    }

    /// Appends one datum, rejecting a label that contradicts an earlier one.
    pub fn push(&mut self, item: InfoPair) -> Result<(), DataError> {
        let clash = if item.label {
            self.ng.contains(&item.x)
        } else {
            self.pos.contains(&item.x)
        };
        if clash {
            return Err(DataError::Contradiction(item.x));
        }
        if item.label {
            self.pos.insert(item.x);
        } else {
            self.ng.insert(item.x);
        }
        self.items.push(item);
        Ok(())
    }

    /// The prefix extended by `items` (fails on contradiction).
    pub fn extend(&self, items: &[InfoPair]) -> Result<Self, DataError> {
        let mut out = self.clone();
        for &item in items {
            out.push(item)?;
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[InfoPair] {
        &self.items
    }

    /// The initial segment of the first `n` data.
    pub fn take(&self, n: usize) -> Prefix {
        Prefix::new(self.items[..n.min(self.items.len())].iter().copied())
            .expect("initial segment of a contradiction-free prefix")
    }

    /// The prefix with its last datum removed (empty stays empty).
    pub fn parent(&self) -> Prefix {
        self.take(self.len().saturating_sub(1))
    }

    /// Values labelled positive.
    pub fn pos(&self) -> &BTreeSet<u64> {
        &self.pos
    }

    /// Values labelled negative.
    pub fn ng(&self) -> &BTreeSet<u64> {
        &self.ng
    }

    /// Does the set decided by `member` agree with every label in this prefix?
    ///
    /// `pos(σ) ⊆ A` and `ng(σ) ∩ A = ∅`.
    pub fn consistent_with<F: FnMut(u64) -> bool>(&self, mut member: F) -> bool {
        self.pos.iter().all(|&x| member(x)) && self.ng.iter().all(|&x| !member(x))
    }

    /// First value (in label order pos-then-ng, ascending) where `member`
    /// disagrees with this prefix, if any.
    pub fn first_conflict<F: FnMut(u64) -> bool>(&self, mut member: F) -> Option<InfoPair> {
        if let Some(&x) = self.pos.iter().find(|&&x| !member(x)) {
            return Some(InfoPair::pos(x));
        }
        self.ng
            .iter()
            .find(|&&x| member(x))
            .map(|&x| InfoPair::ng(x))
    }

    /// The set-driven normal form: the longest canonical-informant prefix this
    /// prefix determines. Values `0..s` are emitted in order with their
    /// labels, where `s` is the first value this prefix says nothing about;
    /// everything past that gap is dropped. Two prefixes with equal positive
    /// and negative sets map to the same canonical sequence.
    pub fn sigma_canonical(&self) -> Prefix {
        let mut items = Vec::new();
        for x in 0.. {
            if self.pos.contains(&x) {
                items.push(InfoPair::pos(x));
            } else if self.ng.contains(&x) {
                items.push(InfoPair::ng(x));
            } else {
                break;
            }
        }
        Prefix::new(items).expect("canonicalization preserves contradiction-freeness")
    }

    /// Is this prefix an initial segment of the canonical informant of some
    /// language, i.e. are the values exactly `0..len`?
    pub fn is_canonical(&self) -> bool {
        self.items
            .iter()
            .enumerate()
            .all(|(i, item)| item.x == i as u64)
    }
}

impl fmt::Debug for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.items.iter()).finish()
    }
}
