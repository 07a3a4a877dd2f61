//! Informants: complete labelled presentations of a language.
//!
//! An informant for `L` presents, over time, every natural number with its
//! membership bit. The *canonical* informant presents `t` at time `t`. A
//! [`Schedule`] reorders or repeats the presentation while keeping the
//! defining property: every natural number appears at some time. Coverage is
//! a consequence of the schedule's shape, checkable by [`Schedule::validate`]
//! without running anything.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, InfoPair, Prefix};
use crate::descriptor::LangDescriptor;
use crate::pairing::{pair_decode, pair_encode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("block permutation of width {width} must permute 0..{width}, got {perm:?}")]
    NotAPermutation { width: usize, perm: Vec<usize> },
    #[error("{field} must be at least 1")]
    ZeroParameter { field: &'static str },
}

/// A value presentation order with statically checkable coverage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Schedule {
    /// Present `t` at time `t`.
    Identity,
    /// Apply one fixed permutation inside each consecutive block:
    /// time `q·w + r` presents `q·w + perm[r]`.
    BlockPermutation { perm: Vec<usize> },
    /// Present `⌊t / factor⌋`: every value shown `factor` times in a row.
    Duplicate { factor: u64 },
    /// A fresh seeded permutation inside each consecutive block of `width`.
    SeededBlocks { seed: u64, width: usize },
}

impl Schedule {
    /// Checks the shape invariants that guarantee coverage.
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match self {
            Schedule::Identity => Ok(()),
            Schedule::BlockPermutation { perm } => {
                let width = perm.len();
                let mut seen = vec![false; width];
                let ok = width >= 1
                    && perm.iter().all(|&i| {
                        i < width && !std::mem::replace(&mut seen[i], true)
                    });
                if ok {
                    Ok(())
                } else {
                    Err(ScheduleError::NotAPermutation {
                        width,
                        perm: perm.clone(),
                    })
                }
            }
            Schedule::Duplicate { factor } => {
                if *factor >= 1 {
                    Ok(())
                } else {
                    Err(ScheduleError::ZeroParameter { field: "factor" })
                }
            }
            Schedule::SeededBlocks { width, .. } => {
                if *width >= 1 {
                    Ok(())
                } else {
                    Err(ScheduleError::ZeroParameter { field: "width" })
                }
            }
        }
    }

    /// The value presented at time `t`.
    pub fn value_at(&self, t: u64) -> u64 {
        match self {
            Schedule::Identity => t,
            Schedule::BlockPermutation { perm } => {
                let w = perm.len() as u64;
                let (q, r) = (t / w, (t % w) as usize);
                q * w + perm[r] as u64
            }
            Schedule::Duplicate { factor } => t / factor.max(&1),
            Schedule::SeededBlocks { seed, width } => {
                let w = *width as u64;
                let (q, r) = (t / w, (t % w) as usize);
                q * w + block_perm(*seed, q, *width)[r] as u64
            }
        }
    }

    /// Time by which every value below `n` has certainly been presented.
    pub fn coverage_horizon(&self, n: u64) -> u64 {
        match self {
            Schedule::Identity => n,
            Schedule::BlockPermutation { perm } => {
                n.div_ceil(perm.len() as u64) * perm.len() as u64
            }
            Schedule::Duplicate { factor } => n * factor.max(&1),
            Schedule::SeededBlocks { width, .. } => {
                n.div_ceil(*width as u64) * *width as u64
            }
        }
    }
}

/// The permutation used by [`Schedule::SeededBlocks`] inside block `q`.
fn block_perm(seed: u64, block: u64, width: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(block + 1)));
    let mut perm: Vec<usize> = (0..width).collect();
    perm.shuffle(&mut rng);
    perm
}

/// SplitMix64 finalizer; spreads nearby seeds apart.
fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Recasts a finite run of function observations `(x_k, v_k)` as an informant
/// prefix for the function's graph language `{⟨x, f(x)⟩ : x ∈ ℕ}`.
///
/// Position `i = ⟨k, v⟩` presents the point `⟨x_k, v⟩`, labelled positive
/// exactly when observation `k` reported value `v`; entries stop at the first
/// `i` whose first projection points past the run, so every label is justified
/// by an observation on hand. Observation `(x_k, v_k)` therefore appears
/// positively once the run reaches length `k + v_k + 1`, and each wrong value
/// for an observed input eventually appears negatively, so over a growing run
/// of observations these prefixes converge to an informant for the graph.
/// Runs that disagree about some input produce contradictory labels, which is
/// an error.
pub fn graph_prefix(observations: &[(u64, u64)]) -> Result<Prefix, DataError> {
    let n = observations.len() as u64;
    let mut prefix = Prefix::empty();
    for i in 0.. {
        let (k, v) = pair_decode(i);
        if k >= n {
            break;
        }
        let (x, reported) = observations[k as usize];
        prefix.push(InfoPair::new(pair_encode(x, v), reported == v))?;
    }
    Ok(prefix)
}

/// A target language together with a presentation order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Informant {
    pub target: LangDescriptor,
    pub schedule: Schedule,
}

impl Informant {
    /// The canonical informant: value `t` at time `t`.
    pub fn canonical(target: LangDescriptor) -> Self {
        Informant {
            target,
            schedule: Schedule::Identity,
        }
    }

    /// A scheduled informant (validates the schedule).
    pub fn scheduled(target: LangDescriptor, schedule: Schedule) -> Result<Self, ScheduleError> {
        schedule.validate()?;
        Ok(Informant { target, schedule })
    }

    /// The datum presented at time `t`.
    pub fn pair_at(&self, t: u64) -> InfoPair {
        let x = self.schedule.value_at(t);
        InfoPair::new(x, self.target.member(x))
    }

    /// The first `n` data as a prefix. Labels come from one language, so the
    /// prefix is contradiction-free by construction.
    pub fn prefix(&self, n: usize) -> Prefix {
        Prefix::new((0..n as u64).map(|t| self.pair_at(t)))
            .expect("informant labels are single-valued")
    }
}
