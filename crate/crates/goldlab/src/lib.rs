//! Desk-scale laboratory for limit learning from informants.
//!
//! An *informant* for a language `L ⊆ ℕ` presents every natural number
//! together with its membership bit. A *learner* maps each finite prefix of
//! an informant to a hypothesis code drawn from a decidable hypothesis space.
//! This crate provides:
//!
//! - finite data types for informant prefixes and schedules ([`data`],
//!   [`informant`]);
//! - a hypothesis space with two backends: an exact descriptor algebra with
//!   decidable equality, and step-bounded enumerations ([`descriptor`],
//!   [`hypothesis`]);
//! - a catalogue of small learners exhibiting known behaviours ([`learners`]);
//! - learner rewrites that enforce normal forms (set-drivenness,
//!   totality, syntactic decisiveness, conservativeness with strong
//!   decisiveness, vacillation collapse) ([`transform`]);
//! - monitors that falsify learning restrictions on finite traces and report
//!   least witnesses ([`monitor`]);
//! - reproducible scenarios wiring the above together ([`scenario`]).
//!
//! Everything is finite and deterministic: runs are replayable byte for byte
//! from a scenario description and a seed.

pub mod data;
pub mod descriptor;
pub mod hypothesis;
pub mod informant;
pub mod learner;
pub mod learners;
pub mod monitor;
pub mod pairing;
pub mod program;
pub mod registry;
pub mod scenario;
pub mod trace_io;
pub mod transform;

pub use data::{InfoPair, Prefix};
pub use hypothesis::{Binding, Hypothesis, Space};
pub use informant::{Informant, Schedule};
pub use learner::{Learner, Trace};
pub use registry::{Code, Registry};
