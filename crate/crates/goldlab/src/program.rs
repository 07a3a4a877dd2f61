//! Sample programs with step-bounded evaluation.
//!
//! A [`FnProgram`] stands for a (possibly partial) computable function
//! `ℕ ⇀ ℕ`. Evaluation is budgeted: `eval_with_budget(x, t)` returns
//! [`Eval::Halt`] once the budget covers the program's step cost on `x`, and
//! [`Eval::Running`] below that, never changing its answer as the budget
//! grows. Every built-in program charges `(x + 1)²` steps on input `x`, the
//! cost of reading and re-scanning the input once on a single tape.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Outcome of a budgeted evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eval {
    Halt(u64),
    Running,
}

impl Eval {
    pub fn halted(self) -> Option<u64> {
        match self {
            Eval::Halt(v) => Some(v),
            Eval::Running => None,
        }
    }
}

/// A sample program denoting a partial function on ℕ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum FnProgram {
    /// `x ↦ x`.
    Identity,
    /// `x ↦ value`.
    Constant { value: u64 },
    /// `x ↦ x mod modulus` (modulus ≥ 1).
    Mod { modulus: u64 },
    /// `x ↦ x`, except undefined on the listed inputs.
    IdentityExcept { diverges_on: BTreeSet<u64> },
}

impl FnProgram {
    /// The function's value on `x`, or `None` where it diverges.
    pub fn value(&self, x: u64) -> Option<u64> {
        match self {
            FnProgram::Identity => Some(x),
            FnProgram::Constant { value } => Some(*value),
            FnProgram::Mod { modulus } => Some(x % modulus.max(&1)),
            FnProgram::IdentityExcept { diverges_on } => {
                (!diverges_on.contains(&x)).then_some(x)
            }
        }
    }

    /// Steps charged on input `x` (where the program halts at all).
    pub fn cost(&self, x: u64) -> u64 {
        (x + 1).saturating_mul(x + 1)
    }

    /// Budgeted evaluation: `Halt(f(x))` once `budget ≥ cost(x)` (and the
    /// program halts on `x`), `Running` otherwise.
    pub fn eval_with_budget(&self, x: u64, budget: u64) -> Eval {
        match self.value(x) {
            Some(v) if self.cost(x) <= budget => Eval::Halt(v),
            _ => Eval::Running,
        }
    }

    /// Is the program defined on every input?
    pub fn is_total(&self) -> bool {
        match self {
            FnProgram::IdentityExcept { diverges_on } => diverges_on.is_empty(),
            _ => true,
        }
    }

    /// Short display name used in provenance strings.
    pub fn tag(&self) -> String {
        match self {
            FnProgram::Identity => "id".into(),
            FnProgram::Constant { value } => format!("const{value}"),
            FnProgram::Mod { modulus } => format!("mod{modulus}"),
            FnProgram::IdentityExcept { diverges_on } => {
                format!("idexc{}", diverges_on.len())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_of_the_builtins() {
        assert_eq!(FnProgram::Identity.value(7), Some(7));
        assert_eq!(FnProgram::Constant { value: 0 }.value(7), Some(0));
        assert_eq!(FnProgram::Mod { modulus: 3 }.value(7), Some(1));
        let p = FnProgram::IdentityExcept {
            diverges_on: [2].into(),
        };
        assert_eq!(p.value(1), Some(1));
        assert_eq!(p.value(2), None);
    }

    #[test]
    fn evaluation_is_halt_stable() {
        let p = FnProgram::Mod { modulus: 3 };
        for x in 0..20 {
            let c = p.cost(x);
            assert_eq!(p.eval_with_budget(x, c.saturating_sub(1)), Eval::Running);
            let first = p.eval_with_budget(x, c);
            assert_eq!(first, Eval::Halt(x % 3));
            for extra in [0, 1, 10, 1000] {
                assert_eq!(p.eval_with_budget(x, c + extra), first);
            }
        }
    }

    #[test]
    fn divergent_inputs_never_halt() {
        let p = FnProgram::IdentityExcept {
            diverges_on: [5].into(),
        };
        for budget in [0, 36, 1_000_000] {
            assert_eq!(p.eval_with_budget(5, budget), Eval::Running);
        }
        assert_eq!(p.eval_with_budget(6, 49), Eval::Halt(6));
    }

    #[test]
    fn cost_is_quadratic() {
        let p = FnProgram::Identity;
        assert_eq!(p.cost(0), 1);
        assert_eq!(p.cost(1), 4);
        assert_eq!(p.cost(49), 2500);
    }
}
