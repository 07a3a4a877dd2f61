//! Deterministic interning of hypothesis codes.
//!
//! A [`Registry`] assigns consecutive natural numbers to hypothesis
//! construction keys, in first-use order. A scenario builds a fresh registry,
//! so the codes appearing in its artifacts depend only on the run itself and
//! replays are byte-identical. Equal keys always receive equal codes, which
//! is what syntactic monitors (convergence, syntactic decisiveness) observe.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::descriptor::LangDescriptor;

/// An interned hypothesis code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Code(pub u64);

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a code stands for, as recorded in trace sidecars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "binding", rename_all = "camelCase")]
pub enum CodeSummary {
    /// Backed by a symbolic descriptor.
    Exact {
        descriptor: LangDescriptor,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        salt: Option<u64>,
    },
    /// Backed by a step-bounded enumeration; only its provenance is
    /// serializable.
    Enumerated {
        provenance: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        salt: Option<u64>,
    },
}

struct Inner {
    by_key: HashMap<String, Code>,
    entries: Vec<CodeSummary>,
}

/// Interns construction keys to consecutive codes.
pub struct Registry {
    inner: Mutex<Inner>,
}

impl Registry {
    pub fn new() -> Self {
        Registry {
            inner: Mutex::new(Inner {
                by_key: HashMap::new(),
                entries: Vec::new(),
            }),
        }
    }

    /// Returns the code for `key`, creating it (with `summary`) on first use.
    pub fn intern<F: FnOnce() -> CodeSummary>(&self, key: String, summary: F) -> Code {
        let mut inner = self.inner.lock().expect("registry lock");
        if let Some(&code) = inner.by_key.get(&key) {
            return code;
        }
        let code = Code(inner.entries.len() as u64);
        inner.entries.push(summary());
        inner.by_key.insert(key, code);
        code
    }

    /// The summary recorded for `code`, if the code was interned here.
    pub fn summary(&self, code: Code) -> Option<CodeSummary> {
        let inner = self.inner.lock().expect("registry lock");
        inner.entries.get(code.0 as usize).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("registry lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot of all `(code, summary)` pairs, in code order.
    pub fn code_table(&self) -> Vec<(Code, CodeSummary)> {
        let inner = self.inner.lock().expect("registry lock");
        inner
            .entries
            .iter()
            .enumerate()
            .map(|(i, s)| (Code(i as u64), s.clone()))
            .collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new()
    }
}
