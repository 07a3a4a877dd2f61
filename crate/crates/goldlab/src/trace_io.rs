//! Trace persistence: a JSON-lines step file plus a sidecar code table.
//!
//! The step file holds one record per step, `{"t":0,"x":0,"label":true,"h":0}`,
//! where `h` is a code renumbered densely by first appearance, so files are
//! byte-stable regardless of how the producing registry numbered things. The
//! sidecar (same path with `.codes.json` appended) resolves every dense code
//! to its summary and records the trace's target, if any. An empty trace is
//! an empty step file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{InfoPair, Prefix};
use crate::descriptor::LangDescriptor;
use crate::hypothesis::{Binding, Hypothesis, Space};
use crate::learner::Trace;
use crate::registry::{Code, CodeSummary};

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("cannot {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: code {code} is not among the sidecar's {size} entries")]
    MissingCode { line: usize, code: u64, size: usize },
    #[error("sidecar {path}: {message}")]
    Sidecar { path: String, message: String },
}

/// One step of the JSON-lines file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StepRecord {
    t: usize,
    x: u64,
    label: bool,
    h: u64,
}

/// The sidecar: target plus the dense code table, indexed by the `h` values
/// of the step file in order of first appearance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceSidecar {
    pub target: Option<LangDescriptor>,
    pub codes: Vec<CodeSummary>,
}

/// Where the code table for a given step file lives.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".codes.json");
    PathBuf::from(os)
}

fn summary_of(h: &Hypothesis) -> CodeSummary {
    match h.binding() {
        Binding::Exact(d) => CodeSummary::Exact {
            descriptor: d.clone(),
            salt: h.salt(),
        },
        Binding::Enumerated(en) => CodeSummary::Enumerated {
            provenance: en.provenance().to_string(),
            salt: h.salt(),
        },
        Binding::Opaque { provenance } => CodeSummary::Enumerated {
            provenance: provenance.clone(),
            salt: h.salt(),
        },
    }
}

/// Renders a trace to its step lines and sidecar.
pub fn render_jsonl(tr: &Trace) -> (String, TraceSidecar) {
    let mut dense: Vec<(Code, u64)> = Vec::new();
    let mut codes = Vec::new();
    let mut lines = String::new();
    for t in 0..tr.len() {
        let hyp = tr.hyp(t);
        let h = match dense.iter().find(|(c, _)| *c == hyp.code()) {
            Some((_, d)) => *d,
            None => {
                let d = codes.len() as u64;
                dense.push((hyp.code(), d));
                codes.push(summary_of(hyp));
                d
            }
        };
        let pair = &tr.prefix().items()[t];
        let record = StepRecord { t, x: pair.x, label: pair.label, h };
        lines.push_str(&serde_json::to_string(&record).expect("step record serializes"));
        lines.push('\n');
    }
    let sidecar = TraceSidecar {
        target: tr.target().cloned(),
        codes,
    };
    (lines, sidecar)
}

/// Rebuilds a trace from step lines and a sidecar. Codes are re-minted in
/// the space under a namespace keyed by the recorded numbers, preserving the
/// file's code-identity pattern; load each file into its own space so code
/// identities from different files stay disjoint. Exact summaries come back
/// with full semantics, enumerated ones as opaque codes.
pub fn parse_jsonl(
    space: &Space,
    lines: &str,
    sidecar: &TraceSidecar,
) -> Result<Trace, TraceIoError> {
    let mut prefix = Prefix::empty();
    let mut hyps: Vec<Hypothesis> = Vec::new();
    let mut reloaded: Vec<Option<Hypothesis>> = vec![None; sidecar.codes.len()];
    for (i, line) in lines.lines().enumerate() {
        let lineno = i + 1;
        let record: StepRecord = serde_json::from_str(line).map_err(|e| TraceIoError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if record.t != i {
            return Err(TraceIoError::Parse {
                line: lineno,
                message: format!("step index {} out of order, expected {i}", record.t),
            });
        }
        let slot = record.h as usize;
        if slot >= sidecar.codes.len() {
            return Err(TraceIoError::MissingCode {
                line: lineno,
                code: record.h,
                size: sidecar.codes.len(),
            });
        }
        let hyp = reloaded[slot]
            .get_or_insert_with(|| space.reload(Code(record.h), &sidecar.codes[slot]))
            .clone();
        prefix
            .push(InfoPair::new(record.x, record.label))
            .map_err(|e| TraceIoError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
        hyps.push(hyp);
    }
    Ok(Trace::from_parts(prefix, hyps, sidecar.target.clone()))
}

/// Writes the step file at `path` and its sidecar next to it.
pub fn dump_trace(tr: &Trace, path: &Path) -> Result<(), TraceIoError> {
    let (lines, sidecar) = render_jsonl(tr);
    fs::write(path, lines).map_err(|source| TraceIoError::Io {
        action: "write",
        path: path.display().to_string(),
        source,
    })?;
    let side = sidecar_path(path);
    let mut body = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    body.push('\n');
    fs::write(&side, body).map_err(|source| TraceIoError::Io {
        action: "write",
        path: side.display().to_string(),
        source,
    })
}

/// Reads a step file and its sidecar back into a trace.
pub fn load_trace(space: &Space, path: &Path) -> Result<Trace, TraceIoError> {
    let lines = fs::read_to_string(path).map_err(|source| TraceIoError::Io {
        action: "read",
        path: path.display().to_string(),
        source,
    })?;
    let side = sidecar_path(path);
    let body = fs::read_to_string(&side).map_err(|source| TraceIoError::Io {
        action: "read",
        path: side.display().to_string(),
        source,
    })?;
    let sidecar: TraceSidecar =
        serde_json::from_str(&body).map_err(|e| TraceIoError::Sidecar {
            path: side.display().to_string(),
            message: e.to_string(),
        })?;
    parse_jsonl(space, &lines, &sidecar)
}
