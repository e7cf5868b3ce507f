//! JSON result record for a single solve.

use std::collections::BTreeMap;

use covsat_core::{SatRun, SatVerdict, Trace};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReasonRecord {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub instance: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<ReasonRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub n: usize,
    pub m: usize,
    pub input_length: usize,
    pub op_total: u64,
    pub op_by_kind: BTreeMap<String, u64>,
    pub extensions: usize,
    pub elapsed_ms: u128,
    pub trace_hash: String,
}

pub fn trace_hash(trace: &Trace) -> String {
    hex::encode(Sha256::digest(trace.render().as_bytes()))
}

impl SolveReport {
    pub fn new(instance: &str, vars: usize, clauses: usize, input_length: usize, run: &SatRun, elapsed_ms: u128) -> Self {
        let (verdict, assignment, reason, detail) = match &run.verdict {
            SatVerdict::Sat { assignment } => ("SAT", Some(assignment.to_literals()), None, None),
            SatVerdict::Unsat { reason } => (
                "UNSAT",
                None,
                Some(ReasonRecord {
                    kind: reason.kind().to_string(),
                    index: reason.index(),
                }),
                None,
            ),
            SatVerdict::EngineError { detail } => ("ERROR", None, None, Some(detail.clone())),
        };
        let op_by_kind = BTreeMap::from([
            ("assignment".to_string(), run.ops.assignments),
            ("arithmetic".to_string(), run.ops.arithmetic),
            ("comparison".to_string(), run.ops.comparisons),
        ]);
        SolveReport {
            instance: instance.to_string(),
            verdict: verdict.to_string(),
            assignment,
            reason,
            detail,
            n: vars,
            m: clauses,
            input_length,
            op_total: run.ops.total(),
            op_by_kind,
            extensions: run.stats.extensions,
            elapsed_ms,
            trace_hash: trace_hash(&run.trace),
        }
    }
}
