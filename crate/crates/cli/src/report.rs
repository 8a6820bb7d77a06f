// SPDX-License-Identifier: Apache-2.0
//! Comparison tables over run files.
//!
//! Runs are grouped by circuit. Within a circuit one policy is the target
//! (by default `rl` when present, else `ffr`) and every row is compared
//! against it:
//!
//! - `red1`: backtrack reduction of the target, `(row - target) / row * 100`
//! - `red2`: the same for backtrace steps
//! - `diff`: undetected faults of the row minus those of the target
//! - `imp`: relative UFP improvement, `(ufp_row - ufp_target) / ufp_row * 100`
//! - `decision_ratio`: `decisions_row / decisions_target`
//!
//! Percentages with a zero denominator are left empty. Every number is
//! recomputed from the per-fault rows; the header only contributes the
//! universe size, dead-logic count and average region depth.

use std::collections::BTreeMap;

use ffr_atpg::AtpgStatus;
use serde::Serialize;
use thiserror::Error;

use crate::runfile::{format_limit, RunFile};

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("no run files given")]
    Empty,
    #[error("two runs of policy '{policy}' for circuit '{circuit}'")]
    Duplicate { circuit: String, policy: String },
    #[error("runs for circuit '{circuit}' disagree on {field}")]
    Mismatch {
        circuit: String,
        field: &'static str,
    },
    #[error("target policy '{target}' missing for circuit '{circuit}'")]
    MissingTarget { circuit: String, target: String },
}

/// Totals of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Totals {
    pub faults: u64,
    pub detected: u64,
    pub untestable: u64,
    pub aborted: u64,
    pub backtracks: u64,
    pub backtrace_steps: u64,
    pub decisions: u64,
}

impl Totals {
    pub fn of(run: &RunFile) -> Totals {
        let mut t = Totals::default();
        for r in &run.rows {
            t.faults += 1;
            match r.status {
                AtpgStatus::Detected => t.detected += 1,
                AtpgStatus::Untestable => t.untestable += 1,
                AtpgStatus::Aborted => t.aborted += 1,
            }
            t.backtracks += r.backtracks;
            t.backtrace_steps += r.backtrace_steps;
            t.decisions += r.decisions;
        }
        t
    }

    pub fn undetected(&self) -> u64 {
        self.untestable + self.aborted
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub circuit: String,
    pub policy: String,
    pub target: String,
    pub backtrack_limit: String,
    #[serde(flatten)]
    pub totals: Totals,
    pub ud_faults: u64,
    pub universe: u64,
    pub ufp: f64,
    pub dead_logic_faults: u64,
    pub ffr_avg_depth: f64,
    pub red1: Option<f64>,
    pub red2: Option<f64>,
    pub diff: i64,
    pub imp: Option<f64>,
    pub decision_ratio: Option<f64>,
}

/// `(other - target) / other * 100`, or `None` when `other` is zero.
pub fn reduction(other: f64, target: f64) -> Option<f64> {
    (other != 0.0).then(|| (other - target) / other * 100.0)
}

pub fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

pub fn ufp(undetected: u64, universe: u64) -> f64 {
    if universe == 0 {
        0.0
    } else {
        100.0 * undetected as f64 / universe as f64
    }
}

fn policy_rank(p: &str) -> (u8, &str) {
    match p {
        "gate" => (0, p),
        "ffr" => (1, p),
        "rl" => (2, p),
        _ => (3, p),
    }
}

/// Builds comparison rows, ordered by circuit then policy (gate, ffr, rl,
/// then the rest alphabetically).
pub fn build(runs: &[RunFile], target: Option<&str>) -> Result<Vec<ReportRow>, ReportError> {
    if runs.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut by_circuit: BTreeMap<&str, Vec<&RunFile>> = BTreeMap::new();
    for run in runs {
        let group = by_circuit.entry(&run.header.circuit).or_default();
        if group.iter().any(|r| r.header.policy == run.header.policy) {
            return Err(ReportError::Duplicate {
                circuit: run.header.circuit.clone(),
                policy: run.header.policy.clone(),
            });
        }
        if let Some(first) = group.first() {
            let mismatch = |field| ReportError::Mismatch {
                circuit: run.header.circuit.clone(),
                field,
            };
            if first.header.backtrack_limit != run.header.backtrack_limit {
                return Err(mismatch("backtrack_limit"));
            }
            if first.header.universe != run.header.universe {
                return Err(mismatch("universe"));
            }
            let faults = |r: &RunFile| r.rows.iter().map(|f| f.fault.clone()).collect::<Vec<_>>();
            if faults(first) != faults(run) {
                return Err(mismatch("fault list"));
            }
        }
        group.push(run);
    }
    let mut out = Vec::new();
    for (circuit, mut group) in by_circuit {
        group.sort_by(|a, b| policy_rank(&a.header.policy).cmp(&policy_rank(&b.header.policy)));
        let target_name = match target {
            Some(t) => t.to_string(),
            None => ["rl", "ffr"]
                .into_iter()
                .find(|t| group.iter().any(|r| r.header.policy == *t))
                .unwrap_or(&group[0].header.policy)
                .to_string(),
        };
        let target_run = group
            .iter()
            .find(|r| r.header.policy == target_name)
            .ok_or_else(|| ReportError::MissingTarget {
                circuit: circuit.to_string(),
                target: target_name.clone(),
            })?;
        let tt = Totals::of(target_run);
        let t_ufp = ufp(tt.undetected(), target_run.header.universe);
        for run in group {
            let h = &run.header;
            let t = Totals::of(run);
            let row_ufp = ufp(t.undetected(), h.universe);
            out.push(ReportRow {
                circuit: circuit.to_string(),
                policy: h.policy.clone(),
                target: target_name.clone(),
                backtrack_limit: format_limit(h.backtrack_limit),
                ud_faults: t.undetected(),
                universe: h.universe,
                ufp: row_ufp,
                dead_logic_faults: h.dead_logic_faults,
                ffr_avg_depth: h.ffr_avg_depth,
                red1: reduction(t.backtracks as f64, tt.backtracks as f64),
                red2: reduction(t.backtrace_steps as f64, tt.backtrace_steps as f64),
                diff: t.undetected() as i64 - tt.undetected() as i64,
                imp: reduction(row_ufp, t_ufp),
                decision_ratio: ratio(t.decisions as f64, tt.decisions as f64),
                totals: t,
            });
        }
    }
    Ok(out)
}

const REPORT_COLUMNS: &str =
    "circuit,policy,target,backtrack_limit,faults,detected,untestable,aborted,\
backtracks,backtrace_steps,decisions,ud_faults,universe,ufp,dead_logic_faults,ffr_avg_depth,\
red1,red2,diff,imp,decision_ratio";

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(String::new, |x| format!("{x:.digits$}"))
}

/// Fixed-precision CSV, byte-identical for identical inputs.
pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut s = String::from(REPORT_COLUMNS);
    s.push('\n');
    for r in rows {
        let t = &r.totals;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.4},{},{:.4},{},{},{},{},{}\n",
            r.circuit,
            r.policy,
            r.target,
            r.backtrack_limit,
            t.faults,
            t.detected,
            t.untestable,
            t.aborted,
            t.backtracks,
            t.backtrace_steps,
            t.decisions,
            r.ud_faults,
            r.universe,
            r.ufp,
            r.dead_logic_faults,
            r.ffr_avg_depth,
            opt(r.red1, 2),
            opt(r.red2, 2),
            r.diff,
            opt(r.imp, 2),
            opt(r.decision_ratio, 4),
        ));
    }
    s
}
