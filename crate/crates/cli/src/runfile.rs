// SPDX-License-Identifier: Apache-2.0
//! Per-fault ATPG run files.
//!
//! A run file is CSV with a block of `# key=value` lines in front:
//!
//! ```text
//! # circuit=c432
//! # policy=ffr
//! # backtrack_limit=100
//! # universe=1234
//! # dead_logic_faults=0
//! # ffr_avg_depth=1.8700
//! # seed=0
//! fault,status,backtracks,backtrace_steps,decisions
//! N1 OUT SA0,detected,0,4,3
//! ```
//!
//! `backtrack_limit` is `unlimited` when there is no budget.

use std::fmt::Write as _;
use std::io::Write;

use ffr_atpg::AtpgStatus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const COLUMNS: [&str; 5] = [
    "fault",
    "status",
    "backtracks",
    "backtrace_steps",
    "decisions",
];

#[derive(Debug, Error)]
pub enum RunFileError {
    #[error("missing header field '{0}'")]
    MissingField(&'static str),
    #[error("bad value for '{field}': {value}")]
    BadField { field: &'static str, value: String },
    #[error("expected columns {expected}, found {found}")]
    Columns { expected: String, found: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunHeader {
    pub circuit: String,
    pub policy: String,
    /// `None` means unlimited.
    pub backtrack_limit: Option<u64>,
    /// Size of the uncollapsed fault universe the run was drawn from.
    pub universe: u64,
    pub dead_logic_faults: u64,
    pub ffr_avg_depth: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultRow {
    pub fault: String,
    pub status: AtpgStatus,
    pub backtracks: u64,
    pub backtrace_steps: u64,
    pub decisions: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFile {
    pub header: RunHeader,
    pub rows: Vec<FaultRow>,
}

pub fn format_limit(limit: Option<u64>) -> String {
    limit.map_or_else(|| "unlimited".to_string(), |l| l.to_string())
}

impl RunFile {
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let h = &self.header;
        let mut head = String::new();
        let _ = writeln!(head, "# circuit={}", h.circuit);
        let _ = writeln!(head, "# policy={}", h.policy);
        let _ = writeln!(
            head,
            "# backtrack_limit={}",
            format_limit(h.backtrack_limit)
        );
        let _ = writeln!(head, "# universe={}", h.universe);
        let _ = writeln!(head, "# dead_logic_faults={}", h.dead_logic_faults);
        let _ = writeln!(head, "# ffr_avg_depth={:.4}", h.ffr_avg_depth);
        let _ = writeln!(head, "# seed={}", h.seed);
        w.write_all(head.as_bytes())?;
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        csv.write_record(COLUMNS)?;
        for r in &self.rows {
            csv.serialize(r)?;
        }
        csv.flush()
    }

    pub fn parse(text: &str) -> Result<RunFile, RunFileError> {
        let mut fields = std::collections::HashMap::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(meta) = line.trim().strip_prefix('#') else {
                break;
            };
            body_start += line.len();
            if let Some((k, v)) = meta.split_once('=') {
                fields.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let get = |name: &'static str| fields.get(name).ok_or(RunFileError::MissingField(name));
        fn num<T: std::str::FromStr>(name: &'static str, v: &str) -> Result<T, RunFileError> {
            v.parse().map_err(|_| RunFileError::BadField {
                field: name,
                value: v.to_string(),
            })
        }
        let limit = get("backtrack_limit")?;
        let header = RunHeader {
            circuit: get("circuit")?.clone(),
            policy: get("policy")?.clone(),
            backtrack_limit: if limit == "unlimited" {
                None
            } else {
                Some(num("backtrack_limit", limit)?)
            },
            universe: num("universe", get("universe")?)?,
            dead_logic_faults: num("dead_logic_faults", get("dead_logic_faults")?)?,
            ffr_avg_depth: num("ffr_avg_depth", get("ffr_avg_depth")?)?,
            seed: num("seed", get("seed")?)?,
        };
        let mut reader = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let found = reader
            .headers()
            .map_err(|e| RunFileError::Row {
                row: 0,
                message: e.to_string(),
            })?
            .clone();
        if found.iter().ne(COLUMNS) {
            return Err(RunFileError::Columns {
                expected: COLUMNS.join(","),
                found: found.iter().collect::<Vec<_>>().join(","),
            });
        }
        let rows = reader
            .deserialize()
            .enumerate()
            .map(|(i, r)| {
                r.map_err(|e| RunFileError::Row {
                    row: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<FaultRow>, _>>()?;
        Ok(RunFile { header, rows })
    }
}
