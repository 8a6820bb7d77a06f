// SPDX-License-Identifier: Apache-2.0
use rayon::prelude::*;
use serde::Serialize;

use super::{generate_test, AtpgResult, AtpgStatus, BacktracePolicy};
use crate::circuit::Circuit;
use crate::error::FaultError;
use crate::fault::FaultSite;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultOutcome {
    pub fault: FaultSite,
    pub result: AtpgResult,
}

/// Totals over a fault list.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunMetrics {
    pub faults: u64,
    pub detected: u64,
    pub untestable: u64,
    pub aborted: u64,
    pub backtracks: u64,
    pub backtrace_steps: u64,
    pub decisions: u64,
}

impl RunMetrics {
    pub fn from_outcomes(outcomes: &[FaultOutcome]) -> RunMetrics {
        let mut m = RunMetrics::default();
        for o in outcomes {
            m.add(&o.result);
        }
        m
    }

    pub fn add(&mut self, r: &AtpgResult) {
        self.faults += 1;
        match r.status {
            AtpgStatus::Detected => self.detected += 1,
            AtpgStatus::Untestable => self.untestable += 1,
            AtpgStatus::Aborted => self.aborted += 1,
        }
        self.backtracks += r.backtracks;
        self.backtrace_steps += r.backtrace_steps;
        self.decisions += r.decisions;
    }

    /// Aborted plus untestable.
    pub fn undetected(&self) -> u64 {
        self.untestable + self.aborted
    }

    /// Undetected faults as a percentage of `universe`.
    pub fn ufp(&self, universe: u64) -> f64 {
        if universe == 0 {
            0.0
        } else {
            100.0 * self.undetected() as f64 / universe as f64
        }
    }
}

/// Runs every fault independently on up to `parallelism` threads.
///
/// `make_policy` builds a fresh policy per fault, so results depend only on
/// the fault and never on scheduling; outcomes come back in input order.
pub fn run_fault_list<P, F>(
    circuit: &Circuit,
    faults: &[FaultSite],
    make_policy: F,
    backtrack_limit: u64,
    parallelism: usize,
) -> Result<Vec<FaultOutcome>, FaultError>
where
    P: BacktracePolicy,
    F: Fn() -> P + Sync,
{
    let one = |&fault: &FaultSite| -> Result<FaultOutcome, FaultError> {
        let mut policy = make_policy();
        let result = generate_test(circuit, fault, &mut policy, backtrack_limit)?;
        Ok(FaultOutcome { fault, result })
    };
    if parallelism <= 1 {
        return faults.iter().map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool");
    pool.install(|| faults.par_iter().map(one).collect())
}
