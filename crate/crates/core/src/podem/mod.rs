// SPDX-License-Identifier: Apache-2.0
//! PODEM branch-and-bound over primary-input assignments.
//!
//! The search only ever assigns inputs and implies forward. Each round picks
//! an objective (excite the fault, then push it through the D-frontier gate
//! closest to an output), backtraces it to an unassigned input under a
//! pluggable policy, and assigns that input. A dead end flips the most recent
//! untried decision; each flip is one backtrack.

mod policy;
mod run;

pub use policy::{
    backtrace, candidates, closest_to_inputs, ffr_candidates, ffr_level_heuristic_policy,
    gate_candidates, gate_level_heuristic_policy, Backtrace, BacktracePolicy, Candidate,
    FfrLevelHeuristic, GateLevelHeuristic, Granularity, HopContext, Objective,
};
pub use run::{run_fault_list, FaultOutcome, RunMetrics};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::FaultError;
use crate::fault::{FaultSite, Pin};
use crate::netlist::{GateId, GateKind};
use crate::sim::{CircuitState, Decision};

/// Backtrack budget used when none is given.
pub const DEFAULT_BACKTRACK_LIMIT: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtpgStatus {
    Detected,
    /// The whole decision tree was exhausted.
    Untestable,
    /// The backtrack limit was reached first.
    Aborted,
}

impl AtpgStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AtpgStatus::Detected => "detected",
            AtpgStatus::Untestable => "untestable",
            AtpgStatus::Aborted => "aborted",
        }
    }
}

impl fmt::Display for AtpgStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AtpgStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "detected" => Ok(AtpgStatus::Detected),
            "untestable" => Ok(AtpgStatus::Untestable),
            "aborted" => Ok(AtpgStatus::Aborted),
            _ => Err(format!("unknown status '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtpgResult {
    pub status: AtpgStatus,
    /// Values in primary-input order; present iff detected.
    pub pattern: Option<Vec<bool>>,
    pub backtracks: u64,
    pub backtrace_steps: u64,
    /// Inputs assigned by backtrace. Flips on backtrack are not decisions.
    pub decisions: u64,
    /// Per primary input (in primary-input order).
    pub pi_visits: Vec<u64>,
    pub pi_backtracks: Vec<u64>,
}

/// What the search needs next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Next {
    Objective(Objective),
    Done(AtpgStatus),
}

/// Resumable PODEM search state for one fault.
///
/// [`Search::advance`] runs the engine up to the next point where a backtrace
/// decision is needed; the caller then reports the steps it took and the
/// input it reached. Both the batch engine and the episodic environment are
/// built on this loop.
#[derive(Clone, Debug)]
pub struct Search {
    state: CircuitState,
    limit: u64,
    backtracks: u64,
    backtrace_steps: u64,
    decisions: u64,
    pi_visits: Vec<u64>,
    pi_backtracks: Vec<u64>,
    input_pos: Vec<Option<usize>>,
    last_decided: Option<usize>,
    /// The current objective sits on a pin driver rather than on the gate
    /// that needs it.
    via_pin: bool,
    dead: bool,
}

impl Search {
    pub fn new(
        circuit: &Circuit,
        fault: FaultSite,
        backtrack_limit: u64,
    ) -> Result<Search, FaultError> {
        let nl = &circuit.netlist;
        fault.validate(nl)?;
        let npi = nl.primary_inputs().len();
        Ok(Search {
            state: CircuitState::new(nl, fault),
            limit: backtrack_limit,
            backtracks: 0,
            backtrace_steps: 0,
            decisions: 0,
            pi_visits: vec![0; npi],
            pi_backtracks: vec![0; npi],
            input_pos: nl.input_positions(),
            last_decided: None,
            via_pin: false,
            dead: !nl.is_observable(fault.gate),
        })
    }

    pub fn state(&self) -> &CircuitState {
        &self.state
    }

    pub fn backtracks(&self) -> u64 {
        self.backtracks
    }

    pub fn backtrace_steps(&self) -> u64 {
        self.backtrace_steps
    }

    pub fn decisions(&self) -> u64 {
        self.decisions
    }

    pub fn pi_visits(&self) -> &[u64] {
        &self.pi_visits
    }

    pub fn pi_backtracks(&self) -> &[u64] {
        &self.pi_backtracks
    }

    /// Runs implication, conflict handling and backtracking until an
    /// objective is available or the search terminates.
    pub fn advance(&mut self, circuit: &Circuit) -> Next {
        if self.dead {
            return Next::Done(AtpgStatus::Untestable);
        }
        loop {
            if self.state.detected(&circuit.netlist) {
                return Next::Done(AtpgStatus::Detected);
            }
            if let Some((o, via_pin)) = self.objective(circuit) {
                self.via_pin = via_pin;
                return Next::Objective(o);
            }
            if let Err(status) = self.backtrack(circuit) {
                return Next::Done(status);
            }
        }
    }

    pub fn add_backtrace_steps(&mut self, steps: u64) {
        self.backtrace_steps += steps;
    }

    /// Steps charged before the policy's first hop for the objective last
    /// returned by [`Search::advance`].
    ///
    /// Propagation and input-pin activation objectives arise on a pin, so
    /// backtrace starts at the gate owning the pin and crossing into the
    /// driver is a hop. At region granularity that crossing is absorbed into
    /// the driver's own region hop unless the driver lies outside the owning
    /// gate's region.
    pub fn entry_steps(
        &self,
        circuit: &Circuit,
        objective: Objective,
        granularity: Granularity,
    ) -> u64 {
        if !self.via_pin {
            return 0;
        }
        match granularity {
            Granularity::Gate => 1,
            Granularity::Ffr => u64::from(circuit.partition.consumer(objective.gate).is_none()),
        }
    }

    /// Assigns an unassigned input reached by backtrace.
    pub fn decide(&mut self, circuit: &Circuit, pi: GateId, value: bool) {
        let pos = self.input_pos[pi].expect("decision on a non-input gate");
        debug_assert!(self.state.input_value(pi).is_x());
        self.state.decisions_mut().push(Decision {
            pi,
            value,
            flipped: false,
        });
        self.state.set_input(&circuit.netlist, pi, Some(value));
        self.decisions += 1;
        self.pi_visits[pos] += 1;
        self.last_decided = Some(pos);
    }

    /// Next objective and whether it sits on a pin driver, or `None` on a
    /// dead end.
    pub fn objective(&self, circuit: &Circuit) -> Option<(Objective, bool)> {
        let nl = &circuit.netlist;
        let fault = self.state.fault();
        let site = fault.activation_net(nl);
        match self.state.value(site).good() {
            Some(v) if v == fault.stuck => return None,
            None => {
                let o = Objective {
                    gate: site,
                    value: !fault.stuck,
                };
                return Some((o, fault.pin != Pin::Output));
            }
            Some(_) => {}
        }
        let xpath = self.x_paths(circuit);
        let gate = self
            .state
            .d_frontier()
            .iter()
            .copied()
            .filter(|&g| xpath[g])
            .min_by_key(|&g| (circuit.scoap[g].co, g))?;
        let g = nl.gate(gate);
        let (_, pin) = (0..g.fanins.len())
            .filter(|&k| self.state.pin_value(nl, gate, k).is_x())
            .map(|k| (nl.gate(g.fanins[k]).level, k))
            .min()?;
        let value = match g.kind.controlling_value() {
            Some(c) => !c,
            None => {
                debug_assert!(matches!(g.kind, GateKind::Xor | GateKind::Xnor));
                false
            }
        };
        Some((
            Objective {
                gate: g.fanins[pin],
                value,
            },
            true,
        ))
    }

    /// Gates with an all-X path to some output.
    fn x_paths(&self, circuit: &Circuit) -> Vec<bool> {
        let nl = &circuit.netlist;
        let mut xp = vec![false; nl.len()];
        for &g in nl.topo_order().iter().rev() {
            let gate = nl.gate(g);
            xp[g] =
                self.state.value(g).is_x() && (gate.is_po || gate.fanouts.iter().any(|&o| xp[o]));
        }
        xp
    }

    /// Flips the most recent untried decision, releasing everything above it.
    fn backtrack(&mut self, circuit: &Circuit) -> Result<(), AtpgStatus> {
        let nl = &circuit.netlist;
        let Some(i) = self.state.decisions().iter().rposition(|d| !d.flipped) else {
            while let Some(d) = self.state.decisions_mut().pop() {
                self.state.set_input(nl, d.pi, None);
            }
            return Err(AtpgStatus::Untestable);
        };
        if self.backtracks >= self.limit {
            return Err(AtpgStatus::Aborted);
        }
        while self.state.decisions().len() > i + 1 {
            let d = self.state.decisions_mut().pop().unwrap();
            self.state.set_input(nl, d.pi, None);
        }
        let d = &mut self.state.decisions_mut()[i];
        d.value = !d.value;
        d.flipped = true;
        let (pi, value) = (d.pi, d.value);
        self.state.set_input(nl, pi, Some(value));
        self.backtracks += 1;
        if let Some(pos) = self.last_decided {
            self.pi_backtracks[pos] += 1;
        }
        Ok(())
    }

    pub fn result(&self, circuit: &Circuit, status: AtpgStatus) -> AtpgResult {
        let pattern =
            (status == AtpgStatus::Detected).then(|| self.state.pattern(&circuit.netlist));
        AtpgResult {
            status,
            pattern,
            backtracks: self.backtracks,
            backtrace_steps: self.backtrace_steps,
            decisions: self.decisions,
            pi_visits: self.pi_visits.clone(),
            pi_backtracks: self.pi_backtracks.clone(),
        }
    }
}

/// Generates a test for one fault.
pub fn generate_test<P: BacktracePolicy + ?Sized>(
    circuit: &Circuit,
    fault: FaultSite,
    policy: &mut P,
    backtrack_limit: u64,
) -> Result<AtpgResult, FaultError> {
    let mut search = Search::new(circuit, fault, backtrack_limit)?;
    loop {
        match search.advance(circuit) {
            Next::Objective(o) => {
                let bt = backtrace(circuit, search.state(), o, policy);
                search.add_backtrace_steps(
                    search.entry_steps(circuit, o, policy.granularity()) + bt.steps(),
                );
                search.decide(circuit, bt.pi, bt.value);
            }
            Next::Done(status) => {
                let result = search.result(circuit, status);
                debug_assert!(result.pattern.as_ref().is_none_or(|p| crate::sim::detects(
                    &circuit.netlist,
                    p,
                    fault
                )));
                return Ok(result);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(text: &str) -> Circuit {
        Circuit::from_bench(text, "t").unwrap()
    }

    #[test]
    fn and_output_sa0_is_forced() {
        let c = circuit("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\n");
        let r = generate_test(
            &c,
            FaultSite::output(2, false),
            &mut GateLevelHeuristic,
            100,
        )
        .unwrap();
        assert_eq!(r.status, AtpgStatus::Detected);
        assert_eq!(r.pattern, Some(vec![true, true]));
        assert_eq!(r.backtracks, 0);
        assert_eq!(r.decisions, 2);
    }

    #[test]
    fn constant_node_is_untestable() {
        let c = circuit("INPUT(a)\nOUTPUT(z)\nn = NOT(a)\nz = AND(a,n)\n");
        let z = c.netlist.find("z").unwrap();
        for policy in [Granularity::Gate, Granularity::Ffr] {
            let r = match policy {
                Granularity::Gate => generate_test(
                    &c,
                    FaultSite::output(z, false),
                    &mut GateLevelHeuristic,
                    u64::MAX,
                ),
                Granularity::Ffr => generate_test(
                    &c,
                    FaultSite::output(z, false),
                    &mut FfrLevelHeuristic,
                    u64::MAX,
                ),
            }
            .unwrap();
            assert_eq!(r.status, AtpgStatus::Untestable);
            assert_eq!(r.pattern, None);
            assert_eq!(r.backtracks, 1);
        }
    }

    #[test]
    fn limit_aborts() {
        let c = circuit("INPUT(a)\nOUTPUT(z)\nn = NOT(a)\nz = AND(a,n)\n");
        let z = c.netlist.find("z").unwrap();
        let r = generate_test(&c, FaultSite::output(z, false), &mut GateLevelHeuristic, 0).unwrap();
        assert_eq!(r.status, AtpgStatus::Aborted);
        assert_eq!(r.backtracks, 0);
    }

    #[test]
    fn dead_logic_fault_is_untestable() {
        let c = circuit("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\nd = NOT(a)\n");
        let d = c.netlist.find("d").unwrap();
        let r = generate_test(&c, FaultSite::output(d, true), &mut FfrLevelHeuristic, 100).unwrap();
        assert_eq!(r.status, AtpgStatus::Untestable);
        assert_eq!(r.decisions, 0);
    }

    #[test]
    fn invalid_site_is_rejected() {
        let c = circuit("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\n");
        assert!(generate_test(
            &c,
            FaultSite::input(2, 5, true),
            &mut GateLevelHeuristic,
            100
        )
        .is_err());
    }

    #[test]
    fn backtracks_are_charged_to_last_decision() {
        let c = circuit("INPUT(a)\nOUTPUT(z)\nn = NOT(a)\nz = AND(a,n)\n");
        let z = c.netlist.find("z").unwrap();
        let r = generate_test(
            &c,
            FaultSite::output(z, false),
            &mut GateLevelHeuristic,
            u64::MAX,
        )
        .unwrap();
        assert_eq!(r.pi_backtracks.iter().sum::<u64>(), r.backtracks);
        assert_eq!(r.pi_visits, vec![1]);
    }
}
