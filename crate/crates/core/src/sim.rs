// SPDX-License-Identifier: Apache-2.0
//! Forward implication under a single injected fault, and the two-copy
//! fault simulator used as the detection oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::LogicError;
use crate::fault::{FaultSite, Pin};
use crate::logic::{eval_bool, eval_unchecked, LogicValue};
use crate::netlist::{GateId, Netlist};

/// One primary-input decision on the search stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub pi: GateId,
    pub value: bool,
    /// The alternative value has already been tried.
    pub flipped: bool,
}

/// Five-valued assignment of a circuit under one fault.
///
/// Values are always the implication closure of the current input
/// assignment; nothing is ever justified backwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitState {
    values: Vec<LogicValue>,
    inputs: Vec<LogicValue>,
    fault: FaultSite,
    d_frontier: Vec<GateId>,
    decisions: Vec<Decision>,
}

impl CircuitState {
    /// All inputs X, fault injected, values implied.
    pub fn new(netlist: &Netlist, fault: FaultSite) -> CircuitState {
        let mut state = CircuitState {
            values: vec![LogicValue::X; netlist.len()],
            inputs: vec![LogicValue::X; netlist.len()],
            fault,
            d_frontier: Vec::new(),
            decisions: Vec::new(),
        };
        state.resimulate(netlist);
        state
    }

    pub fn fault(&self) -> FaultSite {
        self.fault
    }

    pub fn value(&self, g: GateId) -> LogicValue {
        self.values[g]
    }

    pub fn values(&self) -> &[LogicValue] {
        &self.values
    }

    /// Gates with X output and a fault effect on at least one input pin,
    /// ascending by id. A faulted input pin counts with its faulty value.
    pub fn d_frontier(&self) -> &[GateId] {
        &self.d_frontier
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub(crate) fn decisions_mut(&mut self) -> &mut Vec<Decision> {
        &mut self.decisions
    }

    /// Current assignment of an input gate.
    pub fn input_value(&self, pi: GateId) -> LogicValue {
        self.inputs[pi]
    }

    /// Value seen by pin `k` of gate `g`, with the fault applied if it sits there.
    pub fn pin_value(&self, netlist: &Netlist, g: GateId, k: usize) -> LogicValue {
        let v = self.values[netlist.gate(g).fanins[k]];
        match self.fault {
            FaultSite {
                gate,
                pin: Pin::Input(p),
                stuck,
            } if gate == g && p == k => v.with_stuck(stuck),
            _ => v,
        }
    }

    /// True once some output carries D or D-bar.
    pub fn detected(&self, netlist: &Netlist) -> bool {
        netlist
            .primary_outputs()
            .iter()
            .any(|&o| self.values[o].is_fault_effect())
    }

    /// Whether the fault site currently carries the value opposite its stuck value.
    pub fn activated(&self, netlist: &Netlist) -> bool {
        self.values[self.fault.activation_net(netlist)].good() == Some(!self.fault.stuck)
    }

    /// Fully specified input pattern in primary-input order; unassigned inputs become 0.
    pub fn pattern(&self, netlist: &Netlist) -> Vec<bool> {
        netlist
            .primary_inputs()
            .iter()
            .map(|&pi| self.inputs[pi].good().unwrap_or(false))
            .collect()
    }

    fn eval(&self, netlist: &Netlist, g: GateId, scratch: &mut Vec<LogicValue>) -> LogicValue {
        let gate = netlist.gate(g);
        let v = if gate.is_input() {
            self.inputs[g]
        } else {
            scratch.clear();
            scratch.extend((0..gate.fanins.len()).map(|k| self.pin_value(netlist, g, k)));
            eval_unchecked(gate.kind, scratch)
        };
        if self.fault.gate == g && self.fault.pin == Pin::Output {
            v.with_stuck(self.fault.stuck)
        } else {
            v
        }
    }

    /// Re-evaluates every gate in topological order.
    pub fn resimulate(&mut self, netlist: &Netlist) {
        let mut scratch = Vec::new();
        for &g in netlist.topo_order() {
            self.values[g] = self.eval(netlist, g, &mut scratch);
        }
        self.refresh_frontier(netlist);
    }

    fn refresh_frontier(&mut self, netlist: &Netlist) {
        self.d_frontier = compute_d_frontier(netlist, self);
    }

    /// Assigns (or with `None`, releases) an input and propagates the change
    /// forward, event-driven in level order.
    pub fn set_input(&mut self, netlist: &Netlist, pi: GateId, value: Option<bool>) {
        debug_assert!(netlist.gate(pi).is_input());
        let v = value.map_or(LogicValue::X, LogicValue::from_bool);
        if self.inputs[pi] == v {
            return;
        }
        self.inputs[pi] = v;
        let mut scratch = Vec::new();
        let mut queued = vec![false; netlist.len()];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((netlist.gate(pi).level, pi)));
        queued[pi] = true;
        while let Some(Reverse((_, g))) = heap.pop() {
            queued[g] = false;
            let nv = self.eval(netlist, g, &mut scratch);
            if nv == self.values[g] && g != pi {
                continue;
            }
            self.values[g] = nv;
            for &o in &netlist.gate(g).fanouts {
                if !queued[o] {
                    queued[o] = true;
                    heap.push(Reverse((netlist.gate(o).level, o)));
                }
            }
        }
        self.refresh_frontier(netlist);
        debug_assert_eq!(self.d_frontier, compute_d_frontier(netlist, self));
    }
}

/// Assigns a primary input and returns the implied state.
pub fn imply(netlist: &Netlist, state: &CircuitState, pi: GateId, value: bool) -> CircuitState {
    let mut next = state.clone();
    next.set_input(netlist, pi, Some(value));
    next
}

/// D-frontier by direct recomputation from the values.
pub fn compute_d_frontier(netlist: &Netlist, state: &CircuitState) -> Vec<GateId> {
    (0..netlist.len())
        .filter(|&g| {
            let gate = netlist.gate(g);
            !gate.is_input()
                && state.values[g].is_x()
                && (0..gate.fanins.len()).any(|k| state.pin_value(netlist, g, k).is_fault_effect())
        })
        .collect()
}

/// Two-valued simulation; `fault` of `None` simulates the good circuit.
/// Returns values indexed by gate id.
pub fn simulate(netlist: &Netlist, pattern: &[bool], fault: Option<FaultSite>) -> Vec<bool> {
    let mut values = vec![false; netlist.len()];
    for (&pi, &b) in netlist.primary_inputs().iter().zip(pattern) {
        values[pi] = b;
    }
    for &g in netlist.topo_order() {
        let gate = netlist.gate(g);
        let mut v = if gate.is_input() {
            values[g]
        } else {
            eval_bool(
                gate.kind,
                gate.fanins.iter().enumerate().map(|(k, &f)| match fault {
                    Some(FaultSite {
                        gate: fg,
                        pin: Pin::Input(p),
                        stuck,
                    }) if fg == g && p == k => stuck,
                    _ => values[f],
                }),
            )
        };
        if let Some(f) = fault {
            if f.gate == g && f.pin == Pin::Output {
                v = f.stuck;
            }
        }
        values[g] = v;
    }
    values
}

/// True iff some output differs between the good and faulty circuits.
pub fn detects(netlist: &Netlist, pattern: &[bool], fault: FaultSite) -> bool {
    let good = simulate(netlist, pattern, None);
    let bad = simulate(netlist, pattern, Some(fault));
    netlist.primary_outputs().iter().any(|&o| good[o] != bad[o])
}

/// Detection oracle over a five-valued pattern, which must be fully specified
/// and given in primary-input order.
pub fn fault_simulate(
    netlist: &Netlist,
    pattern: &[LogicValue],
    fault: FaultSite,
) -> Result<bool, LogicError> {
    let expected = netlist.primary_inputs().len();
    if pattern.len() != expected {
        return Err(LogicError::PatternLength {
            expected,
            got: pattern.len(),
        });
    }
    let mut bits = Vec::with_capacity(expected);
    for (i, v) in pattern.iter().enumerate() {
        match (v.good(), v.faulty()) {
            (Some(g), Some(f)) if g == f => bits.push(g),
            _ => return Err(LogicError::IncompletePattern(i)),
        }
    }
    Ok(detects(netlist, &bits, fault))
}
