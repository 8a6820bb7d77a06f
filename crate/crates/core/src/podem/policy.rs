// SPDX-License-Identifier: Apache-2.0
//! Backtrace policies.
//!
//! The engine drives backtrace as a sequence of hops. At each hop it lists the
//! candidate next targets (X-valued, with the value they need) and the policy
//! picks one. Gate-level policies hop one fanin at a time; region-level
//! policies jump straight to a boundary fanin of the objective's region.

use crate::circuit::Circuit;
use crate::ffr::input_requirement;
use crate::netlist::GateId;
use crate::sim::CircuitState;

/// A gate and the good value wanted on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Objective {
    pub gate: GateId,
    pub value: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Granularity {
    Gate,
    Ffr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub gate: GateId,
    pub value: bool,
    pub level: u32,
}

pub struct HopContext<'a> {
    pub circuit: &'a Circuit,
    pub state: &'a CircuitState,
    pub objective: Objective,
    /// Never empty, ascending by gate id.
    pub candidates: &'a [Candidate],
}

pub trait BacktracePolicy {
    fn granularity(&self) -> Granularity;

    /// Index into `ctx.candidates` of the next hop.
    fn choose(&mut self, ctx: &HopContext<'_>) -> usize;
}

impl<P: BacktracePolicy + ?Sized> BacktracePolicy for Box<P> {
    fn granularity(&self) -> Granularity {
        (**self).granularity()
    }

    fn choose(&mut self, ctx: &HopContext<'_>) -> usize {
        (**self).choose(ctx)
    }
}

/// Minimum level, ties to the lower gate id.
pub fn closest_to_inputs(candidates: &[Candidate]) -> usize {
    candidates
        .iter()
        .enumerate()
        .min_by_key(|(_, c)| (c.level, c.gate))
        .map(|(i, _)| i)
        .expect("no backtrace candidates")
}

/// Distance-from-inputs heuristic, one gate per hop.
#[derive(Clone, Copy, Debug, Default)]
pub struct GateLevelHeuristic;

/// Distance-from-inputs heuristic, one region per hop.
#[derive(Clone, Copy, Debug, Default)]
pub struct FfrLevelHeuristic;

pub fn gate_level_heuristic_policy() -> GateLevelHeuristic {
    GateLevelHeuristic
}

pub fn ffr_level_heuristic_policy() -> FfrLevelHeuristic {
    FfrLevelHeuristic
}

impl BacktracePolicy for GateLevelHeuristic {
    fn granularity(&self) -> Granularity {
        Granularity::Gate
    }

    fn choose(&mut self, ctx: &HopContext<'_>) -> usize {
        closest_to_inputs(ctx.candidates)
    }
}

impl BacktracePolicy for FfrLevelHeuristic {
    fn granularity(&self) -> Granularity {
        Granularity::Ffr
    }

    fn choose(&mut self, ctx: &HopContext<'_>) -> usize {
        closest_to_inputs(ctx.candidates)
    }
}

/// X-valued fanins of the objective gate with the value each must take.
/// A driver feeding several pins is listed once, for its first pin.
pub fn gate_candidates(
    circuit: &Circuit,
    state: &CircuitState,
    objective: Objective,
) -> Vec<Candidate> {
    let nl = &circuit.netlist;
    let gate = nl.gate(objective.gate);
    let mut out: Vec<Candidate> = Vec::new();
    for (k, &f) in gate.fanins.iter().enumerate() {
        if !state.value(f).is_x() || out.iter().any(|c| c.gate == f) {
            continue;
        }
        out.push(Candidate {
            gate: f,
            value: input_requirement(nl, state, objective.gate, k, objective.value),
            level: nl.gate(f).level,
        });
    }
    out.sort_by_key(|c| c.gate);
    out
}

/// Feasible X-valued boundary fanins of the objective's region.
pub fn ffr_candidates(
    circuit: &Circuit,
    state: &CircuitState,
    objective: Objective,
) -> Vec<Candidate> {
    let nl = &circuit.netlist;
    circuit
        .partition
        .hop_targets(nl, state, objective.gate, objective.value)
        .into_iter()
        .map(|t| Candidate {
            gate: t.fanin,
            value: t.required_value,
            level: nl.gate(t.fanin).level,
        })
        .collect()
}

pub fn candidates(
    granularity: Granularity,
    circuit: &Circuit,
    state: &CircuitState,
    objective: Objective,
) -> Vec<Candidate> {
    match granularity {
        Granularity::Gate => gate_candidates(circuit, state, objective),
        Granularity::Ffr => ffr_candidates(circuit, state, objective),
    }
}

/// Outcome of one backtrace: the input reached, its value, and the hops taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Backtrace {
    pub pi: GateId,
    pub value: bool,
    /// Objectives visited after the starting one; its length is the step count.
    pub hops: Vec<Objective>,
}

impl Backtrace {
    pub fn steps(&self) -> u64 {
        self.hops.len() as u64
    }
}

/// Walks `objective` back to an unassigned input under `policy`.
///
/// The objective gate must be X, which guarantees an X candidate at every hop.
pub fn backtrace<P: BacktracePolicy + ?Sized>(
    circuit: &Circuit,
    state: &CircuitState,
    objective: Objective,
    policy: &mut P,
) -> Backtrace {
    let granularity = policy.granularity();
    let mut cur = objective;
    let mut hops = Vec::new();
    while !circuit.netlist.gate(cur.gate).is_input() {
        let cands = candidates(granularity, circuit, state, cur);
        assert!(
            !cands.is_empty(),
            "objective gate {} has no X candidates",
            circuit.netlist.gate_name(cur.gate)
        );
        let ctx = HopContext {
            circuit,
            state,
            objective: cur,
            candidates: &cands,
        };
        let pick = cands[policy.choose(&ctx)];
        cur = Objective {
            gate: pick.gate,
            value: pick.value,
        };
        hops.push(cur);
    }
    Backtrace {
        pi: cur.gate,
        value: cur.value,
        hops,
    }
}
