// SPDX-License-Identifier: Apache-2.0
//! Fanout-free regions.
//!
//! A region is headed by a gate whose fanout count is not one, by an output,
//! or by an input; every other gate joins the region of its single consumer.
//! Members therefore form a tree rooted at the head, and a hop from an
//! objective gate straight to one of the region's boundary fanins replaces the
//! whole gate-by-gate walk along the tree path between them.

use crate::logic::LogicValue;
use crate::netlist::{GateId, GateKind, Netlist};
use crate::sim::CircuitState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ffr {
    pub head: GateId,
    /// Ascending gate ids; always contains the head.
    pub members: Vec<GateId>,
    /// Gates outside the region driving a member, ascending and deduplicated.
    pub boundary_fanins: Vec<GateId>,
    /// Number of members on the longest path ending at the head. Zero for the
    /// trivial region of an input.
    pub depth: u32,
}

impl Ffr {
    pub fn is_trivial(&self) -> bool {
        self.boundary_fanins.is_empty()
    }
}

/// Path from a boundary fanin through region members up to the head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfrPath {
    pub fanin: GateId,
    /// Odd number of inverting gates on the path.
    pub parity: bool,
    /// Members from the entry gate up to the head.
    pub path_gates: Vec<GateId>,
    /// Pin of the entry gate that `fanin` drives.
    pub entry_pin: usize,
}

/// Preference among paths reaching the same fanin: all-X first, then
/// shortest, then lowest entry gate and pin.
type Rank = (bool, usize, GateId, usize);

#[derive(Clone, Debug)]
pub struct FfrPartition {
    ffrs: Vec<Ffr>,
    ffr_of: Vec<usize>,
    /// For a non-head member, the member consuming it.
    consumer: Vec<Option<GateId>>,
}

/// A hop target produced by the region-level backtrace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfrTarget {
    pub fanin: GateId,
    pub required_value: bool,
    /// The fanin is X or already holds `required_value`, and every member on
    /// the path is still X.
    pub feasible_now: bool,
    /// Members from the objective gate down to the entry gate.
    pub path: Vec<GateId>,
    pub entry_pin: usize,
}

fn is_head(netlist: &Netlist, g: GateId) -> bool {
    let gate = netlist.gate(g);
    gate.is_input() || gate.is_po || gate.fanouts.len() != 1
}

/// Value wanted on pin `k` of gate `g` so that `g` moves toward `want`.
///
/// Inverting gates flip the value. XOR-type gates account for the parity of
/// the other pins' good values, counting unknown pins as 0. Off-path pins are
/// never constrained.
pub fn input_requirement(
    netlist: &Netlist,
    state: &CircuitState,
    g: GateId,
    k: usize,
    want: bool,
) -> bool {
    let gate = netlist.gate(g);
    let base = match gate.kind {
        GateKind::Xor | GateKind::Xnor => {
            let parity = (0..gate.fanins.len())
                .filter(|&j| j != k)
                .fold(false, |p, j| {
                    p ^ state.pin_value(netlist, g, j).good().unwrap_or(false)
                });
            want ^ parity
        }
        _ => want,
    };
    base ^ gate.kind.is_inverting()
}

impl FfrPartition {
    pub fn new(netlist: &Netlist) -> FfrPartition {
        let n = netlist.len();
        let mut ffr_of = vec![usize::MAX; n];
        let mut consumer = vec![None; n];
        let mut heads = Vec::new();
        for &g in netlist.topo_order().iter().rev() {
            if is_head(netlist, g) {
                ffr_of[g] = heads.len();
                heads.push(g);
            } else {
                let c = netlist.gate(g).fanouts[0];
                consumer[g] = Some(c);
                ffr_of[g] = ffr_of[c];
            }
        }
        let mut members: Vec<Vec<GateId>> = vec![Vec::new(); heads.len()];
        for (g, &f) in ffr_of.iter().enumerate() {
            members[f].push(g);
        }
        let mut height = vec![0u32; n];
        for &g in netlist.topo_order() {
            let gate = netlist.gate(g);
            if gate.is_input() {
                continue;
            }
            height[g] = 1 + gate
                .fanins
                .iter()
                .filter(|&&f| consumer[f] == Some(g))
                .map(|&f| height[f])
                .max()
                .unwrap_or(0);
        }
        let mut ffrs: Vec<Ffr> = heads
            .iter()
            .zip(members)
            .map(|(&head, members)| {
                let mut boundary: Vec<GateId> = members
                    .iter()
                    .flat_map(|&m| netlist.gate(m).fanins.iter().copied())
                    .filter(|&f| consumer[f].is_none())
                    .collect();
                boundary.sort_unstable();
                boundary.dedup();
                Ffr {
                    head,
                    members,
                    boundary_fanins: boundary,
                    depth: height[head],
                }
            })
            .collect();
        // Renumber regions by head id so indices are stable and readable.
        let mut order: Vec<usize> = (0..ffrs.len()).collect();
        order.sort_by_key(|&i| ffrs[i].head);
        let mut remap = vec![0; ffrs.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        for f in ffr_of.iter_mut() {
            *f = remap[*f];
        }
        let mut sorted = vec![None; ffrs.len()];
        for (old, ffr) in ffrs.drain(..).enumerate() {
            sorted[remap[old]] = Some(ffr);
        }
        FfrPartition {
            ffrs: sorted.into_iter().map(Option::unwrap).collect(),
            ffr_of,
            consumer,
        }
    }

    pub fn ffrs(&self) -> &[Ffr] {
        &self.ffrs
    }

    pub fn len(&self) -> usize {
        self.ffrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ffrs.is_empty()
    }

    /// Index of the region containing `g`.
    pub fn ffr_index(&self, g: GateId) -> usize {
        self.ffr_of[g]
    }

    pub fn ffr_of(&self, g: GateId) -> &Ffr {
        &self.ffrs[self.ffr_of[g]]
    }

    /// The member consuming `g`, or `None` for heads.
    pub fn consumer(&self, g: GateId) -> Option<GateId> {
        self.consumer[g]
    }

    /// Mean depth over regions headed by a non-input gate.
    pub fn average_depth(&self) -> f64 {
        let depths: Vec<u32> = self
            .ffrs
            .iter()
            .filter(|f| !f.is_trivial())
            .map(|f| f.depth)
            .collect();
        if depths.is_empty() {
            0.0
        } else {
            depths.iter().map(|&d| d as f64).sum::<f64>() / depths.len() as f64
        }
    }

    /// Every fanin-to-head path of a region, one per entry pin, ordered by
    /// (fanin, entry gate, pin).
    pub fn paths(&self, netlist: &Netlist, ffr: usize) -> Vec<FfrPath> {
        let region = &self.ffrs[ffr];
        let mut out = Vec::new();
        for &m in &region.members {
            for (k, &f) in netlist.gate(m).fanins.iter().enumerate() {
                if self.consumer[f].is_some() {
                    continue;
                }
                let mut path_gates = vec![m];
                let mut cur = m;
                while let Some(c) = self.consumer[cur] {
                    path_gates.push(c);
                    cur = c;
                }
                let parity = path_gates
                    .iter()
                    .filter(|&&g| netlist.gate(g).kind.is_inverting())
                    .count()
                    % 2
                    == 1;
                out.push(FfrPath {
                    fanin: f,
                    parity,
                    path_gates,
                    entry_pin: k,
                });
            }
        }
        out.sort_by_key(|p| (p.fanin, p.path_gates[0], p.entry_pin));
        out
    }

    /// Region-level backtrace targets for `objective` (a member gate wanting
    /// `value`): one entry per boundary fanin reachable below the objective,
    /// ascending by fanin id.
    ///
    /// When a fanin enters the subtree through several pins, the path used is
    /// the first of: paths whose members are all X, then fewest members, then
    /// lowest (entry gate, pin).
    pub fn ffr_backtrace_targets(
        &self,
        netlist: &Netlist,
        state: &CircuitState,
        objective: GateId,
        value: bool,
    ) -> Vec<FfrTarget> {
        let region = self.ffr_index(objective);
        let mut best: Vec<(GateId, Rank, FfrTarget)> = Vec::new();
        // Depth-first from the objective; each frame carries the path so far
        // and the value wanted at its last gate.
        let mut stack = vec![(vec![objective], value, state.value(objective).is_x())];
        while let Some((path, want, all_x)) = stack.pop() {
            let g = *path.last().unwrap();
            let gate = netlist.gate(g);
            for (k, &f) in gate.fanins.iter().enumerate() {
                let need = input_requirement(netlist, state, g, k, want);
                if self.consumer[f] == Some(g) && self.ffr_of[f] == region {
                    let mut next = path.clone();
                    next.push(f);
                    stack.push((next, need, all_x && state.value(f).is_x()));
                    continue;
                }
                let fv = state.value(f);
                let feasible = all_x && (fv.is_x() || fv.good() == Some(need));
                let key = (!all_x, path.len(), g, k);
                let target = FfrTarget {
                    fanin: f,
                    required_value: need,
                    feasible_now: feasible,
                    path: path.clone(),
                    entry_pin: k,
                };
                match best.iter_mut().find(|(b, _, _)| *b == f) {
                    Some(entry) if key < entry.1 => {
                        entry.1 = key;
                        entry.2 = target;
                    }
                    Some(_) => {}
                    None => best.push((f, key, target)),
                }
            }
        }
        best.sort_by_key(|(f, _, _)| *f);
        best.into_iter().map(|(_, _, t)| t).collect()
    }

    /// Targets usable as a hop right now: feasible and still X.
    pub fn hop_targets(
        &self,
        netlist: &Netlist,
        state: &CircuitState,
        objective: GateId,
        value: bool,
    ) -> Vec<FfrTarget> {
        self.ffr_backtrace_targets(netlist, state, objective, value)
            .into_iter()
            .filter(|t| t.feasible_now && state.value(t.fanin) == LogicValue::X)
            .collect()
    }
}

/// CSV rows `ffr_head,member_count,depth,fanin_count` plus a trailing
/// `# average_depth=` summary line.
pub fn partition_csv(netlist: &Netlist, partition: &FfrPartition) -> String {
    let mut s = String::from("ffr_head,member_count,depth,fanin_count\n");
    for f in partition.ffrs() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            netlist.gate_name(f.head),
            f.members.len(),
            f.depth,
            f.boundary_fanins.len()
        ));
    }
    s.push_str(&format!(
        "# average_depth={:.4}\n",
        partition.average_depth()
    ));
    s
}
