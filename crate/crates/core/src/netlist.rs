// SPDX-License-Identifier: Apache-2.0
//! Levelized gate graph, the universe every other structure indexes into.
//!
//! Gate ids are dense indices assigned at parse time: declared inputs first,
//! then gate definitions in file order. After the full-scan transformation a
//! flip-flop gate keeps its id but becomes a pseudo primary input, and the
//! signal it sampled becomes a pseudo primary output.

mod bench;

use std::collections::HashMap;
use std::fmt;

pub use bench::{emit_bench, parse_bench, parse_bench_named};

use crate::error::NetlistError;

/// Dense gate index.
pub type GateId = usize;

/// Cell type of a gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Not,
    Buf,
    Xor,
    Xnor,
    Input,
    Dff,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Input,
        GateKind::Dff,
    ];

    /// Position in [`GateKind::ALL`], used for one-hot encodings.
    pub fn index(self) -> usize {
        self as usize
    }

    /// True when the gate complements its underlying AND/OR/XOR/BUF function.
    pub fn is_inverting(self) -> bool {
        matches!(
            self,
            GateKind::Nand | GateKind::Nor | GateKind::Not | GateKind::Xnor
        )
    }

    /// Controlling input value, if the gate has one.
    pub fn controlling_value(self) -> Option<bool> {
        match self {
            GateKind::And | GateKind::Nand => Some(false),
            GateKind::Or | GateKind::Nor => Some(true),
            _ => None,
        }
    }

    /// Checks the fanin count against the kind's arity rule.
    pub fn arity_ok(self, n: usize) -> bool {
        match self {
            GateKind::Input => n == 0,
            GateKind::Not | GateKind::Buf | GateKind::Dff => n == 1,
            _ => n >= 2,
        }
    }

    /// Bench keyword, as emitted.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUFF",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Input => "INPUT",
            GateKind::Dff => "DFF",
        }
    }

    /// Parses a bench keyword, case-insensitively.
    pub fn from_keyword(s: &str) -> Option<GateKind> {
        let kind = match s.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "NOT" | "INV" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "DFF" => GateKind::Dff,
            _ => return None,
        };
        Some(kind)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub fanins: Vec<GateId>,
    /// One entry per consuming pin, so a gate feeding two pins of the same
    /// consumer appears twice.
    pub fanouts: Vec<GateId>,
    pub level: u32,
    pub is_po: bool,
}

impl Gate {
    pub fn is_input(&self) -> bool {
        self.kind == GateKind::Input
    }
}

/// A flip-flop split by the scan transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanCell {
    /// The former flip-flop gate, now a pseudo primary input.
    pub pseudo_input: GateId,
    /// The gate that fed the flip-flop, now (also) a pseudo primary output.
    pub pseudo_output: GateId,
}

/// Immutable combinational netlist.
#[derive(Clone, Debug)]
pub struct Netlist {
    pub name: String,
    gates: Vec<Gate>,
    names: Vec<String>,
    by_name: HashMap<String, GateId>,
    primary_inputs: Vec<GateId>,
    primary_outputs: Vec<GateId>,
    declared_outputs: usize,
    scan_cells: Vec<ScanCell>,
    topo: Vec<GateId>,
    observable: Vec<bool>,
}

impl Netlist {
    /// Builds and validates a netlist from raw parts.
    ///
    /// `gates` must be indexed by id; fanouts, levels and PO flags are
    /// recomputed here. `outputs` may contain duplicates and is deduplicated
    /// preserving first occurrence. Flip-flops listed in `gates` are split by
    /// the scan transformation.
    pub fn from_parts(
        name: impl Into<String>,
        kinds_fanins: Vec<(GateKind, Vec<GateId>)>,
        names: Vec<String>,
        inputs: Vec<GateId>,
        outputs: Vec<GateId>,
    ) -> Result<Netlist, NetlistError> {
        assert_eq!(kinds_fanins.len(), names.len());
        let n = kinds_fanins.len();
        let mut gates: Vec<Gate> = Vec::with_capacity(n);
        let mut scan_cells = Vec::new();
        for (id, (kind, fanins)) in kinds_fanins.into_iter().enumerate() {
            if !kind.arity_ok(fanins.len()) {
                return Err(NetlistError::Arity {
                    gate: names[id].clone(),
                    kind,
                    arity: fanins.len(),
                });
            }
            if let Some(&bad) = fanins.iter().find(|&&f| f >= n) {
                return Err(NetlistError::UndefinedSignal {
                    name: format!("#{bad}"),
                    line: 0,
                    column: 0,
                });
            }
            let (kind, fanins) = if kind == GateKind::Dff {
                scan_cells.push(ScanCell {
                    pseudo_input: id,
                    pseudo_output: fanins[0],
                });
                (GateKind::Input, Vec::new())
            } else {
                (kind, fanins)
            };
            gates.push(Gate {
                id,
                kind,
                fanins,
                fanouts: Vec::new(),
                level: 0,
                is_po: false,
            });
        }

        let mut primary_inputs = inputs;
        primary_inputs.extend(scan_cells.iter().map(|c| c.pseudo_input));
        let mut primary_outputs = Vec::new();
        for &o in &outputs {
            if !gates[o].is_po {
                gates[o].is_po = true;
                primary_outputs.push(o);
            }
        }
        let declared_outputs = primary_outputs.len();
        for c in &scan_cells {
            if !gates[c.pseudo_output].is_po {
                gates[c.pseudo_output].is_po = true;
                primary_outputs.push(c.pseudo_output);
            }
        }
        for id in 0..n {
            for k in 0..gates[id].fanins.len() {
                let f = gates[id].fanins[k];
                gates[f].fanouts.push(id);
            }
        }

        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut netlist = Netlist {
            name: name.into(),
            gates,
            names,
            by_name,
            primary_inputs,
            primary_outputs,
            declared_outputs,
            scan_cells,
            topo: Vec::new(),
            observable: Vec::new(),
        };
        netlist.levelize()?;
        netlist.mark_observable();
        Ok(netlist)
    }

    /// Computes levels and the cached topological order.
    ///
    /// Levels are longest-path depths from the inputs; the order is ascending
    /// by level, then id.
    pub fn levelize(&mut self) -> Result<(), NetlistError> {
        let n = self.gates.len();
        let mut pending: Vec<usize> = self.gates.iter().map(|g| g.fanins.len()).collect();
        let mut level = vec![0u32; n];
        let mut queue: Vec<GateId> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut seen = 0;
        while let Some(g) = queue.pop() {
            seen += 1;
            for &o in &self.gates[g].fanouts {
                level[o] = level[o].max(level[g] + 1);
                pending[o] -= 1;
                if pending[o] == 0 {
                    queue.push(o);
                }
            }
        }
        if seen != n {
            let gate = (0..n).find(|&i| pending[i] > 0).unwrap();
            return Err(NetlistError::Cycle {
                gate: self.names[gate].clone(),
            });
        }
        for (g, l) in self.gates.iter_mut().zip(level) {
            g.level = l;
        }
        let mut topo: Vec<GateId> = (0..n).collect();
        topo.sort_by_key(|&i| (self.gates[i].level, i));
        self.topo = topo;
        Ok(())
    }

    fn mark_observable(&mut self) {
        let mut obs = vec![false; self.gates.len()];
        for &g in self.topo.iter().rev() {
            let gate = &self.gates[g];
            obs[g] = gate.is_po || gate.fanouts.iter().any(|&o| obs[o]);
        }
        self.observable = obs;
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id]
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_name(&self, id: GateId) -> &str {
        &self.names[id]
    }

    pub fn find(&self, name: &str) -> Option<GateId> {
        self.by_name.get(name).copied()
    }

    /// Primary inputs followed by scan pseudo-inputs.
    pub fn primary_inputs(&self) -> &[GateId] {
        &self.primary_inputs
    }

    /// Primary outputs followed by scan pseudo-outputs not already listed.
    pub fn primary_outputs(&self) -> &[GateId] {
        &self.primary_outputs
    }

    /// Inputs declared in the source, without scan pseudo-inputs.
    pub fn declared_inputs(&self) -> &[GateId] {
        &self.primary_inputs[..self.primary_inputs.len() - self.scan_cells.len()]
    }

    /// Outputs declared in the source, without scan pseudo-outputs.
    pub fn declared_outputs(&self) -> &[GateId] {
        &self.primary_outputs[..self.declared_outputs]
    }

    pub fn scan_cells(&self) -> &[ScanCell] {
        &self.scan_cells
    }

    /// Gates in ascending (level, id) order.
    pub fn topo_order(&self) -> &[GateId] {
        &self.topo
    }

    /// False for dead logic: gates with no path to any output.
    pub fn is_observable(&self, id: GateId) -> bool {
        self.observable[id]
    }

    /// Gates retained but flagged as dead logic.
    pub fn dead_gates(&self) -> Vec<GateId> {
        (0..self.len()).filter(|&g| !self.observable[g]).collect()
    }

    pub fn max_level(&self) -> u32 {
        self.gates.iter().map(|g| g.level).max().unwrap_or(0)
    }

    /// Non-input gates, the cells that carry pin faults.
    pub fn cells(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| !g.is_input())
    }

    /// Position of each primary input in [`Netlist::primary_inputs`], or
    /// `None` for internal gates.
    pub fn input_positions(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.len()];
        for (i, &g) in self.primary_inputs.iter().enumerate() {
            pos[g] = Some(i);
        }
        pos
    }
}
