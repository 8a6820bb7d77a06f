// SPDX-License-Identifier: Apache-2.0
//! Combinational SCOAP controllability and observability.
//!
//! N-input XOR and XNOR are measured over their left-fold decomposition into
//! two-input gates, each stage adding one unit, with the complement (if any)
//! on the final stage. All arithmetic saturates at [`SATURATED`].

use crate::netlist::{GateKind, Netlist};

/// Cap for saturating arithmetic; also the observability of dead logic.
pub const SATURATED: u32 = (1 << 31) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ScoapValues {
    pub cc0: u32,
    pub cc1: u32,
    pub co: u32,
}

impl ScoapValues {
    pub fn cc(&self, value: bool) -> u32 {
        if value {
            self.cc1
        } else {
            self.cc0
        }
    }
}

fn add(a: u32, b: u32) -> u32 {
    a.saturating_add(b).min(SATURATED)
}

fn xor2(a: (u32, u32), b: (u32, u32)) -> (u32, u32) {
    let cc0 = add(add(a.0, b.0).min(add(a.1, b.1)), 1);
    let cc1 = add(add(a.0, b.1).min(add(a.1, b.0)), 1);
    (cc0, cc1)
}

/// Controllability (cc0, cc1) of each prefix stage of a folded XOR chain.
/// `stages[i]` is the output of combining inputs `0..=i+1`, before any final
/// complement.
fn xor_stages(inputs: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut stages = Vec::with_capacity(inputs.len() - 1);
    let mut acc = inputs[0];
    for &x in &inputs[1..] {
        acc = xor2(acc, x);
        stages.push(acc);
    }
    stages
}

/// Controllability of a gate from its fanins' (cc0, cc1).
fn controllability(kind: GateKind, ins: &[(u32, u32)]) -> (u32, u32) {
    let sum0 = || ins.iter().fold(0, |s, x| add(s, x.0));
    let sum1 = || ins.iter().fold(0, |s, x| add(s, x.1));
    let min0 = || ins.iter().map(|x| x.0).min().unwrap();
    let min1 = || ins.iter().map(|x| x.1).min().unwrap();
    match kind {
        GateKind::And => (add(min0(), 1), add(sum1(), 1)),
        GateKind::Nand => (add(sum1(), 1), add(min0(), 1)),
        GateKind::Or => (add(sum0(), 1), add(min1(), 1)),
        GateKind::Nor => (add(min1(), 1), add(sum0(), 1)),
        GateKind::Not => (add(ins[0].1, 1), add(ins[0].0, 1)),
        GateKind::Buf | GateKind::Dff => (add(ins[0].0, 1), add(ins[0].1, 1)),
        GateKind::Xor => *xor_stages(ins).last().unwrap(),
        GateKind::Xnor => {
            let (c0, c1) = *xor_stages(ins).last().unwrap();
            (c1, c0)
        }
        GateKind::Input => (1, 1),
    }
}

/// Observability of each input pin given the gate's observability.
fn pin_observability(kind: GateKind, ins: &[(u32, u32)], co: u32) -> Vec<u32> {
    let n = ins.len();
    match kind {
        GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => {
            let noncontrolling = |x: &(u32, u32)| {
                if kind.controlling_value() == Some(false) {
                    x.1
                } else {
                    x.0
                }
            };
            (0..n)
                .map(|j| {
                    let others = (0..n)
                        .filter(|&k| k != j)
                        .fold(0, |s, k| add(s, noncontrolling(&ins[k])));
                    add(add(co, others), 1)
                })
                .collect()
        }
        GateKind::Not | GateKind::Buf | GateKind::Dff => vec![add(co, 1)],
        GateKind::Xor | GateKind::Xnor => {
            // Walk the chain backwards: stage i combines stage i-1 (or input 0)
            // with input i+1. The final complement does not change observability.
            let stages = xor_stages(ins);
            let easiest = |x: (u32, u32)| x.0.min(x.1);
            let mut out = vec![0; n];
            let mut stage_co = co;
            for i in (0..stages.len()).rev() {
                let left = if i == 0 { ins[0] } else { stages[i - 1] };
                let right = ins[i + 1];
                out[i + 1] = add(add(stage_co, easiest(left)), 1);
                stage_co = add(add(stage_co, easiest(right)), 1);
            }
            out[0] = stage_co;
            out
        }
        GateKind::Input => Vec::new(),
    }
}

/// SCOAP measures for every gate, indexed by gate id.
pub fn compute_scoap(netlist: &Netlist) -> Vec<ScoapValues> {
    let n = netlist.len();
    let mut out = vec![ScoapValues::default(); n];
    let mut ins = Vec::new();
    for &g in netlist.topo_order() {
        let gate = netlist.gate(g);
        ins.clear();
        ins.extend(gate.fanins.iter().map(|&f| (out[f].cc0, out[f].cc1)));
        let (cc0, cc1) = controllability(gate.kind, &ins);
        out[g].cc0 = cc0;
        out[g].cc1 = cc1;
        out[g].co = if gate.is_po { 0 } else { SATURATED };
    }
    for &g in netlist.topo_order().iter().rev() {
        let gate = netlist.gate(g);
        if gate.is_input() {
            continue;
        }
        ins.clear();
        ins.extend(gate.fanins.iter().map(|&f| (out[f].cc0, out[f].cc1)));
        let pins = pin_observability(gate.kind, &ins, out[g].co);
        for (&f, co) in gate.fanins.iter().zip(pins) {
            out[f].co = out[f].co.min(co);
        }
    }
    out
}

/// CSV rows `gate,cc0,cc1,co`, one per gate in id order, with a header.
pub fn scoap_csv(netlist: &Netlist, values: &[ScoapValues]) -> String {
    let mut s = String::from("gate,cc0,cc1,co\n");
    for (g, v) in values.iter().enumerate() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            netlist.gate_name(g),
            v.cc0,
            v.cc1,
            v.co
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    #[test]
    fn and2_recurrences() {
        let nl = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\n").unwrap();
        let s = compute_scoap(&nl);
        assert_eq!((s[2].cc0, s[2].cc1, s[2].co), (2, 3, 0));
        assert_eq!(s[0].co, 2);
        assert_eq!(s[1].co, 2);
        assert_eq!((s[0].cc0, s[0].cc1), (1, 1));
    }

    #[test]
    fn buffer_chain() {
        let nl =
            parse_bench("INPUT(a)\nOUTPUT(d)\nb = BUFF(a)\nc = BUFF(b)\nd = BUFF(c)\n").unwrap();
        let s = compute_scoap(&nl);
        let d = nl.find("d").unwrap();
        assert_eq!((s[d].cc0, s[d].cc1), (4, 4));
        assert_eq!(s[0].co, 3);
    }

    #[test]
    fn stem_takes_min_branch() {
        let nl = parse_bench(
            "INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(z)\nx = NOT(a)\ny = AND(a,b)\nz = NOT(y)\n",
        )
        .unwrap();
        let s = compute_scoap(&nl);
        // via x: 0+1; via y: co(y)=1, +cc1(b)+1 = 3
        assert_eq!(s[0].co, 1);
    }

    #[test]
    fn xor2_and_xnor2() {
        let nl =
            parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(y)\nx = XOR(a,b)\ny = XNOR(a,b)\n")
                .unwrap();
        let s = compute_scoap(&nl);
        assert_eq!((s[2].cc0, s[2].cc1), (3, 3));
        assert_eq!((s[3].cc0, s[3].cc1), (3, 3));
        assert_eq!(s[0].co, 2);
    }

    #[test]
    fn dead_logic_is_saturated() {
        let nl = parse_bench("INPUT(a)\nOUTPUT(a)\nd = NOT(a)\n").unwrap();
        let s = compute_scoap(&nl);
        assert_eq!(s[1].co, SATURATED);
        assert_eq!(s[0].co, 0);
    }
}
