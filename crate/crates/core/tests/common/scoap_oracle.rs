// SPDX-License-Identifier: Apache-2.0
//! Recursive SCOAP reference.

use std::collections::HashMap;

use ffr_atpg::netlist::Netlist;
use ffr_atpg::scoap::SATURATED;
use ffr_atpg::{Circuit, GateKind};

/// Goldstein measures by memoised recursion from each gate toward the
/// inputs (controllability) and toward the outputs (observability).
pub struct Oracle<'a> {
    nl: &'a Netlist,
    cc: HashMap<(usize, bool), u64>,
    co: HashMap<usize, u64>,
}

const CAP: u64 = SATURATED as u64;

impl<'a> Oracle<'a> {
    pub fn new(nl: &'a Netlist) -> Oracle<'a> {
        Oracle {
            nl,
            cc: HashMap::new(),
            co: HashMap::new(),
        }
    }

    pub fn cc(&mut self, g: usize, v: bool) -> u64 {
        if let Some(&x) = self.cc.get(&(g, v)) {
            return x;
        }
        let gate = self.nl.gate(g);
        let f = gate.fanins.clone();
        let kind = gate.kind;
        let r = match kind {
            GateKind::Input => 1,
            GateKind::Buf | GateKind::Dff => self.cc(f[0], v) + 1,
            GateKind::Not => self.cc(f[0], !v) + 1,
            GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => {
                // output value v needs the inner AND/OR to be w
                let inverting = matches!(kind, GateKind::Nand | GateKind::Nor);
                let w = v ^ inverting;
                let is_and = matches!(kind, GateKind::And | GateKind::Nand);
                if w == is_and {
                    // all inputs non-controlling
                    f.iter().map(|&x| self.cc(x, is_and)).sum::<u64>() + 1
                } else {
                    f.iter().map(|&x| self.cc(x, !is_and)).min().unwrap() + 1
                }
            }
            GateKind::Xor | GateKind::Xnor => {
                // left fold: stage i combines the running parity with fanin i
                let mut acc = [self.cc(f[0], false), self.cc(f[0], true)];
                let last = f.len() - 1;
                for (i, &x) in f.iter().enumerate().skip(1) {
                    let b = [self.cc(x, false), self.cc(x, true)];
                    let zero = (acc[0] + b[0]).min(acc[1] + b[1]) + 1;
                    let one = (acc[0] + b[1]).min(acc[1] + b[0]) + 1;
                    acc = if i == last && kind == GateKind::Xnor {
                        [one, zero]
                    } else {
                        [zero, one]
                    };
                }
                acc[v as usize]
            }
        }
        .min(CAP);
        self.cc.insert((g, v), r);
        r
    }

    pub fn co(&mut self, g: usize) -> u64 {
        if let Some(&x) = self.co.get(&g) {
            return x;
        }
        let gate = self.nl.gate(g);
        let mut best = if gate.is_po { 0 } else { CAP };
        let consumers = gate.fanouts.clone();
        let mut seen = Vec::new();
        for c in consumers {
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            let cg = self.nl.gate(c);
            for (k, &f) in cg.fanins.clone().iter().enumerate() {
                if f == g {
                    let pin = self.pin_co(c, k);
                    best = best.min(pin);
                }
            }
        }
        self.co.insert(g, best);
        best
    }

    fn pin_co(&mut self, c: usize, k: usize) -> u64 {
        let gate = self.nl.gate(c);
        let kind = gate.kind;
        let f = gate.fanins.clone();
        let out = self.co(c);
        let r = match kind {
            GateKind::Buf | GateKind::Not | GateKind::Dff => out + 1,
            GateKind::And | GateKind::Nand => {
                out + f
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| self.cc(x, true))
                    .sum::<u64>()
                    + 1
            }
            GateKind::Or | GateKind::Nor => {
                out + f
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| self.cc(x, false))
                    .sum::<u64>()
                    + 1
            }
            GateKind::Xor | GateKind::Xnor => {
                // pin k enters the fold at stage max(k, 1); each later stage
                // adds the cheaper controllability of its other operand
                let cheap = |o: &mut Self, x: usize| o.cc(x, false).min(o.cc(x, true));
                let last = f.len() - 1;
                let mut obs = out;
                // walk down from the final stage to the stage pin k enters
                let entry = k.max(1);
                for stage in (entry + 1..=last).rev() {
                    obs = obs + cheap(self, f[stage]) + 1;
                }
                // at the entry stage the other operand is the running
                // parity of the earlier pins (or pin 1 when k = 0)
                let other = if k == 0 {
                    cheap(self, f[1])
                } else {
                    let mut acc = [self.cc(f[0], false), self.cc(f[0], true)];
                    for &x in &f[1..k] {
                        let b = [self.cc(x, false), self.cc(x, true)];
                        acc = [
                            (acc[0] + b[0]).min(acc[1] + b[1]) + 1,
                            (acc[0] + b[1]).min(acc[1] + b[0]) + 1,
                        ];
                    }
                    acc[0].min(acc[1])
                };
                obs + other + 1
            }
            GateKind::Input => unreachable!(),
        };
        r.min(CAP)
    }
}

/// Every measure of `c` against the oracle.
pub fn check(c: &Circuit) {
    let nl = &c.netlist;
    let mut o = Oracle::new(nl);
    for g in 0..nl.len() {
        let s = c.scoap[g];
        let name = nl.gate_name(g);
        assert_eq!(s.cc0 as u64, o.cc(g, false), "{} cc0 {name}", nl.name);
        assert_eq!(s.cc1 as u64, o.cc(g, true), "{} cc1 {name}", nl.name);
        assert_eq!(s.co as u64, o.co(g), "{} co {name}", nl.name);
    }
}

/// Inputs cost 1 to control, outputs 0 to observe, and every cell costs
/// more than its cheapest fanin.
pub fn check_boundaries(c: &Circuit) {
    let nl = &c.netlist;
    for &pi in nl.primary_inputs() {
        assert_eq!((c.scoap[pi].cc0, c.scoap[pi].cc1), (1, 1), "{}", nl.name);
    }
    for &po in nl.primary_outputs() {
        assert_eq!(c.scoap[po].co, 0, "{}", nl.name);
    }
    for g in nl.cells() {
        let floor = g
            .fanins
            .iter()
            .map(|&f| c.scoap[f].cc0.min(c.scoap[f].cc1))
            .min()
            .unwrap();
        assert!(
            c.scoap[g.id].cc0 > floor && c.scoap[g.id].cc1 > floor,
            "{}",
            nl.name
        );
    }
}
