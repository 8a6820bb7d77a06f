// SPDX-License-Identifier: Apache-2.0
//! Region references: union-find grouping and exhaustive gate walks.

use std::collections::BTreeSet;

use ffr_atpg::ffr::FfrTarget;
use ffr_atpg::netlist::Netlist;
use ffr_atpg::sim::CircuitState;
use ffr_atpg::{Circuit, GateKind};
use rand::rngs::StdRng;
use rand::Rng;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        i = parent[i];
    }
    i
}

/// Regions as sets of gate ids, by union-find over single-fanout edges.
pub fn union_find_regions(nl: &Netlist) -> BTreeSet<BTreeSet<usize>> {
    let mut parent: Vec<usize> = (0..nl.len()).collect();
    for g in nl.gates() {
        if !g.is_input() && !g.is_po && g.fanouts.len() == 1 {
            let (a, b) = (find(&mut parent, g.id), find(&mut parent, g.fanouts[0]));
            parent[a] = b;
        }
    }
    let mut groups = std::collections::BTreeMap::<usize, BTreeSet<usize>>::new();
    for g in 0..nl.len() {
        let r = find(&mut parent, g);
        groups.entry(r).or_default().insert(g);
    }
    groups.into_values().collect()
}

/// Exact partition, single-fanout members, tree shape, boundary and depth.
pub fn check_partition(c: &Circuit) {
    let nl = &c.netlist;
    let p = &c.partition;
    let regions: BTreeSet<BTreeSet<usize>> = p
        .ffrs()
        .iter()
        .map(|f| f.members.iter().copied().collect())
        .collect();
    assert_eq!(regions, union_find_regions(nl), "{}", nl.name);
    assert_eq!(
        p.ffrs().iter().map(|f| f.members.len()).sum::<usize>(),
        nl.len()
    );
    for (i, f) in p.ffrs().iter().enumerate() {
        let head = nl.gate(f.head);
        assert!(head.is_input() || head.is_po || head.fanouts.len() != 1);
        let mut internal_edges = 0;
        for &m in &f.members {
            assert_eq!(p.ffr_index(m), i);
            if m == f.head {
                continue;
            }
            let g = nl.gate(m);
            assert_eq!(g.fanouts.len(), 1);
            assert!(!g.is_po);
            assert!(f.members.contains(&g.fanouts[0]));
            internal_edges += 1;
        }
        assert_eq!(internal_edges, f.members.len() - 1);
        let mut boundary: Vec<usize> = f
            .members
            .iter()
            .flat_map(|&m| nl.gate(m).fanins.clone())
            .filter(|x| !f.members.contains(x))
            .collect();
        boundary.sort_unstable();
        boundary.dedup();
        assert_eq!(f.boundary_fanins, boundary);
        assert_eq!(f.depth, height(nl, &f.members, f.head));
    }
}

fn height(nl: &Netlist, members: &[usize], g: usize) -> u32 {
    if nl.gate(g).is_input() {
        return 0;
    }
    1 + nl
        .gate(g)
        .fanins
        .iter()
        .filter(|f| members.contains(f))
        .map(|&f| height(nl, members, f))
        .max()
        .unwrap_or(0)
}

/// Value a pin needs so that its gate moves toward `want`, from a plain table
/// plus the parity of the other pins for XOR-type gates (unknowns count as 0).
fn table(kind: GateKind, want: bool, others: impl Iterator<Item = Option<bool>>) -> bool {
    let parity = || others.fold(false, |p, v| p ^ v.unwrap_or(false));
    match kind {
        GateKind::And | GateKind::Or | GateKind::Buf => want,
        GateKind::Nand | GateKind::Nor | GateKind::Not => !want,
        GateKind::Xor => want ^ parity(),
        GateKind::Xnor => !want ^ parity(),
        GateKind::Input | GateKind::Dff => unreachable!(),
    }
}

/// Iterated gate-level backtrace restricted to the region: every way of
/// walking from the objective down to a gate outside the region.
pub fn gate_walks(
    c: &Circuit,
    state: &CircuitState,
    objective: usize,
    value: bool,
) -> Vec<FfrTarget> {
    let nl = &c.netlist;
    let region = c.partition.ffr_of(objective);
    let mut found: Vec<((bool, usize, usize, usize), FfrTarget)> = Vec::new();
    let mut stack = vec![(vec![objective], value)];
    while let Some((path, want)) = stack.pop() {
        let g = *path.last().unwrap();
        let gate = nl.gate(g);
        for (k, &f) in gate.fanins.iter().enumerate() {
            let others = gate
                .fanins
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &x)| state.value(x).good());
            let need = table(gate.kind, want, others);
            if region.members.contains(&f) && f != region.head {
                let mut next = path.clone();
                next.push(f);
                stack.push((next, need));
                continue;
            }
            let all_x = path.iter().all(|&m| state.value(m).is_x());
            let fv = state.value(f);
            let target = FfrTarget {
                fanin: f,
                required_value: need,
                feasible_now: all_x && (fv.is_x() || fv.good() == Some(need)),
                path: path.clone(),
                entry_pin: k,
            };
            found.push(((!all_x, path.len(), g, k), target));
        }
    }
    found.sort_by_key(|e| (e.1.fanin, e.0));
    found.dedup_by_key(|e| e.1.fanin);
    found.into_iter().map(|e| e.1).collect()
}

/// Region targets equal the gate walks for every cell and value, in the
/// all-X state and in `extra` random partial assignments.
pub fn check_region_backtrace(c: &Circuit, rng: &mut StdRng, extra: usize) {
    let nl = &c.netlist;
    let Some(&fault) = ffr_atpg::fault::enumerate_faults(nl).first() else {
        return;
    };
    let mut states = vec![CircuitState::new(nl, fault)];
    for _ in 0..extra {
        let mut s = CircuitState::new(nl, fault);
        for &pi in nl.primary_inputs() {
            if rng.gen_bool(0.4) {
                s.set_input(nl, pi, Some(rng.gen()));
            }
        }
        states.push(s);
    }
    for state in &states {
        for g in nl.cells() {
            for value in [false, true] {
                let got = c.partition.ffr_backtrace_targets(nl, state, g.id, value);
                assert_eq!(
                    got,
                    gate_walks(c, state, g.id, value),
                    "{} {}",
                    nl.name,
                    nl.gate_name(g.id)
                );
            }
        }
    }
}
