// SPDX-License-Identifier: Apache-2.0
mod common;

use std::collections::BTreeSet;

use ffr_atpg::netlist::{emit_bench, parse_bench, parse_bench_named, Netlist};
use ffr_atpg::{GateKind, NetlistError};

/// Longest input-to-gate path by repeated relaxation until nothing changes.
fn relaxed_levels(nl: &Netlist) -> Vec<u32> {
    let mut level = vec![0u32; nl.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for g in nl.gates() {
            for &f in &g.fanins {
                if level[g.id] < level[f] + 1 {
                    level[g.id] = level[f] + 1;
                    changed = true;
                }
            }
        }
    }
    level
}

#[test]
fn c432_shape_and_depth() {
    let c = common::load("c432");
    let nl = &c.netlist;
    assert_eq!(nl.primary_inputs().len(), 36);
    assert_eq!(nl.primary_outputs().len(), 7);
    let oracle = relaxed_levels(nl);
    assert_eq!(nl.max_level(), *oracle.iter().max().unwrap());
    for g in nl.gates() {
        assert_eq!(g.level, oracle[g.id], "{}", nl.gate_name(g.id));
    }
}

#[test]
fn levels_and_edges_are_consistent() {
    for c in common::corpus() {
        let nl = &c.netlist;
        let mut pos = vec![0; nl.len()];
        for (i, &g) in nl.topo_order().iter().enumerate() {
            pos[g] = i;
        }
        for g in nl.gates() {
            if g.is_input() {
                assert_eq!(g.level, 0);
            }
            for &f in &g.fanins {
                assert!(g.level > nl.gate(f).level);
                assert!(pos[f] < pos[g.id]);
                assert!(nl.gate(f).fanouts.contains(&g.id));
            }
            for &o in &g.fanouts {
                assert!(nl.gate(o).fanins.contains(&g.id));
            }
        }
        let keys: Vec<(u32, usize)> = nl
            .topo_order()
            .iter()
            .map(|&g| (nl.gate(g).level, g))
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}

type Shape = (
    BTreeSet<(String, GateKind, Vec<String>)>,
    Vec<String>,
    Vec<String>,
);

fn shape(nl: &Netlist) -> Shape {
    let gates = nl
        .gates()
        .iter()
        .map(|g| {
            (
                nl.gate_name(g.id).to_string(),
                g.kind,
                g.fanins
                    .iter()
                    .map(|&f| nl.gate_name(f).to_string())
                    .collect(),
            )
        })
        .collect();
    let names = |ids: &[usize]| ids.iter().map(|&g| nl.gate_name(g).to_string()).collect();
    (
        gates,
        names(nl.primary_inputs()),
        names(nl.primary_outputs()),
    )
}

#[test]
fn emit_and_reparse_is_isomorphic() {
    for c in common::corpus() {
        let again = parse_bench_named(&emit_bench(&c.netlist), &c.netlist.name).unwrap();
        assert_eq!(shape(&again), shape(&c.netlist), "{}", c.netlist.name);
    }
}

#[test]
fn scan_adds_one_pseudo_input_per_flip_flop() {
    for name in ["s27", "counter_scan"] {
        let text =
            std::fs::read_to_string(common::corpus_dir().join(format!("{name}.bench"))).unwrap();
        let dffs = text
            .lines()
            .filter(|l| l.to_ascii_uppercase().contains("DFF("))
            .count();
        let nl = parse_bench(&text).unwrap();
        assert_eq!(nl.scan_cells().len(), dffs);
        assert_eq!(nl.primary_inputs().len(), nl.declared_inputs().len() + dffs);
        for cell in nl.scan_cells() {
            assert_eq!(nl.gate(cell.pseudo_input).kind, GateKind::Input);
            assert!(nl.primary_outputs().contains(&cell.pseudo_output));
        }
    }
}

#[test]
fn examples() {
    let nl = parse_bench("INPUT(a) INPUT(b) OUTPUT(c) c = AND(a,b)").unwrap();
    assert_eq!(nl.len(), 3);
    assert_eq!(nl.gate(nl.find("c").unwrap()).level, 1);
    assert!(matches!(
        parse_bench("OUTPUT(c)\nc = AND(a,b)\n"),
        Err(NetlistError::UndefinedSignal { .. })
    ));
    let chain = parse_bench("INPUT(a)\nOUTPUT(c)\nb = NOT(a)\nc = NOT(b)\n").unwrap();
    let levels: Vec<u32> = chain.gates().iter().map(|g| g.level).collect();
    assert_eq!(levels, vec![0, 1, 2]);
    let tree = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(r)\nx = AND(a,b)\ny = AND(c,d)\nr = AND(x,y)\n").unwrap();
    assert_eq!(tree.max_level(), 2);
}
