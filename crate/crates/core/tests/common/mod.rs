// SPDX-License-Identifier: Apache-2.0
//! Shared fixtures: the bundled corpus, a random circuit generator, an
//! independent two-copy Boolean simulator used as the detection oracle, and
//! a scripted environment session.
#![allow(dead_code)]

pub mod ffr_oracle;
pub mod scoap_oracle;

use std::path::PathBuf;

use ffr_atpg::env::protocol::Session;
use ffr_atpg::env::Observation;
use ffr_atpg::netlist::{parse_bench_named, Netlist};
use ffr_atpg::{Circuit, FaultSite, GateKind, Pin};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Every bundled circuit, by file name.
pub fn corpus() -> Vec<Circuit> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "bench"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            Circuit::new(parse_bench_named(&text, &name).unwrap())
        })
        .collect()
}

/// Circuits with at most `max_gates` logic gates, inputs not counted.
pub fn corpus_upto(max_gates: usize) -> Vec<Circuit> {
    corpus()
        .into_iter()
        .filter(|c| c.netlist.cells().count() <= max_gates)
        .collect()
}

pub fn load(name: &str) -> Circuit {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.bench"))).unwrap();
    Circuit::new(parse_bench_named(&text, name).unwrap())
}

/// A random combinational bench text with `inputs` inputs and `gates`
/// internal gates; every gate without fanout is an output.
pub fn random_bench(seed: u64, inputs: usize, gates: usize) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let kinds = ["AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUFF"];
    let mut s = String::new();
    let mut names: Vec<String> = (0..inputs).map(|i| format!("i{i}")).collect();
    for n in &names {
        s.push_str(&format!("INPUT({n})\n"));
    }
    let mut used = vec![false; inputs + gates];
    let mut body = String::new();
    for g in 0..gates {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let arity = if matches!(kind, "NOT" | "BUFF") {
            1
        } else {
            rng.gen_range(2..=3)
        };
        let fanins: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..names.len())).collect();
        for &f in &fanins {
            used[f] = true;
        }
        let list: Vec<&str> = fanins.iter().map(|&f| names[f].as_str()).collect();
        let name = format!("g{g}");
        body.push_str(&format!("{name} = {kind}({})\n", list.join(", ")));
        names.push(name);
    }
    for (i, n) in names.iter().enumerate().skip(inputs) {
        if !used[i] {
            s.push_str(&format!("OUTPUT({n})\n"));
        }
    }
    s + &body
}

fn eval(kind: GateKind, ins: &[bool]) -> bool {
    match kind {
        GateKind::And => ins.iter().all(|&b| b),
        GateKind::Nand => !ins.iter().all(|&b| b),
        GateKind::Or => ins.iter().any(|&b| b),
        GateKind::Nor => !ins.iter().any(|&b| b),
        GateKind::Xor => ins.iter().fold(false, |a, &b| a ^ b),
        GateKind::Xnor => !ins.iter().fold(false, |a, &b| a ^ b),
        GateKind::Not => !ins[0],
        GateKind::Buf | GateKind::Dff => ins[0],
        GateKind::Input => unreachable!(),
    }
}

/// Output values of one copy of the circuit; `fault` makes it the faulty copy.
pub fn copy_outputs(nl: &Netlist, pattern: &[bool], fault: Option<FaultSite>) -> Vec<bool> {
    let mut v = vec![false; nl.len()];
    for (i, &pi) in nl.primary_inputs().iter().enumerate() {
        v[pi] = pattern[i];
    }
    for &g in nl.topo_order() {
        let gate = nl.gate(g);
        if !gate.is_input() {
            let ins: Vec<bool> = gate
                .fanins
                .iter()
                .enumerate()
                .map(|(k, &f)| match fault {
                    Some(FaultSite {
                        gate: fg,
                        pin: Pin::Input(fk),
                        stuck,
                    }) if fg == g && fk == k => stuck,
                    _ => v[f],
                })
                .collect();
            v[g] = eval(gate.kind, &ins);
        }
        if let Some(FaultSite {
            gate: fg,
            pin: Pin::Output,
            stuck,
        }) = fault
        {
            if fg == g {
                v[g] = stuck;
            }
        }
    }
    nl.primary_outputs().iter().map(|&o| v[o]).collect()
}

pub fn pattern_of(bits: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// True when some input pattern makes the two copies differ.
pub fn exhaustively_detectable(nl: &Netlist, fault: FaultSite) -> bool {
    let n = nl.primary_inputs().len();
    assert!(n <= 20, "too many inputs for exhaustive simulation");
    (0..1u64 << n).any(|bits| {
        let p = pattern_of(bits, n);
        copy_outputs(nl, &p, None) != copy_outputs(nl, &p, Some(fault))
    })
}

/// A uniformly random unmasked slot.
pub fn random_action(obs: &Observation<f64>, rng: &mut StdRng) -> usize {
    let valid: Vec<usize> = (0..obs.mask.len()).filter(|&i| obs.mask[i]).collect();
    valid[rng.gen_range(0..valid.len())]
}

/// Request and reply lines of a seeded session: four c432 episodes driven
/// by random valid actions, each followed by a metrics query.
pub fn transcript(seed: u64) -> Vec<(String, String)> {
    let bench = corpus_dir().join("c432.bench");
    let mut session = Session::new();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut log = Vec::new();
    let send = |session: &mut Session, req: Value, log: &mut Vec<(String, String)>| {
        let line = req.to_string();
        let reply = session.handle_line(&line).body;
        log.push((line, reply.to_string()));
        reply
    };
    send(
        &mut session,
        json!({"cmd": "hello", "version": 1}),
        &mut log,
    );
    for episode_seed in 0..4 {
        let mut reply = send(
            &mut session,
            json!({"cmd": "reset", "bench": bench, "seed": seed * 10 + episode_seed, "backtrack_limit": 20}),
            &mut log,
        );
        while !reply["obs"].is_null() {
            let obs: Observation<f64> = serde_json::from_value(reply["obs"].clone()).unwrap();
            let a = random_action(&obs, &mut rng);
            reply = send(&mut session, json!({"cmd": "step", "action": a}), &mut log);
        }
        send(&mut session, json!({"cmd": "metrics"}), &mut log);
    }
    log
}
