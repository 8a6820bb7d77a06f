// SPDX-License-Identifier: Apache-2.0
//! Pin-level stuck-at faults and the fault-list file format.
//!
//! Each line of a fault list names one fault:
//!
//! ```text
//! <gate-name> <OUT|IN:k> <SA0|SA1>
//! ```
//!
//! Blank lines and `#` comments are ignored.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FaultError;
use crate::netlist::{GateId, GateKind, Netlist};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pin {
    Output,
    /// The k-th fanin pin of the gate.
    Input(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaultSite {
    pub gate: GateId,
    pub pin: Pin,
    pub stuck: bool,
}

impl FaultSite {
    pub fn output(gate: GateId, stuck: bool) -> FaultSite {
        FaultSite {
            gate,
            pin: Pin::Output,
            stuck,
        }
    }

    pub fn input(gate: GateId, pin: usize, stuck: bool) -> FaultSite {
        FaultSite {
            gate,
            pin: Pin::Input(pin),
            stuck,
        }
    }

    /// Checks the site against the netlist.
    pub fn validate(&self, netlist: &Netlist) -> Result<(), FaultError> {
        if self.gate >= netlist.len() {
            return Err(FaultError::GateOutOfRange(self.gate));
        }
        if let Pin::Input(k) = self.pin {
            let arity = netlist.gate(self.gate).fanins.len();
            if k >= arity {
                return Err(FaultError::PinOutOfRange {
                    gate: netlist.gate_name(self.gate).to_string(),
                    pin: k,
                    arity,
                });
            }
        }
        Ok(())
    }

    /// The net whose good value must oppose the stuck value to excite the fault:
    /// the gate itself for output faults, the driver of the pin otherwise.
    pub fn activation_net(&self, netlist: &Netlist) -> GateId {
        match self.pin {
            Pin::Output => self.gate,
            Pin::Input(k) => netlist.gate(self.gate).fanins[k],
        }
    }

    pub fn display<'a>(&'a self, netlist: &'a Netlist) -> FaultDisplay<'a> {
        FaultDisplay {
            fault: self,
            netlist,
        }
    }

    /// Parses one fault-list line.
    pub fn parse(line: &str, netlist: &Netlist) -> Result<FaultSite, FaultError> {
        parse_line(line, 0, netlist)
    }
}

pub struct FaultDisplay<'a> {
    fault: &'a FaultSite,
    netlist: &'a Netlist,
}

impl fmt::Display for FaultDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.netlist.gate_name(self.fault.gate);
        let sa = if self.fault.stuck { "SA1" } else { "SA0" };
        match self.fault.pin {
            Pin::Output => write!(f, "{name} OUT {sa}"),
            Pin::Input(k) => write!(f, "{name} IN:{k} {sa}"),
        }
    }
}

fn parse_line(line: &str, lineno: usize, netlist: &Netlist) -> Result<FaultSite, FaultError> {
    let malformed = |message: &str| FaultError::Malformed {
        line: lineno,
        message: message.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [name, pin, sa] = fields[..] else {
        return Err(malformed("expected '<gate> <OUT|IN:k> <SA0|SA1>'"));
    };
    let gate = netlist
        .find(name)
        .ok_or_else(|| FaultError::UnknownGate(name.to_string()))?;
    let pin = if pin.eq_ignore_ascii_case("OUT") {
        Pin::Output
    } else if let Some(k) = pin.strip_prefix("IN:").or_else(|| pin.strip_prefix("in:")) {
        Pin::Input(k.parse().map_err(|_| malformed("bad pin index"))?)
    } else {
        return Err(malformed("pin must be OUT or IN:k"));
    };
    let stuck = match sa.to_ascii_uppercase().as_str() {
        "SA0" => false,
        "SA1" => true,
        _ => return Err(malformed("stuck value must be SA0 or SA1")),
    };
    let fault = FaultSite { gate, pin, stuck };
    fault.validate(netlist)?;
    Ok(fault)
}

/// Parses a whole fault list.
pub fn parse_fault_list(text: &str, netlist: &Netlist) -> Result<Vec<FaultSite>, FaultError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_line(line, i + 1, netlist)?);
    }
    Ok(out)
}

pub fn format_fault_list(faults: &[FaultSite], netlist: &Netlist) -> String {
    let mut out = String::new();
    for f in faults {
        out.push_str(&f.display(netlist).to_string());
        out.push('\n');
    }
    out
}

/// The uncollapsed pin-level universe: for every cell that reaches an
/// output, output SA0/SA1 followed by SA0/SA1 on each input pin. Ordered by
/// gate id. Inputs carry no cell pins; dead logic is skipped.
pub fn enumerate_faults(netlist: &Netlist) -> Vec<FaultSite> {
    let mut out = Vec::new();
    for g in netlist.cells() {
        if !netlist.is_observable(g.id) {
            continue;
        }
        out.push(FaultSite::output(g.id, false));
        out.push(FaultSite::output(g.id, true));
        for k in 0..g.fanins.len() {
            out.push(FaultSite::input(g.id, k, false));
            out.push(FaultSite::input(g.id, k, true));
        }
    }
    out
}

/// Pin faults on dead logic, which no pattern can detect.
pub fn dead_logic_faults(netlist: &Netlist) -> Vec<FaultSite> {
    let mut out = Vec::new();
    for g in netlist.cells().filter(|g| !netlist.is_observable(g.id)) {
        for stuck in [false, true] {
            out.push(FaultSite::output(g.id, stuck));
        }
        for k in 0..g.fanins.len() {
            for stuck in [false, true] {
                out.push(FaultSite::input(g.id, k, stuck));
            }
        }
    }
    out
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Standard structural equivalence collapsing over a fault list: input pin
/// faults at the controlling value merge with the gate's output fault, NOT and
/// BUF pins merge with their output, and an output driving exactly one pin
/// merges with that pin. Keeps the first fault of each class, in input order.
pub fn collapse_faults(netlist: &Netlist, faults: &[FaultSite]) -> Vec<FaultSite> {
    use std::collections::HashMap;
    let index: HashMap<FaultSite, usize> =
        faults.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut parent: Vec<usize> = (0..faults.len()).collect();
    let union = |a: FaultSite, b: FaultSite, parent: &mut Vec<usize>| {
        if let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) {
            let (ri, rj) = (find(parent, i), find(parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    };
    for g in netlist.cells() {
        for k in 0..g.fanins.len() {
            match g.kind {
                GateKind::Not => {
                    union(
                        FaultSite::input(g.id, k, false),
                        FaultSite::output(g.id, true),
                        &mut parent,
                    );
                    union(
                        FaultSite::input(g.id, k, true),
                        FaultSite::output(g.id, false),
                        &mut parent,
                    );
                }
                GateKind::Buf => {
                    for v in [false, true] {
                        union(
                            FaultSite::input(g.id, k, v),
                            FaultSite::output(g.id, v),
                            &mut parent,
                        );
                    }
                }
                kind => {
                    if let Some(c) = kind.controlling_value() {
                        let out = c ^ kind.is_inverting();
                        union(
                            FaultSite::input(g.id, k, c),
                            FaultSite::output(g.id, out),
                            &mut parent,
                        );
                    }
                }
            }
            let driver = netlist.gate(g.fanins[k]);
            if driver.fanouts.len() == 1 && !driver.is_po && !driver.is_input() {
                for v in [false, true] {
                    union(
                        FaultSite::output(driver.id, v),
                        FaultSite::input(g.id, k, v),
                        &mut parent,
                    );
                }
            }
        }
    }
    (0..faults.len())
        .filter(|&i| find(&mut parent, i) == i)
        .map(|i| faults[i])
        .collect()
}
