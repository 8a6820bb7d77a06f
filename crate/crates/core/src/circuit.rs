// SPDX-License-Identifier: Apache-2.0
use crate::error::NetlistError;
use crate::ffr::FfrPartition;
use crate::netlist::{parse_bench_named, Netlist};
use crate::scoap::{compute_scoap, ScoapValues};

/// A netlist together with the read-only analyses the search consumes.
/// Built once and shared across faults and workers.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub netlist: Netlist,
    pub scoap: Vec<ScoapValues>,
    pub partition: FfrPartition,
}

impl Circuit {
    pub fn new(netlist: Netlist) -> Circuit {
        let scoap = compute_scoap(&netlist);
        let partition = FfrPartition::new(&netlist);
        Circuit {
            netlist,
            scoap,
            partition,
        }
    }

    pub fn from_bench(text: &str, name: &str) -> Result<Circuit, NetlistError> {
        Ok(Circuit::new(parse_bench_named(text, name)?))
    }
}
