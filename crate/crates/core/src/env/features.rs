// SPDX-License-Identifier: Apache-2.0
//! Per-node feature vectors.
//!
//! Layout, in order:
//!
//! | slots | feature |
//! |-------|---------|
//! | 0..3  | good logic value one-hot: 0, 1, X |
//! | 3     | fault-effect bit (D or D̄) |
//! | 4..7  | objective value one-hot: 0, 1, none |
//! | 7..10 | cc0, cc1, co as `ln(1+v)` over the circuit maximum |
//! | 10..20| gate kind one-hot in [`GateKind::ALL`] order |
//! | 20    | fanout count, min-max scaled |
//! | 21    | level, min-max scaled |
//!
//! Scan pseudo-inputs use the DFF slot of the kind one-hot. Saturated SCOAP
//! values map to 1.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::netlist::{GateId, GateKind};
use crate::scoap::SATURATED;
use crate::sim::CircuitState;

pub const FEATURE_DIM: usize = 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeFeatures<T> {
    pub logic_value: [T; 3],
    pub fault_effect: T,
    pub objective_value: [T; 3],
    pub cc0: T,
    pub cc1: T,
    pub co: T,
    pub gate_kind: [T; 10],
    pub fanout: T,
    pub depth: T,
}

impl<T: Float> NodeFeatures<T> {
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(FEATURE_DIM);
        v.extend_from_slice(&self.logic_value);
        v.push(self.fault_effect);
        v.extend_from_slice(&self.objective_value);
        v.extend([self.cc0, self.cc1, self.co]);
        v.extend_from_slice(&self.gate_kind);
        v.extend([self.fanout, self.depth]);
        v
    }
}

fn one_hot<T: Float, const N: usize>(i: usize) -> [T; N] {
    let mut a = [T::zero(); N];
    a[i] = T::one();
    a
}

fn cast<T: Float>(x: f64) -> T {
    T::from(x).expect("float conversion")
}

/// Per-circuit normalisation constants.
#[derive(Clone, Debug)]
pub struct FeatureScale<T> {
    log_max: [T; 3],
    fanout_min: T,
    fanout_span: T,
    level_span: T,
    pseudo_input: Vec<bool>,
}

impl<T: Float> FeatureScale<T> {
    pub fn new(circuit: &Circuit) -> FeatureScale<T> {
        let nl = &circuit.netlist;
        let mut log_max = [T::zero(); 3];
        for s in &circuit.scoap {
            for (m, v) in log_max.iter_mut().zip([s.cc0, s.cc1, s.co]) {
                if v < SATURATED {
                    *m = m.max(log1p(v));
                }
            }
        }
        let fanouts = nl.gates().iter().map(|g| g.fanouts.len());
        let fmin = fanouts.clone().min().unwrap_or(0);
        let fmax = fanouts.max().unwrap_or(0);
        let mut pseudo_input = vec![false; nl.len()];
        for cell in nl.scan_cells() {
            pseudo_input[cell.pseudo_input] = true;
        }
        FeatureScale {
            log_max,
            fanout_min: cast(fmin as f64),
            fanout_span: cast((fmax - fmin) as f64),
            level_span: cast(nl.max_level() as f64),
            pseudo_input,
        }
    }

    fn scoap(&self, slot: usize, v: u32) -> T {
        if v >= SATURATED {
            T::one()
        } else if self.log_max[slot] == T::zero() {
            T::zero()
        } else {
            log1p::<T>(v) / self.log_max[slot]
        }
    }

    pub fn features(
        &self,
        circuit: &Circuit,
        state: &CircuitState,
        gate: GateId,
        objective: Option<bool>,
    ) -> NodeFeatures<T> {
        let g = circuit.netlist.gate(gate);
        let value = state.value(gate);
        let logic = match value.good() {
            Some(false) => 0,
            Some(true) => 1,
            None => 2,
        };
        let obj = match objective {
            Some(false) => 0,
            Some(true) => 1,
            None => 2,
        };
        let kind = if self.pseudo_input[gate] {
            GateKind::Dff
        } else {
            g.kind
        };
        let s = circuit.scoap[gate];
        let ratio = |x: T, span: T| {
            if span == T::zero() {
                T::zero()
            } else {
                x / span
            }
        };
        NodeFeatures {
            logic_value: one_hot(logic),
            fault_effect: if value.is_fault_effect() {
                T::one()
            } else {
                T::zero()
            },
            objective_value: one_hot(obj),
            cc0: self.scoap(0, s.cc0),
            cc1: self.scoap(1, s.cc1),
            co: self.scoap(2, s.co),
            gate_kind: one_hot(kind.index()),
            fanout: ratio(
                cast::<T>(g.fanouts.len() as f64) - self.fanout_min,
                self.fanout_span,
            ),
            depth: ratio(cast(g.level as f64), self.level_span),
        }
    }
}

fn log1p<T: Float>(v: u32) -> T {
    cast::<T>(v as f64).ln_1p()
}
