// SPDX-License-Identifier: Apache-2.0
//! PODEM test pattern generation with gate-level and fanout-free-region
//! backtrace, SCOAP testability, and an episodic decision environment that
//! lets an external agent pick region-level backtrace hops.

pub mod circuit;
pub mod env;
pub mod error;
pub mod fault;
pub mod ffr;
pub mod logic;
pub mod netlist;
pub mod podem;
pub mod scoap;
pub mod sim;

pub use circuit::Circuit;
pub use error::{EnvError, FaultError, LogicError, NetlistError};
pub use fault::{FaultSite, Pin};
pub use ffr::{Ffr, FfrPartition};
pub use logic::LogicValue;
pub use netlist::{GateId, GateKind, Netlist};
pub use podem::{generate_test, AtpgResult, AtpgStatus, BacktracePolicy};

/// Double-precision environment types, the ones spoken on the wire.
pub type NodeFeatures = env::NodeFeatures<f64>;
pub type Observation = env::Observation<f64>;
pub type Transition = env::Transition<f64>;
pub type RewardModel = env::RewardModel<f64>;
pub type Episode = env::Episode<f64>;

/// Single-precision variants for in-process consumers.
pub type NodeFeatures32 = env::NodeFeatures<f32>;
pub type Observation32 = env::Observation<f32>;
pub type Episode32 = env::Episode<f32>;
