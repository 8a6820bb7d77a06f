// SPDX-License-Identifier: Apache-2.0
use thiserror::Error;

use crate::netlist::GateKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undefined signal '{name}' at {line}:{column}")]
    UndefinedSignal {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("duplicate definition of '{name}' at {line}:{column}")]
    DuplicateDefinition {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("gate '{gate}' of type {kind} cannot have {arity} inputs")]
    Arity {
        gate: String,
        kind: GateKind,
        arity: usize,
    },
    #[error("combinational cycle through '{gate}'")]
    Cycle { gate: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("{kind} gate given {got} inputs")]
    Arity { kind: GateKind, got: usize },
    #[error("pattern has {got} values, circuit has {expected} inputs")]
    PatternLength { expected: usize, got: usize },
    #[error("pattern leaves input {0} unassigned")]
    IncompletePattern(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaultError {
    #[error("unknown gate '{0}'")]
    UnknownGate(String),
    #[error("gate id {0} out of range")]
    GateOutOfRange(usize),
    #[error("pin {pin} out of range for gate '{gate}' with {arity} inputs")]
    PinOutOfRange {
        gate: String,
        pin: usize,
        arity: usize,
    },
    #[error("malformed fault on line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("no active episode")]
    NoEpisode,
    #[error("episode is finished")]
    Finished,
    #[error("action {action} out of range for {k} slots")]
    ActionOutOfRange { action: usize, k: usize },
    #[error("action {0} is masked")]
    Masked(usize),
}
