// SPDX-License-Identifier: Apache-2.0
//! Five-valued D-calculus.
//!
//! Every value is a pair of three-valued projections: the good-circuit value
//! and the faulty-circuit value. Gates are evaluated on each projection
//! independently and the pair is folded back into the five-valued domain,
//! collapsing to X whenever either side is unknown.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::LogicError;
use crate::netlist::GateKind;

/// Three-valued Boolean: `Some(b)` or unknown.
pub type Tri = Option<bool>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum LogicValue {
    Zero,
    One,
    #[default]
    X,
    /// Good 1, faulty 0.
    D,
    /// Good 0, faulty 1.
    Dbar,
}

impl LogicValue {
    pub const ALL: [LogicValue; 5] = [
        LogicValue::Zero,
        LogicValue::One,
        LogicValue::X,
        LogicValue::D,
        LogicValue::Dbar,
    ];

    pub fn from_bool(b: bool) -> LogicValue {
        if b {
            LogicValue::One
        } else {
            LogicValue::Zero
        }
    }

    /// Re-encodes a (good, faulty) pair.
    pub fn from_pair(good: Tri, faulty: Tri) -> LogicValue {
        match (good, faulty) {
            (Some(true), Some(true)) => LogicValue::One,
            (Some(false), Some(false)) => LogicValue::Zero,
            (Some(true), Some(false)) => LogicValue::D,
            (Some(false), Some(true)) => LogicValue::Dbar,
            _ => LogicValue::X,
        }
    }

    pub fn good(self) -> Tri {
        match self {
            LogicValue::One | LogicValue::D => Some(true),
            LogicValue::Zero | LogicValue::Dbar => Some(false),
            LogicValue::X => None,
        }
    }

    pub fn faulty(self) -> Tri {
        match self {
            LogicValue::One | LogicValue::Dbar => Some(true),
            LogicValue::Zero | LogicValue::D => Some(false),
            LogicValue::X => None,
        }
    }

    pub fn is_x(self) -> bool {
        self == LogicValue::X
    }

    /// D or D-bar: the good and faulty circuits disagree.
    pub fn is_fault_effect(self) -> bool {
        matches!(self, LogicValue::D | LogicValue::Dbar)
    }

    /// The value seen on a pin stuck at `stuck`: good side kept, faulty side forced.
    pub fn with_stuck(self, stuck: bool) -> LogicValue {
        LogicValue::from_pair(self.good(), Some(stuck))
    }

    pub fn symbol(self) -> &'static str {
        match self {
            LogicValue::Zero => "0",
            LogicValue::One => "1",
            LogicValue::X => "X",
            LogicValue::D => "D",
            LogicValue::Dbar => "D'",
        }
    }
}

impl fmt::Display for LogicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn tri_and(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn tri_or(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

fn tri_xor(a: Tri, b: Tri) -> Tri {
    Some(a? ^ b?)
}

/// Three-valued evaluation of one projection. XOR and XNOR fold left over
/// their inputs; XNOR complements the folded parity.
pub fn eval_tri(kind: GateKind, inputs: impl IntoIterator<Item = Tri>) -> Tri {
    let mut it = inputs.into_iter();
    let first = it.next().expect("gate with no inputs");
    let folded = match kind {
        GateKind::And | GateKind::Nand => it.fold(first, tri_and),
        GateKind::Or | GateKind::Nor => it.fold(first, tri_or),
        GateKind::Xor | GateKind::Xnor => it.fold(first, tri_xor),
        GateKind::Not | GateKind::Buf | GateKind::Dff | GateKind::Input => first,
    };
    if kind.is_inverting() {
        folded.map(|b| !b)
    } else {
        folded
    }
}

/// Evaluates a gate over five-valued inputs without arity checking.
pub(crate) fn eval_unchecked(kind: GateKind, inputs: &[LogicValue]) -> LogicValue {
    let good = eval_tri(kind, inputs.iter().map(|v| v.good()));
    let faulty = eval_tri(kind, inputs.iter().map(|v| v.faulty()));
    LogicValue::from_pair(good, faulty)
}

/// Evaluates a gate over five-valued inputs.
pub fn eval_gate(kind: GateKind, inputs: &[LogicValue]) -> Result<LogicValue, LogicError> {
    if kind == GateKind::Input || !kind.arity_ok(inputs.len()) {
        return Err(LogicError::Arity {
            kind,
            got: inputs.len(),
        });
    }
    Ok(eval_unchecked(kind, inputs))
}

/// Two-valued evaluation, used by the reference simulators.
pub fn eval_bool(kind: GateKind, inputs: impl IntoIterator<Item = bool>) -> bool {
    eval_tri(kind, inputs.into_iter().map(Some)).expect("known inputs give a known output")
}

#[cfg(test)]
mod tests {
    use super::LogicValue::*;
    use super::*;

    #[test]
    fn and_passes_d_through_identity() {
        assert_eq!(eval_gate(GateKind::And, &[One, D]).unwrap(), D);
    }

    #[test]
    fn controlling_value_masks_fault() {
        assert_eq!(eval_gate(GateKind::And, &[Zero, D]).unwrap(), Zero);
        assert_eq!(eval_gate(GateKind::Or, &[One, Dbar]).unwrap(), One);
    }

    #[test]
    fn xor_of_equal_fault_effects_cancels() {
        // good 1^1 = 0, faulty 0^0 = 0
        assert_eq!(eval_gate(GateKind::Xor, &[D, D]).unwrap(), Zero);
        assert_eq!(eval_gate(GateKind::Xor, &[D, Dbar]).unwrap(), One);
    }

    #[test]
    fn partially_known_collapses_to_x() {
        assert_eq!(eval_gate(GateKind::Or, &[D, X]).unwrap(), X);
        assert_eq!(eval_gate(GateKind::And, &[D, X]).unwrap(), X);
        assert_eq!(eval_gate(GateKind::And, &[Zero, X]).unwrap(), Zero);
    }

    #[test]
    fn arity_mismatch() {
        assert!(eval_gate(GateKind::Not, &[One, One]).is_err());
        assert!(eval_gate(GateKind::And, &[One]).is_err());
        assert!(eval_gate(GateKind::Input, &[]).is_err());
    }

    #[test]
    fn projections() {
        assert_eq!((D.good(), D.faulty()), (Some(true), Some(false)));
        assert_eq!((Dbar.good(), Dbar.faulty()), (Some(false), Some(true)));
        for v in [Zero, One, X] {
            assert_eq!(v.good(), v.faulty());
        }
        assert_eq!(Zero.with_stuck(true), Dbar);
        assert_eq!(X.with_stuck(true), X);
    }

    #[test]
    fn nary_xnor_complements_parity() {
        assert!(!eval_bool(GateKind::Xnor, [true, true, true]));
        assert!(eval_bool(GateKind::Xnor, [true, true, false]));
    }
}
