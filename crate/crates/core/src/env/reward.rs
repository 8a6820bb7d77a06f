// SPDX-License-Identifier: Apache-2.0
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::podem::AtpgStatus;

/// Which branch of the reward function produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardKind {
    /// A hop that stopped short of an input.
    Hop,
    /// A hop reaching an input; `n` is its visit-plus-backtrack count.
    Input {
        n: u64,
    },
    Terminal {
        status: AtpgStatus,
    },
}

/// Piecewise step reward.
///
/// A hop to a non-input costs `hop`. Reaching an input pays
/// `input_base - lambda1 * exp(lambda2 * n)`, which shrinks as that input
/// is revisited or backtracked. Episode end pays `solved` when the fault is
/// detected or proven untestable and `aborted` when the backtrack budget runs
/// out; the terminal value replaces the step value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardModel<T> {
    pub hop: T,
    pub input_base: T,
    pub lambda1: T,
    pub lambda2: T,
    pub solved: T,
    pub aborted: T,
}

impl<T: Float> Default for RewardModel<T> {
    fn default() -> Self {
        let c = |x: f64| T::from(x).unwrap();
        RewardModel {
            hop: c(-0.1),
            input_base: c(10.0),
            lambda1: c(7.5),
            lambda2: c(0.07),
            solved: c(100.0),
            aborted: c(-100.0),
        }
    }
}

impl<T: Float> RewardModel<T> {
    pub fn value(&self, kind: RewardKind) -> T {
        match kind {
            RewardKind::Hop => self.hop,
            RewardKind::Input { n } => {
                self.input_base - self.lambda1 * (self.lambda2 * T::from(n).unwrap()).exp()
            }
            RewardKind::Terminal {
                status: AtpgStatus::Aborted,
            } => self.aborted,
            RewardKind::Terminal { .. } => self.solved,
        }
    }
}

/// The count `n` used for an input's reward: its visits plus the backtracks
/// charged to it. Visits are incremented when the input is assigned, so the
/// first visit already counts as 1.
pub fn input_count(visits: u64, backtracks: u64) -> u64 {
    visits + backtracks
}
