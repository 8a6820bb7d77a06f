// SPDX-License-Identifier: Apache-2.0
use std::sync::Arc;

use super::{observe, FeatureScale, Observation};
use crate::podem::{closest_to_inputs, BacktracePolicy, Granularity, HopContext, Objective};

/// Anything that maps an observation to an action slot, typically a learned
/// agent behind a socket. `None` means no usable answer.
pub trait ActionSource {
    fn act(&mut self, obs: &Observation<f64>) -> Option<usize>;
}

impl<F: FnMut(&Observation<f64>) -> Option<usize>> ActionSource for F {
    fn act(&mut self, obs: &Observation<f64>) -> Option<usize> {
        self(obs)
    }
}

/// Region-level backtrace driven by an [`ActionSource`].
///
/// Falls back to the distance heuristic whenever the source gives no answer,
/// picks a masked slot, or no valid hop fits in the first `k` slots. The
/// number of fallbacks is kept in [`RlPolicy::fallbacks`].
pub struct RlPolicy<A> {
    source: A,
    scale: Arc<FeatureScale<f64>>,
    k: usize,
    pub fallbacks: u64,
}

impl<A: ActionSource> RlPolicy<A> {
    pub fn new(source: A, scale: Arc<FeatureScale<f64>>, k: usize) -> RlPolicy<A> {
        RlPolicy {
            source,
            scale,
            k,
            fallbacks: 0,
        }
    }
}

impl<A: ActionSource> BacktracePolicy for RlPolicy<A> {
    fn granularity(&self) -> Granularity {
        Granularity::Ffr
    }

    fn choose(&mut self, ctx: &HopContext<'_>) -> usize {
        let view = observe(ctx.circuit, &self.scale, ctx.state, ctx.objective, self.k);
        let picked: Option<Objective> = if view.has_action() {
            self.source
                .act(&view.observation)
                .and_then(|a| view.choices.get(a).copied().flatten())
        } else {
            None
        };
        match picked.and_then(|o| ctx.candidates.iter().position(|c| c.gate == o.gate)) {
            Some(i) => i,
            None => {
                self.fallbacks += 1;
                closest_to_inputs(ctx.candidates)
            }
        }
    }
}
