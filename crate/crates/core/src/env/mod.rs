// SPDX-License-Identifier: Apache-2.0
//! Region-level backtrace as an episodic decision process.
//!
//! An episode targets one fault. The engine runs until it needs a backtrace
//! hop, then shows the agent the fanout-free region of the current objective
//! gate: its members, its boundary fanins, and a mask over the fanins the
//! objective can hop to right now. The agent picks one. Hops that reach an
//! input assign it and let the engine continue to its next objective or to
//! the end of the search.
//!
//! Two kinds of progress happen without the agent and earn no reward:
//! objectives that already sit on an input are assigned directly, and when
//! every valid hop lies outside the first `k` slots the distance heuristic
//! takes the hop.

pub mod features;
pub mod protocol;
pub mod reward;
mod rl;

pub use features::{FeatureScale, NodeFeatures, FEATURE_DIM};
pub use reward::{input_count, RewardKind, RewardModel};
pub use rl::{ActionSource, RlPolicy};

use std::sync::Arc;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{EnvError, FaultError};
use crate::fault::FaultSite;
use crate::netlist::GateId;
use crate::podem::{
    closest_to_inputs, ffr_candidates, AtpgResult, AtpgStatus, Granularity, Next, Objective, Search,
};
use crate::sim::CircuitState;

/// Default number of action slots.
pub const DEFAULT_K: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObsNode<T> {
    pub id: GateId,
    pub features: Vec<T>,
}

/// What the agent sees at a decision point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    /// Head of the region being shown.
    pub head: GateId,
    pub objective: GateId,
    pub objective_value: bool,
    /// Region members (ascending id) followed by boundary fanins (ascending id).
    pub nodes: Vec<ObsNode<T>>,
    /// Driver to consumer, between listed nodes only.
    pub edges: Vec<(GateId, GateId)>,
    /// Length `k`; true where the slot's target is a valid hop.
    pub mask: Vec<bool>,
    /// The first `k` boundary fanins by id, aligned with `mask`.
    pub targets: Vec<GateId>,
}

/// An observation plus the hop each unmasked slot stands for.
#[derive(Clone, Debug)]
pub struct View<T> {
    pub observation: Observation<T>,
    pub choices: Vec<Option<Objective>>,
    pub truncated: bool,
}

impl<T> View<T> {
    pub fn has_action(&self) -> bool {
        self.choices.iter().any(Option::is_some)
    }
}

/// Builds the region view for `objective`.
pub fn observe<T: Float>(
    circuit: &Circuit,
    scale: &FeatureScale<T>,
    state: &CircuitState,
    objective: Objective,
    k: usize,
) -> View<T> {
    let nl = &circuit.netlist;
    let region = circuit.partition.ffr_of(objective.gate);
    let truncated = region.boundary_fanins.len() > k;
    if truncated {
        log::warn!(
            "region of '{}' has {} boundary fanins, showing the first {k}",
            nl.gate_name(region.head),
            region.boundary_fanins.len()
        );
    }
    let targets: Vec<GateId> = region.boundary_fanins.iter().copied().take(k).collect();
    let hops = circuit
        .partition
        .hop_targets(nl, state, objective.gate, objective.value);
    let mut choices = vec![None; k];
    for (slot, &t) in targets.iter().enumerate() {
        choices[slot] = hops.iter().find(|h| h.fanin == t).map(|h| Objective {
            gate: t,
            value: h.required_value,
        });
    }
    let node = |g: GateId| {
        let want = (g == objective.gate).then_some(objective.value);
        ObsNode {
            id: g,
            features: scale.features(circuit, state, g, want).to_vec(),
        }
    };
    let nodes: Vec<ObsNode<T>> = region
        .members
        .iter()
        .chain(&region.boundary_fanins)
        .map(|&g| node(g))
        .collect();
    let mut edges = Vec::new();
    for &m in &region.members {
        let mut fanins = nl.gate(m).fanins.clone();
        fanins.sort_unstable();
        fanins.dedup();
        edges.extend(fanins.into_iter().map(|f| (f, m)));
    }
    View {
        observation: Observation {
            head: region.head,
            objective: objective.gate,
            objective_value: objective.value,
            nodes,
            edges,
            mask: choices.iter().map(Option::is_some).collect(),
            targets,
        },
        choices,
        truncated,
    }
}

#[derive(Clone, Debug)]
pub struct EnvConfig<T> {
    pub k: usize,
    pub backtrack_limit: u64,
    pub reward: RewardModel<T>,
}

impl<T: Float> Default for EnvConfig<T> {
    fn default() -> Self {
        EnvConfig {
            k: DEFAULT_K,
            backtrack_limit: crate::podem::DEFAULT_BACKTRACK_LIMIT,
            reward: RewardModel::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transition<T> {
    pub state: Observation<T>,
    pub action: usize,
    pub reward: T,
    pub kind: RewardKind,
    /// `None` once the episode is over.
    pub next_state: Option<Observation<T>>,
    pub done: bool,
    pub status: Option<AtpgStatus>,
}

/// Running counters for one episode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeMetrics<T> {
    pub fault: FaultSite,
    pub done: bool,
    pub status: Option<AtpgStatus>,
    pub backtracks: u64,
    pub backtrace_steps: u64,
    pub decisions: u64,
    pub agent_steps: u64,
    pub auto_hops: u64,
    pub truncations: u64,
    pub total_reward: T,
    pub pi_visits: Vec<u64>,
    pub pi_backtracks: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Episode<T> {
    circuit: Arc<Circuit>,
    scale: Arc<FeatureScale<T>>,
    config: EnvConfig<T>,
    fault: FaultSite,
    search: Search,
    view: Option<View<T>>,
    status: Option<AtpgStatus>,
    pending_steps: u64,
    agent_steps: u64,
    auto_hops: u64,
    truncations: u64,
    total_reward: T,
}

impl<T: Float> Episode<T> {
    /// Starts an episode and runs the engine to the first decision point.
    pub fn new(
        circuit: Arc<Circuit>,
        scale: Arc<FeatureScale<T>>,
        fault: FaultSite,
        config: EnvConfig<T>,
    ) -> Result<Episode<T>, FaultError> {
        assert!(config.k > 0, "k must be positive");
        let search = Search::new(&circuit, fault, config.backtrack_limit)?;
        let mut ep = Episode {
            circuit,
            scale,
            config,
            fault,
            search,
            view: None,
            status: None,
            pending_steps: 0,
            agent_steps: 0,
            auto_hops: 0,
            truncations: 0,
            total_reward: T::zero(),
        };
        ep.settle(None);
        Ok(ep)
    }

    pub fn observation(&self) -> Option<&Observation<T>> {
        self.view.as_ref().map(|v| &v.observation)
    }

    pub fn circuit(&self) -> &Arc<Circuit> {
        &self.circuit
    }

    pub fn done(&self) -> bool {
        self.status.is_some()
    }

    pub fn status(&self) -> Option<AtpgStatus> {
        self.status
    }

    pub fn state(&self) -> &CircuitState {
        self.search.state()
    }

    /// Engine result, once the episode is over.
    pub fn result(&self) -> Option<AtpgResult> {
        self.status.map(|s| self.search.result(&self.circuit, s))
    }

    pub fn metrics(&self) -> EpisodeMetrics<T> {
        EpisodeMetrics {
            fault: self.fault,
            done: self.done(),
            status: self.status,
            backtracks: self.search.backtracks(),
            backtrace_steps: self.search.backtrace_steps(),
            decisions: self.search.decisions(),
            agent_steps: self.agent_steps,
            auto_hops: self.auto_hops,
            truncations: self.truncations,
            total_reward: self.total_reward,
            pi_visits: self.search.pi_visits().to_vec(),
            pi_backtracks: self.search.pi_backtracks().to_vec(),
        }
    }

    /// Takes the hop in slot `action`. An invalid action leaves the episode
    /// untouched.
    pub fn step(&mut self, action: usize) -> Result<Transition<T>, EnvError> {
        let view = self.view.as_ref().ok_or(EnvError::Finished)?;
        if action >= self.config.k {
            return Err(EnvError::ActionOutOfRange {
                action,
                k: self.config.k,
            });
        }
        let hop = view.choices[action].ok_or(EnvError::Masked(action))?;
        let view = self.view.take().unwrap();
        self.pending_steps += 1;
        let mut kind = if self.circuit.netlist.gate(hop.gate).is_input() {
            let n = self.decide(hop);
            self.settle(None);
            RewardKind::Input { n }
        } else {
            self.settle(Some(hop));
            RewardKind::Hop
        };
        if let Some(status) = self.status {
            kind = RewardKind::Terminal { status };
        }
        let reward = self.config.reward.value(kind);
        self.total_reward = self.total_reward + reward;
        self.agent_steps += 1;
        Ok(Transition {
            state: view.observation,
            action,
            reward,
            kind,
            next_state: self.observation().cloned(),
            done: self.done(),
            status: self.status,
        })
    }

    /// Assigns an input and returns its reward count.
    fn decide(&mut self, o: Objective) -> u64 {
        self.search
            .add_backtrace_steps(std::mem::take(&mut self.pending_steps));
        self.search.decide(&self.circuit, o.gate, o.value);
        let pos = self
            .circuit
            .netlist
            .primary_inputs()
            .iter()
            .position(|&p| p == o.gate)
            .expect("decided gate is an input");
        input_count(
            self.search.pi_visits()[pos],
            self.search.pi_backtracks()[pos],
        )
    }

    /// Runs the engine until the agent has a choice or the search ends.
    fn settle(&mut self, mut objective: Option<Objective>) {
        let circuit = Arc::clone(&self.circuit);
        loop {
            let o = match objective.take() {
                Some(o) => o,
                None => match self.search.advance(&circuit) {
                    Next::Objective(o) => {
                        self.pending_steps +=
                            self.search.entry_steps(&circuit, o, Granularity::Ffr);
                        o
                    }
                    Next::Done(status) => {
                        self.status = Some(status);
                        return;
                    }
                },
            };
            if circuit.netlist.gate(o.gate).is_input() {
                self.decide(o);
                continue;
            }
            let view = observe(&circuit, &self.scale, self.search.state(), o, self.config.k);
            self.truncations += u64::from(view.truncated);
            if view.has_action() {
                self.view = Some(view);
                return;
            }
            let cands = ffr_candidates(&circuit, self.search.state(), o);
            let pick = cands[closest_to_inputs(&cands)];
            self.pending_steps += 1;
            self.auto_hops += 1;
            let next = Objective {
                gate: pick.gate,
                value: pick.value,
            };
            if circuit.netlist.gate(next.gate).is_input() {
                self.decide(next);
            } else {
                objective = Some(next);
            }
        }
    }
}

/// The slot the region-level distance heuristic would pick: the unmasked
/// target with the lowest depth feature, ties to the lower gate id.
pub fn heuristic_action<T: Float>(obs: &Observation<T>) -> Option<usize> {
    let depth = |g: GateId| {
        obs.nodes
            .iter()
            .find(|n| n.id == g)
            .map(|n| n.features[FEATURE_DIM - 1])
            .unwrap()
    };
    (0..obs.targets.len())
        .filter(|&i| obs.mask[i])
        .min_by(|&a, &b| {
            let (ga, gb) = (obs.targets[a], obs.targets[b]);
            depth(ga).partial_cmp(&depth(gb)).unwrap().then(ga.cmp(&gb))
        })
}
