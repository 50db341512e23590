// Copyright 2026 The UPR Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Drained-channel and halted-flow accounting over a trace.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{ChannelClass, ChannelId, Network, NodeId};
use crate::upr::{CheckOutcome, EventKind, Graph, Trace};

/// Which channels form the denominator of the drained ratio.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelScope {
    #[default]
    All,
    NetworkOnly,
}

impl ChannelScope {
    fn admits(self, c: &ChannelId) -> bool {
        match self {
            ChannelScope::All => true,
            ChannelScope::NetworkOnly => c.implied_class() == Some(ChannelClass::Network),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio<T: Ord> {
    pub members: BTreeSet<T>,
    pub ratio: f64,
}

impl<T: Ord> Ratio<T> {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

/// A trace is complete when every channel upgraded exactly once.
fn ensure_complete(trace: &Trace, net: &Network) -> Result<()> {
    let upgraded: BTreeSet<ChannelId> = trace
        .iter()
        .filter_map(|k| match k {
            EventKind::Upgrade { channel } => Some(*channel),
            _ => None,
        })
        .collect();
    if upgraded.len() != net.channel_count() {
        return Err(Error::Precondition(format!(
            "truncated trace: {} of {} channels upgraded",
            upgraded.len(),
            net.channel_count()
        )));
    }
    Ok(())
}

/// Channels with a dependency into or out of them removed by draining or
/// halting.
pub fn drained_channel_ratio(
    trace: &Trace,
    net: &Network,
    scope: ChannelScope,
) -> Result<Ratio<ChannelId>> {
    ensure_complete(trace, net)?;
    let mut members = BTreeSet::new();
    for k in trace.iter() {
        if let EventKind::DependencyRemoved {
            graph: Graph::P,
            dep,
            cause,
        } = k
        {
            if cause.is_fallback() {
                members.extend([dep.src, dep.dst].into_iter().filter(|c| scope.admits(c)));
            }
        }
    }
    let total = net.channels().filter(|c| scope.admits(c)).count();
    Ok(Ratio {
        ratio: members.len() as f64 / total as f64,
        members,
    })
}

/// Source-target pairs whose injection was halted at some point.
pub fn halted_flow_ratio(trace: &Trace, net: &Network) -> Result<Ratio<(NodeId, NodeId)>> {
    ensure_complete(trace, net)?;
    let members: BTreeSet<(NodeId, NodeId)> = trace
        .iter()
        .filter_map(|k| match k {
            EventKind::InjectionHalted { source, target, .. } => Some((*source, *target)),
            _ => None,
        })
        .collect();
    let p = net.processing_nodes().count();
    let pairs = p * p.saturating_sub(1);
    Ok(Ratio {
        ratio: if pairs == 0 {
            0.0
        } else {
            members.len() as f64 / pairs as f64
        },
        members,
    })
}

/// Channels that failed their step condition at least once.
pub fn raw_condition_failures(trace: &Trace) -> BTreeSet<ChannelId> {
    trace
        .iter()
        .filter_map(|k| match k {
            EventKind::ConditionCheck {
                channel,
                outcome: CheckOutcome::Offending(_),
            } => Some(*channel),
            _ => None,
        })
        .collect()
}

/// Halted flows with no later resumption.
pub fn unresumed_flows(trace: &Trace) -> BTreeSet<(NodeId, NodeId)> {
    let mut open = BTreeSet::new();
    for k in trace.iter() {
        match k {
            EventKind::InjectionHalted { source, target, .. } => {
                open.insert((*source, *target));
            }
            EventKind::InjectionResumed { source, target, .. } => {
                open.remove(&(*source, *target));
            }
            _ => {}
        }
    }
    open
}

/// Summary of one reconfiguration run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub initial: String,
    pub final_alg: String,
    pub options: String,
    pub seed: u64,
    pub drained_channels: BTreeSet<ChannelId>,
    pub halted_flows: BTreeSet<(NodeId, NodeId)>,
    pub drained_ratio: f64,
    pub halted_ratio: f64,
    pub raw_cond2_failures: usize,
    pub event_count: usize,
    pub violations: usize,
}

impl ScenarioResult {
    pub fn from_trace(
        trace: &Trace,
        net: &Network,
        initial: &str,
        final_alg: &str,
        options: &str,
        seed: u64,
    ) -> Result<Self> {
        let drained = drained_channel_ratio(trace, net, ChannelScope::All)?;
        let halted = halted_flow_ratio(trace, net)?;
        Ok(ScenarioResult {
            initial: initial.into(),
            final_alg: final_alg.into(),
            options: options.into(),
            seed,
            drained_ratio: drained.ratio,
            halted_ratio: halted.ratio,
            drained_channels: drained.members,
            halted_flows: halted.members,
            raw_cond2_failures: raw_condition_failures(trace).len(),
            event_count: trace.len(),
            violations: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{make_routing, Algorithm};
    use crate::topology::build_mesh;
    use crate::upr::{run_reconfiguration, ReconfigOptions};

    #[test]
    fn identity_runs_score_zero() {
        let net = build_mesh(3, 3, 1).unwrap();
        for alg in Algorithm::ALL {
            let r = make_routing(&net, alg).unwrap();
            let out = run_reconfiguration(&net, &r, &r, ReconfigOptions::baseline(1)).unwrap();
            let d = drained_channel_ratio(&out.trace, &net, ChannelScope::All).unwrap();
            let h = halted_flow_ratio(&out.trace, &net).unwrap();
            assert_eq!(d.ratio, 0.0);
            assert_eq!(h.ratio, 0.0);
            assert!(raw_condition_failures(&out.trace).is_empty());
        }
    }

    #[test]
    fn truncated_trace_is_rejected() {
        let net = build_mesh(2, 2, 1).unwrap();
        let r = make_routing(&net, Algorithm::Xy).unwrap();
        let out = run_reconfiguration(&net, &r, &r, ReconfigOptions::baseline(1)).unwrap();
        let cut = Trace::new(out.trace.events()[..out.trace.len() / 2].to_vec());
        assert!(drained_channel_ratio(&cut, &net, ChannelScope::All).is_err());
        assert!(halted_flow_ratio(&cut, &net).is_err());
    }

    #[test]
    fn ratios_stay_in_unit_interval_and_flows_resume() {
        let net = build_mesh(3, 3, 1).unwrap();
        let xy = make_routing(&net, Algorithm::Xy).unwrap();
        let yx = make_routing(&net, Algorithm::Yx).unwrap();
        let out = run_reconfiguration(&net, &xy, &yx, ReconfigOptions::baseline(3)).unwrap();
        let all = drained_channel_ratio(&out.trace, &net, ChannelScope::All).unwrap();
        let inner = drained_channel_ratio(&out.trace, &net, ChannelScope::NetworkOnly).unwrap();
        let h = halted_flow_ratio(&out.trace, &net).unwrap();
        for r in [all.ratio, inner.ratio, h.ratio] {
            assert!((0.0..=1.0).contains(&r));
        }
        assert!(h.count() > 0);
        assert!(inner.count() <= all.count());
        assert!(unresumed_flows(&out.trace).is_empty());
    }
}
