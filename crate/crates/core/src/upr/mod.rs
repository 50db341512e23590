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

//! Upstream progressive reconfiguration.
//!
//! Channels upgrade one at a time, sinks first, each replacing its slice
//! of the prevailing routing function with its slice of the intermediate
//! one once every target arriving under the old function has somewhere
//! to go under the new one.

mod engine;
mod monitor;
mod trace;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use engine::{Action, Engine};
pub use monitor::{LysneCondition, Violation};
pub use trace::{replay, Trace};

use crate::error::Result;
use crate::routing::RoutingFunction;
use crate::tcdg::Dependency;
use crate::topology::{ChannelId, Network, NodeId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantChecks {
    Off,
    #[default]
    Final,
    EveryEvent,
}

impl FromStr for InvariantChecks {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "off" => Ok(InvariantChecks::Off),
            "final" => Ok(InvariantChecks::Final),
            "every-event" | "every_event" => Ok(InvariantChecks::EveryEvent),
            other => Err(format!("unknown check level `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconfigOptions {
    pub exploit_conformability: bool,
    pub exploit_compatibility: bool,
    pub scheduler_seed: u64,
    pub invariant_checks: InvariantChecks,
    /// Refuse intermediate-function additions towards predecessors in the
    /// union of the intermediate and final graphs, not just the former.
    pub union_predecessor: bool,
    /// Hold back a restoration that would close a cycle.
    pub deferred_restoration: bool,
    /// Upper bound on fired actions.
    pub event_budget: u64,
}

impl Default for ReconfigOptions {
    fn default() -> Self {
        ReconfigOptions {
            exploit_conformability: true,
            exploit_compatibility: true,
            scheduler_seed: 0,
            invariant_checks: InvariantChecks::Final,
            union_predecessor: true,
            deferred_restoration: true,
            event_budget: 2_000_000,
        }
    }
}

impl ReconfigOptions {
    /// Selective halting only.
    pub fn baseline(seed: u64) -> Self {
        ReconfigOptions {
            exploit_conformability: false,
            exploit_compatibility: false,
            scheduler_seed: seed,
            ..Default::default()
        }
    }

    pub fn exploiting(seed: u64) -> Self {
        ReconfigOptions {
            scheduler_seed: seed,
            ..Default::default()
        }
    }

    pub fn with_checks(mut self, checks: InvariantChecks) -> Self {
        self.invariant_checks = checks;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChannelPhase {
    NotUpgraded,
    Ready,
    AwaitingRemovals(BTreeSet<Dependency>),
    Upgraded,
}

impl ChannelPhase {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelPhase::NotUpgraded => "not-upgraded",
            ChannelPhase::Ready => "ready",
            ChannelPhase::AwaitingRemovals(_) => "awaiting-removals",
            ChannelPhase::Upgraded => "upgraded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "targets", rename_all = "kebab-case")]
pub enum CheckOutcome {
    Satisfied,
    SinkException,
    Offending(BTreeSet<NodeId>),
}

/// A removal request sent upstream by `requester`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RemovalRequest {
    pub requester: ChannelId,
    pub dep: Dependency,
}

impl RemovalRequest {
    pub fn new(dep: Dependency) -> Self {
        RemovalRequest {
            requester: dep.dst,
            dep,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Graph {
    P,
    I,
}

/// Why a dependency entered or left a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cause {
    Upgrade,
    Conformability,
    Compatibility,
    Drainage,
    Halting,
    Release,
    Restore,
    Ghost,
    /// No packet can reach the source channel for this target any more.
    Pruned,
}

impl Cause {
    /// Removals that needed packets flushed rather than re-routed.
    pub fn is_fallback(self) -> bool {
        matches!(self, Cause::Drainage | Cause::Halting)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventKind {
    ConditionCheck {
        channel: ChannelId,
        outcome: CheckOutcome,
    },
    Upgrade {
        channel: ChannelId,
    },
    RemovalRequested {
        requester: ChannelId,
        dep: Dependency,
    },
    DependencyRemoved {
        graph: Graph,
        dep: Dependency,
        cause: Cause,
    },
    DependencyAdded {
        graph: Graph,
        dep: Dependency,
        cause: Cause,
    },
    InjectionHalted {
        channel: ChannelId,
        source: NodeId,
        target: NodeId,
    },
    InjectionResumed {
        channel: ChannelId,
        source: NodeId,
        target: NodeId,
    },
    RiRestored {
        dep: Dependency,
    },
    GhostRemoved {
        dep: Dependency,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconfigEvent {
    pub time: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl fmt::Display for ReconfigEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>6} ", self.time)?;
        match &self.kind {
            EventKind::ConditionCheck { channel, outcome } => match outcome {
                CheckOutcome::Satisfied => write!(f, "check {channel}: satisfied"),
                CheckOutcome::SinkException => write!(f, "check {channel}: sink"),
                CheckOutcome::Offending(ts) => {
                    let ts: Vec<String> = ts.iter().map(ToString::to_string).collect();
                    write!(f, "check {channel}: offending {}", ts.join(","))
                }
            },
            EventKind::Upgrade { channel } => write!(f, "upgrade {channel}"),
            EventKind::RemovalRequested { requester, dep } => {
                write!(f, "request {requester} <- {dep}")
            }
            EventKind::DependencyRemoved { graph, dep, cause } => {
                write!(f, "remove {graph:?} {dep} ({cause:?})")
            }
            EventKind::DependencyAdded { graph, dep, cause } => {
                write!(f, "add {graph:?} {dep} ({cause:?})")
            }
            EventKind::InjectionHalted { source, target, .. } => {
                write!(f, "halt {source}->{target}")
            }
            EventKind::InjectionResumed { source, target, .. } => {
                write!(f, "resume {source}->{target}")
            }
            EventKind::RiRestored { dep } => write!(f, "restore {dep}"),
            EventKind::GhostRemoved { dep } => write!(f, "ghost-removed {dep}"),
        }
    }
}

/// Result of a completed reconfiguration.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub final_routing: RoutingFunction,
    pub trace: Trace,
    pub actions: u64,
}

/// Runs the whole process under a seeded scheduler.
pub fn run_reconfiguration(
    net: &Network,
    rs: &RoutingFunction,
    rf: &RoutingFunction,
    opts: ReconfigOptions,
) -> Result<Outcome> {
    let mut engine = Engine::new(net, rs, rf, opts)?;
    engine.run()?;
    Ok(engine.into_outcome())
}
