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

use thiserror::Error;

use crate::tcdg::Dependency;
use crate::topology::{ChannelId, NodeId};
use crate::upr::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh dimensions {width}x{height} with {lanes} lane(s)")]
    InvalidDimensions {
        width: usize,
        height: usize,
        lanes: usize,
    },
    #[error("unknown channel {0}")]
    UnknownChannel(ChannelId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("duplicate channel {0}")]
    DuplicateChannel(ChannelId),
    #[error("malformed network: {0}")]
    MalformedNetwork(String),
    #[error("operation requires a mesh network")]
    NotAMesh,
    #[error("channel {out} is not an output of the router at the head of {channel}")]
    NotAdjacent { channel: ChannelId, out: ChannelId },
    #[error("{0} is a delivery channel; routes terminate there")]
    DeliveryChannel(ChannelId),
    #[error("{0} is not a processing node")]
    NotATarget(NodeId),
    #[error("routing choice {channel} -> {out} for target {target} is not present")]
    MissingChoice {
        channel: ChannelId,
        target: NodeId,
        out: ChannelId,
    },
    #[error("dependency graph contains a cycle through {0}")]
    Cyclic(ChannelId),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("channel {channel} is in phase {phase}, operation not allowed")]
    OutOfPhase { channel: ChannelId, phase: String },
    #[error("malformed removal request for {0}")]
    MalformedRequest(Dependency),
    #[error(
        "reconfiguration stalled after {events} events with {remaining} channel(s) not upgraded"
    )]
    Stalled { events: u64, remaining: usize },
    #[error("reconfiguration exceeded the event budget of {0}")]
    EventBudget(u64),
    #[error("invariant violated: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Invariant(Vec<Violation>),
}
