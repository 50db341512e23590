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

//! Deadlock-free dynamic routing reconfiguration driven by target channel
//! dependency graphs.
//!
//! ```
//! use upr_core::{build_mesh, make_routing, run_reconfiguration, Algorithm, ReconfigOptions};
//!
//! let net = build_mesh(3, 3, 1).unwrap();
//! let xy = make_routing(&net, Algorithm::Xy).unwrap();
//! let yx = make_routing(&net, Algorithm::Yx).unwrap();
//! let out = run_reconfiguration(&net, &xy, &yx, ReconfigOptions::exploiting(7)).unwrap();
//! assert_eq!(out.final_routing, yx);
//! ```

pub mod error;
pub mod fixtures;
pub mod metrics;
pub mod routing;
pub mod tcdg;
pub mod topology;
pub mod upr;

pub use error::{Error, Result};
pub use metrics::{
    drained_channel_ratio, halted_flow_ratio, raw_condition_failures, ChannelScope, ScenarioResult,
};
pub use routing::{
    make_negative_first, make_odd_even, make_routing, make_xy, make_yx, Algorithm,
    LocalRoutingFunction, RoutingFunction,
};
pub use tcdg::{build_tcdg, live_restriction, Dependency, Tcdg};
pub use topology::{
    build_mesh, ChannelClass, ChannelId, Direction, MeshShape, Network, NetworkBuilder, NodeId,
    NodeKind,
};
pub use upr::{
    run_reconfiguration, Action, Cause, ChannelPhase, CheckOutcome, Engine, EventKind, Graph,
    InvariantChecks, LysneCondition, Outcome, ReconfigEvent, ReconfigOptions, RemovalRequest,
    Trace, Violation,
};
