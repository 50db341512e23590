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

//! Fixtures for the reconfiguration benchmarks.

use upr_core::{build_mesh, make_routing, Algorithm, Network, Result, RoutingFunction};

/// A single-lane mesh with the initial and final tables of one scenario.
pub struct Scenario {
    pub net: Network,
    pub initial: RoutingFunction,
    pub target: RoutingFunction,
}

impl Scenario {
    pub fn mesh(width: usize, height: usize, from: Algorithm, to: Algorithm) -> Result<Scenario> {
        let net = build_mesh(width, height, 1)?;
        Ok(Scenario {
            initial: make_routing(&net, from)?,
            target: make_routing(&net, to)?,
            net,
        })
    }
}

/// Pairs that exercise halting, ghosts and conformance respectively.
pub const PAIRS: [(Algorithm, Algorithm); 3] = [
    (Algorithm::Xy, Algorithm::Yx),
    (Algorithm::OddEven, Algorithm::Xy),
    (Algorithm::NegativeFirst, Algorithm::OddEven),
];
