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

//! Minimal-path turn-model routing for 2D meshes.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RoutingFunction;
use crate::error::{Error, Result};
use crate::topology::{ChannelId, Direction, MeshShape, Network, NodeId};

/// The stock mesh algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Xy,
    Yx,
    #[serde(rename = "oe")]
    OddEven,
    #[serde(rename = "nf")]
    NegativeFirst,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Xy,
        Algorithm::Yx,
        Algorithm::OddEven,
        Algorithm::NegativeFirst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Xy => "xy",
            Algorithm::Yx => "yx",
            Algorithm::OddEven => "oe",
            Algorithm::NegativeFirst => "nf",
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Algorithm::OddEven | Algorithm::NegativeFirst)
    }

    /// Turn predicate: may a packet that arrived at a router in `column`
    /// travelling `din` leave travelling `dout`? `din` is `None` for a
    /// freshly injected packet, which never counts as a turn.
    pub fn turn_allowed(self, din: Option<Direction>, dout: Direction, column: usize) -> bool {
        let Some(din) = din else {
            return true;
        };
        if din == dout {
            return true;
        }
        if din.is_horizontal() == dout.is_horizontal() {
            // U-turn.
            return false;
        }
        match self {
            Algorithm::Xy => din.is_horizontal(),
            Algorithm::Yx => !din.is_horizontal(),
            Algorithm::NegativeFirst => !(din.is_positive() && !dout.is_positive()),
            Algorithm::OddEven => {
                if column.is_multiple_of(2) {
                    din != Direction::East
                } else {
                    dout != Direction::West
                }
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xy" => Ok(Algorithm::Xy),
            "yx" => Ok(Algorithm::Yx),
            "oe" | "odd-even" | "oddeven" => Ok(Algorithm::OddEven),
            "nf" | "negative-first" | "negativefirst" => Ok(Algorithm::NegativeFirst),
            other => Err(format!("unknown routing algorithm `{other}`")),
        }
    }
}

/// Turn-model search over a mesh for one algorithm.
pub struct TurnModel<'a> {
    alg: Algorithm,
    shape: MeshShape,
    net: &'a Network,
}

impl<'a> TurnModel<'a> {
    pub fn new(net: &'a Network, alg: Algorithm) -> Result<Self> {
        let shape = net.mesh().ok_or(Error::NotAMesh)?;
        Ok(TurnModel { alg, shape, net })
    }

    /// Directions that reduce the distance from `(x, y)` to `(tx, ty)`.
    fn minimal_directions(x: usize, y: usize, tx: usize, ty: usize) -> Vec<Direction> {
        let mut dirs = Vec::with_capacity(2);
        if tx > x {
            dirs.push(Direction::East);
        }
        if tx < x {
            dirs.push(Direction::West);
        }
        if ty > y {
            dirs.push(Direction::North);
        }
        if ty < y {
            dirs.push(Direction::South);
        }
        dirs
    }

    /// Whether a packet at router `(x, y)` that arrived travelling `din`
    /// can still reach `(tx, ty)` along a minimal legal path.
    fn completable(
        &self,
        x: usize,
        y: usize,
        din: Option<Direction>,
        tx: usize,
        ty: usize,
    ) -> bool {
        if (x, y) == (tx, ty) {
            return true;
        }
        Self::minimal_directions(x, y, tx, ty).into_iter().any(|d| {
            self.alg.turn_allowed(din, d, x)
                && self
                    .shape
                    .neighbor(x, y, d)
                    .is_some_and(|(nx, ny)| self.completable(nx, ny, Some(d), tx, ty))
        })
    }

    /// Legal next hops for a packet on `c` heading to processing node `t`.
    pub fn next_hops(&self, c: ChannelId, t: NodeId) -> Vec<ChannelId> {
        let router = c.dst;
        let (x, y) = self.shape.coords(router);
        let (tx, ty) = self.shape.coords(t);
        if (x, y) == (tx, ty) {
            return self
                .net
                .outputs_of(router)
                .iter()
                .copied()
                .filter(|o| o.delivers_to(t))
                .collect();
        }
        let din = if c.is_injection() {
            None
        } else {
            self.shape.direction(&c)
        };
        let mut hops = Vec::new();
        for d in Self::minimal_directions(x, y, tx, ty) {
            if !self.alg.turn_allowed(din, d, x) {
                continue;
            }
            let Some((nx, ny)) = self.shape.neighbor(x, y, d) else {
                continue;
            };
            if !self.completable(nx, ny, Some(d), tx, ty) {
                continue;
            }
            let next = self.shape.router_at(nx, ny);
            hops.extend(
                self.net
                    .outputs_of(router)
                    .iter()
                    .copied()
                    .filter(|o| o.dst == next),
            );
        }
        hops
    }

    /// Table holding exactly the `(channel, target)` cells a packet can
    /// occupy when every source injects towards every other node.
    pub fn table(&self) -> RoutingFunction {
        let mut r = RoutingFunction::new();
        let procs: Vec<NodeId> = self.net.processing_nodes().collect();
        for &t in &procs {
            let mut seen: BTreeMap<ChannelId, ()> = BTreeMap::new();
            let mut queue: VecDeque<ChannelId> = VecDeque::new();
            for &s in procs.iter().filter(|&&s| s != t) {
                for &inj in self.net.injection_channels(s) {
                    if seen.insert(inj, ()).is_none() {
                        queue.push_back(inj);
                    }
                }
            }
            while let Some(c) = queue.pop_front() {
                if c.is_delivery() {
                    continue;
                }
                for o in self.next_hops(c, t) {
                    r.insert_choice(c, t, o);
                    if seen.insert(o, ()).is_none() {
                        queue.push_back(o);
                    }
                }
            }
        }
        r
    }
}

pub fn make_routing(net: &Network, alg: Algorithm) -> Result<RoutingFunction> {
    Ok(TurnModel::new(net, alg)?.table())
}

pub fn make_xy(net: &Network) -> Result<RoutingFunction> {
    make_routing(net, Algorithm::Xy)
}

pub fn make_yx(net: &Network) -> Result<RoutingFunction> {
    make_routing(net, Algorithm::Yx)
}

pub fn make_odd_even(net: &Network) -> Result<RoutingFunction> {
    make_routing(net, Algorithm::OddEven)
}

pub fn make_negative_first(net: &Network) -> Result<RoutingFunction> {
    make_routing(net, Algorithm::NegativeFirst)
}
