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

//! Routing functions as explicit `(channel, target) -> outputs` tables.

mod mesh;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

pub use mesh::{
    make_negative_first, make_odd_even, make_routing, make_xy, make_yx, Algorithm, TurnModel,
};

use crate::error::{Error, Result};
use crate::topology::{ChannelId, Network, NodeId};

pub type Choices = BTreeSet<ChannelId>;

/// The per-channel slice of a routing function: target -> output choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRoutingFunction {
    pub channel: ChannelId,
    pub choices: BTreeMap<NodeId, Choices>,
}

impl LocalRoutingFunction {
    pub fn targets(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.choices.keys().copied()
    }
}

/// Table from `(current channel, target)` to candidate output channels.
///
/// Cells are never stored empty: an absent cell and an empty choice set
/// mean the same thing, so equality is pointwise.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoutingFunction {
    table: BTreeMap<ChannelId, BTreeMap<NodeId, Choices>>,
}

impl RoutingFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from explicit routes. Each path lists the channels a
    /// packet traverses, from an injection channel to the delivery channel
    /// of its target.
    pub fn from_paths(net: &Network, paths: &[Vec<ChannelId>]) -> Result<Self> {
        let mut r = RoutingFunction::new();
        for path in paths {
            let last = path
                .last()
                .ok_or_else(|| Error::Precondition("empty path".into()))?;
            if !last.is_delivery() {
                return Err(Error::Precondition(format!(
                    "path must end in a delivery channel, ends in {last}"
                )));
            }
            let target = last.dst;
            for hop in path.windows(2) {
                r.extend(net, hop[0], target, hop[1])?;
            }
        }
        Ok(r)
    }

    /// Candidate outputs for a packet at the head of `c` heading to `d`.
    pub fn route(&self, c: ChannelId, d: NodeId) -> Result<Choices> {
        if c.is_delivery() {
            return Err(Error::DeliveryChannel(c));
        }
        if !d.is_processing() {
            return Err(Error::NotATarget(d));
        }
        Ok(self.choices(c, d).cloned().unwrap_or_default())
    }

    /// Unchecked lookup; `None` when the cell is empty.
    pub fn choices(&self, c: ChannelId, d: NodeId) -> Option<&Choices> {
        self.table.get(&c).and_then(|m| m.get(&d))
    }

    pub fn local_routing_function(&self, c: ChannelId) -> LocalRoutingFunction {
        LocalRoutingFunction {
            channel: c,
            choices: self.table.get(&c).cloned().unwrap_or_default(),
        }
    }

    pub fn from_locals(locals: impl IntoIterator<Item = LocalRoutingFunction>) -> Self {
        let mut r = RoutingFunction::new();
        for local in locals {
            r.set_local(local);
        }
        r
    }

    /// Overwrites every cell of `local.channel`.
    pub fn set_local(&mut self, local: LocalRoutingFunction) {
        let cells: BTreeMap<NodeId, Choices> = local
            .choices
            .into_iter()
            .filter(|(_, outs)| !outs.is_empty())
            .collect();
        if cells.is_empty() {
            self.table.remove(&local.channel);
        } else {
            self.table.insert(local.channel, cells);
        }
    }

    /// Channels with at least one non-empty cell.
    pub fn channels(&self) -> impl Iterator<Item = ChannelId> + '_ {
        self.table.keys().copied()
    }

    pub fn targets_at(&self, c: ChannelId) -> impl Iterator<Item = NodeId> + '_ {
        self.table
            .get(&c)
            .into_iter()
            .flat_map(|m| m.keys().copied())
    }

    /// All `(channel, target, outputs)` cells in order.
    pub fn entries(&self) -> impl Iterator<Item = (ChannelId, NodeId, &Choices)> + '_ {
        self.table
            .iter()
            .flat_map(|(&c, m)| m.iter().map(move |(&d, outs)| (c, d, outs)))
    }

    pub fn choice_count(&self) -> usize {
        self.entries().map(|(_, _, outs)| outs.len()).sum()
    }

    /// Adds `out` as a choice for `(c, d)`. Returns whether the table grew.
    pub fn extend(
        &mut self,
        net: &Network,
        c: ChannelId,
        d: NodeId,
        out: ChannelId,
    ) -> Result<bool> {
        if !net.contains_channel(&c) {
            return Err(Error::UnknownChannel(c));
        }
        if !net.contains_channel(&out) {
            return Err(Error::UnknownChannel(out));
        }
        if c.is_delivery() {
            return Err(Error::DeliveryChannel(c));
        }
        if out.src != c.dst || out.is_injection() {
            return Err(Error::NotAdjacent { channel: c, out });
        }
        if !d.is_processing() {
            return Err(Error::NotATarget(d));
        }
        Ok(self.insert_choice(c, d, out))
    }

    /// Removes `out` from the choices for `(c, d)`.
    pub fn reduce(&mut self, c: ChannelId, d: NodeId, out: ChannelId) -> Result<()> {
        if self.remove_choice(c, d, out) {
            Ok(())
        } else {
            Err(Error::MissingChoice {
                channel: c,
                target: d,
                out,
            })
        }
    }

    pub(crate) fn insert_choice(&mut self, c: ChannelId, d: NodeId, out: ChannelId) -> bool {
        self.table
            .entry(c)
            .or_default()
            .entry(d)
            .or_default()
            .insert(out)
    }

    pub(crate) fn remove_choice(&mut self, c: ChannelId, d: NodeId, out: ChannelId) -> bool {
        let Some(cells) = self.table.get_mut(&c) else {
            return false;
        };
        let Some(outs) = cells.get_mut(&d) else {
            return false;
        };
        let removed = outs.remove(&out);
        if outs.is_empty() {
            cells.remove(&d);
            if cells.is_empty() {
                self.table.remove(&c);
            }
        }
        removed
    }

    /// Empties the cell `(c, d)` and returns what it held.
    pub(crate) fn clear_cell(&mut self, c: ChannelId, d: NodeId) -> Choices {
        let Some(cells) = self.table.get_mut(&c) else {
            return Choices::new();
        };
        let outs = cells.remove(&d).unwrap_or_default();
        if cells.is_empty() {
            self.table.remove(&c);
        }
        outs
    }

    /// True iff every ordered pair of distinct processing nodes is routed:
    /// packets injected at the source can always make progress and every
    /// branch of the route ends at the target's delivery channel.
    pub fn is_connected(&self, net: &Network) -> bool {
        let procs: Vec<NodeId> = net.processing_nodes().collect();
        procs.iter().all(|&t| {
            procs
                .iter()
                .filter(|&&s| s != t)
                .all(|&s| self.flow_is_routed(net, s, t))
        })
    }

    /// Whether packets from `s` to `t` always reach `t` under this table.
    pub fn flow_is_routed(&self, net: &Network, s: NodeId, t: NodeId) -> bool {
        let inj = net.injection_channels(s);
        if inj.iter().all(|&c| self.choices(c, t).is_none()) {
            return false;
        }
        let mut seen: BTreeSet<ChannelId> = inj
            .iter()
            .copied()
            .filter(|&c| self.choices(c, t).is_some())
            .collect();
        let mut queue: VecDeque<ChannelId> = seen.iter().copied().collect();
        let mut delivered = false;
        while let Some(c) = queue.pop_front() {
            if c.is_delivery() {
                if c.dst != t {
                    return false;
                }
                delivered = true;
                continue;
            }
            let Some(outs) = self.choices(c, t) else {
                return false;
            };
            for &o in outs {
                if seen.insert(o) {
                    queue.push_back(o);
                }
            }
        }
        delivered
    }

    /// Line-oriented dump: `channel target : out out ...`, one cell per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (c, d, outs) in self.entries() {
            let _ = write!(s, "{c} {d} :");
            for o in outs {
                let _ = write!(s, " {o}");
            }
            s.push('\n');
        }
        s
    }

    /// Parses the format written by [`RoutingFunction::dump`]. Blank lines
    /// and `#` comments are ignored.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut r = RoutingFunction::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let (head, outs) = line
                .split_once(':')
                .ok_or_else(|| err("missing `:`".into()))?;
            let mut head = head.split_whitespace();
            let c: ChannelId = head
                .next()
                .ok_or_else(|| err("missing channel".into()))?
                .parse()
                .map_err(err)?;
            let d: NodeId = head
                .next()
                .ok_or_else(|| err("missing target".into()))?
                .parse()
                .map_err(err)?;
            for o in outs.split_whitespace() {
                r.insert_choice(c, d, o.parse().map_err(err)?);
            }
        }
        Ok(r)
    }
}
