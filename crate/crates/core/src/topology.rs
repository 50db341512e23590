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

//! Interconnection networks as directed channel multigraphs.
//!
//! Nodes are either processing elements or routers. Every channel is
//! unidirectional and identified structurally by its endpoints and lane, so
//! `r3>r4` is the channel from router 3 to router 4 on lane 0 and `p3>r3`
//! is the injection channel of processing node 3.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Processing,
    Router,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub kind: NodeKind,
    pub index: u32,
}

impl NodeId {
    pub const fn router(index: u32) -> Self {
        NodeId {
            kind: NodeKind::Router,
            index,
        }
    }

    pub const fn processing(index: u32) -> Self {
        NodeId {
            kind: NodeKind::Processing,
            index,
        }
    }

    pub fn is_router(self) -> bool {
        self.kind == NodeKind::Router
    }

    pub fn is_processing(self) -> bool {
        self.kind == NodeKind::Processing
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            NodeKind::Processing => 'p',
            NodeKind::Router => 'r',
        };
        write!(f, "{prefix}{}", self.index)
    }
}

impl FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, rest) = match s.chars().next() {
            Some('p') => (NodeKind::Processing, &s[1..]),
            Some('r') => (NodeKind::Router, &s[1..]),
            _ => return Err(format!("bad node id `{s}`")),
        };
        let index = rest
            .parse::<u32>()
            .map_err(|_| format!("bad node index in `{s}`"))?;
        Ok(NodeId { kind, index })
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A unidirectional channel. `(src, dst, lane)` is unique within a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId {
    pub src: NodeId,
    pub dst: NodeId,
    pub lane: u16,
}

impl ChannelId {
    pub const fn new(src: NodeId, dst: NodeId, lane: u16) -> Self {
        ChannelId { src, dst, lane }
    }

    /// Class implied by the endpoint kinds, or `None` for a
    /// processing-to-processing arc, which no network may contain.
    pub fn implied_class(&self) -> Option<ChannelClass> {
        match (self.src.kind, self.dst.kind) {
            (NodeKind::Processing, NodeKind::Router) => Some(ChannelClass::Injection),
            (NodeKind::Router, NodeKind::Router) => Some(ChannelClass::Network),
            (NodeKind::Router, NodeKind::Processing) => Some(ChannelClass::Delivery),
            (NodeKind::Processing, NodeKind::Processing) => None,
        }
    }

    pub fn is_injection(&self) -> bool {
        self.implied_class() == Some(ChannelClass::Injection)
    }

    pub fn is_delivery(&self) -> bool {
        self.implied_class() == Some(ChannelClass::Delivery)
    }

    /// True when this channel hands packets to `target`.
    pub fn delivers_to(&self, target: NodeId) -> bool {
        self.dst == target && self.src.is_router()
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lane == 0 {
            write!(f, "{}>{}", self.src, self.dst)
        } else {
            write!(f, "{}>{}:{}", self.src, self.dst, self.lane)
        }
    }
}

impl FromStr for ChannelId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (ends, lane) = match s.split_once(':') {
            Some((ends, lane)) => (
                ends,
                lane.parse::<u16>()
                    .map_err(|_| format!("bad lane in `{s}`"))?,
            ),
            None => (s, 0),
        };
        let (src, dst) = ends
            .split_once('>')
            .ok_or_else(|| format!("bad channel id `{s}`"))?;
        Ok(ChannelId {
            src: src.parse()?,
            dst: dst.parse()?,
            lane,
        })
    }
}

impl Serialize for ChannelId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChannelId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelClass {
    Injection,
    Network,
    Delivery,
}

/// Compass direction of a mesh link. `East` grows x, `North` grows y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    East,
    West,
    North,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::East,
        Direction::West,
        Direction::North,
        Direction::South,
    ];

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::East | Direction::West)
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Direction::East | Direction::North)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeshShape {
    pub width: usize,
    pub height: usize,
}

impl MeshShape {
    pub fn router_at(&self, x: usize, y: usize) -> NodeId {
        NodeId::router((y * self.width + x) as u32)
    }

    pub fn processing_at(&self, x: usize, y: usize) -> NodeId {
        NodeId::processing((y * self.width + x) as u32)
    }

    /// Coordinates of a router or of the processing node attached to it.
    pub fn coords(&self, node: NodeId) -> (usize, usize) {
        let i = node.index as usize;
        (i % self.width, i / self.width)
    }

    pub fn neighbor(&self, x: usize, y: usize, dir: Direction) -> Option<(usize, usize)> {
        match dir {
            Direction::East if x + 1 < self.width => Some((x + 1, y)),
            Direction::West if x > 0 => Some((x - 1, y)),
            Direction::North if y + 1 < self.height => Some((x, y + 1)),
            Direction::South if y > 0 => Some((x, y - 1)),
            _ => None,
        }
    }

    /// Direction of travel along a router-to-router channel.
    pub fn direction(&self, c: &ChannelId) -> Option<Direction> {
        if !(c.src.is_router() && c.dst.is_router()) {
            return None;
        }
        let (sx, sy) = self.coords(c.src);
        let (dx, dy) = self.coords(c.dst);
        match (dx as isize - sx as isize, dy as isize - sy as isize) {
            (1, 0) => Some(Direction::East),
            (-1, 0) => Some(Direction::West),
            (0, 1) => Some(Direction::North),
            (0, -1) => Some(Direction::South),
            _ => None,
        }
    }
}

/// Immutable channel multigraph with adjacency indices.
#[derive(Clone, Debug)]
pub struct Network {
    nodes: BTreeSet<NodeId>,
    channels: BTreeSet<ChannelId>,
    outputs: BTreeMap<NodeId, Vec<ChannelId>>,
    inputs: BTreeMap<NodeId, Vec<ChannelId>>,
    mesh: Option<MeshShape>,
}

impl Network {
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn channels(&self) -> impl Iterator<Item = ChannelId> + '_ {
        self.channels.iter().copied()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    pub fn contains_channel(&self, c: &ChannelId) -> bool {
        self.channels.contains(c)
    }

    pub fn processing_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied().filter(|n| n.is_processing())
    }

    pub fn routers(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied().filter(|n| n.is_router())
    }

    pub fn mesh(&self) -> Option<MeshShape> {
        self.mesh
    }

    pub fn channel_class(&self, c: &ChannelId) -> Result<ChannelClass> {
        if !self.channels.contains(c) {
            return Err(Error::UnknownChannel(*c));
        }
        c.implied_class()
            .ok_or_else(|| Error::MalformedNetwork(format!("{c} joins two processing nodes")))
    }

    pub fn output_channels(&self, n: NodeId) -> Result<&[ChannelId]> {
        self.outputs
            .get(&n)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNode(n))
    }

    pub fn input_channels(&self, n: NodeId) -> Result<&[ChannelId]> {
        self.inputs
            .get(&n)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNode(n))
    }

    /// Channels leaving `n`; empty for unknown nodes.
    pub fn outputs_of(&self, n: NodeId) -> &[ChannelId] {
        self.outputs.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn inputs_of(&self, n: NodeId) -> &[ChannelId] {
        self.inputs.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn injection_channels(&self, p: NodeId) -> &[ChannelId] {
        if p.is_processing() {
            self.outputs_of(p)
        } else {
            &[]
        }
    }

    pub fn delivery_channels(&self, p: NodeId) -> &[ChannelId] {
        if p.is_processing() {
            self.inputs_of(p)
        } else {
            &[]
        }
    }

    /// The router a processing node injects into.
    pub fn router_of(&self, p: NodeId) -> Option<NodeId> {
        self.injection_channels(p).first().map(|c| c.dst)
    }

    pub fn channels_of_class(&self, class: ChannelClass) -> impl Iterator<Item = ChannelId> + '_ {
        self.channels
            .iter()
            .copied()
            .filter(move |c| c.implied_class() == Some(class))
    }

    /// Strong connectivity of the router-only subgraph.
    pub fn routers_strongly_connected(&self) -> bool {
        let routers: Vec<NodeId> = self.routers().collect();
        let Some(&root) = routers.first() else {
            return false;
        };
        let forward = self.router_reach(root, false);
        let backward = self.router_reach(root, true);
        forward.len() == routers.len() && backward.len() == routers.len()
    }

    fn router_reach(&self, root: NodeId, reverse: bool) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            let arcs = if reverse {
                self.inputs_of(n)
            } else {
                self.outputs_of(n)
            };
            for c in arcs {
                let next = if reverse { c.src } else { c.dst };
                if next.is_router() && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    /// Router-to-router hop counts from `from` to every reachable router.
    pub fn router_hops_from(&self, from: NodeId) -> BTreeMap<NodeId, usize> {
        let mut dist = BTreeMap::from([(from, 0usize)]);
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            for c in self.outputs_of(n) {
                if c.dst.is_router() && !dist.contains_key(&c.dst) {
                    dist.insert(c.dst, d + 1);
                    queue.push_back(c.dst);
                }
            }
        }
        dist
    }
}

/// Incremental construction of arbitrary networks.
#[derive(Default, Debug)]
pub struct NetworkBuilder {
    nodes: BTreeSet<NodeId>,
    channels: BTreeSet<ChannelId>,
    mesh: Option<MeshShape>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, n: NodeId) -> &mut Self {
        self.nodes.insert(n);
        self
    }

    /// Router `index` with processing node `index` attached through one
    /// injection and one delivery channel per lane.
    pub fn router_with_processor(&mut self, index: u32, lanes: u16) -> &mut Self {
        let r = NodeId::router(index);
        let p = NodeId::processing(index);
        self.nodes.insert(r);
        self.nodes.insert(p);
        for lane in 0..lanes {
            self.channels.insert(ChannelId::new(p, r, lane));
            self.channels.insert(ChannelId::new(r, p, lane));
        }
        self
    }

    pub fn channel(&mut self, c: ChannelId) -> Result<&mut Self> {
        if !self.channels.insert(c) {
            return Err(Error::DuplicateChannel(c));
        }
        Ok(self)
    }

    /// Two opposing channels per lane between routers `a` and `b`.
    pub fn link(&mut self, a: NodeId, b: NodeId, lanes: u16) -> Result<&mut Self> {
        for lane in 0..lanes {
            self.channel(ChannelId::new(a, b, lane))?;
            self.channel(ChannelId::new(b, a, lane))?;
        }
        Ok(self)
    }

    pub fn build(&self) -> Result<Network> {
        let mut outputs: BTreeMap<NodeId, Vec<ChannelId>> =
            self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        let mut inputs = outputs.clone();
        for c in &self.channels {
            if c.implied_class().is_none() {
                return Err(Error::MalformedNetwork(format!(
                    "{c} joins two processing nodes"
                )));
            }
            for end in [c.src, c.dst] {
                if !self.nodes.contains(&end) {
                    return Err(Error::UnknownNode(end));
                }
            }
            outputs.get_mut(&c.src).expect("checked").push(*c);
            inputs.get_mut(&c.dst).expect("checked").push(*c);
        }
        let net = Network {
            nodes: self.nodes.clone(),
            channels: self.channels.clone(),
            outputs,
            inputs,
            mesh: self.mesh,
        };
        for class in [
            ChannelClass::Injection,
            ChannelClass::Network,
            ChannelClass::Delivery,
        ] {
            if net.channels_of_class(class).next().is_none() {
                return Err(Error::MalformedNetwork(format!("no {class:?} channels")));
            }
        }
        for p in net.processing_nodes() {
            if net.injection_channels(p).is_empty() || net.delivery_channels(p).is_empty() {
                return Err(Error::MalformedNetwork(format!(
                    "{p} lacks an injection or delivery channel"
                )));
            }
            let routers: BTreeSet<NodeId> = net
                .injection_channels(p)
                .iter()
                .map(|c| c.dst)
                .chain(net.delivery_channels(p).iter().map(|c| c.src))
                .collect();
            if routers.len() != 1 {
                return Err(Error::MalformedNetwork(format!(
                    "{p} must attach to exactly one router"
                )));
            }
        }
        if !net.routers_strongly_connected() {
            return Err(Error::MalformedNetwork(
                "router subgraph is not strongly connected".into(),
            ));
        }
        Ok(net)
    }
}

/// A `width` x `height` mesh with one processing node per router.
///
/// Router and processing node indices are `y * width + x`. Each physical
/// link contributes two opposing channels per lane.
pub fn build_mesh(width: usize, height: usize, lanes: usize) -> Result<Network> {
    if width == 0 || height == 0 || width * height < 2 || lanes == 0 || lanes > u16::MAX as usize {
        return Err(Error::InvalidDimensions {
            width,
            height,
            lanes,
        });
    }
    let shape = MeshShape { width, height };
    let mut b = NetworkBuilder::new();
    for y in 0..height {
        for x in 0..width {
            b.router_with_processor((y * width + x) as u32, lanes as u16);
        }
    }
    for y in 0..height {
        for x in 0..width {
            let here = shape.router_at(x, y);
            for dir in [Direction::East, Direction::North] {
                if let Some((nx, ny)) = shape.neighbor(x, y, dir) {
                    b.link(here, shape.router_at(nx, ny), lanes as u16)?;
                }
            }
        }
    }
    b.mesh = Some(shape);
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(net: &Network, class: ChannelClass) -> usize {
        net.channels_of_class(class).count()
    }

    /// Counts mesh network channels by testing every ordered router pair
    /// for unit Manhattan distance.
    fn exhaustive_network_channels(w: usize, h: usize) -> usize {
        let mut n = 0;
        for a in 0..w * h {
            for b in 0..w * h {
                let (ax, ay) = ((a % w) as isize, (a / w) as isize);
                let (bx, by) = ((b % w) as isize, (b / w) as isize);
                if (ax - bx).abs() + (ay - by).abs() == 1 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn mesh_channel_counts() {
        for (w, h) in [(5, 5), (1, 2), (3, 3), (4, 2), (2, 1)] {
            let net = build_mesh(w, h, 1).unwrap();
            let formula = 2 * (w * (h - 1) + h * (w - 1));
            assert_eq!(count(&net, ChannelClass::Network), formula);
            assert_eq!(formula, exhaustive_network_channels(w, h));
            assert_eq!(count(&net, ChannelClass::Injection), w * h);
            assert_eq!(count(&net, ChannelClass::Delivery), w * h);
        }
        let net = build_mesh(5, 5, 1).unwrap();
        assert_eq!(count(&net, ChannelClass::Network), 80);
        assert_eq!(net.channel_count(), 130);
        assert_eq!(net.routers().count(), 25);
        assert_eq!(net.processing_nodes().count(), 25);
        let small = build_mesh(1, 2, 1).unwrap();
        assert_eq!(small.channel_count(), 6);
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert!(matches!(
            build_mesh(0, 3, 1),
            Err(Error::InvalidDimensions { .. })
        ));
        assert!(build_mesh(1, 1, 1).is_err());
        assert!(build_mesh(2, 2, 0).is_err());
    }

    #[test]
    fn classes_follow_endpoint_kinds() {
        let net = build_mesh(5, 5, 1).unwrap();
        let shape = net.mesh().unwrap();
        let inj = ChannelId::new(shape.processing_at(0, 0), shape.router_at(0, 0), 0);
        let east = ChannelId::new(shape.router_at(0, 0), shape.router_at(1, 0), 0);
        let del = ChannelId::new(shape.router_at(4, 4), shape.processing_at(4, 4), 0);
        assert_eq!(net.channel_class(&inj).unwrap(), ChannelClass::Injection);
        assert_eq!(net.channel_class(&east).unwrap(), ChannelClass::Network);
        assert_eq!(net.channel_class(&del).unwrap(), ChannelClass::Delivery);
        let bogus = ChannelId::new(shape.router_at(0, 0), shape.router_at(2, 0), 0);
        assert!(matches!(
            net.channel_class(&bogus),
            Err(Error::UnknownChannel(_))
        ));
    }

    #[test]
    fn adjacency_of_corner_center_and_processor() {
        let net = build_mesh(5, 5, 1).unwrap();
        let shape = net.mesh().unwrap();
        let corner = net.output_channels(shape.router_at(0, 0)).unwrap();
        assert_eq!(corner.len(), 3);
        assert_eq!(
            corner.iter().filter(|c| c.is_delivery()).count(),
            1,
            "corner router delivers once"
        );
        let center = net.output_channels(shape.router_at(2, 2)).unwrap();
        assert_eq!(center.len(), 5);
        let dirs: BTreeSet<_> = center.iter().filter_map(|c| shape.direction(c)).collect();
        assert_eq!(dirs.len(), 4);
        let p = shape.processing_at(3, 1);
        assert_eq!(net.output_channels(p).unwrap().len(), 1);
        assert_eq!(net.input_channels(p).unwrap().len(), 1);
        assert!(net.output_channels(NodeId::router(99)).is_err());
    }

    #[test]
    fn every_network_channel_has_a_twin_and_routers_are_connected() {
        for (w, h) in [(5, 5), (1, 2), (3, 2)] {
            let net = build_mesh(w, h, 2).unwrap();
            assert!(net.routers_strongly_connected());
            for c in net.channels_of_class(ChannelClass::Network) {
                assert!(net.contains_channel(&ChannelId::new(c.dst, c.src, c.lane)));
            }
            let total: usize = [
                ChannelClass::Injection,
                ChannelClass::Network,
                ChannelClass::Delivery,
            ]
            .iter()
            .map(|&k| count(&net, k))
            .sum();
            assert_eq!(total, net.channel_count());
        }
    }

    #[test]
    fn ids_round_trip_through_text() {
        let c = ChannelId::new(NodeId::router(3), NodeId::router(4), 1);
        assert_eq!(c.to_string(), "r3>r4:1");
        assert_eq!("r3>r4:1".parse::<ChannelId>().unwrap(), c);
        assert_eq!("p7>r7".parse::<ChannelId>().unwrap().lane, 0);
        assert!("x1>r2".parse::<ChannelId>().is_err());
    }

    #[test]
    fn builder_rejects_disconnected_routers() {
        let mut b = NetworkBuilder::new();
        b.router_with_processor(0, 1).router_with_processor(1, 1);
        b.channel(ChannelId::new(NodeId::router(0), NodeId::router(1), 0))
            .unwrap();
        assert!(matches!(b.build(), Err(Error::MalformedNetwork(_))));
    }
}
