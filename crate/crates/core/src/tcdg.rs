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

//! Target channel dependency graphs.
//!
//! A dependency `(src, dst, target)` says a packet for `target` may sit
//! in `src` and next be routed into `dst`. Cycle questions are asked of
//! the channel projection, which drops the target labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::RoutingFunction;
use crate::topology::{ChannelId, Network, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dependency {
    pub src: ChannelId,
    pub dst: ChannelId,
    pub target: NodeId,
}

impl Dependency {
    pub fn new(src: ChannelId, dst: ChannelId, target: NodeId) -> Self {
        Dependency { src, dst, target }
    }

    /// Consecutive channels must meet at a router.
    pub fn is_well_formed(&self) -> bool {
        self.src.dst == self.dst.src && self.src.dst.is_router() && self.target.is_processing()
    }
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [{}]", self.src, self.dst, self.target)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Tcdg {
    vertices: BTreeSet<ChannelId>,
    deps: BTreeSet<Dependency>,
    out: BTreeMap<ChannelId, BTreeSet<Dependency>>,
    inc: BTreeMap<ChannelId, BTreeSet<Dependency>>,
    by_target: BTreeMap<NodeId, BTreeSet<Dependency>>,
    // Projection arcs with the number of labelled deps behind each.
    arcs: BTreeMap<(ChannelId, ChannelId), usize>,
}

impl PartialEq for Tcdg {
    fn eq(&self, other: &Self) -> bool {
        self.deps == other.deps
    }
}

impl Eq for Tcdg {}

impl Tcdg {
    pub fn new(vertices: impl IntoIterator<Item = ChannelId>) -> Self {
        Tcdg {
            vertices: vertices.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn from_deps(
        vertices: impl IntoIterator<Item = ChannelId>,
        deps: impl IntoIterator<Item = Dependency>,
    ) -> Self {
        let mut g = Tcdg::new(vertices);
        for d in deps {
            g.insert(d);
        }
        g
    }

    /// Every cell of `r` as dependencies, reachable or not.
    pub fn from_table(net: &Network, r: &RoutingFunction) -> Self {
        let mut g = Tcdg::new(net.channels());
        for (c, t, outs) in r.entries() {
            for &o in outs {
                g.insert(Dependency::new(c, o, t));
            }
        }
        g
    }

    pub fn vertices(&self) -> impl Iterator<Item = ChannelId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn deps(&self) -> impl Iterator<Item = &Dependency> + '_ {
        self.deps.iter()
    }

    pub fn dep_set(&self) -> &BTreeSet<Dependency> {
        &self.deps
    }

    pub fn len(&self) -> usize {
        self.deps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deps.is_empty()
    }

    pub fn contains(&self, d: &Dependency) -> bool {
        self.deps.contains(d)
    }

    pub fn insert(&mut self, d: Dependency) -> bool {
        if !self.deps.insert(d) {
            return false;
        }
        self.vertices.insert(d.src);
        self.vertices.insert(d.dst);
        self.out.entry(d.src).or_default().insert(d);
        self.inc.entry(d.dst).or_default().insert(d);
        self.by_target.entry(d.target).or_default().insert(d);
        *self.arcs.entry((d.src, d.dst)).or_default() += 1;
        true
    }

    pub fn remove(&mut self, d: &Dependency) -> bool {
        if !self.deps.remove(d) {
            return false;
        }
        fn drop_from<K: Ord>(map: &mut BTreeMap<K, BTreeSet<Dependency>>, key: K, d: &Dependency) {
            if let Some(set) = map.get_mut(&key) {
                set.remove(d);
                if set.is_empty() {
                    map.remove(&key);
                }
            }
        }
        drop_from(&mut self.out, d.src, d);
        drop_from(&mut self.inc, d.dst, d);
        drop_from(&mut self.by_target, d.target, d);
        let key = (d.src, d.dst);
        if let Some(n) = self.arcs.get_mut(&key) {
            *n -= 1;
            if *n == 0 {
                self.arcs.remove(&key);
            }
        }
        true
    }

    /// D⁺(c).
    pub fn out_deps(&self, c: ChannelId) -> impl Iterator<Item = &Dependency> + '_ {
        self.out.get(&c).into_iter().flatten()
    }

    /// D⁻(c).
    pub fn in_deps(&self, c: ChannelId) -> impl Iterator<Item = &Dependency> + '_ {
        self.inc.get(&c).into_iter().flatten()
    }

    pub fn out_degree(&self, c: ChannelId) -> usize {
        self.out.get(&c).map_or(0, BTreeSet::len)
    }

    pub fn in_degree(&self, c: ChannelId) -> usize {
        self.inc.get(&c).map_or(0, BTreeSet::len)
    }

    /// T⁺(c).
    pub fn out_targets(&self, c: ChannelId) -> BTreeSet<NodeId> {
        self.out_deps(c).map(|d| d.target).collect()
    }

    /// T⁻(c).
    pub fn in_targets(&self, c: ChannelId) -> BTreeSet<NodeId> {
        self.in_deps(c).map(|d| d.target).collect()
    }

    pub fn has_out_target(&self, c: ChannelId, t: NodeId) -> bool {
        self.out_deps(c).any(|d| d.target == t)
    }

    pub fn has_in_target(&self, c: ChannelId, t: NodeId) -> bool {
        self.in_deps(c).any(|d| d.target == t)
    }

    /// Every dependency labelled with `t`.
    pub fn deps_for_target(&self, t: NodeId) -> impl Iterator<Item = &Dependency> + '_ {
        self.by_target.get(&t).into_iter().flatten()
    }

    /// Outgoing deps of `c` for one target.
    pub fn out_deps_for(&self, c: ChannelId, t: NodeId) -> Vec<Dependency> {
        self.out_deps(c)
            .filter(|d| d.target == t)
            .copied()
            .collect()
    }

    pub fn in_deps_for(&self, c: ChannelId, t: NodeId) -> Vec<Dependency> {
        self.in_deps(c).filter(|d| d.target == t).copied().collect()
    }

    /// Direct successors of `c` in the channel projection.
    pub fn successors(&self, c: ChannelId) -> BTreeSet<ChannelId> {
        self.out_deps(c).map(|d| d.dst).collect()
    }

    pub fn predecessors(&self, c: ChannelId) -> BTreeSet<ChannelId> {
        self.in_deps(c).map(|d| d.src).collect()
    }

    pub fn has_arc(&self, a: ChannelId, b: ChannelId) -> bool {
        self.arcs.contains_key(&(a, b))
    }

    /// Arcs of the channel projection, parallel deps merged.
    pub fn projection(&self) -> impl Iterator<Item = (ChannelId, ChannelId)> + '_ {
        self.arcs.keys().copied()
    }

    pub fn is_subset(&self, other: &Tcdg) -> bool {
        self.deps.is_subset(&other.deps)
    }

    pub fn union(&self, other: &Tcdg) -> Tcdg {
        let mut g = self.clone();
        g.vertices.extend(other.vertices.iter().copied());
        for d in other.deps() {
            g.insert(*d);
        }
        g
    }

    /// True iff T⁻ of `ta` at `c` is covered by T⁺ of `tb` at `c`.
    pub fn is_target_conforming(ta: &Tcdg, tb: &Tcdg, c: ChannelId) -> bool {
        ta.in_deps(c).all(|d| tb.has_out_target(c, d.target))
    }

    /// Whether every direct successor of `c` has upgraded.
    pub fn is_ready(&self, upgraded: &BTreeSet<ChannelId>, c: ChannelId) -> bool {
        self.out_deps(c).all(|d| upgraded.contains(&d.dst))
    }

    /// Checked form of [`Tcdg::is_ready`]: a cyclic projection has no
    /// reverse topological order, so it is reported as an error.
    pub fn reverse_topological_ready(
        &self,
        upgraded: &BTreeSet<ChannelId>,
        c: ChannelId,
    ) -> Result<bool> {
        if let Some(cycle) = self.find_cycle() {
            return Err(Error::Cyclic(cycle[0]));
        }
        Ok(self.is_ready(upgraded, c))
    }

    /// Vertices ordered sinks first. Ties broken by channel order.
    pub fn reverse_topological_order(&self) -> Result<Vec<ChannelId>> {
        let mut remaining: BTreeMap<ChannelId, usize> = self
            .vertices
            .iter()
            .map(|&c| (c, self.successors(c).len()))
            .collect();
        let mut ready: BTreeSet<ChannelId> = remaining
            .iter()
            .filter(|(_, &n)| n == 0)
            .map(|(&c, _)| c)
            .collect();
        let mut order = Vec::with_capacity(remaining.len());
        while let Some(c) = ready.pop_first() {
            order.push(c);
            for p in self.predecessors(c) {
                let n = remaining.get_mut(&p).expect("predecessor is a vertex");
                *n -= 1;
                if *n == 0 {
                    ready.insert(p);
                }
            }
        }
        if order.len() < self.vertices.len() {
            let stuck = remaining
                .iter()
                .find(|(c, &n)| n > 0 && !order.contains(c))
                .map(|(&c, _)| c)
                .expect("some vertex is left");
            return Err(Error::Cyclic(stuck));
        }
        Ok(order)
    }

    pub fn projection_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// A directed cycle of the channel projection, if one exists.
    pub fn find_cycle(&self) -> Option<Vec<ChannelId>> {
        find_cycle_in(self.vertices.iter().copied(), |c| {
            self.out
                .get(&c)
                .into_iter()
                .flatten()
                .map(|d| d.dst)
                .collect()
        })
    }

    /// True iff `a` precedes `b`: some path of the projection leads from
    /// `a` to `b`, so an arc `b -> a` would close a cycle. Every channel
    /// precedes itself.
    pub fn is_predecessor(&self, a: ChannelId, b: ChannelId) -> bool {
        reaches(&[self], a, b)
    }

    /// One upgrade step as graph algebra: drop D⁺(c) from `tp`, add D⁺(c)
    /// from `ti`.
    pub fn compose_next(tp: &Tcdg, ti: &Tcdg, c: ChannelId) -> Tcdg {
        let mut g = tp.clone();
        let old: Vec<Dependency> = g.out_deps(c).copied().collect();
        for d in &old {
            g.remove(d);
        }
        for d in ti.out_deps(c) {
            g.insert(*d);
        }
        g
    }

    /// One `src -> dst [target]` line per dependency.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for d in &self.deps {
            let _ = writeln!(s, "{d}");
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Tcdg> {
        let mut g = Tcdg::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let (src, rest) = line
                .split_once("->")
                .ok_or_else(|| err("missing `->`".into()))?;
            let (dst, target) = rest
                .split_once('[')
                .ok_or_else(|| err("missing `[target]`".into()))?;
            let target = target
                .trim()
                .strip_suffix(']')
                .ok_or_else(|| err("unterminated target".into()))?;
            g.insert(Dependency::new(
                src.trim().parse().map_err(err)?,
                dst.trim().parse().map_err(err)?,
                target.trim().parse().map_err(err)?,
            ));
        }
        Ok(g)
    }

    /// Graphviz rendering; parallel dependencies become one labelled edge.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=LR;\n");
        for c in &self.vertices {
            let _ = writeln!(s, "  \"{c}\";");
        }
        for &(a, b) in self.arcs.keys() {
            let labels: Vec<String> = self
                .out_deps(a)
                .filter(|d| d.dst == b)
                .map(|d| d.target.to_string())
                .collect();
            let _ = writeln!(s, "  \"{a}\" -> \"{b}\" [label=\"{}\"];", labels.join(","));
        }
        s.push_str("}\n");
        s
    }
}

/// Reachability over the union of several graphs' projections.
pub fn reaches(graphs: &[&Tcdg], from: ChannelId, to: ChannelId) -> bool {
    if from == to {
        return true;
    }
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        for g in graphs {
            for d in g.out_deps(c) {
                if d.dst == to {
                    return true;
                }
                if seen.insert(d.dst) {
                    queue.push_back(d.dst);
                }
            }
        }
    }
    false
}

/// Iterative three-colour DFS. Returns the vertices of one cycle.
fn find_cycle_in(
    vertices: impl Iterator<Item = ChannelId>,
    succ: impl Fn(ChannelId) -> Vec<ChannelId>,
) -> Option<Vec<ChannelId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        Grey,
        Black,
    }
    let mut colour: BTreeMap<ChannelId, Colour> = BTreeMap::new();
    for root in vertices {
        if colour.contains_key(&root) {
            continue;
        }
        let mut stack: Vec<(ChannelId, Vec<ChannelId>)> = vec![(root, succ(root))];
        colour.insert(root, Colour::Grey);
        while let Some((node, pending)) = stack.last_mut() {
            let node = *node;
            match pending.pop() {
                Some(next) => match colour.get(&next) {
                    None => {
                        colour.insert(next, Colour::Grey);
                        let s = succ(next);
                        stack.push((next, s));
                    }
                    Some(Colour::Grey) => {
                        let start = stack.iter().position(|(c, _)| *c == next).unwrap();
                        return Some(stack[start..].iter().map(|(c, _)| *c).collect());
                    }
                    Some(Colour::Black) => {}
                },
                None => {
                    colour.insert(node, Colour::Black);
                    stack.pop();
                }
            }
        }
    }
    None
}

/// Channels a packet for `t` can occupy under `r`, seeded by every
/// injection channel of a source other than `t`.
pub fn live_channels_for(net: &Network, r: &RoutingFunction, t: NodeId) -> BTreeSet<ChannelId> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in net.processing_nodes().filter(|&s| s != t) {
        for &inj in net.injection_channels(s) {
            if r.choices(inj, t).is_some() && seen.insert(inj) {
                queue.push_back(inj);
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        if let Some(outs) = r.choices(c, t) {
            for &o in outs {
                if seen.insert(o) {
                    queue.push_back(o);
                }
            }
        }
    }
    seen
}

/// Live dependencies for a single target.
pub fn target_deps(net: &Network, r: &RoutingFunction, t: NodeId) -> BTreeSet<Dependency> {
    let mut deps = BTreeSet::new();
    for c in live_channels_for(net, r, t) {
        if let Some(outs) = r.choices(c, t) {
            deps.extend(outs.iter().map(|&o| Dependency::new(c, o, t)));
        }
    }
    deps
}

/// TCDG of `r`, restricted to `(channel, target)` pairs that packets can
/// actually reach from injection.
pub fn build_tcdg(net: &Network, r: &RoutingFunction) -> Tcdg {
    let mut g = Tcdg::new(net.channels());
    for t in net.processing_nodes() {
        for d in target_deps(net, r, t) {
            g.insert(d);
        }
    }
    g
}

/// Drops every cell of `r` that no packet can reach.
pub fn live_restriction(net: &Network, r: &RoutingFunction) -> RoutingFunction {
    let g = build_tcdg(net, r);
    let mut out = RoutingFunction::new();
    for d in g.deps() {
        out.insert_choice(d.src, d.target, d.dst);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{make_routing, make_xy, Algorithm};
    use crate::topology::build_mesh;

    fn ch(a: u32, b: u32) -> ChannelId {
        ChannelId::new(NodeId::router(a), NodeId::router(b), 0)
    }

    fn p(i: u32) -> NodeId {
        NodeId::processing(i)
    }

    // Brute force: follow every walk from every injection channel.
    fn walk_oracle(net: &Network, r: &RoutingFunction) -> BTreeSet<Dependency> {
        fn walk(
            r: &RoutingFunction,
            c: ChannelId,
            t: NodeId,
            depth: usize,
            out: &mut BTreeSet<Dependency>,
        ) {
            assert!(depth < 64, "walk too long");
            if let Some(outs) = r.choices(c, t) {
                for &o in outs {
                    out.insert(Dependency::new(c, o, t));
                    walk(r, o, t, depth + 1, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        for s in net.processing_nodes() {
            for t in net.processing_nodes().filter(|&t| t != s) {
                for &inj in net.injection_channels(s) {
                    walk(r, inj, t, 0, &mut out);
                }
            }
        }
        out
    }

    // Independent cycle oracle: Floyd-Warshall closure on the projection.
    fn closure_has_cycle(g: &Tcdg) -> bool {
        let vs: Vec<ChannelId> = g.vertices().collect();
        let idx: BTreeMap<ChannelId, usize> = vs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let n = vs.len();
        let mut m = vec![vec![false; n]; n];
        for (a, b) in g.projection() {
            m[idx[&a]][idx[&b]] = true;
        }
        for k in 0..n {
            let via = m[k].clone();
            for row in m.iter_mut().filter(|row| row[k]) {
                for (cell, &reach) in row.iter_mut().zip(&via) {
                    *cell |= reach;
                }
            }
        }
        (0..n).any(|i| m[i][i])
    }

    #[test]
    fn xy_on_two_routers_has_four_dependencies() {
        let net = build_mesh(2, 1, 1).unwrap();
        let r = make_xy(&net).unwrap();
        let g = build_tcdg(&net, &r);
        let inj_a = ChannelId::new(p(0), NodeId::router(0), 0);
        let inj_b = ChannelId::new(p(1), NodeId::router(1), 0);
        let del_a = ChannelId::new(NodeId::router(0), p(0), 0);
        let del_b = ChannelId::new(NodeId::router(1), p(1), 0);
        let expected = BTreeSet::from([
            Dependency::new(inj_a, ch(0, 1), p(1)),
            Dependency::new(ch(0, 1), del_b, p(1)),
            Dependency::new(inj_b, ch(1, 0), p(0)),
            Dependency::new(ch(1, 0), del_a, p(0)),
        ]);
        assert_eq!(g.dep_set(), &expected);
        assert_eq!(
            g.out_deps(ch(0, 1)).copied().collect::<Vec<_>>(),
            vec![Dependency::new(ch(0, 1), del_b, p(1))]
        );
        assert_eq!(g.in_targets(ch(0, 1)), BTreeSet::from([p(1)]));
        assert_eq!(g.in_targets(del_a), BTreeSet::from([p(0)]));
        assert!(g.out_targets(del_a).is_empty());
        assert_eq!(g.in_degree(inj_a), 0);
    }

    #[test]
    fn empty_routing_has_no_dependencies() {
        let net = build_mesh(3, 3, 1).unwrap();
        let g = build_tcdg(&net, &RoutingFunction::new());
        assert!(g.is_empty());
        assert!(g.projection_acyclic());
    }

    #[test]
    fn fixpoint_matches_walk_oracle_on_small_meshes() {
        for (w, h) in [
            (1, 2),
            (2, 1),
            (2, 2),
            (1, 3),
            (3, 1),
            (2, 3),
            (3, 2),
            (3, 3),
        ] {
            let net = build_mesh(w, h, 1).unwrap();
            for alg in Algorithm::ALL {
                let r = make_routing(&net, alg).unwrap();
                let g = build_tcdg(&net, &r);
                assert_eq!(g.dep_set(), &walk_oracle(&net, &r), "{alg} {w}x{h}");
                assert!(g.projection_acyclic());
                assert!(!closure_has_cycle(&g));
            }
        }
    }

    #[test]
    fn gating_drops_unreachable_cells() {
        let net = build_mesh(3, 1, 1).unwrap();
        let mut r = make_xy(&net).unwrap();
        // A cell no packet can reach: westbound packet at r1 heading east.
        r.insert_choice(ch(1, 0), p(2), ch(0, 1));
        let gated = build_tcdg(&net, &r);
        let raw = Tcdg::from_table(&net, &r);
        assert_eq!(raw.len(), gated.len() + 1);
        assert_eq!(live_restriction(&net, &r), make_xy(&net).unwrap());
    }

    #[test]
    fn stock_tables_on_5x5_are_acyclic() {
        let net = build_mesh(5, 5, 1).unwrap();
        for alg in Algorithm::ALL {
            let g = build_tcdg(&net, &make_routing(&net, alg).unwrap());
            assert!(g.projection_acyclic(), "{alg}");
            assert!(!closure_has_cycle(&g), "{alg}");
            assert_eq!(g.reverse_topological_order().unwrap().len(), 130);
        }
    }

    #[test]
    fn live_pairs_reach_delivery() {
        let net = build_mesh(4, 4, 1).unwrap();
        for alg in Algorithm::ALL {
            let r = make_routing(&net, alg).unwrap();
            let g = build_tcdg(&net, &r);
            for d in g.deps() {
                let del = net.delivery_channels(d.target)[0];
                assert!(reaches(&[&g], d.dst, del));
            }
        }
    }

    #[test]
    fn cycle_detection_on_mixed_targets() {
        // Three channels around a triangle, arcs carried by two targets.
        let (i, j, k) = (ch(2, 0), ch(1, 2), ch(0, 1));
        let g = Tcdg::from_deps(
            [i, j, k],
            [
                Dependency::new(j, i, p(0)),
                Dependency::new(i, k, p(1)),
                Dependency::new(k, j, p(2)),
            ],
        );
        let cycle = g.find_cycle().unwrap();
        assert_eq!(cycle.len(), 3);
        assert!(!g.projection_acyclic());
        assert!(closure_has_cycle(&g));
        assert!(g.reverse_topological_order().is_err());
        assert!(g.reverse_topological_ready(&BTreeSet::new(), i).is_err());
        assert!(Tcdg::default().projection_acyclic());
    }

    #[test]
    fn conformance_examples() {
        // Incoming {A, B} at c, outgoing {A, B}.
        let (a, b) = (p(0), p(1));
        let c = ch(1, 2);
        let up = ch(0, 1);
        let (x, y) = (ch(2, 3), ch(2, 4));
        let ta = Tcdg::from_deps([], [Dependency::new(up, c, a), Dependency::new(up, c, b)]);
        let tb = Tcdg::from_deps([], [Dependency::new(c, x, a), Dependency::new(c, y, b)]);
        assert!(Tcdg::is_target_conforming(&ta, &tb, c));
        // A source channel conforms against anything.
        assert!(Tcdg::is_target_conforming(&ta, &Tcdg::default(), up));
        // A sink with inbound traffic against no outputs does not.
        assert!(!Tcdg::is_target_conforming(&ta, &Tcdg::default(), c));
        let only_b = Tcdg::from_deps([], [Dependency::new(c, y, b)]);
        assert!(!Tcdg::is_target_conforming(&ta, &only_b, c));
    }

    #[test]
    fn ready_set_starts_at_sinks() {
        // i feeds j and k; j feeds l and m; k feeds m and n.
        let (i, j, k, l, m, n) = (ch(0, 1), ch(1, 2), ch(1, 3), ch(2, 4), ch(2, 5), ch(3, 6));
        let t = p(9);
        let mk = |s, d| Dependency::new(s, d, t);
        let km = Dependency::new(
            k,
            ChannelId::new(NodeId::router(3), NodeId::router(2), 0),
            t,
        );
        let g = Tcdg::from_deps([], [mk(i, j), mk(i, k), mk(j, l), mk(j, m), mk(k, n), km]);
        let empty = BTreeSet::new();
        let ready: BTreeSet<_> = g.vertices().filter(|&c| g.is_ready(&empty, c)).collect();
        assert!(ready.contains(&l) && ready.contains(&m) && ready.contains(&n));
        assert!(!ready.contains(&i) && !ready.contains(&j) && !ready.contains(&k));
        let all: BTreeSet<_> = g.vertices().collect();
        assert!(g.reverse_topological_ready(&all, i).unwrap());
        // Orphan channel.
        assert!(g.is_ready(&empty, ch(7, 8)));
        let order = g.reverse_topological_order().unwrap();
        let pos = |c| order.iter().position(|&x| x == c).unwrap();
        assert!(pos(l) < pos(j) && pos(j) < pos(i) && pos(n) < pos(k));
    }

    #[test]
    fn predecessor_queries() {
        let (a, b, c) = (ch(0, 1), ch(1, 2), ch(2, 3));
        let g = Tcdg::from_deps(
            [],
            [Dependency::new(a, b, p(0)), Dependency::new(b, c, p(0))],
        );
        assert!(g.is_predecessor(a, a));
        assert!(g.is_predecessor(a, c));
        assert!(!g.is_predecessor(c, a));
        assert!(!g.is_predecessor(ch(5, 6), a));
    }

    #[test]
    fn compose_next_replaces_only_out_deps() {
        let net = build_mesh(3, 3, 1).unwrap();
        let tp = build_tcdg(&net, &make_routing(&net, Algorithm::Xy).unwrap());
        let ti = build_tcdg(&net, &make_routing(&net, Algorithm::Yx).unwrap());
        assert_eq!(Tcdg::compose_next(&tp, &tp, ch(0, 1)), tp);
        for c in net.channels() {
            let g = Tcdg::compose_next(&tp, &ti, c);
            assert_eq!(g.out_targets(c), ti.out_targets(c));
            for other in net.channels().filter(|&o| o != c) {
                assert!(g.out_deps(other).eq(tp.out_deps(other)));
            }
        }
        let empty = Tcdg::new(net.channels());
        let inj = net.injection_channels(p(0))[0];
        let g = Tcdg::compose_next(&empty, &ti, inj);
        assert_eq!(g.len(), ti.out_degree(inj));
    }

    #[test]
    fn text_formats() {
        let net = build_mesh(2, 2, 1).unwrap();
        let g = build_tcdg(&net, &make_xy(&net).unwrap());
        let back = Tcdg::parse_edge_list(&g.edge_list()).unwrap();
        assert_eq!(back, g);
        assert!(Tcdg::parse_edge_list("r0>r1 r1>r2 [p2]").is_err());
        let dot = g.to_dot("xy");
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), g.projection().count());
    }

    #[test]
    fn removal_updates_indices() {
        let net = build_mesh(2, 2, 1).unwrap();
        let mut g = build_tcdg(&net, &make_xy(&net).unwrap());
        let d = *g.deps().next().unwrap();
        assert!(g.remove(&d));
        assert!(!g.remove(&d));
        assert!(!g.out_deps(d.src).any(|x| *x == d));
        assert!(!g.in_deps(d.dst).any(|x| *x == d));
        assert!(g.insert(d));
        assert_eq!(g, build_tcdg(&net, &make_xy(&net).unwrap()));
    }
}
