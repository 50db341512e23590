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

//! Without exploitation the only way to keep a target out of a channel
//! is to stop it at every source whose packets can reach that channel.
//! The halted set of a baseline run therefore contains every flow that
//! can reach a channel the final function does not route that flow's
//! target from. The oracle below walks paths over plain tables and never
//! touches the dependency graph code.

use std::collections::BTreeSet;

use upr_core::{
    build_mesh, halted_flow_ratio, make_routing, run_reconfiguration, Algorithm, ChannelId,
    Network, NodeId, ReconfigOptions, RoutingFunction,
};

/// Channels reachable by packets from `s` to `t`.
fn visited(net: &Network, r: &RoutingFunction, s: NodeId, t: NodeId) -> BTreeSet<ChannelId> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<ChannelId> = net.injection_channels(s).to_vec();
    while let Some(c) = stack.pop() {
        if seen.insert(c) {
            if let Some(outs) = r.choices(c, t) {
                stack.extend(outs.iter().copied());
            }
        }
    }
    seen
}

/// Flows that must be halted when only selective halting is available.
fn forced_halts(
    net: &Network,
    rs: &RoutingFunction,
    rf: &RoutingFunction,
) -> BTreeSet<(NodeId, NodeId)> {
    let procs: Vec<NodeId> = net.processing_nodes().collect();
    let mut carried: BTreeSet<(ChannelId, NodeId)> = BTreeSet::new();
    for &s in &procs {
        for &t in procs.iter().filter(|&&t| t != s) {
            for c in visited(net, rf, s, t) {
                carried.insert((c, t));
            }
        }
    }
    let mut out = BTreeSet::new();
    for &s in &procs {
        for &t in procs.iter().filter(|&&t| t != s) {
            let stranded = visited(net, rs, s, t)
                .into_iter()
                .any(|c| !c.is_delivery() && !c.is_injection() && !carried.contains(&(c, t)));
            if stranded {
                out.insert((s, t));
            }
        }
    }
    out
}

fn check(w: usize, h: usize, seeds: &[u64]) {
    let net = build_mesh(w, h, 1).unwrap();
    for from in Algorithm::ALL {
        for to in Algorithm::ALL {
            let rs = make_routing(&net, from).unwrap();
            let rf = make_routing(&net, to).unwrap();
            let forced = forced_halts(&net, &rs, &rf);
            for &seed in seeds {
                let out =
                    run_reconfiguration(&net, &rs, &rf, ReconfigOptions::baseline(seed)).unwrap();
                let halted = halted_flow_ratio(&out.trace, &net).unwrap().members;
                assert!(
                    forced.is_subset(&halted),
                    "{w}x{h} {from}->{to} seed {seed}: missing {:?}",
                    forced.difference(&halted).collect::<Vec<_>>()
                );
                if w == 5 && h == 5 {
                    assert_eq!(halted, forced, "{from}->{to} seed {seed}");
                }
            }
        }
    }
}

#[test]
fn baseline_halts_at_least_the_forced_flows_on_small_meshes() {
    check(2, 2, &[1, 2]);
    check(3, 3, &[1, 2, 3]);
    check(4, 3, &[1, 2]);
}

#[test]
fn baseline_halts_exactly_the_forced_flows_on_the_5x5_mesh() {
    check(5, 5, &[1, 2]);
}

#[test]
fn forced_halts_vanish_for_identity() {
    let net = build_mesh(4, 4, 1).unwrap();
    for alg in Algorithm::ALL {
        let r = make_routing(&net, alg).unwrap();
        assert!(forced_halts(&net, &r, &r).is_empty());
    }
}

#[test]
fn xy_into_oe_forces_the_even_column_east_turns() {
    // Eastbound packets may not turn north or south in even columns under
    // odd-even; under xy they do so at the target column.
    let net = build_mesh(5, 5, 1).unwrap();
    let shape = net.mesh().unwrap();
    let forced = forced_halts(
        &net,
        &make_routing(&net, Algorithm::Xy).unwrap(),
        &make_routing(&net, Algorithm::OddEven).unwrap(),
    );
    let mut expected = BTreeSet::new();
    for sy in 0..5 {
        for ty in (0..5).filter(|&ty| ty != sy) {
            for tx in [2usize, 4] {
                for sx in 0..tx {
                    expected.insert((shape.processing_at(sx, sy), shape.processing_at(tx, ty)));
                }
            }
        }
    }
    assert_eq!(forced, expected);
    assert_eq!(forced.len(), 120);
}
