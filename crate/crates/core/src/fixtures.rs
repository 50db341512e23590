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

//! Hand-built scenarios shared by tests and benchmarks.

/// A three-router ring where releasing an intermediate choice and then
/// provisioning a ghost towards a channel that precedes the releaser in
/// the final graph closes a cycle once the released choice returns. The
/// union predecessor guard refuses that ghost.
///
/// Routers `a`, `b`, `c` carry processors `pa`, `pb`, `pc`:
///
/// ```text
/// k = a->b   j = b->c   i = c->a (lane 0)   l = c->a (lane 1)   r = c->b
/// ```
pub mod release_trap {
    use crate::error::{Error, Result};
    use crate::routing::RoutingFunction;
    use crate::topology::{ChannelId, Network, NetworkBuilder, NodeId};
    use crate::upr::{Action, Engine, InvariantChecks, ReconfigOptions};

    pub const A: NodeId = NodeId::router(0);
    pub const B: NodeId = NodeId::router(1);
    pub const C: NodeId = NodeId::router(2);
    pub const PA: NodeId = NodeId::processing(0);
    pub const PB: NodeId = NodeId::processing(1);
    pub const PC: NodeId = NodeId::processing(2);

    pub const K: ChannelId = ChannelId::new(A, B, 0);
    pub const J: ChannelId = ChannelId::new(B, C, 0);
    pub const I: ChannelId = ChannelId::new(C, A, 0);
    pub const L: ChannelId = ChannelId::new(C, A, 1);
    pub const R: ChannelId = ChannelId::new(C, B, 0);

    pub fn inj(p: NodeId) -> ChannelId {
        ChannelId::new(p, NodeId::router(p.index), 0)
    }

    pub fn del(p: NodeId) -> ChannelId {
        ChannelId::new(NodeId::router(p.index), p, 0)
    }

    pub fn network() -> Network {
        let mut b = NetworkBuilder::new();
        for idx in 0..3 {
            b.router_with_processor(idx, 1);
        }
        for c in [K, J, I, L, R] {
            b.channel(c).expect("fixed channel set");
        }
        b.build().expect("fixed network")
    }

    pub fn initial(net: &Network) -> RoutingFunction {
        RoutingFunction::from_paths(
            net,
            &[
                vec![inj(PA), K, del(PB)],
                vec![inj(PA), K, J, del(PC)],
                vec![inj(PB), J, L, del(PA)],
                vec![inj(PB), J, del(PC)],
                vec![inj(PC), I, del(PA)],
                vec![inj(PC), I, K, del(PB)],
            ],
        )
        .expect("fixed paths")
    }

    pub fn target(net: &Network) -> RoutingFunction {
        RoutingFunction::from_paths(
            net,
            &[
                vec![inj(PA), K, del(PB)],
                vec![inj(PA), K, J, del(PC)],
                vec![inj(PB), J, I, del(PA)],
                vec![inj(PB), J, L, del(PA)],
                vec![inj(PB), J, del(PC)],
                vec![inj(PC), L, del(PA)],
                vec![inj(PC), R, del(PB)],
            ],
        )
        .expect("fixed paths")
    }

    /// Exploiting options with every-event checks; `guards` toggles both
    /// the union predecessor check and deferred restoration.
    pub fn options(guards: bool) -> ReconfigOptions {
        ReconfigOptions {
            union_predecessor: guards,
            deferred_restoration: guards,
            ..ReconfigOptions::exploiting(0).with_checks(InvariantChecks::EveryEvent)
        }
    }

    /// Requests first, then evaluations in the order that springs the
    /// trap: deliveries, `l`, `j`, `k`, `i`, everything else.
    pub fn scripted(action: &Action) -> (usize, Action) {
        let rank = match action {
            Action::HandleRequest(_) => 0,
            Action::Evaluate(c) if c.is_delivery() => 1,
            Action::Evaluate(c) if *c == L => 2,
            Action::Evaluate(c) if *c == J => 3,
            Action::Evaluate(c) if *c == K => 4,
            Action::Evaluate(c) if *c == I => 5,
            Action::Evaluate(_) => 6,
        };
        (rank, *action)
    }

    /// Runs `engine` to completion under [`scripted`].
    pub fn drive(engine: &mut Engine<'_>) -> Result<()> {
        while !engine.is_complete() {
            let next = engine.enabled_actions().into_iter().min_by_key(scripted);
            match next {
                Some(a) => engine.fire(a)?,
                None => {
                    return Err(Error::Stalled {
                        events: engine.actions_fired(),
                        remaining: engine.network().channel_count() - engine.upgraded().len(),
                    })
                }
            }
            if engine.actions_fired() >= engine.options().event_budget {
                return Err(Error::EventBudget(engine.options().event_budget));
            }
        }
        Ok(())
    }
}
