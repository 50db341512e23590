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

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::monitor::{self, Violation};
use super::trace::Trace;
use super::{
    Cause, ChannelPhase, CheckOutcome, EventKind, Graph, InvariantChecks, Outcome, ReconfigEvent,
    ReconfigOptions, RemovalRequest,
};
use crate::error::{Error, Result};
use crate::routing::RoutingFunction;
use crate::tcdg::{build_tcdg, live_restriction, reaches, target_deps, Dependency, Tcdg};
use crate::topology::{ChannelId, Network, NodeId};

/// Largest scheduling delay drawn for a newly enabled action.
const JITTER: u64 = 16;

/// Something the scheduler can fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Action {
    HandleRequest(Dependency),
    Evaluate(ChannelId),
}

#[derive(Clone, Debug, Default)]
struct Drain {
    upstream: BTreeSet<Dependency>,
    waiters: BTreeSet<Dependency>,
}

/// Reconfiguration state plus the operations that evolve it.
pub struct Engine<'n> {
    net: &'n Network,
    opts: ReconfigOptions,
    rp: RoutingFunction,
    ri: RoutingFunction,
    rf: RoutingFunction,
    tp: Tcdg,
    ti: Tcdg,
    ts: Tcdg,
    tf: Tcdg,
    phases: BTreeMap<ChannelId, ChannelPhase>,
    upgraded: BTreeSet<ChannelId>,
    halted: BTreeSet<(NodeId, NodeId)>,
    ri_removed: BTreeSet<Dependency>,
    ri_added: BTreeSet<Dependency>,
    pending: BTreeSet<Dependency>,
    drains: BTreeMap<(ChannelId, NodeId), Drain>,
    hints: BTreeMap<Dependency, Cause>,
    hops: BTreeMap<(NodeId, NodeId), usize>,
    trace: Vec<ReconfigEvent>,
    step_removals: Vec<Dependency>,
    clock: u64,
    fired: u64,
    now: u64,
    deadlines: BTreeMap<Action, u64>,
    rng: ChaCha8Rng,
}

impl<'n> Engine<'n> {
    pub fn new(
        net: &'n Network,
        rs: &RoutingFunction,
        rf: &RoutingFunction,
        opts: ReconfigOptions,
    ) -> Result<Self> {
        if !rs.is_connected(net) {
            return Err(Error::Precondition(
                "initial routing function is not connected".into(),
            ));
        }
        if !rf.is_connected(net) {
            return Err(Error::Precondition(
                "final routing function is not connected".into(),
            ));
        }
        let tp = build_tcdg(net, rs);
        let rf = live_restriction(net, rf);
        let tf = build_tcdg(net, &rf);
        for (name, g) in [("initial", &tp), ("final", &tf)] {
            if let Some(cycle) = g.find_cycle() {
                return Err(Error::Precondition(format!(
                    "{name} routing function has a dependency cycle through {}",
                    cycle[0]
                )));
            }
        }
        let ti = Tcdg::from_table(net, &rf);
        let mut hops = BTreeMap::new();
        for r in net.routers() {
            for (to, n) in net.router_hops_from(r) {
                hops.insert((r, to), n);
            }
        }
        let mut e = Engine {
            net,
            rng: ChaCha8Rng::seed_from_u64(opts.scheduler_seed),
            opts,
            rp: rs.clone(),
            ri: rf.clone(),
            rf,
            ts: tp.clone(),
            tp,
            ti,
            tf,
            phases: net
                .channels()
                .map(|c| (c, ChannelPhase::NotUpgraded))
                .collect(),
            upgraded: BTreeSet::new(),
            halted: BTreeSet::new(),
            ri_removed: BTreeSet::new(),
            ri_added: BTreeSet::new(),
            pending: BTreeSet::new(),
            drains: BTreeMap::new(),
            hints: BTreeMap::new(),
            hops,
            trace: Vec::new(),
            step_removals: Vec::new(),
            clock: 0,
            fired: 0,
            now: 0,
            deadlines: BTreeMap::new(),
        };
        e.refresh_phases();
        Ok(e)
    }

    // ----- read access -------------------------------------------------

    pub fn network(&self) -> &Network {
        self.net
    }

    pub fn options(&self) -> &ReconfigOptions {
        &self.opts
    }

    pub fn prevailing(&self) -> &RoutingFunction {
        &self.rp
    }

    pub fn intermediate(&self) -> &RoutingFunction {
        &self.ri
    }

    /// The final routing function, restricted to reachable cells.
    pub fn final_routing(&self) -> &RoutingFunction {
        &self.rf
    }

    pub fn tp(&self) -> &Tcdg {
        &self.tp
    }

    pub fn ti(&self) -> &Tcdg {
        &self.ti
    }

    pub fn ts(&self) -> &Tcdg {
        &self.ts
    }

    pub fn tf(&self) -> &Tcdg {
        &self.tf
    }

    pub fn phase(&self, c: ChannelId) -> &ChannelPhase {
        &self.phases[&c]
    }

    pub fn upgraded(&self) -> &BTreeSet<ChannelId> {
        &self.upgraded
    }

    pub fn halted(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.halted
    }

    pub fn ri_removed(&self) -> &BTreeSet<Dependency> {
        &self.ri_removed
    }

    pub fn ri_added(&self) -> &BTreeSet<Dependency> {
        &self.ri_added
    }

    pub fn pending_requests(&self) -> impl Iterator<Item = RemovalRequest> + '_ {
        self.pending.iter().map(|&d| RemovalRequest::new(d))
    }

    pub fn events(&self) -> &[ReconfigEvent] {
        &self.trace
    }

    pub fn actions_fired(&self) -> u64 {
        self.fired
    }

    pub fn has_drains(&self, c: ChannelId) -> bool {
        self.drains
            .range((c, NodeId::processing(0))..)
            .next()
            .is_some_and(|((k, _), _)| *k == c)
    }

    pub fn is_complete(&self) -> bool {
        self.upgraded.len() == self.phases.len()
            && self.pending.is_empty()
            && self.drains.is_empty()
            && self.ri_removed.is_empty()
            && self.ri_added.is_empty()
    }

    pub fn into_outcome(self) -> Outcome {
        Outcome {
            final_routing: self.rp,
            trace: Trace::new(self.trace),
            actions: self.fired,
        }
    }

    pub fn trace(&self) -> Trace {
        Trace::new(self.trace.clone())
    }

    /// Whether packets for `t` can currently sit in `c` under the
    /// prevailing function.
    pub fn is_live(&self, c: ChannelId, t: NodeId) -> bool {
        if c.is_injection() {
            c.src != t && self.rp.choices(c, t).is_some()
        } else {
            self.tp.has_in_target(c, t)
        }
    }

    // ----- scheduling --------------------------------------------------

    /// Actions that may fire now, in canonical order.
    pub fn enabled_actions(&self) -> Vec<Action> {
        let mut out: Vec<Action> = self
            .pending
            .iter()
            .map(|&d| Action::HandleRequest(d))
            .collect();
        for (&c, phase) in &self.phases {
            let eligible = match phase {
                ChannelPhase::Ready => true,
                ChannelPhase::NotUpgraded => {
                    self.opts.exploit_conformability && self.releasable(c).is_some()
                }
                _ => false,
            };
            if eligible && !self.has_drains(c) {
                out.push(Action::Evaluate(c));
            }
        }
        out
    }

    /// Runs until completion under the seeded scheduler.
    pub fn run(&mut self) -> Result<()> {
        while self.step()?.is_some() {}
        if self.opts.invariant_checks != InvariantChecks::Off {
            self.assert_clean()?;
        }
        if self.rp != self.rf {
            return Err(Error::Invariant(vec![Violation::consistency(
                "prevailing function differs from the final one at termination".into(),
            )]));
        }
        Ok(())
    }

    /// Fires the next action the seeded scheduler picks, or returns
    /// `None` once every channel is upgraded.
    pub fn step(&mut self) -> Result<Option<Action>> {
        if self.is_complete() {
            return Ok(None);
        }
        let enabled = self.enabled_actions();
        if enabled.is_empty() {
            return Err(Error::Stalled {
                events: self.fired,
                remaining: self.phases.len() - self.upgraded.len(),
            });
        }
        if self.fired >= self.opts.event_budget {
            return Err(Error::EventBudget(self.opts.event_budget));
        }
        let enabled_set: BTreeSet<Action> = enabled.iter().copied().collect();
        self.deadlines.retain(|a, _| enabled_set.contains(a));
        for a in enabled {
            if !self.deadlines.contains_key(&a) {
                let due = self.now + self.rng.gen_range(1..=JITTER);
                self.deadlines.insert(a, due);
            }
        }
        let (&action, &due) = self
            .deadlines
            .iter()
            .min_by_key(|(a, d)| (**d, **a))
            .expect("non-empty");
        self.deadlines.remove(&action);
        self.now = due;
        self.fire(action)?;
        Ok(Some(action))
    }

    /// Fires one action and settles the follow-up bookkeeping.
    pub fn fire(&mut self, action: Action) -> Result<()> {
        self.fired += 1;
        self.step_removals.clear();
        match action {
            Action::HandleRequest(dep) => self.handle_request(dep)?,
            Action::Evaluate(c) => self.evaluate(c)?,
        }
        self.settle();
        if self.opts.invariant_checks == InvariantChecks::EveryEvent {
            self.assert_clean()?;
        }
        Ok(())
    }

    fn assert_clean(&self) -> Result<()> {
        let v = self.verify_lysne_conditions();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invariant(v))
        }
    }

    pub fn verify_lysne_conditions(&self) -> Vec<Violation> {
        monitor::verify(self)
    }

    pub(super) fn step_removals(&self) -> &[Dependency] {
        &self.step_removals
    }

    // ----- bookkeeping -------------------------------------------------

    fn emit(&mut self, kind: EventKind) {
        self.clock += 1;
        self.trace.push(ReconfigEvent {
            time: self.clock,
            kind,
        });
    }

    fn refresh_phases(&mut self) {
        let ready: Vec<ChannelId> = self
            .phases
            .iter()
            .filter(|(c, p)| {
                **p == ChannelPhase::NotUpgraded && self.ti.is_ready(&self.upgraded, **c)
            })
            .map(|(c, _)| *c)
            .collect();
        for c in ready {
            self.phases.insert(c, ChannelPhase::Ready);
        }
    }

    /// Rebuilds the prevailing graph for one target after a table edit and
    /// reports the difference as events.
    fn refresh_target(&mut self, t: NodeId, added: Cause, explicit: &BTreeMap<Dependency, Cause>) {
        let new = target_deps(self.net, &self.rp, t);
        let old: BTreeSet<Dependency> = self.tp.deps_for_target(t).copied().collect();
        for d in old.difference(&new) {
            self.tp.remove(d);
            let cause = explicit
                .get(d)
                .copied()
                .or_else(|| self.hints.remove(d))
                .unwrap_or(Cause::Pruned);
            self.emit(EventKind::DependencyRemoved {
                graph: Graph::P,
                dep: *d,
                cause,
            });
            self.step_removals.push(*d);
        }
        for d in new.difference(&old) {
            self.tp.insert(*d);
            self.emit(EventKind::DependencyAdded {
                graph: Graph::P,
                dep: *d,
                cause: added,
            });
        }
        for d in old.difference(&new) {
            self.acknowledge(*d);
        }
    }

    /// A dependency has left the prevailing graph: release whoever asked.
    fn acknowledge(&mut self, d: Dependency) {
        self.pending.remove(&d);
        self.hints.remove(&d);
        if let Some(ChannelPhase::AwaitingRemovals(set)) = self.phases.get_mut(&d.dst) {
            set.remove(&d);
            if set.is_empty() {
                // Order is re-checked by refresh_phases.
                self.phases.insert(d.dst, ChannelPhase::NotUpgraded);
            }
        }
        let key = (d.dst, d.target);
        let done = match self.drains.get_mut(&key) {
            Some(drain) => {
                drain.upstream.remove(&d);
                drain.upstream.is_empty()
            }
            None => false,
        };
        if done {
            self.drains.remove(&key);
            // Nothing reaches the drained cell any more; drop it.
            self.rp.clear_cell(d.dst, d.target);
        }
    }

    /// Ghost removal and deferred restorations, to a fixpoint.
    fn settle(&mut self) {
        loop {
            let mut changed = false;
            let ghosts: Vec<Dependency> = self
                .ri_added
                .iter()
                .filter(|g| {
                    !self.tp.has_in_target(g.src, g.target)
                        && !self.ti.has_in_target(g.src, g.target)
                })
                .copied()
                .collect();
            for g in ghosts {
                self.remove_ghost(g);
                changed = true;
            }
            let restorable: Vec<Dependency> = self
                .ri_removed
                .iter()
                .filter(|d| self.upgraded.contains(&d.dst))
                .copied()
                .collect();
            for d in restorable {
                if self.opts.deferred_restoration && reaches(&[&self.ti], d.dst, d.src) {
                    continue;
                }
                self.restore(d);
                changed = true;
            }
            if !changed {
                break;
            }
        }
        self.refresh_phases();
    }

    fn remove_ghost(&mut self, g: Dependency) {
        self.ri.remove_choice(g.src, g.target, g.dst);
        self.ti.remove(&g);
        self.ri_added.remove(&g);
        self.emit(EventKind::GhostRemoved { dep: g });
        if self.upgraded.contains(&g.src) {
            self.rp.remove_choice(g.src, g.target, g.dst);
            self.refresh_target(g.target, Cause::Ghost, &BTreeMap::from([(g, Cause::Ghost)]));
        }
    }

    fn restore(&mut self, d: Dependency) {
        self.ri.insert_choice(d.src, d.target, d.dst);
        self.ti.insert(d);
        self.ri_removed.remove(&d);
        self.emit(EventKind::RiRestored { dep: d });
        if self.upgraded.contains(&d.src) {
            self.rp.insert_choice(d.src, d.target, d.dst);
            self.refresh_target(d.target, Cause::Restore, &BTreeMap::new());
        }
    }

    // ----- step condition and operation --------------------------------

    pub fn check_step_condition(&self, c: ChannelId) -> Result<CheckOutcome> {
        match self.phases.get(&c) {
            Some(ChannelPhase::Ready) => {}
            Some(p) => {
                return Err(Error::OutOfPhase {
                    channel: c,
                    phase: p.name().into(),
                })
            }
            None => return Err(Error::UnknownChannel(c)),
        }
        Ok(self.condition(c))
    }

    fn condition(&self, c: ChannelId) -> CheckOutcome {
        let offending: BTreeSet<NodeId> = self
            .tp
            .in_deps(c)
            .map(|d| d.target)
            .filter(|&t| !self.ti.has_out_target(c, t))
            .collect();
        if offending.is_empty() {
            CheckOutcome::Satisfied
        } else if self.ti.out_degree(c) == 0 && self.ti.in_degree(c) > 0 {
            CheckOutcome::SinkException
        } else {
            CheckOutcome::Offending(offending)
        }
    }

    /// Intermediate dependencies towards non-upgraded successors that `c`
    /// can drop: a successor qualifies when every target it carries for
    /// `c` also leaves through an upgraded one.
    fn releasable(&self, c: ChannelId) -> Option<Vec<Dependency>> {
        let mut by_succ: BTreeMap<ChannelId, Vec<Dependency>> = BTreeMap::new();
        for d in self
            .ti
            .out_deps(c)
            .filter(|d| !self.upgraded.contains(&d.dst))
        {
            by_succ.entry(d.dst).or_default().push(*d);
        }
        let out: Vec<Dependency> = by_succ
            .into_values()
            .filter(|deps| {
                deps.iter().all(|b| {
                    !self.ri_added.contains(b)
                        && self
                            .ti
                            .out_deps(c)
                            .any(|d| d.target == b.target && self.upgraded.contains(&d.dst))
                })
            })
            .flatten()
            .collect();
        (!out.is_empty()).then_some(out)
    }

    fn evaluate(&mut self, c: ChannelId) -> Result<()> {
        match self.phases[&c] {
            ChannelPhase::Ready => {}
            ChannelPhase::NotUpgraded => {
                let deps = self
                    .releasable(c)
                    .filter(|_| self.opts.exploit_conformability)
                    .ok_or_else(|| Error::OutOfPhase {
                        channel: c,
                        phase: "not-upgraded".into(),
                    })?;
                self.release(deps);
                if !self.ti.is_ready(&self.upgraded, c) {
                    return Ok(());
                }
                self.phases.insert(c, ChannelPhase::Ready);
            }
            ref p => {
                return Err(Error::OutOfPhase {
                    channel: c,
                    phase: p.name().into(),
                })
            }
        }
        if self.has_drains(c) {
            return Err(Error::OutOfPhase {
                channel: c,
                phase: "draining".into(),
            });
        }
        let outcome = self.condition(c);
        self.emit(EventKind::ConditionCheck {
            channel: c,
            outcome: outcome.clone(),
        });
        match outcome {
            CheckOutcome::Satisfied | CheckOutcome::SinkException => self.apply_step_operation(c),
            CheckOutcome::Offending(targets) => {
                let remaining = if self.opts.exploit_compatibility {
                    self.try_compatibility_upgrade(c, targets)
                } else {
                    targets
                };
                if !remaining.is_empty() {
                    self.issue_removal_requests(c, &remaining);
                } else if self.ti.is_ready(&self.upgraded, c) {
                    self.apply_step_operation(c);
                } else {
                    // A new provider has yet to upgrade; wait for it.
                    self.phases.insert(c, ChannelPhase::NotUpgraded);
                }
            }
        }
        Ok(())
    }

    fn release(&mut self, deps: Vec<Dependency>) {
        for d in deps {
            self.ri.remove_choice(d.src, d.target, d.dst);
            self.ti.remove(&d);
            self.ri_removed.insert(d);
            self.emit(EventKind::DependencyRemoved {
                graph: Graph::I,
                dep: d,
                cause: Cause::Release,
            });
        }
    }

    /// Installs the intermediate slice of `c` into the prevailing function.
    fn apply_step_operation(&mut self, c: ChannelId) {
        let mut targets: BTreeSet<NodeId> = self.rp.targets_at(c).collect();
        let local = self.ri.local_routing_function(c);
        targets.extend(local.targets());
        let resumed: Vec<NodeId> = if c.is_injection() {
            local
                .targets()
                .filter(|&t| self.halted.contains(&(c.src, t)))
                .collect()
        } else {
            Vec::new()
        };
        self.rp.set_local(local);
        self.phases.insert(c, ChannelPhase::Upgraded);
        self.upgraded.insert(c);
        self.emit(EventKind::Upgrade { channel: c });
        for t in targets {
            self.refresh_target(t, Cause::Upgrade, &BTreeMap::new());
        }
        for t in resumed {
            self.halted.remove(&(c.src, t));
            self.emit(EventKind::InjectionResumed {
                channel: c,
                source: c.src,
                target: t,
            });
        }
    }

    fn distance(&self, from: NodeId, t: NodeId) -> usize {
        let tr = self.net.router_of(t).unwrap_or(t);
        if from.is_processing() {
            return if from == t { 0 } else { usize::MAX };
        }
        self.hops.get(&(from, tr)).copied().unwrap_or(usize::MAX)
    }

    /// Extends the intermediate function at `c` for offending targets.
    /// Returns the targets that found no provider.
    fn try_compatibility_upgrade(
        &mut self,
        c: ChannelId,
        offending: BTreeSet<NodeId>,
    ) -> BTreeSet<NodeId> {
        let mut remaining = BTreeSet::new();
        for t in offending {
            let guard: Vec<&Tcdg> = if self.opts.union_predecessor {
                vec![&self.ti, &self.tf]
            } else {
                vec![&self.ti]
            };
            let best = self
                .net
                .outputs_of(c.dst)
                .iter()
                .copied()
                .filter(|v| !v.is_injection())
                .filter(|v| v.delivers_to(t) || (!v.is_delivery() && self.ti.has_out_target(*v, t)))
                .filter(|v| !reaches(&guard, *v, c))
                .min_by_key(|v| (self.distance(v.dst, t), !self.upgraded.contains(v), *v));
            match best {
                Some(v) => {
                    let d = Dependency::new(c, v, t);
                    self.ri.insert_choice(c, t, v);
                    self.ti.insert(d);
                    self.ri_added.insert(d);
                    self.emit(EventKind::DependencyAdded {
                        graph: Graph::I,
                        dep: d,
                        cause: Cause::Compatibility,
                    });
                }
                None => {
                    remaining.insert(t);
                }
            }
        }
        remaining
    }

    fn issue_removal_requests(&mut self, c: ChannelId, offending: &BTreeSet<NodeId>) {
        let deps: BTreeSet<Dependency> = self
            .tp
            .in_deps(c)
            .filter(|d| offending.contains(&d.target))
            .copied()
            .collect();
        for d in &deps {
            self.emit(EventKind::RemovalRequested {
                requester: c,
                dep: *d,
            });
            self.pending.insert(*d);
        }
        self.phases.insert(c, ChannelPhase::AwaitingRemovals(deps));
    }

    // ----- removal requests --------------------------------------------

    fn handle_request(&mut self, dep: Dependency) -> Result<()> {
        if !self.pending.remove(&dep) {
            return Err(Error::Precondition(format!("no pending request for {dep}")));
        }
        if !dep.is_well_formed() {
            return Err(Error::MalformedRequest(dep));
        }
        if !self.tp.contains(&dep) {
            self.acknowledge(dep);
            return Ok(());
        }
        let (cj, ci, t) = (dep.src, dep.dst, dep.target);
        if self.opts.exploit_conformability
            && self.tp.out_deps(cj).any(|d| d.target == t && d.dst != ci)
        {
            self.rp.remove_choice(cj, t, ci);
            self.refresh_target(
                t,
                Cause::Conformability,
                &BTreeMap::from([(dep, Cause::Conformability)]),
            );
            return Ok(());
        }
        if self.opts.exploit_compatibility {
            if let Some(ck) = self.compatible_alternative(cj, ci, t) {
                self.rp.insert_choice(cj, t, ck);
                self.refresh_target(t, Cause::Compatibility, &BTreeMap::new());
                self.rp.remove_choice(cj, t, ci);
                self.refresh_target(
                    t,
                    Cause::Compatibility,
                    &BTreeMap::from([(dep, Cause::Compatibility)]),
                );
                return Ok(());
            }
        }
        if cj.is_injection() {
            let outs = self.rp.clear_cell(cj, t);
            let explicit = outs
                .into_iter()
                .map(|o| (Dependency::new(cj, o, t), Cause::Halting))
                .collect();
            self.halted.insert((cj.src, t));
            self.emit(EventKind::InjectionHalted {
                channel: cj,
                source: cj.src,
                target: t,
            });
            self.refresh_target(t, Cause::Halting, &explicit);
            return Ok(());
        }
        let key = (cj, t);
        let fresh = !self.drains.contains_key(&key);
        for d in self.tp.out_deps_for(cj, t) {
            self.hints.insert(d, Cause::Drainage);
        }
        let upstream: BTreeSet<Dependency> = self.tp.in_deps_for(cj, t).into_iter().collect();
        let drain = self.drains.entry(key).or_default();
        drain.waiters.insert(dep);
        if fresh {
            drain.upstream = upstream.clone();
            for u in upstream {
                self.emit(EventKind::RemovalRequested {
                    requester: cj,
                    dep: u,
                });
                self.pending.insert(u);
            }
        }
        Ok(())
    }

    /// An adjacent output from which `t` already has a route under both
    /// functions, such that sending `t` there from `cj` dead-ends nowhere,
    /// crosses no drain and closes no cycle.
    fn compatible_alternative(&self, cj: ChannelId, ci: ChannelId, t: NodeId) -> Option<ChannelId> {
        let mut candidates: Vec<ChannelId> = self
            .net
            .outputs_of(cj.dst)
            .iter()
            .copied()
            .filter(|&k| k != ci && !k.is_injection())
            .filter(|&k| {
                k.delivers_to(t)
                    || (!k.is_delivery()
                        && self.rp.choices(k, t).is_some()
                        && self.ti.has_out_target(k, t))
            })
            .collect();
        candidates.sort_by_key(|&k| (self.distance(k.dst, t), k));
        let old: Vec<Dependency> = self.tp.deps_for_target(t).copied().collect();
        candidates.into_iter().find(|&k| {
            let mut rp = self.rp.clone();
            rp.insert_choice(cj, t, k);
            let new = target_deps(self.net, &rp, t);
            let sound = new.iter().all(|d| {
                d.dst.is_delivery()
                    || (rp.choices(d.dst, t).is_some()
                        && !self.drains.contains_key(&(d.dst, t))
                        && (self.tp.has_in_target(d.dst, t) || self.ti.has_out_target(d.dst, t)))
            });
            if !sound {
                return false;
            }
            let mut g = self.tp.clone();
            for d in &old {
                g.remove(d);
            }
            for d in new {
                g.insert(d);
            }
            g.find_cycle().is_none()
        })
    }
}
