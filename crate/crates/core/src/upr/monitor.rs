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

//! Runtime check of Lysne's sufficient conditions for deadlock-free
//! dynamic reconfiguration, plus internal consistency checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::engine::Engine;
use crate::tcdg::{build_tcdg, Tcdg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LysneCondition {
    /// (1) The prevailing function stays connected, halted flows aside.
    Connected,
    /// (2) No added choice closes a dependency cycle.
    Acyclic,
    /// (3) No choice is removed while a packet may still need it.
    JustifiedRemoval,
    /// (4) Upgraded channels leave no arriving target unprovided.
    GhostsProvided,
    /// Incremental state disagrees with a from-scratch rebuild.
    Consistency,
}

impl LysneCondition {
    pub fn number(self) -> Option<u8> {
        match self {
            LysneCondition::Connected => Some(1),
            LysneCondition::Acyclic => Some(2),
            LysneCondition::JustifiedRemoval => Some(3),
            LysneCondition::GhostsProvided => Some(4),
            LysneCondition::Consistency => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: LysneCondition,
    pub detail: String,
}

impl Violation {
    pub fn new(condition: LysneCondition, detail: String) -> Self {
        Violation { condition, detail }
    }

    pub fn consistency(detail: String) -> Self {
        Violation::new(LysneCondition::Consistency, detail)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.condition.number() {
            Some(n) => write!(f, "condition ({n}) violated: {}", self.detail),
            None => write!(f, "state inconsistency: {}", self.detail),
        }
    }
}

fn cycle_text(cycle: &[crate::topology::ChannelId]) -> String {
    let names: Vec<String> = cycle.iter().map(ToString::to_string).collect();
    names.join(" -> ")
}

pub(super) fn verify(e: &Engine<'_>) -> Vec<Violation> {
    let mut out = Vec::new();
    let net = e.network();
    let rp = e.prevailing();
    let tp = e.tp();
    let ti = e.ti();

    // (1) Every packet that can be somewhere has somewhere to go.
    for d in tp.deps() {
        if d.dst.is_delivery() {
            if d.dst.dst != d.target {
                out.push(Violation::new(
                    LysneCondition::Connected,
                    format!("{d} delivers to the wrong node"),
                ));
            }
        } else if rp.choices(d.dst, d.target).is_none() {
            out.push(Violation::new(
                LysneCondition::Connected,
                format!(
                    "packets for {} reach {} with no route onward",
                    d.target, d.dst
                ),
            ));
        }
    }
    let procs: Vec<_> = net.processing_nodes().collect();
    for &s in &procs {
        for &t in procs.iter().filter(|&&t| t != s) {
            if e.halted().contains(&(s, t)) {
                continue;
            }
            if net
                .injection_channels(s)
                .iter()
                .all(|&inj| rp.choices(inj, t).is_none())
            {
                out.push(Violation::new(
                    LysneCondition::Connected,
                    format!("flow {s}->{t} lost its route without being halted"),
                ));
            }
        }
    }

    // (2) Escape resources stay acyclic.
    for (name, g) in [("prevailing", tp), ("intermediate", ti)] {
        if let Some(cycle) = g.find_cycle() {
            out.push(Violation::new(
                LysneCondition::Acyclic,
                format!("{name} graph has cycle {}", cycle_text(&cycle)),
            ));
        }
    }

    // (3) Removals in the last step left the source either unreachable
    // for that target or with an alternative.
    for d in e.step_removals() {
        if e.is_live(d.src, d.target) && rp.choices(d.src, d.target).is_none() {
            out.push(Violation::new(
                LysneCondition::JustifiedRemoval,
                format!(
                    "{d} removed while packets for {} still reach {}",
                    d.target, d.src
                ),
            ));
        }
    }

    // (4) Upgraded channels provide for every target still arriving.
    for &c in e.upgraded() {
        for d in tp.in_deps(c) {
            if !(c.delivers_to(d.target) || tp.has_out_target(c, d.target)) {
                out.push(Violation::new(
                    LysneCondition::GhostsProvided,
                    format!(
                        "upgraded {c} receives {} without providing for it",
                        d.target
                    ),
                ));
            }
        }
    }

    // Incremental bookkeeping matches a rebuild.
    if *tp != build_tcdg(net, rp) {
        out.push(Violation::consistency(
            "prevailing graph drifted from its table".into(),
        ));
    }
    if *ti != Tcdg::from_table(net, e.intermediate()) {
        out.push(Violation::consistency(
            "intermediate graph drifted from its table".into(),
        ));
    }
    for d in ti.deps() {
        if !e.tf().contains(d) && !e.ri_added().contains(d) {
            out.push(Violation::consistency(format!(
                "{d} is in the intermediate graph but neither final nor added"
            )));
        }
    }
    for d in e.ri_removed() {
        if ti.contains(d) {
            out.push(Violation::consistency(format!(
                "{d} is both released and present"
            )));
        }
    }
    out
}
