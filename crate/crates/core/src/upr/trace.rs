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

use std::fmt::Write as _;

use super::{EventKind, Graph, ReconfigEvent};
use crate::error::{Error, Result};
use crate::tcdg::Tcdg;

/// Ordered event log of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    events: Vec<ReconfigEvent>,
}

impl Trace {
    pub fn new(events: Vec<ReconfigEvent>) -> Self {
        Trace { events }
    }

    pub fn events(&self) -> &[ReconfigEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventKind> + '_ {
        self.events.iter().map(|e| &e.kind)
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let line = serde_json::to_string(e).expect("events always serialize");
            let _ = writeln!(s, "{line}");
        }
        s
    }

    pub fn from_json_lines(text: &str) -> Result<Trace> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: ReconfigEvent = serde_json::from_str(line).map_err(|err| Error::Parse {
                line: i + 1,
                message: err.to_string(),
            })?;
            events.push(e);
        }
        Ok(Trace { events })
    }

    pub fn timestamps_increase(&self) -> bool {
        self.events.windows(2).all(|w| w[0].time < w[1].time)
    }
}

/// Applies the graph edits of `trace` to the starting prevailing and
/// intermediate graphs, failing on any edit that does not fit.
pub fn replay(tp: &Tcdg, ti: &Tcdg, trace: &Trace) -> Result<(Tcdg, Tcdg)> {
    let mut tp = tp.clone();
    let mut ti = ti.clone();
    for e in trace.events() {
        let bad = |what: &str| Error::Parse {
            line: e.time as usize,
            message: format!("replay: {what}"),
        };
        match &e.kind {
            EventKind::DependencyAdded { graph, dep, .. } => {
                let g = if *graph == Graph::P { &mut tp } else { &mut ti };
                if !g.insert(*dep) {
                    return Err(bad(&format!("{dep} added twice")));
                }
            }
            EventKind::DependencyRemoved { graph, dep, .. } => {
                let g = if *graph == Graph::P { &mut tp } else { &mut ti };
                if !g.remove(dep) {
                    return Err(bad(&format!("{dep} removed but absent")));
                }
            }
            EventKind::RiRestored { dep } => {
                if !ti.insert(*dep) {
                    return Err(bad(&format!("{dep} restored but present")));
                }
            }
            EventKind::GhostRemoved { dep } if !ti.remove(dep) => {
                return Err(bad(&format!("ghost {dep} absent")));
            }
            _ => {}
        }
    }
    Ok((tp, ti))
}
