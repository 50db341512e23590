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

//! Scenario execution.

use std::collections::BTreeMap;

use rayon::prelude::*;
use upr_core::{
    build_mesh, make_routing, Action, Algorithm, Engine, Error, InvariantChecks, Network,
    RoutingFunction, ScenarioResult, Trace,
};

use crate::config::{ExperimentConfig, OptionSet};
use crate::CliError;

/// One (pair, option set, seed) combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub initial: Algorithm,
    pub final_alg: Algorithm,
    pub options: OptionSet,
    pub seed: u64,
}

impl Cell {
    /// File stem for the trace of this run.
    pub fn stem(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.initial, self.final_alg, self.options, self.seed
        )
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub cell: Cell,
    pub result: ScenarioResult,
    pub trace: Trace,
    /// First violation, if the monitor stopped the run.
    pub failure: Option<String>,
}

/// Cells in output order: pairs, then option sets, then seeds.
pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::with_capacity(cfg.run_count());
    for &(initial, final_alg) in &cfg.pairs {
        for &options in &cfg.options {
            for &seed in &cfg.seeds {
                out.push(Cell {
                    initial,
                    final_alg,
                    options,
                    seed,
                });
            }
        }
    }
    out
}

/// Runs one cell. Monitor violations become part of the record; other
/// engine failures are errors.
pub fn run_scenario(
    net: &Network,
    tables: &BTreeMap<Algorithm, RoutingFunction>,
    cell: Cell,
    checks: InvariantChecks,
) -> Result<RunRecord, CliError> {
    run_observed(net, tables, cell, checks, |_, _| Ok(()))
}

/// As [`run_scenario`], calling `observe` after every fired action.
pub fn run_observed(
    net: &Network,
    tables: &BTreeMap<Algorithm, RoutingFunction>,
    cell: Cell,
    checks: InvariantChecks,
    mut observe: impl FnMut(&Engine<'_>, Action) -> Result<(), CliError>,
) -> Result<RunRecord, CliError> {
    let rs = &tables[&cell.initial];
    let rf = &tables[&cell.final_alg];
    let opts = cell.options.options(cell.seed, checks);
    let mut engine = Engine::new(net, rs, rf, opts)?;
    let names = (
        cell.initial.to_string(),
        cell.final_alg.to_string(),
        cell.options.to_string(),
    );
    let status = loop {
        match engine.step() {
            Ok(Some(action)) => observe(&engine, action)?,
            Ok(None) => break engine.run(),
            Err(e) => break Err(e),
        }
    };
    match status {
        Ok(()) => {
            let trace = engine.trace();
            let result =
                ScenarioResult::from_trace(&trace, net, &names.0, &names.1, &names.2, cell.seed)?;
            Ok(RunRecord {
                cell,
                result,
                trace,
                failure: None,
            })
        }
        Err(Error::Invariant(violations)) => {
            let trace = engine.trace();
            let result = ScenarioResult {
                initial: names.0,
                final_alg: names.1,
                options: names.2,
                seed: cell.seed,
                drained_channels: Default::default(),
                halted_flows: Default::default(),
                drained_ratio: f64::NAN,
                halted_ratio: f64::NAN,
                raw_cond2_failures: 0,
                event_count: trace.len(),
                violations: violations.len(),
            };
            Ok(RunRecord {
                cell,
                result,
                trace,
                failure: violations.first().map(ToString::to_string),
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// The routing tables a sweep needs, built once.
pub fn tables_for(
    net: &Network,
    cfg: &ExperimentConfig,
) -> Result<BTreeMap<Algorithm, RoutingFunction>, CliError> {
    let mut tables = BTreeMap::new();
    for &(a, b) in &cfg.pairs {
        for alg in [a, b] {
            if let std::collections::btree_map::Entry::Vacant(e) = tables.entry(alg) {
                e.insert(make_routing(net, alg)?);
            }
        }
    }
    Ok(tables)
}

/// Runs every cell, in parallel, returning records in cell order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>, CliError> {
    cfg.validate()?;
    let net = build_mesh(cfg.width, cfg.height, cfg.lanes)?;
    let tables = tables_for(&net, cfg)?;
    cells(cfg)
        .into_par_iter()
        .map(|cell| run_scenario(&net, &tables, cell, cfg.check))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(options: Vec<OptionSet>, seeds: Vec<u64>) -> ExperimentConfig {
        ExperimentConfig {
            width: 3,
            height: 3,
            options,
            seeds,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn one_record_per_cell_in_order() {
        let cfg = small(vec![OptionSet::Baseline, OptionSet::Both], vec![4, 1]);
        let records = run_sweep(&cfg).unwrap();
        assert_eq!(records.len(), 12 * 2 * 2);
        let got: Vec<Cell> = records.iter().map(|r| r.cell).collect();
        assert_eq!(got, cells(&cfg));
        assert_eq!(records[1].cell.seed, 1);
        for r in &records {
            assert_eq!(r.result.violations, 0);
            assert!(r.failure.is_none());
            assert_eq!(r.result.event_count, r.trace.len());
        }
    }

    #[test]
    fn identity_cells_score_zero() {
        let cfg = ExperimentConfig {
            pairs: Algorithm::ALL.iter().map(|&a| (a, a)).collect(),
            identity: true,
            ..small(vec![OptionSet::Both], vec![2])
        };
        for r in run_sweep(&cfg).unwrap() {
            assert_eq!(r.result.drained_ratio, 0.0);
            assert_eq!(r.result.halted_ratio, 0.0);
        }
    }

    #[test]
    fn stems_name_every_coordinate() {
        let cell = Cell {
            initial: Algorithm::OddEven,
            final_alg: Algorithm::Xy,
            options: OptionSet::Compatibility,
            seed: 12,
        };
        assert_eq!(cell.stem(), "oe-xy-compatibility-12");
    }
}
