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

//! CSV, plot-data and trace output.
//!
//! Floats are written with six decimals so identical runs give
//! byte-identical files. A run stopped by the monitor has no ratios and
//! writes `nan`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use upr_core::Algorithm;

use crate::config::OptionSet;
use crate::sweep::RunRecord;
use crate::CliError;

pub fn fixed(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.6}")
    }
}

#[derive(Serialize)]
struct ResultRow<'a> {
    initial: &'a str,
    #[serde(rename = "final")]
    final_alg: &'a str,
    options: &'a str,
    seed: u64,
    drained_ratio: String,
    halted_ratio: String,
    drained_count: usize,
    halted_count: usize,
    raw_cond2_failures: usize,
    events: usize,
    violations: usize,
}

/// Mean, min and max over the runs that finished.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Spread {
        let v: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return Spread {
                mean: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        Spread {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub runs: usize,
    pub drained: Spread,
    pub halted: Spread,
    pub violations: usize,
}

type Key = (Algorithm, Algorithm, OptionSet);

/// Per-scenario aggregates over seeds.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub groups: BTreeMap<Key, Group>,
}

impl Summary {
    pub fn new(records: &[RunRecord]) -> Summary {
        let mut by: BTreeMap<Key, Vec<&RunRecord>> = BTreeMap::new();
        for r in records {
            by.entry((r.cell.initial, r.cell.final_alg, r.cell.options))
                .or_default()
                .push(r);
        }
        let groups = by
            .into_iter()
            .map(|(k, rs)| {
                let g = Group {
                    runs: rs.len(),
                    drained: Spread::of(rs.iter().map(|r| r.result.drained_ratio)),
                    halted: Spread::of(rs.iter().map(|r| r.result.halted_ratio)),
                    violations: rs.iter().map(|r| r.result.violations).sum(),
                };
                (k, g)
            })
            .collect();
        Summary { groups }
    }

    pub fn get(
        &self,
        initial: Algorithm,
        final_alg: Algorithm,
        options: OptionSet,
    ) -> Option<&Group> {
        self.groups.get(&(initial, final_alg, options))
    }

    /// Exploit mean over baseline mean; `None` when the baseline is
    /// missing or zero.
    pub fn relative(&self, key: Key, halted: bool) -> Option<f64> {
        let base = self.groups.get(&(key.0, key.1, OptionSet::Baseline))?;
        let this = self.groups.get(&key)?;
        let pick = |g: &Group| {
            if halted {
                g.halted.mean
            } else {
                g.drained.mean
            }
        };
        let (b, x) = (pick(base), pick(this));
        (b > 0.0 && !x.is_nan()).then(|| x / b)
    }

    fn option_sets(&self) -> Vec<OptionSet> {
        let mut v: Vec<OptionSet> = self.groups.keys().map(|k| k.2).collect();
        v.sort();
        v.dedup();
        v
    }

    fn algorithms(&self, initial: bool) -> Vec<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .filter(|a| {
                self.groups
                    .keys()
                    .any(|k| if initial { k.0 == *a } else { k.1 == *a })
            })
            .collect()
    }

    /// Grouped-bar data: one row per (initial, options), one column per
    /// final algorithm.
    fn plot(&self, cell: impl Fn(Key) -> Option<f64>, options: &[OptionSet]) -> String {
        let finals = self.algorithms(false);
        let mut out = String::from("initial,options");
        for f in &finals {
            write!(out, ",{f}").unwrap();
        }
        out.push('\n');
        for i in self.algorithms(true) {
            for &o in options {
                write!(out, "{i},{o}").unwrap();
                for &f in &finals {
                    let v = cell((i, f, o)).map(fixed).unwrap_or_default();
                    write!(out, ",{v}").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn plot_drained(&self) -> String {
        let opts = self.option_sets();
        self.plot(|k| self.groups.get(&k).map(|g| g.drained.mean), &opts)
    }

    pub fn plot_halted(&self) -> String {
        let opts = self.option_sets();
        self.plot(|k| self.groups.get(&k).map(|g| g.halted.mean), &opts)
    }

    fn exploit_sets(&self) -> Vec<OptionSet> {
        self.option_sets()
            .into_iter()
            .filter(|&o| o != OptionSet::Baseline)
            .collect()
    }

    pub fn plot_relative(&self, halted: bool) -> String {
        self.plot(|k| self.relative(k, halted), &self.exploit_sets())
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "initial,final,options,runs,drained_mean,drained_min,drained_max,\
             halted_mean,halted_min,halted_max,violations\n",
        );
        for (&(i, f, o), g) in &self.groups {
            writeln!(
                out,
                "{i},{f},{o},{},{},{},{},{},{},{},{}",
                g.runs,
                fixed(g.drained.mean),
                fixed(g.drained.min),
                fixed(g.drained.max),
                fixed(g.halted.mean),
                fixed(g.halted.min),
                fixed(g.halted.max),
                g.violations
            )
            .unwrap();
        }
        out
    }

    pub fn relative_csv(&self) -> String {
        let mut out = String::from("initial,final,options,drained_relative,halted_relative\n");
        for &(i, f, o) in self.groups.keys().filter(|k| k.2 != OptionSet::Baseline) {
            let d = self
                .relative((i, f, o), false)
                .map(fixed)
                .unwrap_or_default();
            let h = self
                .relative((i, f, o), true)
                .map(fixed)
                .unwrap_or_default();
            writeln!(out, "{i},{f},{o},{d},{h}").unwrap();
        }
        out
    }

    /// Human-readable matrices, one block per option set and metric.
    pub fn render(&self) -> String {
        let finals = self.algorithms(false);
        let mut out = String::new();
        for o in self.option_sets() {
            for (label, halted) in [("drained", false), ("halted", true)] {
                write!(out, "{o} {label:<8}").unwrap();
                for f in &finals {
                    write!(out, "{:>8}", f.to_string()).unwrap();
                }
                out.push('\n');
                for i in self.algorithms(true) {
                    write!(out, "{:<width$}", i.to_string(), width = o.name().len() + 9).unwrap();
                    for &f in &finals {
                        let v = self.get(i, f, o).map(|g| {
                            if halted {
                                g.halted.mean
                            } else {
                                g.drained.mean
                            }
                        });
                        match v {
                            Some(x) => write!(out, "{:>8.3}", x).unwrap(),
                            None => write!(out, "{:>8}", "-").unwrap(),
                        }
                    }
                    out.push('\n');
                }
                out.push('\n');
            }
        }
        out
    }
}

pub fn results_csv(records: &[RunRecord]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        let s = &r.result;
        w.serialize(ResultRow {
            initial: &s.initial,
            final_alg: &s.final_alg,
            options: &s.options,
            seed: s.seed,
            drained_ratio: fixed(s.drained_ratio),
            halted_ratio: fixed(s.halted_ratio),
            drained_count: s.drained_channels.len(),
            halted_count: s.halted_flows.len(),
            raw_cond2_failures: s.raw_cond2_failures,
            events: s.event_count,
            violations: s.violations,
        })?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io("results.csv", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes every artifact under `dir`, with traces only when asked.
pub fn write_outputs(dir: &Path, records: &[RunRecord], traces: bool) -> Result<Summary, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let summary = Summary::new(records);
    write(&dir.join("results.csv"), &results_csv(records)?)?;
    write(&dir.join("summary.csv"), &summary.summary_csv())?;
    write(&dir.join("relative.csv"), &summary.relative_csv())?;
    write(&dir.join("plot_drained.csv"), &summary.plot_drained())?;
    write(&dir.join("plot_halted.csv"), &summary.plot_halted())?;
    write(
        &dir.join("plot_drained_relative.csv"),
        &summary.plot_relative(false),
    )?;
    write(
        &dir.join("plot_halted_relative.csv"),
        &summary.plot_relative(true),
    )?;
    if traces {
        let tdir = dir.join("traces");
        fs::create_dir_all(&tdir).map_err(|e| CliError::io(&tdir, e))?;
        for r in records {
            let path = tdir.join(format!("{}.jsonl", r.cell.stem()));
            write(&path, &r.trace.to_json_lines())?;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::sweep::run_sweep;

    #[test]
    fn spread_skips_failed_runs() {
        let s = Spread::of([0.5, f64::NAN, 0.25]);
        assert_eq!(s.mean, 0.375);
        assert_eq!((s.min, s.max), (0.25, 0.5));
        assert!(Spread::of([f64::NAN]).mean.is_nan());
    }

    #[test]
    fn fixed_width_floats() {
        assert_eq!(fixed(1.0 / 3.0), "0.333333");
        assert_eq!(fixed(0.0), "0.000000");
        assert_eq!(fixed(f64::NAN), "nan");
    }

    #[test]
    fn tables_have_the_expected_shape() {
        let cfg = ExperimentConfig {
            width: 3,
            height: 3,
            seeds: vec![1, 2],
            ..ExperimentConfig::default()
        };
        let records = run_sweep(&cfg).unwrap();
        let csv = results_csv(&records).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 24 * 2);
        assert_eq!(
            lines[0],
            "initial,final,options,seed,drained_ratio,halted_ratio,drained_count,halted_count,raw_cond2_failures,events,violations"
        );
        assert!(lines[1].starts_with("xy,yx,baseline,1,"));

        let summary = Summary::new(&records);
        assert_eq!(summary.groups.len(), 24);
        assert_eq!(summary.summary_csv().lines().count(), 25);
        assert_eq!(summary.relative_csv().lines().count(), 13);

        let plot = summary.plot_drained();
        let rows: Vec<&str> = plot.lines().collect();
        assert_eq!(rows[0], "initial,options,xy,yx,oe,nf");
        assert_eq!(rows.len(), 1 + 4 * 2);
        // The diagonal has no scenario.
        assert!(rows[1].starts_with("xy,baseline,,"));
        assert_eq!(summary.plot_relative(true).lines().count(), 1 + 4);
    }
}
