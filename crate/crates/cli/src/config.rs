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

//! Experiment configuration: a TOML file with flag overrides on top.
//!
//! ```toml
//! mesh = "5x5"
//! pairs = "all"            # or ["oe:xy", "nf:oe"]
//! options = ["baseline", "both"]
//! seeds = [1, 2, 3, 4, 5]
//! check = "final"
//! out = "results"
//! trace = false
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use upr_core::{Algorithm, InvariantChecks, ReconfigOptions};

use crate::CliError;

/// Which exploitation mechanisms a run enables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptionSet {
    /// Selective halting only.
    Baseline,
    Conformability,
    Compatibility,
    Both,
}

impl OptionSet {
    pub const ALL: [OptionSet; 4] = [
        OptionSet::Baseline,
        OptionSet::Conformability,
        OptionSet::Compatibility,
        OptionSet::Both,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptionSet::Baseline => "baseline",
            OptionSet::Conformability => "conformability",
            OptionSet::Compatibility => "compatibility",
            OptionSet::Both => "both",
        }
    }

    pub fn options(self, seed: u64, checks: InvariantChecks) -> ReconfigOptions {
        let (conform, compat) = match self {
            OptionSet::Baseline => (false, false),
            OptionSet::Conformability => (true, false),
            OptionSet::Compatibility => (false, true),
            OptionSet::Both => (true, true),
        };
        ReconfigOptions {
            exploit_conformability: conform,
            exploit_compatibility: compat,
            ..ReconfigOptions::exploiting(seed).with_checks(checks)
        }
    }
}

impl fmt::Display for OptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptionSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "baseline" | "halting" => Ok(OptionSet::Baseline),
            "conformability" => Ok(OptionSet::Conformability),
            "compatibility" => Ok(OptionSet::Compatibility),
            "both" | "exploit" => Ok(OptionSet::Both),
            other => Err(format!("unknown option set `{other}`")),
        }
    }
}

/// `WxH`, e.g. `5x5`.
pub fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("mesh `{s}` is not of the form WxH"))?;
    let w: usize = w.parse().map_err(|_| format!("bad mesh width in `{s}`"))?;
    let h: usize = h.parse().map_err(|_| format!("bad mesh height in `{s}`"))?;
    if w == 0 || h == 0 || w * h < 2 {
        return Err(format!("mesh `{s}` needs at least two routers"));
    }
    Ok((w, h))
}

/// `initial:final`.
pub fn parse_pair(s: &str) -> Result<(Algorithm, Algorithm), String> {
    let (a, b) = s
        .trim()
        .split_once([':', ','])
        .ok_or_else(|| format!("pair `{s}` is not of the form initial:final"))?;
    Ok((a.parse()?, b.parse()?))
}

/// Every ordered pair of distinct algorithms, initial-major.
pub fn all_pairs() -> Vec<(Algorithm, Algorithm)> {
    let mut out = Vec::new();
    for a in Algorithm::ALL {
        for b in Algorithm::ALL {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

fn parse_pairs(items: &[String]) -> Result<Vec<(Algorithm, Algorithm)>, String> {
    if items.len() == 1 && matches!(items[0].as_str(), "all" | "all-pairs") {
        return Ok(all_pairs());
    }
    items.iter().map(|s| parse_pair(s)).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum PairsField {
    One(String),
    Many(Vec<String>),
}

impl PairsField {
    fn items(self) -> Vec<String> {
        match self {
            PairsField::One(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            PairsField::Many(v) => v,
        }
    }
}

/// The file form; every key optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    mesh: Option<String>,
    lanes: Option<usize>,
    pairs: Option<PairsField>,
    options: Option<Vec<OptionSet>>,
    seeds: Option<Vec<u64>>,
    check: Option<InvariantChecks>,
    out: Option<PathBuf>,
    trace: Option<bool>,
    identity: Option<bool>,
}

/// Command-line values that win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mesh: Option<String>,
    pub pairs: Option<String>,
    pub options: Option<String>,
    pub seeds: Option<String>,
    pub check: Option<InvariantChecks>,
    pub out: Option<PathBuf>,
    pub trace: bool,
    pub identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub width: usize,
    pub height: usize,
    pub lanes: usize,
    pub pairs: Vec<(Algorithm, Algorithm)>,
    pub options: Vec<OptionSet>,
    pub seeds: Vec<u64>,
    pub check: InvariantChecks,
    pub out: Option<PathBuf>,
    pub trace: bool,
    /// Permit `A:A` pairs.
    pub identity: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            width: 5,
            height: 5,
            lanes: 1,
            pairs: all_pairs(),
            options: vec![OptionSet::Baseline, OptionSet::Both],
            seeds: vec![1],
            check: InvariantChecks::Final,
            out: None,
            trace: false,
            identity: false,
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

/// `1,2,5` or `1..=5`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..=") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range `{s}`"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range `{s}`"))?;
        return Ok((a..=b).collect());
    }
    split_list(s)
        .map(|x| x.parse().map_err(|_| format!("bad seed `{x}`")))
        .collect()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        Self::resolve(Some(text), &Overrides::default())
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&str>, flags: &Overrides) -> Result<Self, CliError> {
        let bad = CliError::Config;
        let file: ConfigFile = match file {
            Some(text) => toml::from_str(text).map_err(|e| bad(e.to_string()))?,
            None => ConfigFile::default(),
        };
        let mut cfg = ExperimentConfig::default();
        if let Some(m) = flags.mesh.as_deref().or(file.mesh.as_deref()) {
            (cfg.width, cfg.height) = parse_mesh(m).map_err(bad)?;
        }
        if let Some(l) = file.lanes {
            cfg.lanes = l;
        }
        if let Some(p) = &flags.pairs {
            cfg.pairs =
                parse_pairs(&split_list(p).map(String::from).collect::<Vec<_>>()).map_err(bad)?;
        } else if let Some(p) = file.pairs {
            cfg.pairs = parse_pairs(&p.items()).map_err(bad)?;
        }
        if let Some(o) = &flags.options {
            cfg.options = split_list(o)
                .map(|x| x.parse::<OptionSet>())
                .collect::<Result<_, _>>()
                .map_err(bad)?;
        } else if let Some(o) = file.options {
            cfg.options = o;
        }
        if let Some(s) = &flags.seeds {
            cfg.seeds = parse_seeds(s).map_err(bad)?;
        } else if let Some(s) = file.seeds {
            cfg.seeds = s;
        }
        cfg.check = flags.check.or(file.check).unwrap_or(cfg.check);
        cfg.out = flags.out.clone().or(file.out);
        cfg.trace = flags.trace || file.trace.unwrap_or(false);
        cfg.identity = flags.identity || file.identity.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.lanes == 0 {
            return bad("lanes must be positive".into());
        }
        if self.pairs.is_empty() || self.options.is_empty() || self.seeds.is_empty() {
            return bad("pairs, options and seeds must all be non-empty".into());
        }
        if !self.identity {
            if let Some((a, _)) = self.pairs.iter().find(|(a, b)| a == b) {
                return bad(format!(
                    "identity pair {a}:{a} requires identity runs to be enabled"
                ));
            }
        }
        if self.trace && self.out.is_none() {
            return bad("trace files need an output directory".into());
        }
        Ok(())
    }

    pub fn run_count(&self) -> usize {
        self.pairs.len() * self.options.len() * self.seeds.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_the_twelve_pairs() {
        let cfg = ExperimentConfig::resolve(None, &Overrides::default()).unwrap();
        assert_eq!(cfg.pairs.len(), 12);
        assert_eq!((cfg.width, cfg.height), (5, 5));
        assert_eq!(cfg.run_count(), 24);
    }

    #[test]
    fn file_then_flags() {
        let text = r#"
            mesh = "3x4"
            pairs = ["oe:xy", "nf:oe"]
            options = ["baseline", "conformability"]
            seeds = [7, 8]
            check = "every-event"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!((cfg.width, cfg.height), (3, 4));
        assert_eq!(
            cfg.pairs,
            vec![
                (Algorithm::OddEven, Algorithm::Xy),
                (Algorithm::NegativeFirst, Algorithm::OddEven)
            ]
        );
        assert_eq!(cfg.check, InvariantChecks::EveryEvent);

        let flags = Overrides {
            seeds: Some("1..=3".into()),
            options: Some("both".into()),
            ..Default::default()
        };
        let cfg = ExperimentConfig::resolve(Some(text), &flags).unwrap();
        assert_eq!(cfg.seeds, vec![1, 2, 3]);
        assert_eq!(cfg.options, vec![OptionSet::Both]);
        assert_eq!(cfg.pairs.len(), 2);
    }

    #[test]
    fn all_pairs_string() {
        let cfg = ExperimentConfig::from_toml("pairs = \"all\"").unwrap();
        assert_eq!(cfg.pairs, all_pairs());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "mesh = \"5by5\"",
            "pairs = [\"xy:zz\"]",
            "pairs = [\"xy:xy\"]",
            "options = [\"sometimes\"]",
            "seeds = []",
            "colour = \"blue\"",
            "trace = true",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
        assert!(ExperimentConfig::from_toml("pairs = [\"xy:xy\"]\nidentity = true").is_ok());
    }

    #[test]
    fn option_sets_map_to_flags() {
        let o = OptionSet::Conformability.options(3, InvariantChecks::Off);
        assert!(o.exploit_conformability && !o.exploit_compatibility);
        assert_eq!(o.scheduler_seed, 3);
        for s in OptionSet::ALL {
            assert_eq!(s.name().parse::<OptionSet>().unwrap(), s);
        }
    }
}
