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

//! `upr`: sweeps, single runs and table dumps.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use upr_cli::config::{parse_mesh, parse_pair};
use upr_cli::{
    run_observed, run_sweep, write_outputs, Cell, CliError, ExperimentConfig, OptionSet, Overrides,
    Summary,
};
use upr_core::{build_mesh, build_tcdg, make_routing, Algorithm, EventKind, InvariantChecks, Tcdg};

#[derive(Parser)]
#[command(
    name = "upr",
    version,
    about = "Upstream progressive reconfiguration simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (pair, option set, seed) combination.
    Sweep {
        /// TOML experiment file; flags override its keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Mesh size, e.g. 5x5.
        #[arg(long)]
        mesh: Option<String>,
        /// `all` or a comma list such as `oe:xy,nf:oe`.
        #[arg(long)]
        pairs: Option<String>,
        /// Comma list of baseline, conformability, compatibility, both.
        #[arg(long)]
        options: Option<String>,
        /// Comma list or inclusive range such as `1..=5`.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long, value_parser = parse_checks)]
        check: Option<InvariantChecks>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one JSON-lines trace per run.
        #[arg(long)]
        trace: bool,
        /// Allow pairs such as `xy:xy`.
        #[arg(long)]
        identity: bool,
    },
    /// Run a single scenario.
    Run {
        /// `initial:final`, e.g. `oe:xy`.
        #[arg(long)]
        pair: String,
        #[arg(long, default_value = "both")]
        options: OptionSet,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "5x5")]
        mesh: String,
        #[arg(long, value_parser = parse_checks, default_value = "final")]
        check: InvariantChecks,
        /// Print every event as it happens.
        #[arg(long, short)]
        verbose: bool,
        /// Write the trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write both dependency graphs in DOT after every upgrade.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Print a routing table or its dependency graph.
    Dump {
        #[arg(long)]
        alg: Algorithm,
        #[arg(long, default_value = "5x5")]
        mesh: String,
        #[arg(long, value_enum, default_value_t = DumpFormat::Table)]
        format: DumpFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpFormat {
    Table,
    Tcdg,
    Dot,
}

fn parse_checks(s: &str) -> Result<InvariantChecks, String> {
    s.parse()
}

fn read_config(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn sweep(file: Option<String>, flags: Overrides) -> Result<ExitCode, CliError> {
    let cfg = ExperimentConfig::resolve(file.as_deref(), &flags)?;
    let records = run_sweep(&cfg)?;
    let summary = match &cfg.out {
        Some(dir) => write_outputs(dir, &records, cfg.trace)?,
        None => Summary::new(&records),
    };
    print!("{}", summary.render());
    let failed: Vec<_> = records.iter().filter(|r| r.failure.is_some()).collect();
    for r in &failed {
        eprintln!(
            "{}: {}",
            r.cell.stem(),
            r.failure.as_deref().unwrap_or_default()
        );
    }
    println!("{} runs, {} with violations", records.len(), failed.len());
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

struct RunArgs {
    pair: String,
    options: OptionSet,
    seed: u64,
    mesh: String,
    check: InvariantChecks,
    verbose: bool,
    trace: Option<PathBuf>,
    snapshots: Option<PathBuf>,
}

fn snapshot(dir: &Path, n: usize, tp: &Tcdg, ti: &Tcdg) -> Result<(), CliError> {
    for (name, g) in [("tp", tp), ("ti", ti)] {
        let path = dir.join(format!("{n:04}-{name}.dot"));
        fs::write(&path, g.to_dot(name)).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

fn run(a: RunArgs) -> Result<ExitCode, CliError> {
    let (w, h) = parse_mesh(&a.mesh).map_err(CliError::Config)?;
    let (initial, final_alg) = parse_pair(&a.pair).map_err(CliError::Config)?;
    let net = build_mesh(w, h, 1)?;
    let mut tables = BTreeMap::new();
    for alg in [initial, final_alg] {
        tables.insert(alg, make_routing(&net, alg)?);
    }
    if let Some(dir) = &a.snapshots {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        snapshot(
            dir,
            0,
            &build_tcdg(&net, &tables[&initial]),
            &Tcdg::from_table(&net, &tables[&final_alg]),
        )?;
    }
    let cell = Cell {
        initial,
        final_alg,
        options: a.options,
        seed: a.seed,
    };
    let mut printed = 0;
    let mut upgrades = 0;
    let stdout = std::io::stdout();
    let record = run_observed(&net, &tables, cell, a.check, |engine, _| {
        let events = engine.events();
        for e in &events[printed..] {
            if a.verbose {
                let mut out = stdout.lock();
                writeln!(out, "{e}").map_err(|err| CliError::io("stdout", err))?;
            }
            if let (Some(dir), EventKind::Upgrade { .. }) = (&a.snapshots, &e.kind) {
                upgrades += 1;
                snapshot(dir, upgrades, engine.tp(), engine.ti())?;
            }
        }
        printed = events.len();
        Ok(())
    })?;
    if let Some(path) = &a.trace {
        fs::write(path, record.trace.to_json_lines()).map_err(|e| CliError::io(path, e))?;
    }
    let r = &record.result;
    println!(
        "{}: drained {} ({} channels), halted {} ({} flows), {} events",
        cell.stem(),
        upr_cli::report::fixed(r.drained_ratio),
        r.drained_channels.len(),
        upr_cli::report::fixed(r.halted_ratio),
        r.halted_flows.len(),
        r.event_count
    );
    match &record.failure {
        Some(v) => {
            eprintln!("{v}");
            Ok(ExitCode::from(1))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn dump(alg: Algorithm, mesh: &str, format: DumpFormat) -> Result<ExitCode, CliError> {
    let (w, h) = parse_mesh(mesh).map_err(CliError::Config)?;
    let net = build_mesh(w, h, 1)?;
    let r = make_routing(&net, alg)?;
    let text = match format {
        DumpFormat::Table => r.dump(),
        DumpFormat::Tcdg => build_tcdg(&net, &r).edge_list(),
        DumpFormat::Dot => build_tcdg(&net, &r).to_dot(alg.name()),
    };
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep {
            config,
            mesh,
            pairs,
            options,
            seeds,
            check,
            out,
            trace,
            identity,
        } => config
            .as_ref()
            .map(read_config)
            .transpose()
            .and_then(|file| {
                let flags = Overrides {
                    mesh,
                    pairs,
                    options,
                    seeds,
                    check,
                    out,
                    trace,
                    identity,
                };
                sweep(file, flags)
            }),
        Command::Run {
            pair,
            options,
            seed,
            mesh,
            check,
            verbose,
            trace,
            snapshots,
        } => run(RunArgs {
            pair,
            options,
            seed,
            mesh,
            check,
            verbose,
            trace,
            snapshots,
        }),
        Command::Dump { alg, mesh, format } => dump(alg, &mesh, format),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("upr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
