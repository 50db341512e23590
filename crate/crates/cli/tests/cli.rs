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

//! End-to-end runs of the `upr` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use upr_core::{build_mesh, EventKind, Graph, Trace};

fn upr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn sweep_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["sweep", "--mesh", "3x3", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    upr(&args)
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep_into(
        dir.path(),
        &["--seeds", "1,2", "--options", "baseline,both,compatibility"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12 * 3 * 2);
    for name in [
        "summary.csv",
        "relative.csv",
        "plot_drained.csv",
        "plot_halted.csv",
    ] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("72 runs, 0 with violations"));
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--pairs",
        "xy:yx,oe:xy",
        "--seeds",
        "3..=4",
        "--trace",
        "--check",
        "every-event",
    ];
    assert_eq!(code(&sweep_into(a.path(), &args)), 0);
    assert_eq!(code(&sweep_into(b.path(), &args)), 0);
    for name in [
        "results.csv",
        "summary.csv",
        "traces/oe-xy-both-4.jsonl",
        "traces/xy-yx-baseline-3.jsonl",
    ] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert!(!x.is_empty(), "{name}");
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "mesh = \"2x3\"\npairs = [\"nf:oe\"]\noptions = [\"baseline\"]\nseeds = [1, 2, 3]\n",
    )
    .unwrap();
    let out = sweep_into(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "--seeds", "9"],
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("nf,oe,baseline,9,"), "{}", rows[0]);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "mesh = 5\n").unwrap();
    for args in [
        vec!["sweep", "--config", bad.to_str().unwrap()],
        vec!["sweep", "--config", "/definitely/not/here.toml"],
        vec!["sweep", "--pairs", "xy:xy"],
        vec!["sweep", "--pairs", "xy:up"],
        vec!["sweep", "--mesh", "1x1"],
        vec!["sweep", "--trace"],
        vec!["run", "--pair", "xy"],
    ] {
        let out = upr(&args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn identity_trace_holds_only_checks_and_upgrades() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let out = upr(&[
        "run",
        "--pair",
        "nf:nf",
        "--mesh",
        "4x4",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let trace = Trace::from_json_lines(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        trace.len(),
        2 * build_mesh(4, 4, 1).unwrap().channel_count()
    );
    assert!(trace.iter().all(|k| matches!(
        k,
        EventKind::ConditionCheck { .. } | EventKind::Upgrade { .. }
    )));
}

#[test]
fn odd_even_into_xy_provisions_ghosts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let out = upr(&[
        "run",
        "--pair",
        "oe:xy",
        "--options",
        "both",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let trace = Trace::from_json_lines(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(trace.iter().any(|k| matches!(
        k,
        EventKind::DependencyAdded {
            graph: Graph::I,
            ..
        }
    )));
}

#[test]
fn verbose_run_prints_events_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let snaps = dir.path().join("snaps");
    let out = upr(&[
        "run",
        "--pair",
        "xy:yx",
        "--mesh",
        "2x2",
        "-v",
        "--snapshots",
        snaps.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 10);
    assert!(text.contains("upgrade"));
    // One pair of graphs before the run and after each of the 16 upgrades.
    assert_eq!(fs::read_dir(&snaps).unwrap().count(), 2 * 17);
    let first = fs::read_to_string(snaps.join("0000-tp.dot")).unwrap();
    assert!(first.starts_with("digraph"));
}

#[test]
fn dump_formats() {
    let table = upr(&["dump", "--alg", "xy", "--mesh", "2x2"]);
    assert_eq!(code(&table), 0);
    assert!(String::from_utf8_lossy(&table.stdout).contains("p0>r0 p1 : r0>r1"));
    let dot = upr(&["dump", "--alg", "oe", "--mesh", "3x3", "--format", "dot"]);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("digraph"));
    let edges = upr(&["dump", "--alg", "nf", "--mesh", "2x2", "--format", "tcdg"]);
    assert_eq!(code(&edges), 0);
    assert!(!edges.stdout.is_empty());
}
