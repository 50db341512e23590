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

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use upr_bench::{Scenario, PAIRS};
use upr_core::{build_tcdg, run_reconfiguration, Algorithm, Engine, ReconfigOptions};

fn tcdg(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_tcdg");
    for alg in Algorithm::ALL {
        let s = Scenario::mesh(5, 5, alg, alg).unwrap();
        g.bench_with_input(BenchmarkId::new("5x5", alg), &s, |b, s| {
            b.iter(|| build_tcdg(&s.net, black_box(&s.initial)))
        });
    }
    g.finish();
}

fn reconfigure(c: &mut Criterion) {
    let mut g = c.benchmark_group("reconfiguration");
    g.sample_size(10);
    for (from, to) in PAIRS {
        let s = Scenario::mesh(5, 5, from, to).unwrap();
        for (name, opts) in [
            ("baseline", ReconfigOptions::baseline(1)),
            ("both", ReconfigOptions::exploiting(1)),
        ] {
            let id = BenchmarkId::new(name, format!("{from}-{to}"));
            g.bench_with_input(id, &s, |b, s| {
                b.iter(|| run_reconfiguration(&s.net, &s.initial, &s.target, opts.clone()).unwrap())
            });
        }
    }
    g.finish();
}

fn monitor(c: &mut Criterion) {
    let s = Scenario::mesh(5, 5, Algorithm::OddEven, Algorithm::Xy).unwrap();
    let engine = Engine::new(
        &s.net,
        &s.initial,
        &s.target,
        ReconfigOptions::exploiting(1),
    )
    .unwrap();
    c.bench_function("monitor/5x5 fresh", |b| {
        b.iter(|| engine.verify_lysne_conditions())
    });
}

criterion_group!(benches, tcdg, reconfigure, monitor);
criterion_main!(benches);
