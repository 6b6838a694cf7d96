use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use goose_core::gp::KernelSpec;
use goose_core::harness::{parse_config, run_experiment_with};
use goose_core::par::{map_ordered, Parallelism};

const MODES: [(&str, Parallelism); 2] = [("parallel", Parallelism::Auto), ("sequential", Parallelism::Sequential)];

fn kernel_rows(c: &mut Criterion) {
    let kernel = KernelSpec::rbf(0.1, 1.0).unwrap();
    let n = 1500;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let mut group = c.benchmark_group("kernel_rows");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let rows = map_ordered(&xs, mode, |x| {
                    xs.iter().map(|z| kernel.eval(&[*x], &[*z]).unwrap()).sum::<f64>()
                });
                black_box(rows)
            })
        });
    }
    group.finish();
}

fn experiments(c: &mut Criterion) {
    let configs = [
        ("safe-bo-1d", "experiment = safe-bo-1d\nseeds = 4\nbudget = 60\n"),
        ("safe-path-synthetic", "experiment = safe-path-synthetic\nseeds = 4\nsizes = 12\n"),
    ];
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    for (label, text) in configs {
        let cfg = parse_config(text).unwrap();
        for (name, mode) in MODES {
            group.bench_function(BenchmarkId::new(label, name), |b| {
                b.iter(|| black_box(run_experiment_with(&cfg, mode).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, kernel_rows, experiments);
criterion_main!(benches);
