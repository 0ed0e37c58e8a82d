//! Compares the data-parallel core against a single worker. Build with
//! `--no-default-features` to benchmark the purely sequential code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlens_core::classify::{partition_classes, SearchConfig};
use qlens_core::{count_matrix, decide_equiv, par, LensParams};

fn modes() -> Vec<(&'static str, usize)> {
    let mut m = vec![("one_worker", 1)];
    if par::is_parallel() {
        m.push(("all_workers", par::available_jobs()));
    }
    m
}

fn bench_count(c: &mut Criterion) {
    let params = LensParams::new(31, (1..=40).map(|i| 1 + (i * 7) % 30).collect()).unwrap();
    let mut g = c.benchmark_group("count_matrix");
    for (name, jobs) in modes() {
        g.bench_function(BenchmarkId::new(name, "r31_n40"), |b| {
            b.iter(|| par::with_jobs(jobs, || count_matrix(&params)))
        });
    }
    g.finish();
}

fn bench_decide(c: &mut Criterion) {
    let a = count_matrix(&LensParams::new(16, vec![1, 1, 3, 5, 7, 9, 1]).unwrap());
    let b = count_matrix(&LensParams::new(16, vec![1, 1, 11, 13, 15, 3, 1]).unwrap());
    c.bench_function("decide_equiv/r16_n7", |bench| {
        bench.iter(|| decide_equiv(&a, &b).unwrap())
    });
}

fn bench_partition(c: &mut Criterion) {
    let mut g = c.benchmark_group("partition_classes");
    g.sample_size(10);
    for (name, jobs) in modes() {
        for (r, n) in [(9u64, 6usize), (16, 6)] {
            g.bench_with_input(
                BenchmarkId::new(name, format!("r{r}_n{n}")),
                &(r, n),
                |b, &(r, n)| {
                    b.iter(|| {
                        par::with_jobs(jobs, || {
                            partition_classes(r, n, SearchConfig::default()).unwrap()
                        })
                    })
                },
            );
        }
    }
    g.finish();
}

criterion_group!(benches, bench_count, bench_decide, bench_partition);
criterion_main!(benches);
