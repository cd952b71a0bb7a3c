use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rashba::evolve::{propagate_convolution, propagate_symbol, sample_kernel, SpinorGrid};
use rashba::green::{green2, GreenQuery};
use rashba::par::map_slice;
use rashba::spinalg::{ComPoint, SpinChannel};
use rashba::{Coupling, Exec, C64};
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn gaussian(n: usize) -> SpinorGrid {
    SpinorGrid::from_fn(n, 16.0, |x| {
        let g = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp();
        [C64::new(g, 0.0), C64::new(0.0, 0.5 * g)]
    })
    .unwrap()
}

fn symbol_step(c: &mut Criterion) {
    let coupling = Coupling::new(0.5, 0.7).unwrap();
    let mut group = c.benchmark_group("propagate_symbol");
    for n in [32, 64] {
        let f = gaussian(n);
        group.throughput(Throughput::Elements((n * n * n) as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                b.iter(|| propagate_symbol(black_box(f), &coupling, C64::new(0.0, 0.5), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn kernel_sampling(c: &mut Criterion) {
    let coupling = Coupling::new(0.5, 0.7).unwrap();
    let mut group = c.benchmark_group("sample_kernel");
    group.sample_size(10);
    let n = 16;
    group.throughput(Throughput::Elements((n * n * n) as u64));
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| sample_kernel(n, 16.0, &coupling, C64::new(0.5, 0.0), exec).unwrap())
        });
    }
    group.finish();
}

fn convolution_step(c: &mut Criterion) {
    let coupling = Coupling::new(0.5, 0.7).unwrap();
    let mut group = c.benchmark_group("propagate_convolution");
    group.sample_size(10);
    let f = gaussian(16);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 16), |b| {
            b.iter(|| propagate_convolution(black_box(&f), &coupling, C64::new(0.5, 0.0), exec).unwrap())
        });
    }
    group.finish();
}

fn green_batch(c: &mut Criterion) {
    let coupling = Coupling::new(0.3, 0.5).unwrap();
    let queries: Vec<GreenQuery> = (0..256)
        .map(|i| {
            let s = i as f64 / 256.0;
            let q = ComPoint::new([0.2 + s, -0.3, 0.1 * s], [0.4, s - 0.5, 0.3]);
            GreenQuery::new(C64::new(-0.5 + s, 0.6), q, SpinChannel::ALL[i % 4], SpinChannel::ALL[(i / 4) % 4])
        })
        .collect();
    let mut group = c.benchmark_group("green2_batch");
    group.throughput(Throughput::Elements(queries.len() as u64));
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| map_slice(exec, &queries, |q| green2(&coupling, q).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, symbol_step, kernel_sampling, convolution_step, green_batch);
criterion_main!(benches);
