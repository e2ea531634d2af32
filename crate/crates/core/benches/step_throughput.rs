use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use switchmix::config::{sample_configuration, sample_uniform_simple};
use switchmix::kernels::{step_config, step_simple};

const STEPS: u64 = 100_000;

fn throughput(c: &mut Criterion) {
    let mut group = c.benchmark_group("steps");
    group.throughput(Throughput::Elements(STEPS));
    for &(n, d) in &[(1_000usize, 3usize), (10_000, 3), (10_000, 10)] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let simple = sample_uniform_simple(n, d, &mut rng);
        let multi = sample_configuration(n, d, &mut rng);
        group.bench_function(format!("simple n={n} d={d}"), |b| {
            b.iter_batched_ref(
                || (simple.clone(), ChaCha8Rng::seed_from_u64(2)),
                |(g, rng)| {
                    for _ in 0..STEPS {
                        black_box(step_simple(g, rng));
                    }
                },
                BatchSize::LargeInput,
            )
        });
        group.bench_function(format!("config n={n} d={d}"), |b| {
            b.iter_batched_ref(
                || (multi.clone(), ChaCha8Rng::seed_from_u64(3)),
                |(g, rng)| {
                    for _ in 0..STEPS {
                        black_box(step_config(g, rng));
                    }
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, throughput);
criterion_main!(benches);
