//! Data-parallel kernels vs. their sequential equivalents.
//!
//! With the default `parallel` feature the same workload runs in a 1-thread
//! rayon pool and in a pool sized to the machine, so one `cargo bench`
//! reports the speedup directly. Compiled with `--no-default-features` the
//! identical workloads exercise the sequential fallbacks; criterion's saved
//! baselines make the cross-compilation comparison
//! (`cargo bench -- --save-baseline par` / `--baseline par`).

use std::time::Duration;

use chaoslab::chaos::{chaos_samples, sup_expectations};
use chaoslab::rip::delta_s_mc_lower;
use chaoslab::samplers::{AlphaShape, SamplerSpec, SourceKind};
use chaoslab::stream::RngStream;
use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DMatrix;

fn weibull(alpha: f64) -> SamplerSpec {
    SamplerSpec::new(
        SourceKind::SymmetricWeibull,
        AlphaShape::new(alpha).unwrap(),
        true,
    )
}

/// Deterministic dense test matrix; independent of the crate's RNG.
fn test_matrix(m: usize, n: usize, key: u64) -> DMatrix<f64> {
    let mut state = key;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    DMatrix::from_fn(m, n, |_, _| next() * 2.0)
}

fn symmetric_test_matrix(n: usize, key: u64) -> DMatrix<f64> {
    let g = test_matrix(n, n, key);
    (&g + g.transpose()).scale(0.5)
}

/// Run `f` under an explicitly sized rayon pool (parallel builds) or
/// directly (sequential builds, where `threads` is only a label).
#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool")
        .install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R>(_threads: usize, f: impl FnOnce() -> R) -> R {
    f()
}

fn thread_variants() -> Vec<(String, usize)> {
    if cfg!(feature = "parallel") {
        let hw = std::thread::available_parallelism().map_or(2, |p| p.get().max(2));
        vec![("threads-1".into(), 1), (format!("threads-{hw}"), hw)]
    } else {
        vec![("sequential".into(), 1)]
    }
}

fn bench_chaos_sampling(c: &mut Criterion) {
    let a = symmetric_test_matrix(32, 11);
    let mut group = c.benchmark_group("chaos_samples_n32_k8192");
    for (label, threads) in thread_variants() {
        group.bench_function(&label, |b| {
            b.iter(|| {
                with_threads(threads, || {
                    chaos_samples(&a, weibull(1.5), 8192, &RngStream::new(1)).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn bench_rip_support_scan(c: &mut Criterion) {
    let phi = test_matrix(32, 64, 22).scale(1.0 / (32f64).sqrt());
    let mut group = c.benchmark_group("delta_s_mc_lower_32x64_s4_k512");
    for (label, threads) in thread_variants() {
        group.bench_function(&label, |b| {
            b.iter(|| {
                with_threads(threads, || {
                    delta_s_mc_lower(&phi, 4, 512, &RngStream::new(2)).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn bench_sup_expectations(c: &mut Criterion) {
    let family: Vec<DMatrix<f64>> = (0..8).map(|k| test_matrix(32, 32, 100 + k)).collect();
    let mut group = c.benchmark_group("sup_expectations_8x32x32_k2048");
    for (label, threads) in thread_variants() {
        group.bench_function(&label, |b| {
            b.iter(|| {
                with_threads(threads, || {
                    sup_expectations(&family, weibull(2.0), 2048, &RngStream::new(3)).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn config() -> Criterion {
    Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(2))
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_chaos_sampling, bench_rip_support_scan, bench_sup_expectations
}
criterion_main!(benches);
