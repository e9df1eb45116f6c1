//! Solitary-wave integration cost per convolution path, plus the study-level
//! parallelism of running several mesh sizes at once.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nlwave::experiments::{convergence_study, solitary_initial_data, Setup, SolitaryWave};
use nlwave::integrator::{integrate, IntegratorConfig};
use nlwave::{ConvolutionPath, Grid, ProblemOptions};

fn bench_solitary(c: &mut Criterion) {
    let wave = SolitaryWave::new(1.5, -15.0).unwrap();
    let (phi, psi) = solitary_initial_data(&wave);
    let mut group = c.benchmark_group("solitary_t2");
    group.sample_size(10);
    for h in [0.25, 0.125] {
        let grid = Grid::from_interval(h, -30.0, 30.0).unwrap();
        for path in [ConvolutionPath::Direct, ConvolutionPath::Fft] {
            let setup = Setup {
                integrator: IntegratorConfig { t_end: 2.0, ..Default::default() },
                options: ProblemOptions { path, cutoff: None },
                ..Default::default()
            };
            let problem = setup.problem(grid, &phi, &psi).unwrap();
            group.bench_with_input(BenchmarkId::new(path.to_string(), h), &h, |b, _| {
                b.iter(|| integrate(black_box(&problem), &setup.integrator).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_study(c: &mut Criterion) {
    let wave = SolitaryWave::new(1.5, -15.0).unwrap();
    let setup = Setup {
        integrator: IntegratorConfig { t_end: 2.0, ..Default::default() },
        ..Default::default()
    };
    let h_list = [1.0, 0.5, 0.25, 0.125];
    let mut group = c.benchmark_group("convergence_study");
    group.sample_size(10);
    group.bench_function("pool", |b| {
        b.iter(|| convergence_study(&setup, (-30.0, 30.0), &h_list, &[2.0], &wave).unwrap())
    });
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("single", |b| {
            single.install(|| b.iter(|| convergence_study(&setup, (-30.0, 30.0), &h_list, &[2.0], &wave).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solitary, bench_study);
criterion_main!(benches);
