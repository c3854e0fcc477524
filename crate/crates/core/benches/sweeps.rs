use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use metastab::steady::{epsilon_sweep, length_map, SteadyKind};
use metastab::{alpha_bar, Diffusion, Execution, Flux, ModelFunctions, ProblemSpec};

fn spec() -> ProblemSpec {
    let m = ModelFunctions::builtin(Diffusion::Gauss, Flux::Quadratic, 1.0).unwrap();
    ProblemSpec::new(0.06, 1.0, m, 800).unwrap()
}

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    if Execution::parallel_available() {
        v.push(("parallel", Execution::Parallel));
    }
    v
}

fn bench_length_map(c: &mut Criterion) {
    let s = spec();
    let ab = alpha_bar(0.06, &s.model).unwrap();
    let alphas: Vec<f64> = (1..=40).map(|k| ab * k as f64 / 40.0).collect();
    let mut group = c.benchmark_group("length_map_40");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| length_map(&alphas, &s, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_epsilon_sweep(c: &mut Criterion) {
    let s = spec();
    let eps: Vec<f64> = (1..=12).map(|k| 0.005 * k as f64).collect();
    let mut group = c.benchmark_group("epsilon_sweep_12");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| epsilon_sweep(&eps, SteadyKind::Positive, &s, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_length_map, bench_epsilon_sweep);
criterion_main!(benches);
