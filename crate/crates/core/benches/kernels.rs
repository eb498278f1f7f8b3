use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gfrac::{Execution, Grid, NonlocalOperator, OperatorParams, YoungFunction};

fn cases() -> Vec<(String, Grid)> {
    vec![
        ("1d-256".into(), Grid::interval(-1.0, 1.0, 256).unwrap()),
        ("1d-1024".into(), Grid::interval(-1.0, 1.0, 1024).unwrap()),
        ("2d-16x16".into(), Grid::rectangle([0.0, 1.0], [0.0, 1.0], 16, 16).unwrap()),
        ("2d-32x32".into(), Grid::rectangle([0.0, 1.0], [0.0, 1.0], 32, 32).unwrap()),
    ]
}

fn profile(grid: &Grid) -> Vec<f64> {
    grid.coordinates().iter().map(|p| (1.0 - p[0] * p[0]).abs().powf(0.4) * (1.0 + 0.3 * p[1])).collect()
}

fn kernels(c: &mut Criterion) {
    let g = YoungFunction::piecewise_power(2.0, 3.0).unwrap();
    for (name, grid) in cases() {
        let u = profile(&grid);
        let mut group = c.benchmark_group(format!("kernels/{name}"));
        group.sample_size(20);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let params = OperatorParams::new(0.4).unwrap().with_execution(exec);
            let op = NonlocalOperator::new(&grid, &g, params).unwrap();
            let label = format!("{exec:?}");
            group.bench_with_input(BenchmarkId::new("energy", &label), &u, |b, u| b.iter(|| op.energy(black_box(u))));
            group.bench_with_input(BenchmarkId::new("energy_and_gradient", &label), &u, |b, u| {
                b.iter(|| op.energy_and_gradient(black_box(u)))
            });
            group.bench_with_input(BenchmarkId::new("apply", &label), &u, |b, u| b.iter(|| op.apply(black_box(u))));
        }
        group.finish();
    }
}

criterion_group!(benches, kernels);
criterion_main!(benches);
