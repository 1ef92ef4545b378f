use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracmt_bench::{bump, exp_config, half, rough};
use fracmt_core::{
    extremal_search, gagliardo_p_pl, gagliardo_p_radial, moser_decomposition, mt_integral,
    rearrange, Domain, ExtremalOptions, Params, QuadratureSpec,
};
use std::hint::black_box;

fn seminorm(c: &mut Criterion) {
    let mut g = c.benchmark_group("seminorm_pl");
    for n in [16, 64, 256] {
        let u = bump(n);
        for s in [0.5, 0.3] {
            let params = Params::new(s).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("s={s}"), n), &u, |b, u| {
                b.iter(|| gagliardo_p_pl(black_box(u), params).unwrap())
            });
        }
    }
    g.finish();

    let spec = QuadratureSpec::default();
    let u = bump(16);
    c.bench_function("seminorm_radial/16", |b| {
        b.iter(|| gagliardo_p_radial(black_box(&u), half(), &spec).unwrap())
    });
}

fn decomposition(c: &mut Criterion) {
    let spec = QuadratureSpec::default();
    let mut g = c.benchmark_group("moser_decomposition");
    for eps in [1e-2, 1e-8] {
        g.bench_with_input(BenchmarkId::from_parameter(eps), &eps, |b, &eps| {
            b.iter(|| moser_decomposition(black_box(eps), half(), &spec).unwrap())
        });
    }
    g.finish();
}

fn rearrangement(c: &mut Criterion) {
    let u = rough(1024);
    c.bench_function("rearrange/1024", |b| {
        b.iter(|| rearrange(black_box(&u), 2.0).unwrap())
    });
}

fn functional(c: &mut Criterion) {
    let spec = QuadratureSpec::default();
    let u = bump(64);
    let cfg = exp_config(10.0);
    c.bench_function("mt_integral/64", |b| {
        b.iter(|| mt_integral(black_box(&u), &cfg, Domain::Interval(-1.0, 1.0), &spec).unwrap())
    });
}

fn extremal(c: &mut Criterion) {
    let cfg = exp_config(4.0);
    let mut g = c.benchmark_group("extremal");
    g.sample_size(10);
    g.bench_function("32_cells_200_iters", |b| {
        b.iter(|| extremal_search(&cfg, &ExtremalOptions::new(32, 200, 1)).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    seminorm,
    decomposition,
    rearrangement,
    functional,
    extremal
);
criterion_main!(benches);
