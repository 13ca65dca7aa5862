use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use hml_core::config::builtin;
use hml_core::exterior::exact::rat;
use hml_core::exterior::{ConstantForm, KahlerModel};
use hml_core::linalg::cz;
use hml_core::metrics::{identity_suite_at, MetricPoint};
use hml_core::quintic;
use hml_core::vhs::{FamilyModel, VhsPoint, DEFAULT_FD_STEP};
use num_complex::Complex;

fn periods(c: &mut Criterion) {
    let fam: Arc<dyn FamilyModel> = Arc::new(quintic::family().unwrap());
    c.bench_function("quintic raw frame near z = 0", |b| {
        b.iter(|| fam.raw_frame(black_box(&[cz(-1e-4, 2e-5)])).unwrap())
    });
    c.bench_function("quintic raw frame past the conifold", |b| {
        b.iter(|| fam.raw_frame(black_box(&[cz(1e-3, 5e-4)])).unwrap())
    });
    c.bench_function("quintic connection blocks", |b| {
        b.iter(|| VhsPoint::evaluate(fam.as_ref(), black_box(&[cz(-1e-4, 2e-5)]), DEFAULT_FD_STEP).unwrap())
    });
}

fn metric_points(c: &mut Criterion) {
    let q = builtin("quintic").unwrap().unwrap();
    let t = [cz(-1e-4, 2e-5)];
    c.bench_function("quintic metric point", |b| {
        b.iter(|| MetricPoint::evaluate(&q.cy, black_box(&t)).unwrap())
    });
    c.bench_function("quintic identity suite", |b| {
        b.iter(|| identity_suite_at(&q.cy, black_box(&t)).unwrap())
    });
    let p = builtin("two-param-product").unwrap().unwrap();
    let t2 = [cz(-1e-3, 1e-3), cz(2e-3, -1e-3)];
    c.bench_function("two-parameter metric point", |b| {
        b.iter(|| MetricPoint::evaluate(&p.cy, black_box(&t2)).unwrap())
    });
}

fn exterior(c: &mut Criterion) {
    let m = KahlerModel::standard(3);
    let v: Vec<_> = ConstantForm::basis(3, 2, 1)
        .iter()
        .enumerate()
        .map(|(i, _)| Complex::new(rat(i as i64 - 4, 3), rat(1, i as i64 + 1)))
        .collect();
    let a = ConstantForm::from_vector(3, 2, 1, &v);
    c.bench_function("Lefschetz decomposition (2,1) on a 3-torus", |b| {
        b.iter(|| m.lefschetz_decompose(black_box(&a)).unwrap())
    });
}

criterion_group!(benches, periods, metric_points, exterior);
criterion_main!(benches);
