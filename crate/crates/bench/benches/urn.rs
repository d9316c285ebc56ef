use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dps_core::stats::{total_variation, MeasureRepr};
use dps_core::{BaseMeasure, IndexKind, NoiseSpec, ReplicateStreams, SetExpr, UrnState, WeightModel};

/// An urn with roughly `theta · log(1 + steps / theta)` atoms.
fn grown(theta: f64, steps: u64, kind: IndexKind) -> (UrnState, WeightModel, ReplicateStreams) {
    let model = WeightModel::step_species(1.0, 2.0, 0.5, NoiseSpec::BernoulliScaled, 3.0).unwrap();
    let mut s = UrnState::with_index(theta, BaseMeasure::uniform(), kind).unwrap();
    let mut st = ReplicateStreams::new(1, 0);
    s.advance(&model, steps, &mut st);
    (s, model, st)
}

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    for theta in [1.0, 100.0, 2000.0] {
        for kind in [IndexKind::Fenwick, IndexKind::LinearScan] {
            let (mut s, model, mut st) = grown(theta, 100_000, kind);
            let id = BenchmarkId::new(format!("{kind:?}"), format!("atoms={}", s.distinct()));
            g.bench_function(id, |b| b.iter(|| black_box(s.step_with(&model, &mut st))));
        }
    }
    g.finish();
}

fn measures(c: &mut Criterion) {
    let (s, _, _) = grown(100.0, 100_000, IndexKind::Fenwick);
    let set: SetExpr = "(0.5,0.75] u [0.9,1]".parse().unwrap();
    c.bench_function("predictive_probability", |b| b.iter(|| black_box(s.predictive_probability(&set))));
    let p = MeasureRepr::predictive(&s);
    let e = MeasureRepr::empirical(&s).unwrap();
    c.bench_function("total_variation", |b| b.iter(|| black_box(total_variation(&p, &e).unwrap())));
}

criterion_group!(benches, step, measures);
criterion_main!(benches);
