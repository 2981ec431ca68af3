use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use emfsim::engine::{preset, run_campaign, SimulationSettings};

/// Same 16-trial campaign through the sequential path (`parallelism = 1`)
/// and the data-parallel path (`parallelism = 0`, all cores). The two must
/// produce identical output; this measures what the parallel split costs
/// or buys on the current machine.
fn campaign(c: &mut Criterion) {
    let profiles = vec![preset("5G").unwrap()];
    let settings = SimulationSettings {
        window_m: (1500.0, 1500.0),
        ue_count: 4,
        ..SimulationSettings::default()
    };
    let mut group = c.benchmark_group("campaign/16-trials");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_campaign(&profiles, &settings, 16, 7, 1).unwrap()))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_campaign(&profiles, &settings, 16, 7, 0).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, campaign);
criterion_main!(benches);
