use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use kerrcat_core::analysis::scan_vacuum;
use kerrcat_core::fock::{fock_expansion, truncation_cutoff};
use kerrcat_core::kerr::{kerr_coefficients, kerr_state};
use kerrcat_core::phase_space::{wigner, GridSpec};
use kerrcat_core::scheme::{run_conditional, SchemeConfig, XmSelection};

fn bench_pipeline(c: &mut Criterion) {
    let config = SchemeConfig::new(7.23, 5, 3, 4).unwrap();

    c.bench_function("kerr_coefficients_n25", |b| {
        b.iter(|| kerr_coefficients(black_box(25)).unwrap())
    });

    c.bench_function("conditional_pipeline_n5", |b| {
        b.iter(|| run_conditional(black_box(&config), XmSelection::TrackPeak).unwrap())
    });

    c.bench_function("scan_vacuum_101_points", |b| {
        b.iter(|| scan_vacuum(black_box(&config), 7.0, 7.5, 101, XmSelection::TrackPeak).unwrap())
    });

    c.bench_function("fock_expansion_alpha_7_23", |b| {
        let state = kerr_state(7.23, 5).unwrap();
        let n_max = truncation_cutoff(state.max_abs_amplitude());
        b.iter(|| fock_expansion(black_box(&state), n_max).unwrap())
    });

    c.bench_function("wigner_128x128_conditioned", |b| {
        let res = run_conditional(&config, XmSelection::TrackPeak).unwrap();
        let spec = GridSpec::covering(&res.state4, 5.0, 128).unwrap();
        b.iter(|| wigner(black_box(&res.state4), &spec).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
