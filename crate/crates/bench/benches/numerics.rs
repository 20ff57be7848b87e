use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sfgsim::experiment::{build_kernel, decompose, RunConfig};
use sfgsim::sfg::{sfg_spectrum, TransferKernel};
use sfgsim::{apply_chirp, takagi_factorize, JointSpectralAmplitude};

fn config(overrides: &[&str]) -> RunConfig {
    let ov: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    RunConfig::from_toml_str(RunConfig::reference_text(), &ov).unwrap()
}

fn takagi(c: &mut Criterion) {
    let mut group = c.benchmark_group("takagi");
    group.sample_size(10);
    for n in [128, 256] {
        let cfg = config(&[&format!("grid.n_points={n}"), "grid.auto_refine=false"]);
        let jsa = JointSpectralAmplitude::build(
            *cfg.grid(),
            cfg.pump(),
            cfg.bbo(),
            cfg.bbo_length_m(),
            cfg.theta(),
        )
        .unwrap();
        group.bench_function(format!("jsa_{n}"), |b| {
            b.iter(|| takagi_factorize(black_box(jsa.values())).unwrap())
        });
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel");
    group.sample_size(10);
    let base = ["grid.n_points=128", "grid.auto_refine=false"];
    let gauss = config(&base);
    let plane = config(&[
        base[0],
        base[1],
        "sfg.kernel=\"plane_wave\"",
        "sfg.waist_um=",
    ]);
    group.bench_function("plane_wave_128", |b| {
        b.iter(|| TransferKernel::build(black_box(plane.setup()), plane.sum_grid()).unwrap())
    });
    group.bench_function("gaussian_128", |b| {
        b.iter(|| TransferKernel::build(black_box(gauss.setup()), gauss.sum_grid()).unwrap())
    });
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    let cfg = config(&["grid.n_points=256", "grid.auto_refine=false"]);
    let d = decompose(&cfg).unwrap();
    let chirped = apply_chirp(&d, cfg.gdd_fs2(), cfg.omega0());
    let kernel = build_kernel(&cfg).unwrap();
    group.bench_function("assemble_256", |b| {
        b.iter(|| sfg_spectrum(black_box(&chirped), &kernel).unwrap())
    });
    group.finish();
}

criterion_group!(benches, takagi, kernels, spectrum);
criterion_main!(benches);
