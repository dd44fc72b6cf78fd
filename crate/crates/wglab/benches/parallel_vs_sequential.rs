//! Parallel vs sequential throughput on the two batch-heavy kernels:
//! the sparse-mode bilinear sweep cell and the counting-oracle supremum
//! batch. Run with `cargo bench -p wglab`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wglab::counting::measure_c_sup;
use wglab::lp::DyadicBand;
use wglab::modes::{draw_band_modes, BilinearPairs, LatticeSpec};
use wglab::par::{map_indexed, ExecMode};
use wglab::rng::stream_rng;

fn sweep_cells(mode: ExecMode, cells: usize) -> f64 {
    let lattice = LatticeSpec::new(1, 1, 8.0, 32.0).unwrap();
    let band1 = DyadicBand::new(16).unwrap();
    let band2 = DyadicBand::new(4).unwrap();
    let out = map_indexed(mode, cells, |i| {
        let mut rng = stream_rng(42, &[i as u64]);
        let f = draw_band_modes(lattice, band1, 96, &mut rng).unwrap();
        let g = draw_band_modes(lattice, band2, 96, &mut rng).unwrap();
        BilinearPairs::build(&f, &g).unwrap().norm(0.0, 1.0)
    });
    out.iter().sum()
}

fn bench_bilinear_cells(c: &mut Criterion) {
    let mut group = c.benchmark_group("bilinear_sweep_cells");
    group.sample_size(10);
    for (name, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| sweep_cells(mode, 16));
        });
    }
    group.finish();
}

fn bench_measure_sup(c: &mut Criterion) {
    let mut group = c.benchmark_group("measure_sup_batch");
    group.sample_size(10);
    for (name, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| measure_c_sup(1, 1, 8.0, 32, 4, 1.0, 400, 7, mode).unwrap().sup);
        });
    }
    group.finish();
}

criterion_group!(benches, bench_bilinear_cells, bench_measure_sup);
criterion_main!(benches);
