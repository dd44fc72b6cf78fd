//! Scratch probe for the NLS solver: plane-wave order, drift vs dt, and a
//! small increment ladder.

use std::time::Instant;

use num_complex::Complex64;
use wglab::field::SpectralField;
use wglab::geometry::Geometry;
use wglab::imethod::*;

fn plane_wave_error(dt: f64) -> f64 {
    // exact: u = c e^{2 pi i k0 y/lambda} e^{-i(4 pi^2 k0^2/lambda^2 + |c|^2) t}
    let lambda = 2.0;
    let g = Geometry::torus(1, lambda, vec![32]).unwrap();
    let c = Complex64::new(0.9, -0.2);
    let k0 = 2i64;
    let u0 = SpectralField::single_mode(g.clone(), &[k0], c).unwrap().to_physical().unwrap();
    let t_end = 0.5;
    let run = NlsRun { geometry: g, k: 1, nonlinearity: 1.0, dt, t_end, sample_every: usize::MAX };
    let trace = split_step_evolve_capture(&run, &u0);
    let (final_values, _) = trace;
    let pi = std::f64::consts::PI;
    let omega = (2.0 * pi * k0 as f64 / lambda).powi(2) + c.norm_sqr();
    let phase = Complex64::from_polar(1.0, -omega * t_end);
    let mut worst = 0.0f64;
    let spacing = lambda / 32.0;
    for (i, v) in final_values.iter().enumerate() {
        let y = i as f64 * spacing;
        let exact = c * Complex64::from_polar(1.0, 2.0 * pi * k0 as f64 * y / lambda) * phase;
        worst = worst.max((v - exact).norm());
    }
    worst
}

// evolve and return final physical values (probe-only helper)
fn split_step_evolve_capture(run: &NlsRun, u0: &SpectralField) -> (Vec<Complex64>, EnergyTrace) {
    let trace = split_step_evolve(run, u0, None).unwrap();
    // recover final state by evolving again is wasteful; instead replicate:
    // for the probe just evolve with sample at end only and reconstruct from
    // a second run that returns the trace -- the solver doesn't expose the
    // state, so do the error estimate through a dedicated evolve below.
    (final_state(run, u0), trace)
}

fn final_state(run: &NlsRun, u0: &SpectralField) -> Vec<Complex64> {
    // mirror of the solver loop for probing (kept in sync manually)
    use rustfft::FftDirection;
    let g = &run.geometry;
    let steps = (run.t_end / run.dt).round().max(1.0) as usize;
    let dt = run.t_end / steps as f64;
    let mut phase = vec![Complex64::default(); g.total_points()];
    let pi = std::f64::consts::PI;
    g.for_each_freq(|flat, xi| {
        let q: f64 = xi.iter().map(|x| x * x).sum();
        phase[flat] = Complex64::from_polar(1.0, -4.0 * pi * pi * q * dt);
    });
    let mut values = u0.to_physical().unwrap().values().to_vec();
    let half = 0.5 * run.nonlinearity * dt;
    let inv = 1.0 / g.total_points() as f64;
    for _ in 0..steps {
        for v in values.iter_mut() {
            *v *= Complex64::from_polar(1.0, -half * v.norm_sqr());
        }
        wglab::fourier::fft_nd(&mut values, g.grid_points(), FftDirection::Forward, wglab::par::ExecMode::Sequential);
        for (v, p) in values.iter_mut().zip(&phase) {
            *v *= p * inv;
        }
        wglab::fourier::fft_nd(&mut values, g.grid_points(), FftDirection::Inverse, wglab::par::ExecMode::Sequential);
        for v in values.iter_mut() {
            *v *= Complex64::from_polar(1.0, -half * v.norm_sqr());
        }
    }
    values
}

fn main() {
    println!("--- plane-wave order");
    let mut prev = None;
    for dt in [4e-3, 2e-3, 1e-3] {
        let e = plane_wave_error(dt);
        let order = prev.map(|p: f64| (p / e).log2()).unwrap_or(0.0);
        println!("dt={dt:.1e}: err={e:.3e} order={order:.2}");
        prev = Some(e);
    }

    println!("--- gaussian-data drift vs dt (2-D small)");
    let g = Geometry::new(1, 1, 2.0, 4.0, vec![64, 32]).unwrap();
    let spec = IMultiplierSpec::new(2, 0.7).unwrap();
    let data = hs_data(&g, &spec, 5).unwrap().to_physical().unwrap();
    for dt in [2e-3, 1e-3, 5e-4] {
        let run = NlsRun {
            geometry: g.clone(),
            k: 1,
            nonlinearity: 1.0,
            dt,
            t_end: 1.0,
            sample_every: ((1.0 / dt) as usize / 8).max(1),
        };
        let t0 = Instant::now();
        let tr = split_step_evolve(&run, &data, Some(&spec)).unwrap();
        println!(
            "dt={dt:.1e}: mass_drift={:.3e} energy_drift={:.3e} mod_inc={:.5e} ({:.2?})",
            tr.mass_drift(),
            tr.energy_drift(),
            tr.modified_increment(),
            t0.elapsed()
        );
    }

    println!("--- increment ladder (small: N in 8..32, dt=5e-4)");
    let t0 = Instant::now();
    let report = increment_experiment(0.7, 3.0 / 7.0, 1, &[8, 16, 32], 5e-4, 1.0, 12345).unwrap();
    for row in &report.rows {
        println!(
            "N={:<3} lambda={:.3} grid={:?} mass={:.2e} energy={:.2e} increment={:.6e}",
            row.n, row.lambda, row.grid, row.mass_drift, row.energy_drift, row.increment
        );
    }
    println!("slope={:.3} max_resid={:.3} ({:.2?})", report.fit.slope, report.fit.max_residual, t0.elapsed());
}
