//! dt-stability of the modified-energy increment at the top of the ladder.

use std::time::Instant;
use wglab::imethod::*;

fn main() {
    for (n, dt) in [(32u64, 1e-3f64), (32, 5e-4), (64, 1e-3), (64, 5e-4)] {
        let t0 = Instant::now();
        let spec = IMultiplierSpec::new(n, 0.7).unwrap();
        let (geometry, lambda) = increment_geometry(n, 3.0 / 7.0).unwrap();
        let data = hs_data(&geometry, &spec, 12345).unwrap().to_physical().unwrap();
        let run = NlsRun {
            geometry: geometry.clone(),
            k: 1,
            nonlinearity: 1.0,
            dt,
            t_end: 1.0,
            sample_every: ((1.0 / dt) as usize / 16).max(1),
        };
        let tr = split_step_evolve(&run, &data, Some(&spec)).unwrap();
        println!(
            "N={n} dt={dt:.1e} lambda={lambda:.3} grid={:?}: mass={:.2e} energy={:.2e} increment={:.6e} ({:.1?})",
            geometry.grid_points(),
            tr.mass_drift(),
            tr.energy_drift(),
            tr.modified_increment(),
            t0.elapsed()
        );
    }
}
