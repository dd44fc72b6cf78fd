//! Scratch probe for ladder ratios and timings (not part of the test suite).

use std::time::Instant;

use wglab::extremizers::*;

fn main() {
    for family in [
        ExtremizerFamily::Torus1d,
        ExtremizerFamily::TorusHighd,
        ExtremizerFamily::RealSeparated,
    ] {
        println!("--- {family:?}");
        for case in standard_ladder(family).unwrap() {
            let t0 = Instant::now();
            let rep = lower_bound_check(&case).unwrap();
            println!(
                "lambda={:<5} n1={:<3} n2={:<2} L={:<8.1} T={:<9.5} steps={:<6} lhs={:.5e} K={:.4} ratio={:.5} ({:.2?})",
                case.lambda,
                case.n1,
                case.n2,
                case.box_length,
                case.t_horizon,
                rep.steps,
                rep.lhs,
                rep.k_pred,
                rep.ratio,
                t0.elapsed()
            );
        }
    }

    println!("--- global failure growth");
    let t0 = Instant::now();
    let profile = DispersiveProfile::gaussian_lowpass();
    println!("profile built in {:.2?}; l2={:.6}, l4hat4={:.6}, predicted slope={:.6}",
        t0.elapsed(), profile.l2, profile.l4_hat_fourth, profile.predicted_log_slope());
    let t0 = Instant::now();
    let table = global_failure_growth(&profile, 4.0, &[10.0, 100.0, 1000.0, 10000.0]).unwrap();
    for row in &table.rows {
        println!("T={:<8} F(T)={:.6} lhs={:.6e}", row.t_horizon, row.l4_fourth, row.bilinear_lhs);
    }
    println!(
        "fit: a={:.4} b={:.4} max_resid={:.4} pred_b={:.4} ({:.2?})",
        table.fit.intercept,
        table.fit.slope,
        table.fit.max_residual,
        table.predicted_slope,
        t0.elapsed()
    );

    let t0 = Instant::now();
    let decay = decay_profile(&profile, &[10.0, 100.0, 1000.0, 10000.0]).unwrap();
    for row in &decay.rows {
        println!("t={:<8} sqrt(t)*min|u| = {:.6}", row.t, row.scaled_min_modulus);
    }
    println!("anchor={:.6} ({:.2?})", decay.anchor, t0.elapsed());

    // lattice cross-check of the global-failure reduction at small T
    let case = ExtremizerCase::new(ExtremizerFamily::GlobalFailure, 4.0, 16, 4).unwrap();
    let t0 = Instant::now();
    let lattice = global_failure_lhs_lattice(&case, 3.0).unwrap();
    let continuum = {
        let t = global_failure_growth(&profile, 4.0, &[3.0_f64.max(1.5), 6.0]).unwrap();
        t.rows[0].bilinear_lhs
    };
    println!("lattice lhs(3) = {lattice:.6e} vs continuum {continuum:.6e} ({:.2?})", t0.elapsed());
}
