//! Extremizer suite: packet transport, ladder stability of the sharpness
//! ratios, the log-growth of the global-failure norm with its dual-route
//! check, and the dispersive decay anchor.

use wglab::extremizers::*;

#[test]
fn packet_peak_travels_at_group_velocity() {
    // the separated packet's envelope peak sits at x1 ~ 4 pi N1 t up to the
    // packet width O(1/N2); probed by direct mode summation
    let case = ExtremizerCase::new(ExtremizerFamily::RealSeparated, 4.0, 16, 4).unwrap();
    let (f, _) = build_pair(&case).unwrap();
    let axis = &f.axes()[0];
    // carrier center of the box [N1 + N2, N1 + 2 N2]
    let carrier = case.n1 as f64 + 1.5 * case.n2 as f64;
    let t = 0.02;
    let predicted = 4.0 * std::f64::consts::PI * carrier * t;
    let width = 1.0 / case.n2 as f64;
    let mut best_x = 0.0;
    let mut best = -1.0;
    let scan = 400;
    for i in 0..=scan {
        let x = predicted - 4.0 * width + 8.0 * width * i as f64 / scan as f64;
        let v = axis_modulus(axis, x, t);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    assert!(
        (best_x - predicted).abs() <= width,
        "peak at {best_x}, predicted {predicted}, width {width}"
    );
    // and the modulus there dominates a far-away sample
    let far = axis_modulus(axis, predicted + 30.0 * width, t);
    assert!(best > 5.0 * far, "peak {best} vs far field {far}");
}

#[test]
fn ladder_ratios_stable_torus_families() {
    for family in [ExtremizerFamily::Torus1d, ExtremizerFamily::TorusHighd] {
        let mut ratios = vec![];
        for case in standard_ladder(family).unwrap() {
            let rep = lower_bound_check(&case).unwrap();
            assert!(!rep.degenerate);
            assert!(rep.ratio > 0.0);
            ratios.push(rep.ratio);
        }
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().cloned().fold(0.0f64, f64::max);
        assert!(min / max >= 1.0 / 32.0, "{family:?}: ratios {ratios:?}");
    }
}

#[test]
fn ladder_ratios_stable_real_separated_prefix() {
    // first three rungs here; the full ladder runs in the acceptance suite
    let mut ratios = vec![];
    for case in standard_ladder(ExtremizerFamily::RealSeparated).unwrap().into_iter().take(3) {
        let rep = lower_bound_check(&case).unwrap();
        ratios.push(rep.ratio);
    }
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    assert!(min / max >= 1.0 / 32.0, "ratios {ratios:?}");
}

#[test]
fn growth_is_logarithmic_and_matches_prediction() {
    let profile = DispersiveProfile::gaussian_lowpass();
    let table = global_failure_growth(&profile, 4.0, &[10.0, 100.0, 1000.0]).unwrap();
    // strictly increasing in T
    for w in table.rows.windows(2) {
        assert!(w[1].l4_fourth > w[0].l4_fourth);
    }
    assert!(table.fit.slope > 0.0);
    // stationary-phase oracle: b = |phi_hat|_4^4 / (4 pi)
    assert!(
        (table.fit.slope - table.predicted_slope).abs() <= 0.05 * table.predicted_slope,
        "slope {} vs predicted {}",
        table.fit.slope,
        table.predicted_slope
    );
    // decade increments approximately constant
    let d1 = table.rows[1].l4_fourth - table.rows[0].l4_fourth;
    let d2 = table.rows[2].l4_fourth - table.rows[1].l4_fourth;
    assert!((d1 - d2).abs() <= 0.1 * d1.max(d2));
}

#[test]
fn control_case_equal_scales_shows_same_growth() {
    // N1 = N2: the construction collapses to the same Euclidean profile, so
    // the growth law is identical (failure is not about separation)
    let profile = DispersiveProfile::gaussian_lowpass();
    let a = global_failure_growth(&profile, 4.0, &[10.0, 100.0]).unwrap();
    let case_sep = ExtremizerCase::new(ExtremizerFamily::GlobalFailure, 4.0, 16, 4).unwrap();
    let case_eq = ExtremizerCase::new(ExtremizerFamily::GlobalFailure, 4.0, 4, 4).unwrap();
    let sep = global_failure_lhs_lattice(&case_sep, 2.0).unwrap();
    let eq = global_failure_lhs_lattice(&case_eq, 2.0).unwrap();
    assert!((sep - eq).abs() <= 1e-9 * sep, "separated {sep} vs equal {eq}");
    assert!(a.fit.slope > 0.0);
}

#[test]
fn lattice_route_matches_continuum_route() {
    let profile = DispersiveProfile::gaussian_lowpass();
    let case = ExtremizerCase::new(ExtremizerFamily::GlobalFailure, 4.0, 16, 4).unwrap();
    let lattice = global_failure_lhs_lattice(&case, 3.0).unwrap();
    let table = global_failure_growth(&profile, 4.0, &[3.0, 6.0]).unwrap();
    let continuum = table.rows[0].bilinear_lhs;
    assert!(
        (lattice - continuum).abs() <= 2e-3 * continuum,
        "lattice {lattice} vs continuum {continuum}"
    );
}

#[test]
fn wraparound_guard_fires() {
    let case = ExtremizerCase::new(ExtremizerFamily::GlobalFailure, 4.0, 16, 4).unwrap();
    let horizon = case.box_length; // travel 4 pi T far exceeds the box
    let err = global_failure_lhs_lattice(&case, horizon).unwrap_err();
    assert!(err.to_string().contains("wraparound"), "unexpected error: {err}");
}

#[test]
fn decay_profile_anchored_and_stable() {
    let profile = DispersiveProfile::gaussian_lowpass();
    let decay = decay_profile(&profile, &[10.0, 100.0, 1000.0, 10000.0]).unwrap();
    assert!(!decay.degenerate);
    let anchor = decay.anchor;
    assert!(anchor > 0.0);
    for row in &decay.rows {
        let r = row.scaled_min_modulus / anchor;
        assert!((0.25..=4.0).contains(&r), "t={}: drift {r}", row.t);
    }
    // degenerate profile flagged, rows identically zero
    let zero = decay_profile(&DispersiveProfile::zero(), &[10.0, 100.0]).unwrap();
    assert!(zero.degenerate);
    assert!(zero.rows.iter().all(|r| r.scaled_min_modulus == 0.0));
}
