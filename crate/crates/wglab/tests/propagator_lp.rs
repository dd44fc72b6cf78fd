//! Propagator and Littlewood-Paley oracle suite: unitarity, the group law,
//! multiplier commutation, dyadic telescoping, band disjointness, and the
//! closed-form Gaussian evolution.

use num_complex::Complex64;
use rand::Rng;
use wglab::field::{Domain, SpectralField};
use wglab::geometry::Geometry;
use wglab::lp::{project_band, project_leq, DyadicBand};
use wglab::propagator::propagate;
use wglab::rng::stream_rng;

fn random_band_field(geometry: &Geometry, rng: &mut impl Rng) -> SpectralField {
    let limits: Vec<f64> = (0..geometry.dims()).map(|a| 0.4 * geometry.nyquist(a)).collect();
    let mut values = vec![Complex64::default(); geometry.total_points()];
    geometry.for_each_freq(|flat, xi| {
        if xi.iter().zip(&limits).all(|(x, l)| x.abs() <= *l) {
            values[flat] = Complex64::new(1.0, 0.0);
        }
    });
    for v in values.iter_mut() {
        if v.re != 0.0 {
            *v = Complex64::from_polar(
                rng.gen_range(0.0..1.0f64),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
        }
    }
    SpectralField::new(geometry.clone(), Domain::Frequency, values).unwrap()
}

fn diff_norm(a: &SpectralField, b: &SpectralField) -> f64 {
    a.linear_combination(Complex64::new(1.0, 0.0), b, Complex64::new(-1.0, 0.0))
        .unwrap()
        .l2_norm()
}

#[test]
fn unitarity_randomized() {
    let g = Geometry::new(1, 1, 2.0, 8.0, vec![32, 16]).unwrap();
    let mut rng = stream_rng(201, &[0]);
    for _ in 0..100 {
        let f = random_band_field(&g, &mut rng);
        let t = rng.gen_range(-5.0..5.0);
        let u = propagate(&f, t).unwrap();
        let r = u.l2_norm() / f.l2_norm().max(1e-300);
        assert!((r - 1.0).abs() <= 1e-12, "unitarity defect {}", (r - 1.0).abs());
    }
}

#[test]
fn group_law() {
    let g = Geometry::new(1, 1, 2.0, 8.0, vec![32, 16]).unwrap();
    let mut rng = stream_rng(202, &[0]);
    for _ in 0..25 {
        let f = random_band_field(&g, &mut rng);
        let (t, s) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let two_step = propagate(&propagate(&f, s).unwrap(), t).unwrap();
        let one_step = propagate(&f, t + s).unwrap();
        assert!(diff_norm(&two_step, &one_step) <= 1e-10 * f.l2_norm());
    }
}

#[test]
fn propagator_commutes_with_projections() {
    let g = Geometry::new(1, 1, 2.0, 8.0, vec![64, 32]).unwrap();
    let mut rng = stream_rng(203, &[0]);
    let band = DyadicBand::new(2).unwrap();
    for _ in 0..10 {
        let f = random_band_field(&g, &mut rng);
        let t = rng.gen_range(-1.0..1.0);
        let a = propagate(&project_band(&f, band).unwrap(), t).unwrap();
        let b = project_band(&propagate(&f, t).unwrap(), band).unwrap();
        assert!(diff_norm(&a, &b) <= 1e-13 * f.l2_norm().max(1e-300));
    }
}

#[test]
fn lp_telescoping_identities() {
    let g = Geometry::new(1, 1, 2.0, 4.0, vec![64, 64]).unwrap();
    let mut rng = stream_rng(204, &[0]);
    let n_max = 4u64; // grid Nyquist is 8, so P_{<=4} needs support to 8
    for _ in 0..20 {
        let f = random_band_field(&g, &mut rng);
        // P_{<=1} f + sum_{1 < M <= Nmax} P_M f = P_{<=Nmax} f
        let mut acc = project_leq(&f, DyadicBand::new(1).unwrap()).unwrap();
        let mut m = 2u64;
        while m <= n_max {
            let pm = project_band(&f, DyadicBand::new(m).unwrap()).unwrap();
            acc = acc
                .linear_combination(Complex64::new(1.0, 0.0), &pm, Complex64::new(1.0, 0.0))
                .unwrap();
            m *= 2;
        }
        let direct = project_leq(&f, DyadicBand::new(n_max).unwrap()).unwrap();
        assert!(
            diff_norm(&acc, &direct) <= 1e-12 * f.l2_norm().max(1e-300),
            "telescoping defect"
        );
    }
}

#[test]
fn band_disjointness_orthogonal() {
    // <P_{N1} f, P_{N2} f> = 0 once N1 >= 4 N2: cutoff supports are disjoint
    let g = Geometry::new(1, 1, 1.0, 2.0, vec![128, 64]).unwrap();
    let mut rng = stream_rng(205, &[0]);
    for _ in 0..10 {
        let f = random_band_field(&g, &mut rng);
        let hi = project_band(&f, DyadicBand::new(8).unwrap()).unwrap();
        let lo = project_band(&f, DyadicBand::new(2).unwrap()).unwrap();
        let ip = hi.inner(&lo).unwrap();
        assert!(ip.norm() <= 1e-13 * f.l2_norm().powi(2).max(1e-300));
    }
}

#[test]
fn gaussian_free_evolution_closed_form() {
    // e^{-pi x^2} evolves to (1 + 4 pi i t)^{-1/2} e^{-pi x^2 / (1 + 4 pi i t)}
    let l = 2048.0;
    let g = Geometry::new(1, 0, 1.0, l, vec![16384]).unwrap();
    let pi = std::f64::consts::PI;
    let f = SpectralField::from_phys_fn(g.clone(), |z| {
        let x = z[0] - l * (z[0] / l).round();
        Complex64::new((-pi * x * x).exp(), 0.0)
    });
    for &t in &[0.1f64, 1.0] {
        let evolved = propagate(&f, t).unwrap();
        let denom = Complex64::new(1.0, 4.0 * pi * t);
        let pref = 1.0 / denom.sqrt();
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        let spacing = g.grid_spacing(0);
        for (i, v) in evolved.values().iter().enumerate() {
            let x = i as f64 * spacing;
            let xw = x - l * (x / l).round();
            let exact = pref * (Complex64::new(-pi * xw * xw, 0.0) / denom).exp();
            worst = worst.max((v - exact).norm());
            peak = peak.max(exact.norm());
        }
        assert!(worst <= 1e-8 * peak, "t={t}: worst {worst} vs peak {peak}");
    }
}
