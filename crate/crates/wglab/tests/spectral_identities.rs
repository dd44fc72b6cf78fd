//! Transform-layer oracle suite: Plancherel, inversion, linearity, the
//! closed-form Gaussian pair, measure weighting across torus rescaling, and
//! the convolution dual route.

use num_complex::Complex64;
use rand::Rng;
use wglab::field::{Domain, SpectralField};
use wglab::geometry::Geometry;
use wglab::rng::stream_rng;

const TAU: f64 = std::f64::consts::TAU;

/// Random field band-limited to a fraction of Nyquist per axis.
fn random_band_field(geometry: &Geometry, rng: &mut impl Rng) -> SpectralField {
    let limits: Vec<f64> = (0..geometry.dims()).map(|a| 0.4 * geometry.nyquist(a)).collect();
    let mut values = vec![Complex64::default(); geometry.total_points()];
    geometry.for_each_freq(|flat, xi| {
        let inside = xi.iter().zip(&limits).all(|(x, l)| x.abs() <= *l);
        if inside {
            values[flat] = Complex64::new(1.0, 0.0); // placeholder, filled below
        }
    });
    for v in values.iter_mut() {
        if v.re != 0.0 {
            *v = Complex64::from_polar(rng.gen_range(0.0..1.0f64), rng.gen_range(0.0..TAU));
        }
    }
    SpectralField::new(geometry.clone(), Domain::Frequency, values).unwrap()
}

fn test_geometries() -> Vec<Geometry> {
    vec![
        Geometry::new(1, 1, 2.0, 8.0, vec![32, 16]).unwrap(),
        Geometry::new(2, 1, 4.0, 4.0, vec![16, 16, 32]).unwrap(),
        Geometry::new(0, 1, 3.0, 1.0, vec![64]).unwrap(),
        Geometry::new(1, 0, 1.0, 24.0, vec![128]).unwrap(),
    ]
}

#[test]
fn plancherel_randomized_batch() {
    let geoms = test_geometries();
    let mut worst: f64 = 0.0;
    for (gi, g) in geoms.iter().enumerate() {
        let mut rng = stream_rng(101, &[gi as u64]);
        for _ in 0..250 {
            let hat = random_band_field(g, &mut rng);
            let phys = hat.inverse_transform().unwrap();
            let (a, b) = (phys.l2_norm(), hat.l2_norm());
            if b > 0.0 {
                worst = worst.max((a - b).abs() / b);
            }
        }
    }
    assert!(worst <= 1e-10, "worst Plancherel defect {worst}");
}

#[test]
fn inversion_round_trip_randomized() {
    let geoms = test_geometries();
    let mut worst: f64 = 0.0;
    for (gi, g) in geoms.iter().enumerate() {
        let mut rng = stream_rng(102, &[gi as u64]);
        for _ in 0..50 {
            let hat = random_band_field(g, &mut rng);
            let phys = hat.inverse_transform().unwrap();
            let back = phys.forward_transform().unwrap();
            let diff = back
                .linear_combination(Complex64::new(1.0, 0.0), &hat, Complex64::new(-1.0, 0.0))
                .unwrap();
            let scale = hat.l2_norm();
            if scale > 0.0 {
                worst = worst.max(diff.l2_norm() / scale);
            }
        }
    }
    assert!(worst <= 1e-12, "worst round-trip defect {worst}");
}

#[test]
fn transform_linearity() {
    let g = Geometry::new(1, 1, 2.0, 8.0, vec![32, 16]).unwrap();
    let mut rng = stream_rng(103, &[0]);
    for _ in 0..50 {
        let fh = random_band_field(&g, &mut rng);
        let gh = random_band_field(&g, &mut rng);
        let f = fh.inverse_transform().unwrap();
        let gg = gh.inverse_transform().unwrap();
        let a = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo = f.linear_combination(a, &gg, b).unwrap().forward_transform().unwrap();
        let expect = fh.linear_combination(a, &gh, b).unwrap();
        let diff = combo
            .linear_combination(Complex64::new(1.0, 0.0), &expect, Complex64::new(-1.0, 0.0))
            .unwrap();
        let scale = expect.l2_norm().max(1e-300);
        assert!(diff.l2_norm() / scale <= 1e-12);
    }
}

/// Wrapped (periodized) coordinate distance to the origin.
fn wrapped(x: f64, circ: f64) -> f64 {
    x - circ * (x / circ).round()
}

#[test]
fn gaussian_transform_pair() {
    // e^{-pi x^2} on a long box transforms to e^{-pi xi^2} pointwise
    let l = 32.0;
    let g = Geometry::new(1, 0, 1.0, l, vec![256]).unwrap();
    let f = SpectralField::from_phys_fn(g.clone(), |z| {
        let x = wrapped(z[0], l);
        Complex64::new((-std::f64::consts::PI * x * x).exp(), 0.0)
    });
    let hat = f.forward_transform().unwrap();
    let mut worst: f64 = 0.0;
    g.for_each_freq(|flat, xi| {
        let expect = (-std::f64::consts::PI * xi[0] * xi[0]).exp();
        worst = worst.max((hat.values()[flat].re - expect).abs().max(hat.values()[flat].im.abs()));
    });
    assert!(worst <= 1e-8, "worst pointwise Gaussian-pair defect {worst}");
}

#[test]
fn measure_weight_compensates_rescaling() {
    // doubling lambda (denser frequency lattice) leaves Plancherel intact,
    // so the frequency norm of the same physical profile is unchanged
    let profile = |z: &[f64], circ: f64| -> Complex64 {
        let x = wrapped(z[0], circ);
        let env = (-x * x).exp();
        Complex64::new(env, 0.3 * env * (x * 0.7).sin())
    };
    let mut norms = vec![];
    for lambda in [8.0f64, 16.0, 32.0] {
        let g = Geometry::torus(1, lambda, vec![256]).unwrap();
        let f = SpectralField::from_phys_fn(g, |z| profile(z, lambda));
        let hat = f.forward_transform().unwrap();
        assert!((hat.l2_norm() - f.l2_norm()).abs() <= 1e-10 * f.l2_norm());
        norms.push(hat.l2_norm());
    }
    // the profile decays within every box, so the physical norms (hence the
    // weighted frequency norms) agree across lambda
    for w in norms.windows(2) {
        assert!((w[0] - w[1]).abs() <= 1e-6 * w[0]);
    }
}

#[test]
fn convolution_dual_route() {
    let g = Geometry::new(1, 1, 2.0, 4.0, vec![16, 8]).unwrap();
    let mut rng = stream_rng(104, &[0]);
    for _ in 0..10 {
        let fh = random_band_field(&g, &mut rng);
        let gh = random_band_field(&g, &mut rng);
        let fast = fh.frequency_convolve(&gh).unwrap();
        let slow = fh.frequency_convolve_direct(&gh).unwrap();
        let diff = fast
            .linear_combination(Complex64::new(1.0, 0.0), &slow, Complex64::new(-1.0, 0.0))
            .unwrap();
        let scale = slow.l2_norm().max(1e-300);
        assert!(diff.l2_norm() / scale <= 1e-10, "dual-route defect {}", diff.l2_norm() / scale);
    }
}
