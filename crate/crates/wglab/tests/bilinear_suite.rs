//! Bilinear-norm oracle suite: symmetry, data scaling, quadrature
//! convergence, the dense-trapezoid vs sparse-exact dual route, and the
//! consistency of the `L^4` norm with the diagonal product.

use num_complex::Complex64;
use wglab::bilinear::{spacetime_l2_product, strichartz_l4, TimeWindow};
use wglab::field::SpectralField;
use wglab::geometry::Geometry;
use wglab::lp::{project_band, DyadicBand};
use wglab::modes::{draw_band_modes, BilinearPairs, LatticeSpec};
use wglab::rng::stream_rng;

fn sparse_pair(
    lattice: LatticeSpec,
    n1: u64,
    n2: u64,
    seed: u64,
) -> (wglab::modes::ModeField, wglab::modes::ModeField) {
    let mut rng = stream_rng(seed, &[n1, n2]);
    let f = draw_band_modes(lattice, DyadicBand::new(n1).unwrap(), 48, &mut rng).unwrap();
    let g = draw_band_modes(lattice, DyadicBand::new(n2).unwrap(), 48, &mut rng).unwrap();
    (f, g)
}

#[test]
fn symmetry_and_scaling() {
    let lattice = LatticeSpec::new(1, 1, 2.0, 8.0).unwrap();
    let (f, g) = sparse_pair(lattice, 4, 2, 31);
    let pairs_fg = BilinearPairs::build(&f, &g).unwrap();
    let pairs_gf = BilinearPairs::build(&g, &f).unwrap();
    let a = pairs_fg.norm(0.0, 1.0);
    let b = pairs_gf.norm(0.0, 1.0);
    assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "symmetry defect: {a} vs {b}");

    // scaling: amplifying f by c scales the norm by |c|
    let scaled = wglab::modes::ModeField::from_modes(
        lattice,
        f.modes()
            .iter()
            .map(|m| wglab::modes::Mode {
                numerators: m.numerators.clone(),
                amplitude: m.amplitude * Complex64::new(0.0, -2.5),
            })
            .collect(),
    )
    .unwrap();
    let c = BilinearPairs::build(&scaled, &g).unwrap().norm(0.0, 1.0);
    assert!((c - 2.5 * a).abs() <= 1e-10 * c.max(1e-300));
}

#[test]
fn dense_trapezoid_matches_sparse_exact() {
    // the dual route: dense fields + trapezoid quadrature against the
    // bucketed closed-form time integral, on a small instance of each shape
    for (m, n, lambda, boxl, grid, n1, n2) in [
        (1usize, 1usize, 2.0f64, 4.0f64, vec![64usize, 32], 2u64, 1u64),
        (0, 1, 4.0, 1.0, vec![64], 2, 2),
    ] {
        let geometry = Geometry::new(m, n, lambda, boxl, grid).unwrap();
        let lattice = LatticeSpec::new(m, n, lambda, boxl).unwrap();
        let mut rng = stream_rng(77, &[m as u64, n as u64]);
        let raw_f = draw_band_modes(lattice, DyadicBand::new(n1).unwrap(), 24, &mut rng).unwrap();
        let raw_g = draw_band_modes(lattice, DyadicBand::new(n2).unwrap(), 24, &mut rng).unwrap();

        // sparse path applies the band multiplier explicitly
        let pf = raw_f.apply_band(DyadicBand::new(n1).unwrap());
        let pg = raw_g.apply_band(DyadicBand::new(n2).unwrap());
        let exact = BilinearPairs::build(&pf, &pg).unwrap().norm(0.0, 1.0);

        // dense path projects internally
        let df = raw_f.to_dense(geometry.clone()).unwrap();
        let dg = raw_g.to_dense(geometry).unwrap();
        let steps = wglab::bilinear::recommended_steps(n1 as f64, 1.0).max(512);
        let window = TimeWindow::new(0.0, 1.0, steps).unwrap();
        let dense = spacetime_l2_product(
            &df,
            &dg,
            DyadicBand::new(n1).unwrap(),
            DyadicBand::new(n2).unwrap(),
            window,
        )
        .unwrap();
        assert!(
            (dense - exact).abs() <= 2e-4 * exact.max(1e-300),
            "(m,n)=({m},{n}): dense={dense}, exact={exact}"
        );
    }
}

#[test]
fn quadrature_convergence_under_step_doubling() {
    let geometry = Geometry::new(1, 1, 2.0, 4.0, vec![64, 32]).unwrap();
    let lattice = LatticeSpec::new(1, 1, 2.0, 4.0).unwrap();
    let mut rng = stream_rng(78, &[0]);
    let f = draw_band_modes(lattice, DyadicBand::new(2).unwrap(), 24, &mut rng)
        .unwrap()
        .to_dense(geometry.clone())
        .unwrap();
    let g = draw_band_modes(lattice, DyadicBand::new(1).unwrap(), 24, &mut rng)
        .unwrap()
        .to_dense(geometry)
        .unwrap();
    let band1 = DyadicBand::new(2).unwrap();
    let band2 = DyadicBand::new(1).unwrap();
    let steps = wglab::bilinear::recommended_steps(2.0, 1.0);
    let coarse = spacetime_l2_product(&f, &g, band1, band2, TimeWindow::new(0.0, 1.0, steps).unwrap())
        .unwrap();
    let fine =
        spacetime_l2_product(&f, &g, band1, band2, TimeWindow::new(0.0, 1.0, 2 * steps).unwrap())
            .unwrap();
    assert!((coarse - fine).abs() <= 0.01 * fine.max(1e-300), "coarse={coarse}, fine={fine}");
}

#[test]
fn strichartz_consistent_with_diagonal_product() {
    // for f = g band-limited where the band multiplier is exactly one,
    // strichartz_l4^2 equals the bilinear diagonal
    let geometry = Geometry::new(1, 1, 2.0, 4.0, vec![64, 64]).unwrap();
    let n = 2u64;
    // support where eta(xi/N) - eta(2 xi/N) = 1: some axis exactly at N
    let lattice = LatticeSpec::new(1, 1, 2.0, 4.0).unwrap();
    let mods: [(i64, i64); 3] = [(8, 2), (8, -4), (4, 4)]; // (xi1*L, xi2*lambda): xi in {(2,1),(2,-2),(1,2)}
    let raw: Vec<wglab::modes::Mode> = mods
        .iter()
        .enumerate()
        .map(|(i, nums)| wglab::modes::Mode {
            numerators: vec![nums.0, nums.1],
            amplitude: Complex64::from_polar(1.0 + i as f64 * 0.3, i as f64),
        })
        .collect();
    let field = wglab::modes::ModeField::from_modes(lattice, raw)
        .unwrap()
        .to_dense(geometry)
        .unwrap();
    let proj = project_band(&field, DyadicBand::new(n).unwrap()).unwrap();
    let d = proj
        .linear_combination(Complex64::new(1.0, 0.0), &field, Complex64::new(-1.0, 0.0))
        .unwrap();
    assert!(d.l2_norm() <= 1e-13, "support leaves the flat part of the band multiplier");

    let window = TimeWindow::new(0.0, 0.5, 4096).unwrap();
    let l4 = strichartz_l4(&field, window).unwrap();
    let band = DyadicBand::new(n).unwrap();
    let diag = spacetime_l2_product(&field, &field, band, band, window).unwrap();
    assert!((l4 * l4 - diag).abs() <= 1e-6 * diag, "l4^2={} vs diag={diag}", l4 * l4);
}

#[test]
fn low_frequency_l4_grows_logarithmically() {
    // fourth power of the L^4 norm of a low-frequency packet on a long box
    // grows affinely in log T (the finite-horizon shadow of the global
    // failure); checked here at small horizons through the dense route
    let l = 512.0;
    let geometry = Geometry::new(1, 0, 1.0, l, vec![4096]).unwrap();
    let pi = std::f64::consts::PI;
    let f = SpectralField::from_freq_fn(geometry, |xi| {
        let x = xi[0];
        if x.abs() <= 1.0 {
            Complex64::new((-pi * pi * x * x).exp(), 0.0)
        } else {
            Complex64::default()
        }
    });
    let mut fourths = vec![];
    let horizons = [2.0f64, 4.0, 8.0];
    for &t in &horizons {
        let w = TimeWindow::new(0.0, t, (256.0 * t) as usize).unwrap();
        fourths.push(strichartz_l4(&f, w).unwrap().powi(4));
    }
    // increments between doublings stay within a factor two of each other
    let d1 = fourths[1] - fourths[0];
    let d2 = fourths[2] - fourths[1];
    assert!(d1 > 0.0 && d2 > 0.0);
    assert!(d2 / d1 > 0.5 && d2 / d1 < 2.0, "increment ratio {}", d2 / d1);
}
