//! Space-time norm quadrature for products of two free evolutions, the
//! `L^4` Strichartz norm, and the predicted constants `K(lambda, N1, N2)`.
//!
//! The dense path below integrates with a composite trapezoid rule in time
//! and exact lattice sums in space (grids must be wide enough that the
//! quartic product is alias-free; violations are reported per direction).
//! Large sweeps use the sparse-mode evaluator in [`crate::modes`], which is
//! cross-checked against this path at small sizes.

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::LabError;
use crate::field::SpectralField;
use crate::fourier::fft_nd;
use crate::lp::{project_band, DyadicBand};
use crate::par::ExecMode;
use crate::propagator::phase_angle;
use crate::Result;

/// Integration window `[t_start, t_end]` sampled with `steps` trapezoid
/// panels.
#[derive(Debug, Clone, Copy)]
pub struct TimeWindow {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeWindow {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end > t_start) {
            return Err(LabError::Precondition(format!(
                "time window must have t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        if steps < 16 {
            return Err(LabError::Precondition(format!("need at least 16 steps, got {steps}")));
        }
        Ok(Self { t_start, t_end, steps })
    }

    pub fn span(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Phase-resolution heuristic for trapezoid sampling of band-limited
/// integrands: `64 * N1^2 * T`, clamped to a practical range.
pub fn recommended_steps(n1: f64, t_span: f64) -> usize {
    let raw = 64.0 * n1 * n1 * t_span;
    (raw.ceil() as usize).clamp(16, 1 << 22)
}

/// One sweep sample.
#[derive(Debug, Clone)]
pub struct EstimateRecord {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub box_length: f64,
    pub n1: u64,
    pub n2: u64,
    pub t_horizon: f64,
    pub steps: usize,
    pub lhs: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub k_pred: f64,
}

impl EstimateRecord {
    /// `lhs / (K^{1/2} |f| |g|)`; NaN when degenerate.
    pub fn ratio(&self) -> f64 {
        self.lhs / (self.k_pred.sqrt() * self.norm_f * self.norm_g)
    }
}

/// The predicted constant of the bilinear estimate:
/// `1/lambda + N2/N1` for `m = n = 1`, and
/// `N2^{d-3}/lambda + N2^{d-1}/N1` for `m >= 2, n >= 1` (`d = m + n`).
/// Other `(m, n)` are outside the proved range.
pub fn predicted_constant(m: usize, n: usize, lambda: f64, n1: u64, n2: u64) -> Result<f64> {
    if n1 < n2 || n2 < 1 {
        return Err(LabError::Precondition(format!(
            "need N1 >= N2 >= 1, got N1={n1}, N2={n2}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(LabError::Precondition(format!("lambda must be positive, got {lambda}")));
    }
    let (n1, n2) = (n1 as f64, n2 as f64);
    match (m, n) {
        (1, 1) => Ok(1.0 / lambda + n2 / n1),
        (m, n) if m >= 2 && n >= 1 => {
            let d = (m + n) as i32;
            Ok(n2.powi(d - 3) / lambda + n2.powi(d - 1) / n1)
        }
        _ => Err(LabError::UnsupportedRegime(format!(
            "K(lambda, N1, N2) is only established for (m, n) = (1, 1) or m >= 2, n >= 1; got ({m}, {n})"
        ))),
    }
}

/// Integer band-edge numerators of the nonzero support, per axis.
fn band_edge_numerators(f: &SpectralField) -> Vec<i64> {
    let g = f.geometry();
    let d = g.dims();
    let mut edges = vec![0i64; d];
    let mut idx = vec![0usize; d];
    for (flat, v) in f.values().iter().enumerate() {
        if v.norm_sqr() > 0.0 {
            g.multi_index(flat, &mut idx);
            for a in 0..d {
                let num =
                    crate::geometry::Geometry::numerator_of_index(g.grid_points()[a], idx[a]).abs();
                if num > edges[a] {
                    edges[a] = num;
                }
            }
        }
    }
    edges
}

/// Checks that lattice sums of the squared product modulus are alias-free:
/// per axis the squared-product band `2 * edge` must stay under the grid
/// modulus, otherwise nonzero modes fold onto the constant mode.
fn check_alias_margin(f: &SpectralField, edge_sums: &[i64]) -> Result<()> {
    let g = f.geometry();
    for (axis, &edge) in edge_sums.iter().enumerate() {
        let p = g.grid_points()[axis] as i64;
        if 2 * edge >= p {
            return Err(LabError::AliasingMargin {
                axis,
                nyquist: g.nyquist(axis),
                required: edge as f64 * g.freq_spacing(axis),
            });
        }
    }
    Ok(())
}

/// Evolve a frequency field to time `t` and land it on the physical grid
/// (unnormalized IFFT postponed scaling folded in).
fn evolved_physical(
    hat: &SpectralField,
    xi_sq: &[f64],
    t: f64,
    scratch: &mut Vec<Complex64>,
) -> usize {
    scratch.clear();
    scratch.extend_from_slice(hat.values());
    for (v, &q) in scratch.iter_mut().zip(xi_sq) {
        if v.norm_sqr() > 0.0 {
            *v *= Complex64::from_polar(1.0, phase_angle(q, t));
        }
    }
    fft_nd(scratch, hat.geometry().grid_points(), FftDirection::Inverse, ExecMode::default());
    scratch.len()
}

fn xi_squared_table(f: &SpectralField) -> Vec<f64> {
    let mut out = vec![0.0f64; f.geometry().total_points()];
    f.geometry().for_each_freq(|flat, xi| {
        out[flat] = xi.iter().map(|&x| x * x).sum();
    });
    out
}

/// `|| U(t) P_{N1} f . U(t) P_{N2} g ||_{L^2(space x window)}` by composite
/// trapezoid in time and exact lattice sums in space.
pub fn spacetime_l2_product(
    f: &SpectralField,
    g: &SpectralField,
    band1: DyadicBand,
    band2: DyadicBand,
    window: TimeWindow,
) -> Result<f64> {
    if f.geometry() != g.geometry() {
        return Err(LabError::GeometryMismatch);
    }
    let pf = project_band(&f.to_frequency()?, band1)?;
    let pg = project_band(&g.to_frequency()?, band2)?;
    if pf.l2_norm() == 0.0 || pg.l2_norm() == 0.0 {
        return Ok(0.0);
    }
    let ef = band_edge_numerators(&pf);
    let eg = band_edge_numerators(&pg);
    let sums: Vec<i64> = ef.iter().zip(&eg).map(|(a, b)| a + b).collect();
    check_alias_margin(&pf, &sums)?;

    let geom = pf.geometry().clone();
    let xi_sq = xi_squared_table(&pf);
    // IFFT scaling: measure_weight per field; the spatial quadrature weight
    // is cell_volume. Collect it all into one constant.
    let w = geom.measure_weight();
    let point_scale = (w * w).powi(2) * geom.cell_volume();

    let h = window.span() / window.steps as f64;
    let nodes = window.steps + 1;
    let integrand = crate::par::map_indexed(ExecMode::default(), nodes, |j| {
        let t = window.t_start + h * j as f64;
        let mut bu = Vec::new();
        let mut bv = Vec::new();
        evolved_physical(&pf, &xi_sq, t, &mut bu);
        evolved_physical(&pg, &xi_sq, t, &mut bv);
        let mut acc = 0.0f64;
        for (u, v) in bu.iter().zip(&bv) {
            acc += u.norm_sqr() * v.norm_sqr();
        }
        acc * point_scale
    });
    let mut integral = 0.0;
    for (j, val) in integrand.iter().enumerate() {
        let wj = if j == 0 || j == nodes - 1 { 0.5 } else { 1.0 };
        integral += wj * val;
    }
    Ok((integral * h).max(0.0).sqrt())
}

/// `|| U(t) f ||_{L^4(space x window)}` by the same composite quadrature.
pub fn strichartz_l4(f: &SpectralField, window: TimeWindow) -> Result<f64> {
    let hat = f.to_frequency()?;
    if hat.l2_norm() == 0.0 {
        return Ok(0.0);
    }
    let edges = band_edge_numerators(&hat);
    let sums: Vec<i64> = edges.iter().map(|e| 2 * e).collect();
    check_alias_margin(&hat, &sums)?;

    let geom = hat.geometry().clone();
    let xi_sq = xi_squared_table(&hat);
    let w = geom.measure_weight();
    let point_scale = w.powi(4) * geom.cell_volume();

    let h = window.span() / window.steps as f64;
    let nodes = window.steps + 1;
    let integrand = crate::par::map_indexed(ExecMode::default(), nodes, |j| {
        let t = window.t_start + h * j as f64;
        let mut bu = Vec::new();
        evolved_physical(&hat, &xi_sq, t, &mut bu);
        let acc: f64 = bu.iter().map(|u| u.norm_sqr() * u.norm_sqr()).sum();
        acc * point_scale
    });
    let mut integral = 0.0;
    for (j, val) in integrand.iter().enumerate() {
        let wj = if j == 0 || j == nodes - 1 { 0.5 } else { 1.0 };
        integral += wj * val;
    }
    Ok((integral * h).max(0.0).powf(0.25))
}
