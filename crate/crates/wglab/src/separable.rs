//! Tensor-product fields and a factored bilinear quadrature.
//!
//! Wave-packet data (frequency-box indicators, single torus modes) is a
//! tensor product of per-axis profiles, and both the propagator and the
//! space integral factor per axis:
//!
//! `int |U(t)f . U(t)g|^2 dz = prod_i int |u_i(x_i,t) v_i(x_i,t)|^2 dx_i`.
//!
//! Each axis factor is evaluated on its own 1-D grid after demodulating by
//! the spectral support center, so the grid only has to resolve the envelope
//! bandwidth, not the carrier frequency. Time integration is the composite
//! trapezoid rule, optionally with step doubling until the norm stabilizes.

use num_complex::Complex64;

use crate::error::LabError;
use crate::fourier::fft_1d_inverse;
use crate::geometry::Geometry;
use crate::modes::{LatticeSpec, Mode, ModeField};
use crate::par::{map_indexed, ExecMode};
use crate::propagator::phase_angle;
use crate::Result;

/// Sparse spectrum along one axis; entries are `(numerator, lattice value)`.
#[derive(Debug, Clone)]
pub struct AxisModes {
    pub circumference: f64,
    pub modes: Vec<(i64, Complex64)>,
}

impl AxisModes {
    /// Indicator of the numerator interval `[lo, hi]` (inclusive).
    pub fn indicator(circumference: f64, lo: i64, hi: i64) -> Self {
        let modes = (lo..=hi).map(|k| (k, Complex64::new(1.0, 0.0))).collect();
        Self { circumference, modes }
    }

    pub fn single(circumference: f64, k: i64) -> Self {
        Self { circumference, modes: vec![(k, Complex64::new(1.0, 0.0))] }
    }

    fn norm_sq(&self) -> f64 {
        self.modes.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>() / self.circumference
    }

    fn support_center(&self) -> i64 {
        if self.modes.is_empty() {
            return 0;
        }
        let lo = self.modes.iter().map(|(k, _)| *k).min().unwrap();
        let hi = self.modes.iter().map(|(k, _)| *k).max().unwrap();
        (lo + hi) / 2
    }

    fn envelope_radius(&self, center: i64) -> i64 {
        self.modes.iter().map(|(k, _)| (k - center).abs()).max().unwrap_or(0)
    }
}

/// A field of the form `f(z) = prod_i f_i(z_i)`.
#[derive(Debug, Clone)]
pub struct SeparableField {
    axes: Vec<AxisModes>,
}

impl SeparableField {
    pub fn new(axes: Vec<AxisModes>) -> Result<Self> {
        if axes.is_empty() {
            return Err(LabError::Geometry("separable field needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[AxisModes] {
        &self.axes
    }

    pub fn l2_norm(&self) -> f64 {
        self.axes.iter().map(|a| a.norm_sq()).product::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.axes.iter().any(|a| a.modes.is_empty())
    }

    /// Expands the tensor product into an explicit sparse field (sizes
    /// multiply; intended for small cross-checks).
    pub fn to_mode_field(&self, lattice: LatticeSpec) -> Result<ModeField> {
        if lattice.dims() != self.axes.len() {
            return Err(LabError::GeometryMismatch);
        }
        for (i, ax) in self.axes.iter().enumerate() {
            if (lattice.circumference(i) - ax.circumference).abs() > 1e-12 {
                return Err(LabError::GeometryMismatch);
            }
        }
        let mut raw = vec![Mode { numerators: vec![], amplitude: Complex64::new(1.0, 0.0) }];
        for ax in &self.axes {
            let mut next = Vec::with_capacity(raw.len() * ax.modes.len());
            for partial in &raw {
                for (k, a) in &ax.modes {
                    let mut numerators = partial.numerators.clone();
                    numerators.push(*k);
                    next.push(Mode { numerators, amplitude: partial.amplitude * a });
                }
            }
            raw = next;
        }
        ModeField::from_modes(lattice, raw)
    }
}

/// Per-axis prepared evaluator: demodulated placements plus grid size.
struct AxisEval {
    grid: usize,
    scale: f64, // dx / c^4
    f_entries: Vec<(usize, f64, Complex64)>, // (wrapped index, |xi|^2, amp)
    g_entries: Vec<(usize, f64, Complex64)>,
}

impl AxisEval {
    fn prepare(f: &AxisModes, g: &AxisModes) -> Result<Self> {
        if (f.circumference - g.circumference).abs() > 1e-12 {
            return Err(LabError::GeometryMismatch);
        }
        let c = f.circumference;
        let cf = f.support_center();
        let cg = g.support_center();
        let rf = f.envelope_radius(cf);
        let rg = g.envelope_radius(cg);
        // |u v|^2 has envelope band 2(rf + rg); exact sums need grid > that
        let need = (2 * (rf + rg) + 1).max(4) as usize;
        let grid = need.next_power_of_two();
        let place = |modes: &[(i64, Complex64)], center: i64| -> Vec<(usize, f64, Complex64)> {
            modes
                .iter()
                .map(|&(k, a)| {
                    let nu = k - center;
                    let idx = (nu.rem_euclid(grid as i64)) as usize;
                    let xi = k as f64 / c;
                    (idx, xi * xi, a)
                })
                .collect()
        };
        Ok(Self {
            grid,
            scale: 1.0 / (grid as f64 * c * c * c),
            f_entries: place(&f.modes, cf),
            g_entries: place(&g.modes, cg),
        })
    }

    /// `int |u v|^2 dx` along this axis at time `t`.
    fn factor(&self, t: f64, buf_u: &mut Vec<Complex64>, buf_v: &mut Vec<Complex64>) -> f64 {
        buf_u.clear();
        buf_u.resize(self.grid, Complex64::default());
        buf_v.clear();
        buf_v.resize(self.grid, Complex64::default());
        for &(idx, xi_sq, amp) in &self.f_entries {
            buf_u[idx] += amp * Complex64::from_polar(1.0, phase_angle(xi_sq, t));
        }
        for &(idx, xi_sq, amp) in &self.g_entries {
            buf_v[idx] += amp * Complex64::from_polar(1.0, phase_angle(xi_sq, t));
        }
        fft_1d_inverse(buf_u);
        fft_1d_inverse(buf_v);
        let sum: f64 = buf_u.iter().zip(buf_v.iter()).map(|(u, v)| u.norm_sqr() * v.norm_sqr()).sum();
        sum * self.scale
    }
}

/// `|| U(t) f . U(t) g ||_{L^2(space x [t0, t1])}` for separable data with a
/// fixed trapezoid step count.
pub fn bilinear_l2_separable(
    f: &SeparableField,
    g: &SeparableField,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<f64> {
    if f.axes.len() != g.axes.len() {
        return Err(LabError::GeometryMismatch);
    }
    if !(t1 > t0) {
        return Err(LabError::Precondition("empty time window".into()));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(0.0);
    }
    let evals: Vec<AxisEval> = f
        .axes
        .iter()
        .zip(&g.axes)
        .map(|(fa, ga)| AxisEval::prepare(fa, ga))
        .collect::<Result<_>>()?;
    let steps = steps.max(16);
    let h = (t1 - t0) / steps as f64;
    let nodes = steps + 1;
    let values = map_indexed(ExecMode::default(), nodes, |j| {
        let t = t0 + h * j as f64;
        let mut bu = Vec::new();
        let mut bv = Vec::new();
        evals.iter().map(|e| e.factor(t, &mut bu, &mut bv)).product::<f64>()
    });
    let mut integral = 0.0;
    for (j, v) in values.iter().enumerate() {
        let w = if j == 0 || j == nodes - 1 { 0.5 } else { 1.0 };
        integral += w * v;
    }
    Ok((integral * h).max(0.0).sqrt())
}

/// Step-doubling wrapper: doubles the trapezoid resolution until the norm
/// moves by less than `rel_tol`, returning the refined value and the step
/// count that achieved it.
pub fn bilinear_l2_adaptive(
    f: &SeparableField,
    g: &SeparableField,
    t0: f64,
    t1: f64,
    initial_steps: usize,
    rel_tol: f64,
    max_steps: usize,
) -> Result<(f64, usize)> {
    let mut steps = initial_steps.max(16);
    let mut prev = bilinear_l2_separable(f, g, t0, t1, steps)?;
    loop {
        let next_steps = steps * 2;
        if next_steps > max_steps {
            return Ok((prev, steps));
        }
        let next = bilinear_l2_separable(f, g, t0, t1, next_steps)?;
        let scale = next.abs().max(1e-300);
        if (next - prev).abs() <= rel_tol * scale {
            return Ok((next, next_steps));
        }
        prev = next;
        steps = next_steps;
    }
}

/// Dense-geometry grid hint for a separable field pair: per axis the grid
/// suggested for the combined carrier band (used when cross-checking against
/// the dense path on small instances).
pub fn dense_grid_hint(f: &SeparableField, g: &SeparableField) -> Vec<usize> {
    f.axes
        .iter()
        .zip(&g.axes)
        .map(|(fa, ga)| {
            let edge = |ax: &AxisModes| {
                ax.modes.iter().map(|(k, _)| k.abs()).max().unwrap_or(0) as f64 / ax.circumference
            };
            Geometry::suggested_points(fa.circumference, edge(fa) + edge(ga))
        })
        .collect()
}
