//! Sparse frequency-lattice fields and an exact bilinear evaluator.
//!
//! A [`ModeField`] is a finite set of lattice modes `(xi_r, a_r)` with the
//! same value semantics as a dense frequency field (`a_r` is the lattice
//! value, so `|f|_2^2 = W * sum |a_r|^2` with `W` the measure weight). For
//! such data the space integral of `|U(t)f . U(t)g|^2` collapses to bucket
//! sums over pairs sharing a frequency sum, and the time integral over
//! `[t0, t1]` has a closed form, so the space-time norm is evaluated exactly
//! at any horizon without a grid. This is what makes wide `(lambda, N1, N2, T)`
//! sweeps affordable; the dense trapezoid path in [`crate::bilinear`] serves
//! as its small-scale cross-check.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::error::LabError;
use crate::field::{Domain, SpectralField};
use crate::geometry::Geometry;
use crate::lp::DyadicBand;
use crate::Result;

/// Lattice layout of a sparse field: circumferences only, no grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub real_dims: usize,
    pub torus_dims: usize,
    pub lambda: f64,
    pub box_length: f64,
}

impl LatticeSpec {
    pub fn new(real_dims: usize, torus_dims: usize, lambda: f64, box_length: f64) -> Result<Self> {
        if real_dims + torus_dims == 0 || real_dims + torus_dims > 4 {
            return Err(LabError::Geometry(format!(
                "sparse lattice supports 1..=4 directions, got {}",
                real_dims + torus_dims
            )));
        }
        if !(lambda > 0.0) || !(box_length > 0.0) {
            return Err(LabError::Geometry("circumferences must be positive".into()));
        }
        Ok(Self { real_dims, torus_dims, lambda, box_length })
    }

    pub fn dims(&self) -> usize {
        self.real_dims + self.torus_dims
    }

    pub fn circumference(&self, axis: usize) -> f64 {
        if axis < self.real_dims {
            self.box_length
        } else {
            self.lambda
        }
    }

    pub fn freq_spacing(&self, axis: usize) -> f64 {
        1.0 / self.circumference(axis)
    }

    pub fn measure_weight(&self) -> f64 {
        (0..self.dims()).map(|a| self.freq_spacing(a)).product()
    }

    fn freq_of(&self, nums: &[i64]) -> Vec<f64> {
        nums.iter()
            .enumerate()
            .map(|(a, &k)| k as f64 * self.freq_spacing(a))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Mode {
    pub numerators: Vec<i64>,
    pub amplitude: Complex64,
}

/// A finite collection of frequency-lattice modes.
#[derive(Debug, Clone)]
pub struct ModeField {
    lattice: LatticeSpec,
    modes: Vec<Mode>,
}

impl ModeField {
    /// Builds a field from raw modes, merging duplicates (amplitudes at the
    /// same lattice point add).
    pub fn from_modes(lattice: LatticeSpec, raw: Vec<Mode>) -> Result<Self> {
        let d = lattice.dims();
        let mut merged: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for m in raw {
            if m.numerators.len() != d {
                return Err(LabError::Geometry(format!(
                    "mode has {} numerators, lattice has {} directions",
                    m.numerators.len(),
                    d
                )));
            }
            *merged.entry(m.numerators).or_insert(Complex64::default()) += m.amplitude;
        }
        let modes = merged
            .into_iter()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(numerators, amplitude)| Mode { numerators, amplitude })
            .collect();
        Ok(Self { lattice, modes })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.lattice.measure_weight();
        (w * self.modes.iter().map(|m| m.amplitude.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Multiplies amplitudes by the Littlewood-Paley band multiplier,
    /// dropping annihilated modes.
    pub fn apply_band(&self, band: DyadicBand) -> ModeField {
        let modes = self
            .modes
            .iter()
            .filter_map(|m| {
                let xi = self.lattice.freq_of(&m.numerators);
                let w = band.band_multiplier(&xi);
                (w.abs() > 0.0).then(|| Mode {
                    numerators: m.numerators.clone(),
                    amplitude: m.amplitude * w,
                })
            })
            .collect();
        ModeField { lattice: self.lattice, modes }
    }

    /// Dense frequency field on a compatible geometry (for cross-checks).
    pub fn to_dense(&self, geometry: Geometry) -> Result<SpectralField> {
        if geometry.real_dims() != self.lattice.real_dims
            || geometry.torus_dims() != self.lattice.torus_dims
            || (geometry.lambda() - self.lattice.lambda).abs() > 1e-12
            || (self.lattice.real_dims > 0
                && (geometry.box_length() - self.lattice.box_length).abs() > 1e-12)
        {
            return Err(LabError::GeometryMismatch);
        }
        let mut field = SpectralField::zero(geometry, Domain::Frequency);
        for m in &self.modes {
            let flat = field.flat_of_numerators(&m.numerators).ok_or_else(|| {
                LabError::Precondition(format!(
                    "mode {:?} not representable on the target grid",
                    m.numerators
                ))
            })?;
            field.values_mut()[flat] += m.amplitude;
        }
        Ok(field)
    }

    /// `|xi|^2` of a mode.
    fn phase_freq_sq(&self, nums: &[i64]) -> f64 {
        nums.iter()
            .enumerate()
            .map(|(a, &k)| {
                let xi = k as f64 * self.lattice.freq_spacing(a);
                xi * xi
            })
            .sum()
    }
}

/// Unit-modulus random phases on the support of the `P_N` multiplier,
/// shaped by the multiplier itself: `count` lattice points are drawn
/// uniformly from the band box and weighted by the tensor band multiplier.
pub fn draw_band_modes(
    lattice: LatticeSpec,
    band: DyadicBand,
    count: usize,
    rng: &mut impl Rng,
) -> Result<ModeField> {
    let d = lattice.dims();
    let n = band.scale_f64();
    let mut raw = Vec::with_capacity(count);
    // per-axis numerator bound: |xi| < 2N
    let bounds: Vec<i64> = (0..d)
        .map(|a| ((2.0 * n) * lattice.circumference(a)).ceil() as i64)
        .collect();
    let mut attempts = 0usize;
    let max_attempts = 1000 * count.max(1);
    while raw.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(LabError::Degenerate(format!(
                "band support too thin on this lattice to draw {count} modes (scale {n})"
            )));
        }
        let nums: Vec<i64> = bounds.iter().map(|&b| rng.gen_range(-b..=b)).collect();
        let xi = lattice.freq_of(&nums);
        let w = band.band_multiplier(&xi);
        if w > 1e-9 {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            raw.push(Mode { numerators: nums, amplitude: Complex64::from_polar(w, theta) });
        }
    }
    ModeField::from_modes(lattice, raw)
}

fn pack_key(nums: &[i64]) -> u128 {
    // 32 bits per axis, offset binary; lattice dims are capped at 4
    let mut key: u128 = 0;
    for &k in nums {
        debug_assert!(k.unsigned_abs() < (1 << 31));
        key = (key << 32) | ((k + (1 << 31)) as u128 & 0xffff_ffff);
    }
    key
}

/// `int_{t0}^{t1} e^{-4 pi^2 i delta t} dt`, stable near `delta = 0`.
fn time_kernel(delta: f64, t0: f64, t1: f64) -> Complex64 {
    let dt = t1 - t0;
    let omega = 4.0 * std::f64::consts::PI.powi(2) * delta;
    let x = 0.5 * omega * dt;
    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    Complex64::from_polar(dt * sinc, -omega * 0.5 * (t0 + t1))
}

struct Bucket {
    phases: Vec<f64>,
    amps: Vec<Complex64>,
}

/// Pair structure of `U f . U g`, bucketed by frequency sum. Building it is
/// `O(|f| * |g|)`; each norm evaluation is `O(sum of bucket sizes squared)`.
pub struct BilinearPairs {
    buckets: Vec<Bucket>,
    weight_cubed: f64,
}

impl BilinearPairs {
    pub fn build(f: &ModeField, g: &ModeField) -> Result<Self> {
        if f.lattice != g.lattice {
            return Err(LabError::GeometryMismatch);
        }
        let mut map: BTreeMap<u128, Bucket> = BTreeMap::new();
        let mut sum = vec![0i64; f.lattice.dims()];
        for mf in &f.modes {
            let phi_f = f.phase_freq_sq(&mf.numerators);
            for mg in &g.modes {
                for (s, (a, b)) in sum.iter_mut().zip(mf.numerators.iter().zip(&mg.numerators)) {
                    *s = a + b;
                }
                let key = pack_key(&sum);
                let phi = phi_f + g.phase_freq_sq(&mg.numerators);
                let entry = map
                    .entry(key)
                    .or_insert_with(|| Bucket { phases: Vec::new(), amps: Vec::new() });
                entry.phases.push(phi);
                entry.amps.push(mf.amplitude * mg.amplitude);
            }
        }
        let w = f.lattice.measure_weight();
        Ok(Self { buckets: map.into_values().collect(), weight_cubed: w * w * w })
    }

    /// Number of pair interactions per evaluation (resource estimate).
    pub fn interaction_count(&self) -> usize {
        self.buckets.iter().map(|b| b.amps.len() * b.amps.len()).sum()
    }

    /// `|| U(t) f . U(t) g ||_{L^2(space x [t0, t1])}`, exact in both space
    /// and time for sparse data.
    pub fn norm(&self, t0: f64, t1: f64) -> f64 {
        let mut total = 0.0f64;
        let dt = t1 - t0;
        for bucket in &self.buckets {
            let k = bucket.amps.len();
            for i in 0..k {
                total += bucket.amps[i].norm_sqr() * dt;
                for j in (i + 1)..k {
                    let delta = bucket.phases[i] - bucket.phases[j];
                    let kernel = time_kernel(delta, t0, t1);
                    let cross = bucket.amps[i] * bucket.amps[j].conj() * kernel;
                    total += 2.0 * cross.re;
                }
            }
        }
        (self.weight_cubed * total).max(0.0).sqrt()
    }
}
