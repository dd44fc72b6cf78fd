//! Discretized mixed domain `R^m x T^n_lambda`.
//!
//! Periodic directions are tori of circumference `lambda`; Euclidean
//! directions are modeled as tori of circumference `box_length` chosen large
//! enough per experiment. The frequency lattice is `R^m x Z^n_{1/lambda}`
//! discretized with spacing `1/box_length` in Euclidean directions and
//! exactly `1/lambda` in periodic ones. Frequency integration carries the
//! weight `1/circumference` per direction, so Plancherel holds with the same
//! constant at every `lambda`.

use crate::error::LabError;
use crate::Result;

/// Axis layout: the `m` Euclidean directions come first, then the `n`
/// periodic ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    real_dims: usize,
    torus_dims: usize,
    lambda: f64,
    box_length: f64,
    grid_points: Vec<usize>,
}

impl Geometry {
    pub fn new(
        real_dims: usize,
        torus_dims: usize,
        lambda: f64,
        box_length: f64,
        grid_points: Vec<usize>,
    ) -> Result<Self> {
        if real_dims + torus_dims == 0 {
            return Err(LabError::Geometry("need at least one direction".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(LabError::Geometry(format!("lambda must be positive, got {lambda}")));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(LabError::Geometry(format!(
                "box_length must be positive, got {box_length}"
            )));
        }
        if grid_points.len() != real_dims + torus_dims {
            return Err(LabError::Geometry(format!(
                "expected {} grid_points entries, got {}",
                real_dims + torus_dims,
                grid_points.len()
            )));
        }
        for (i, &p) in grid_points.iter().enumerate() {
            if p < 4 || !p.is_power_of_two() {
                return Err(LabError::Geometry(format!(
                    "grid_points[{i}] = {p}; entries must be powers of two >= 4"
                )));
            }
        }
        Ok(Self { real_dims, torus_dims, lambda, box_length, grid_points })
    }

    /// Pure torus `T^n_lambda` (no Euclidean directions); `box_length` is a
    /// placeholder and never enters any weight.
    pub fn torus(torus_dims: usize, lambda: f64, grid_points: Vec<usize>) -> Result<Self> {
        Self::new(0, torus_dims, lambda, 1.0, grid_points)
    }

    pub fn real_dims(&self) -> usize {
        self.real_dims
    }

    pub fn torus_dims(&self) -> usize {
        self.torus_dims
    }

    pub fn dims(&self) -> usize {
        self.real_dims + self.torus_dims
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn grid_points(&self) -> &[usize] {
        &self.grid_points
    }

    pub fn total_points(&self) -> usize {
        self.grid_points.iter().product()
    }

    /// Circumference of direction `axis` (box length for Euclidean axes,
    /// `lambda` for periodic ones).
    pub fn circumference(&self, axis: usize) -> f64 {
        if axis < self.real_dims {
            self.box_length
        } else {
            self.lambda
        }
    }

    /// Frequency lattice spacing of `axis`: exactly `1/circumference`.
    pub fn freq_spacing(&self, axis: usize) -> f64 {
        1.0 / self.circumference(axis)
    }

    /// Physical grid spacing of `axis`.
    pub fn grid_spacing(&self, axis: usize) -> f64 {
        self.circumference(axis) / self.grid_points[axis] as f64
    }

    /// Nyquist frequency of `axis`: `grid_points / (2 * circumference)`.
    pub fn nyquist(&self, axis: usize) -> f64 {
        self.grid_points[axis] as f64 / (2.0 * self.circumference(axis))
    }

    /// Product of per-axis physical cell volumes (quadrature weight for
    /// physical-space sums).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dims()).map(|a| self.grid_spacing(a)).product()
    }

    /// Product of per-axis frequency weights `1/circumference` (the discrete
    /// stand-in for the `(d xi)_lambda` measure).
    pub fn measure_weight(&self) -> f64 {
        (0..self.dims()).map(|a| self.freq_spacing(a)).product()
    }

    /// Total physical volume `box_length^m * lambda^n`.
    pub fn volume(&self) -> f64 {
        (0..self.dims()).map(|a| self.circumference(a)).product()
    }

    /// Signed frequency numerator for storage index `k` along an axis of `p`
    /// points: standard half-spectrum wraparound order.
    pub fn numerator_of_index(p: usize, k: usize) -> i64 {
        debug_assert!(k < p);
        if k < p / 2 {
            k as i64
        } else {
            k as i64 - p as i64
        }
    }

    /// Storage index for a signed numerator, when representable on the grid.
    pub fn index_of_numerator(p: usize, num: i64) -> Option<usize> {
        let half = (p / 2) as i64;
        if num >= 0 && num < half {
            Some(num as usize)
        } else if num >= -half && num < 0 {
            Some((num + p as i64) as usize)
        } else {
            None
        }
    }

    /// Frequency value at storage index `k` of `axis`.
    pub fn freq_value(&self, axis: usize, k: usize) -> f64 {
        Self::numerator_of_index(self.grid_points[axis], k) as f64 * self.freq_spacing(axis)
    }

    /// Decompose a flat (row-major, axis 0 slowest) index into per-axis
    /// storage indices.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.dims()).rev() {
            let p = self.grid_points[axis];
            out[axis] = flat % p;
            flat /= p;
        }
    }

    /// Iterate frequency values of every lattice site in storage order,
    /// invoking `f(flat_index, xi)`.
    pub fn for_each_freq(&self, mut f: impl FnMut(usize, &[f64])) {
        let d = self.dims();
        let mut idx = vec![0usize; d];
        let mut xi = vec![0.0f64; d];
        for a in 0..d {
            xi[a] = self.freq_value(a, 0);
        }
        let total = self.total_points();
        for flat in 0..total {
            f(flat, &xi);
            // odometer increment
            for a in (0..d).rev() {
                idx[a] += 1;
                if idx[a] == self.grid_points[a] {
                    idx[a] = 0;
                    xi[a] = self.freq_value(a, 0);
                } else {
                    xi[a] = self.freq_value(a, idx[a]);
                    break;
                }
            }
        }
    }

    /// Smallest power-of-two grid resolving fields of per-axis band edge
    /// `band` with at least 8 samples per shortest wavelength (a 4x margin
    /// over Nyquist, enough for alias-free quartic products).
    pub fn suggested_points(circumference: f64, band_edge: f64) -> usize {
        let min = (8.0 * band_edge.max(0.25) * circumference).ceil() as usize;
        min.max(4).next_power_of_two()
    }

    /// Convenience constructor using [`Geometry::suggested_points`] on every
    /// axis for a common band edge.
    pub fn with_band(
        real_dims: usize,
        torus_dims: usize,
        lambda: f64,
        box_length: f64,
        band_edge: f64,
    ) -> Result<Self> {
        let mut pts = Vec::with_capacity(real_dims + torus_dims);
        for _ in 0..real_dims {
            pts.push(Self::suggested_points(box_length, band_edge));
        }
        for _ in 0..torus_dims {
            pts.push(Self::suggested_points(lambda, band_edge));
        }
        Self::new(real_dims, torus_dims, lambda, box_length, pts)
    }
}
