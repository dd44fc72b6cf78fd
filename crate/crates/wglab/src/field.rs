//! Complex fields on the mixed lattice, with the `2*pi`-convention transform
//! pair and `(d xi)_lambda`-weighted norms.
//!
//! Conventions (fixed crate-wide):
//!
//! * forward kernel `e^{-2*pi*i z.xi}`, realized as the unnormalized DFT
//!   scaled by the physical cell volume;
//! * inverse kernel `e^{+2*pi*i z.xi}` scaled by `1/circumference` per
//!   direction, the discrete `(d xi)_lambda` weight;
//! * `|f|_L2(physical)^2 = cell_volume * sum |f|^2` and
//!   `|F|_L2(frequency)^2 = measure_weight * sum |F|^2`, so Plancherel holds
//!   with constant one.

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::LabError;
use crate::fourier::fft_nd;
use crate::geometry::Geometry;
use crate::par::ExecMode;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Physical,
    Frequency,
}

/// Immutable complex amplitudes on the grid or on the frequency lattice.
#[derive(Debug, Clone)]
pub struct SpectralField {
    geometry: Geometry,
    domain: Domain,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(geometry: Geometry, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != geometry.total_points() {
            return Err(LabError::Dimension {
                expected: geometry.total_points(),
                found: values.len(),
            });
        }
        Ok(Self { geometry, domain, values })
    }

    pub fn zero(geometry: Geometry, domain: Domain) -> Self {
        let n = geometry.total_points();
        Self { geometry, domain, values: vec![Complex64::default(); n] }
    }

    /// Plane wave `amp * e^{2*pi*i z.xi}` with `xi` given by per-axis integer
    /// numerators of the frequency spacing. `amp` is the physical amplitude.
    pub fn single_mode(geometry: Geometry, numerators: &[i64], amp: Complex64) -> Result<Self> {
        if numerators.len() != geometry.dims() {
            return Err(LabError::Geometry(format!(
                "expected {} numerators, got {}",
                geometry.dims(),
                numerators.len()
            )));
        }
        for (a, &num) in numerators.iter().enumerate() {
            if Geometry::index_of_numerator(geometry.grid_points()[a], num).is_none() {
                return Err(LabError::Geometry(format!(
                    "mode numerator {num} not representable on axis {a}"
                )));
            }
        }
        // Construct in frequency: a point mass of value amp/measure_weight.
        let mut field = Self::zero(geometry, Domain::Frequency);
        let flat = field.flat_of_numerators(numerators).unwrap();
        let w = field.geometry.measure_weight();
        field.values[flat] = amp / w;
        Ok(field)
    }

    /// Build a frequency-domain field from a function of the frequency vector.
    pub fn from_freq_fn(geometry: Geometry, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut values = vec![Complex64::default(); geometry.total_points()];
        geometry.for_each_freq(|flat, xi| values[flat] = f(xi));
        Self { geometry, domain: Domain::Frequency, values }
    }

    /// Build a physical-domain field from a function of the grid point.
    pub fn from_phys_fn(geometry: Geometry, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = geometry.dims();
        let total = geometry.total_points();
        let mut values = vec![Complex64::default(); total];
        let mut idx = vec![0usize; d];
        let mut z = vec![0.0f64; d];
        for flat in 0..total {
            geometry.multi_index(flat, &mut idx);
            for a in 0..d {
                z[a] = idx[a] as f64 * geometry.grid_spacing(a);
            }
            values[flat] = f(&z);
        }
        Self { geometry, domain: Domain::Physical, values }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub(crate) fn into_parts(self) -> (Geometry, Domain, Vec<Complex64>) {
        (self.geometry, self.domain, self.values)
    }

    /// Flat storage index of a frequency given by integer numerators.
    pub fn flat_of_numerators(&self, numerators: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for (a, &num) in numerators.iter().enumerate() {
            let p = self.geometry.grid_points()[a];
            flat = flat * p + Geometry::index_of_numerator(p, num)?;
        }
        Some(flat)
    }

    /// Frequency-lattice value at the given numerators (frequency domain).
    pub fn freq_value_at(&self, numerators: &[i64]) -> Option<Complex64> {
        debug_assert_eq!(self.domain, Domain::Frequency);
        self.flat_of_numerators(numerators).map(|i| self.values[i])
    }

    fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain != expected {
            return Err(LabError::DomainTag { expected, found: self.domain });
        }
        Ok(())
    }

    /// Forward transform `F f` under the `e^{-2*pi*i z.xi}` convention.
    pub fn forward_transform(&self) -> Result<SpectralField> {
        self.expect_domain(Domain::Physical)?;
        let mut values = self.values.clone();
        fft_nd(&mut values, self.geometry.grid_points(), FftDirection::Forward, ExecMode::default());
        let scale = self.geometry.cell_volume();
        for v in &mut values {
            *v *= scale;
        }
        Ok(SpectralField { geometry: self.geometry.clone(), domain: Domain::Frequency, values })
    }

    /// Inverse transform under the `e^{+2*pi*i z.xi}` convention with the
    /// `(d xi)_lambda` weight.
    pub fn inverse_transform(&self) -> Result<SpectralField> {
        self.expect_domain(Domain::Frequency)?;
        let mut values = self.values.clone();
        fft_nd(&mut values, self.geometry.grid_points(), FftDirection::Inverse, ExecMode::default());
        let scale = self.geometry.measure_weight();
        for v in &mut values {
            *v *= scale;
        }
        Ok(SpectralField { geometry: self.geometry.clone(), domain: Domain::Physical, values })
    }

    /// The field in frequency domain (clone if already there).
    pub fn to_frequency(&self) -> Result<SpectralField> {
        match self.domain {
            Domain::Frequency => Ok(self.clone()),
            Domain::Physical => self.forward_transform(),
        }
    }

    /// The field in physical domain (clone if already there).
    pub fn to_physical(&self) -> Result<SpectralField> {
        match self.domain {
            Domain::Physical => Ok(self.clone()),
            Domain::Frequency => self.inverse_transform(),
        }
    }

    /// `L^2` norm with the weight matching the field's domain.
    pub fn l2_norm(&self) -> f64 {
        let w = match self.domain {
            Domain::Physical => self.geometry.cell_volume(),
            Domain::Frequency => self.geometry.measure_weight(),
        };
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Weighted inner product `<self, other>` (both in the same domain).
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        if self.geometry != other.geometry {
            return Err(LabError::GeometryMismatch);
        }
        if self.domain != other.domain {
            return Err(LabError::DomainTag { expected: self.domain, found: other.domain });
        }
        let w = match self.domain {
            Domain::Physical => self.geometry.cell_volume(),
            Domain::Frequency => self.geometry.measure_weight(),
        };
        let mut acc = Complex64::default();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        Ok(acc * w)
    }

    pub fn scale(&self, c: Complex64) -> SpectralField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// `a*self + b*other`.
    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &SpectralField,
        b: Complex64,
    ) -> Result<SpectralField> {
        if self.geometry != other.geometry {
            return Err(LabError::GeometryMismatch);
        }
        if self.domain != other.domain {
            return Err(LabError::DomainTag { expected: self.domain, found: other.domain });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(SpectralField { geometry: self.geometry.clone(), domain: self.domain, values })
    }

    /// Per-axis band edge of the nonzero frequency support, or zero for the
    /// zero field.
    pub fn band_edges(&self) -> Result<Vec<f64>> {
        self.expect_domain(Domain::Frequency)?;
        let d = self.geometry.dims();
        let mut edges = vec![0.0f64; d];
        let mut idx = vec![0usize; d];
        for (flat, v) in self.values.iter().enumerate() {
            if v.norm_sqr() > 0.0 {
                self.geometry.multi_index(flat, &mut idx);
                for a in 0..d {
                    let xi = self.geometry.freq_value(a, idx[a]).abs();
                    if xi > edges[a] {
                        edges[a] = xi;
                    }
                }
            }
        }
        Ok(edges)
    }

    /// Pointwise product of two frequency fields pushed back to frequency:
    /// the weighted circular convolution, computed via the transform pair.
    pub fn frequency_convolve(&self, other: &SpectralField) -> Result<SpectralField> {
        self.expect_domain(Domain::Frequency)?;
        other.expect_domain(Domain::Frequency)?;
        if self.geometry != other.geometry {
            return Err(LabError::GeometryMismatch);
        }
        let a = self.inverse_transform()?;
        let b = other.inverse_transform()?;
        let mut prod = a;
        for (x, y) in prod.values.iter_mut().zip(&b.values) {
            *x *= *y;
        }
        prod.forward_transform()
    }

    /// Definition-path convolution: the `(d eta)_lambda`-weighted lattice sum
    /// `sum_eta F(xi - eta) G(eta)`, quadratic cost. Used as the independent
    /// oracle for [`SpectralField::frequency_convolve`].
    pub fn frequency_convolve_direct(&self, other: &SpectralField) -> Result<SpectralField> {
        self.expect_domain(Domain::Frequency)?;
        other.expect_domain(Domain::Frequency)?;
        if self.geometry != other.geometry {
            return Err(LabError::GeometryMismatch);
        }
        let g = &self.geometry;
        let d = g.dims();
        let total = g.total_points();
        let w = g.measure_weight();
        let mut out = vec![Complex64::default(); total];
        let mut xi_idx = vec![0usize; d];
        let mut eta_idx = vec![0usize; d];
        let mut diff_idx = vec![0usize; d];
        for (xi_flat, out_v) in out.iter_mut().enumerate() {
            g.multi_index(xi_flat, &mut xi_idx);
            let mut acc = Complex64::default();
            for eta_flat in 0..total {
                g.multi_index(eta_flat, &mut eta_idx);
                let mut diff_flat = 0usize;
                for a in 0..d {
                    let p = g.grid_points()[a];
                    diff_idx[a] = (xi_idx[a] + p - eta_idx[a]) % p;
                    diff_flat = diff_flat * p + diff_idx[a];
                }
                acc += self.values[diff_flat] * other.values[eta_flat];
            }
            *out_v = acc * w;
        }
        SpectralField::new(g.clone(), Domain::Frequency, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_geometry() -> Geometry {
        Geometry::new(1, 1, 2.0, 4.0, vec![16, 8]).unwrap()
    }

    #[test]
    fn zero_transforms_to_zero() {
        let f = SpectralField::zero(small_geometry(), Domain::Physical);
        let hat = f.forward_transform().unwrap();
        assert_eq!(hat.l2_norm(), 0.0);
        let back = hat.inverse_transform().unwrap();
        assert_eq!(back.l2_norm(), 0.0);
    }

    #[test]
    fn single_torus_mode_concentrates_mass() {
        // e^{2 pi i k y / lambda} on T_lambda: unit mass at xi = k/lambda.
        let g = Geometry::torus(1, 2.0, vec![16]).unwrap();
        let k = 3i64;
        let f = SpectralField::from_phys_fn(g.clone(), |z| {
            let ph = 2.0 * std::f64::consts::PI * z[0] * (k as f64 / 2.0);
            Complex64::new(ph.cos(), ph.sin())
        });
        let hat = f.forward_transform().unwrap();
        // lattice value lambda at the mode, zero elsewhere
        let at = hat.freq_value_at(&[k]).unwrap();
        assert!((at - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let energy_at_mode = hat.geometry().measure_weight() * at.norm_sqr();
        assert!((energy_at_mode - f.l2_norm().powi(2)).abs() < 1e-12);
        assert!((hat.l2_norm() - f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn delta_at_origin_gives_constant() {
        let g = Geometry::torus(1, 4.0, vec![16]).unwrap();
        let f = SpectralField::single_mode(g, &[0], Complex64::new(1.5, 0.0)).unwrap();
        let phys = f.inverse_transform().unwrap();
        for v in phys.values() {
            assert!((v - Complex64::new(1.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn domain_tag_enforced() {
        let f = SpectralField::zero(small_geometry(), Domain::Frequency);
        assert!(matches!(f.forward_transform(), Err(LabError::DomainTag { .. })));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = small_geometry();
        let r = SpectralField::new(g, Domain::Physical, vec![Complex64::default(); 3]);
        assert!(matches!(r, Err(LabError::Dimension { .. })));
    }

    #[test]
    fn convolution_identity_element() {
        // delta at origin with lattice value 1/weight acts as identity.
        let g = Geometry::torus(1, 2.0, vec![16]).unwrap();
        let mut delta = SpectralField::zero(g.clone(), Domain::Frequency);
        let w = g.measure_weight();
        let flat = delta.flat_of_numerators(&[0]).unwrap();
        delta.values_mut()[flat] = Complex64::new(1.0 / w, 0.0);
        let gfield = SpectralField::from_freq_fn(g, |xi| Complex64::new(xi[0] + 0.5, -xi[0]));
        let conv = delta.frequency_convolve(&gfield).unwrap();
        for (a, b) in conv.values().iter().zip(gfield.values()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn convolution_adds_single_modes() {
        let g = Geometry::torus(1, 2.0, vec![32]).unwrap();
        let f = SpectralField::single_mode(g.clone(), &[3], Complex64::new(1.0, 0.0)).unwrap();
        let h = SpectralField::single_mode(g, &[-1], Complex64::new(0.5, 0.5)).unwrap();
        let conv = f.frequency_convolve(&h).unwrap();
        let expect =
            SpectralField::single_mode(conv.geometry().clone(), &[2], Complex64::new(0.5, 0.5))
                .unwrap();
        for (a, b) in conv.values().iter().zip(expect.values()) {
            assert!((a - b).norm() < 1e-9 * conv.geometry().volume());
        }
    }
}
