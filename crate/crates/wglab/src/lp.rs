//! Dyadic Littlewood-Paley projections built on the tensor cutoff: the
//! low-pass multiplier is `eta^d(xi/N)` and the band projection is the
//! difference of consecutive low passes.

use crate::cutoff::CutoffSpec;
use crate::error::LabError;
use crate::field::{Domain, SpectralField};
use crate::Result;

/// A dyadic scale `N = 2^j`, `j >= 0`, with its cutoff profile.
#[derive(Debug, Clone, Copy)]
pub struct DyadicBand {
    scale: u64,
    cutoff: CutoffSpec,
}

impl DyadicBand {
    pub fn new(scale: u64) -> Result<Self> {
        if scale == 0 || !scale.is_power_of_two() {
            return Err(LabError::Precondition(format!(
                "dyadic scale must be a power of two >= 1, got {scale}"
            )));
        }
        Ok(Self { scale, cutoff: CutoffSpec })
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn scale_f64(&self) -> f64 {
        self.scale as f64
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }

    /// Low-pass multiplier `eta^d(xi/N)` at the frequency vector `xi`.
    pub fn leq_multiplier(&self, xi: &[f64]) -> f64 {
        let n = self.scale_f64();
        xi.iter().map(|&x| self.cutoff.eta1(x / n)).product()
    }

    /// Band multiplier `eta^d(xi/N) - eta^d(2 xi/N)`; for `N = 1` the
    /// subtracted term is the low pass at scale 1/2.
    pub fn band_multiplier(&self, xi: &[f64]) -> f64 {
        let n = self.scale_f64();
        let lo: f64 = xi.iter().map(|&x| self.cutoff.eta1(x / n)).product();
        let hi: f64 = xi.iter().map(|&x| self.cutoff.eta1(2.0 * x / n)).product();
        lo - hi
    }
}

fn apply_multiplier(
    f: &SpectralField,
    mult: impl Fn(&[f64]) -> f64,
) -> Result<SpectralField> {
    let was_physical = f.domain() == Domain::Physical;
    let hat = f.to_frequency()?;
    let (geometry, _, mut values) = hat.into_parts();
    geometry.for_each_freq(|flat, xi| {
        values[flat] *= mult(xi);
    });
    let out = SpectralField::new(geometry, Domain::Frequency, values)?;
    if was_physical {
        out.inverse_transform()
    } else {
        Ok(out)
    }
}

/// `P_{<=N} f`: frequency values multiplied by the tensor cutoff.
pub fn project_leq(f: &SpectralField, band: DyadicBand) -> Result<SpectralField> {
    apply_multiplier(f, |xi| band.leq_multiplier(xi))
}

/// `P_N f = P_{<=N} f - P_{<=N/2} f`.
pub fn project_band(f: &SpectralField, band: DyadicBand) -> Result<SpectralField> {
    apply_multiplier(f, |xi| band.band_multiplier(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use num_complex::Complex64;

    #[test]
    fn rejects_non_dyadic() {
        assert!(DyadicBand::new(0).is_err());
        assert!(DyadicBand::new(3).is_err());
        assert!(DyadicBand::new(1).is_ok());
        assert!(DyadicBand::new(64).is_ok());
    }

    #[test]
    fn band_limited_fields_pass_through() {
        // support inside [-N, N]^d: returned unchanged
        let g = Geometry::torus(1, 1.0, vec![32]).unwrap();
        let band = DyadicBand::new(4).unwrap();
        let f = SpectralField::single_mode(g, &[3], Complex64::new(1.0, -2.0)).unwrap();
        let p = project_leq(&f, band).unwrap();
        for (a, b) in p.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn far_field_annihilated() {
        // support outside [-2N, 2N]^d in every direction: zero
        let g = Geometry::torus(1, 1.0, vec![64]).unwrap();
        let band = DyadicBand::new(4).unwrap();
        let f = SpectralField::single_mode(g, &[9], Complex64::new(1.0, 0.0)).unwrap();
        let p = project_leq(&f, band).unwrap();
        assert_eq!(p.l2_norm(), 0.0);
    }

    #[test]
    fn band_keeps_axis_mode_at_scale() {
        // |xi| = N on an axis: eta(1) = 1, eta(2) = 0, so P_N keeps it
        let g = Geometry::torus(1, 1.0, vec![64]).unwrap();
        let band = DyadicBand::new(8).unwrap();
        let f = SpectralField::single_mode(g.clone(), &[8], Complex64::new(2.0, 1.0)).unwrap();
        let p = project_band(&f, band).unwrap();
        for (a, b) in p.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-14);
        }
        // xi = 0 is annihilated by every band projection
        let c = SpectralField::single_mode(g, &[0], Complex64::new(1.0, 0.0)).unwrap();
        let pc = project_band(&c, band).unwrap();
        assert_eq!(pc.l2_norm(), 0.0);
    }
}
