//! The free propagator: the unit-modulus frequency multiplier
//! `e^{-4 pi^2 i |xi|^2 t}` matching the `2*pi` transform convention
//! (plane waves travel with group velocity `4 pi xi`).

use num_complex::Complex64;

use crate::field::{Domain, SpectralField};
use crate::Result;

/// Phase angle of the multiplier at squared frequency `|xi|^2` and time `t`.
#[inline]
pub fn phase_angle(xi_sq: f64, t: f64) -> f64 {
    -4.0 * std::f64::consts::PI.powi(2) * xi_sq * t
}

/// Multiplier value at the frequency vector `xi`.
#[inline]
pub fn multiplier(xi: &[f64], t: f64) -> Complex64 {
    let xi_sq: f64 = xi.iter().map(|&x| x * x).sum();
    Complex64::from_polar(1.0, phase_angle(xi_sq, t))
}

/// `U(t) f`. The result is returned in the domain the input came in.
pub fn propagate(f: &SpectralField, t: f64) -> Result<SpectralField> {
    let was_physical = f.domain() == Domain::Physical;
    let hat = f.to_frequency()?;
    let (geometry, _, mut values) = hat.into_parts();
    geometry.for_each_freq(|flat, xi| {
        values[flat] *= multiplier(xi, t);
    });
    let out = SpectralField::new(geometry, Domain::Frequency, values)?;
    if was_physical {
        out.inverse_transform()
    } else {
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;

    #[test]
    fn zero_time_is_identity() {
        let g = Geometry::new(1, 1, 2.0, 4.0, vec![16, 8]).unwrap();
        let f = SpectralField::from_freq_fn(g, |xi| Complex64::new(xi[0], xi[1] - 0.25));
        let u = propagate(&f, 0.0).unwrap();
        for (a, b) in u.values().iter().zip(f.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_mode_picks_up_global_phase() {
        let g = Geometry::torus(1, 2.0, vec![16]).unwrap();
        let k = 3i64;
        let f = SpectralField::single_mode(g, &[k], Complex64::new(1.0, 0.0)).unwrap();
        let t = 0.37;
        let u = propagate(&f, t).unwrap();
        let xi = k as f64 / 2.0;
        let expect = Complex64::from_polar(1.0, phase_angle(xi * xi, t));
        let phys = u.inverse_transform().unwrap();
        let f_phys = f.inverse_transform().unwrap();
        for (a, b) in phys.values().iter().zip(f_phys.values()) {
            assert!((a - b * expect).norm() < 1e-12);
            assert!((a.norm() - 1.0).abs() < 1e-12); // modulus pointwise constant
        }
    }
}
