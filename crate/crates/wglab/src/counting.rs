//! Direct evaluation of the paraboloid-shell measures behind the bilinear
//! estimate: the set
//!
//! `C = { xi in R x Z_{1/lambda} : |xi| ~ N2, | |xi|^2 + |eta - xi|^2 - tau | <= thickness }`
//!
//! its discrete slices `C_k` at `xi_torus = k/lambda`, the shifted-radius
//! sequence `mu_k`, closed-form slice lengths, and suprema over `(eta, tau)`.
//! Everything is scalar arithmetic; a dense brute-force quadrature serves as
//! the independent oracle.

use rand::Rng;

use crate::error::LabError;
use crate::par::{map_indexed, ExecMode};
use crate::rng::stream_rng;
use crate::Result;

/// One fixed `(eta, tau)` counting problem. The torus component of `eta` is
/// kept on the lattice as an integer numerator.
#[derive(Debug, Clone)]
pub struct CountingInstance {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub n1: u64,
    pub n2: u64,
    /// Euclidean components of eta (length `m`).
    pub eta_real: Vec<f64>,
    /// Torus component numerator: the component itself is `k/lambda`.
    pub eta_torus_num: i64,
    pub tau: f64,
    /// Full width of the shell condition `|...| <= thickness`.
    pub thickness: f64,
}

impl CountingInstance {
    pub fn new(
        m: usize,
        n: usize,
        lambda: f64,
        n1: u64,
        n2: u64,
        eta_real: Vec<f64>,
        eta_torus_num: i64,
        tau: f64,
        thickness: f64,
    ) -> Result<Self> {
        if n != 1 || (m != 1 && m != 2) {
            return Err(LabError::UnsupportedRegime(format!(
                "counting oracle covers (m, n) in {{(1,1), (2,1)}}, got ({m}, {n})"
            )));
        }
        if eta_real.len() != m {
            return Err(LabError::Precondition(format!(
                "expected {m} Euclidean eta components, got {}",
                eta_real.len()
            )));
        }
        if !(thickness > 0.0) {
            return Err(LabError::Precondition(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(LabError::Precondition("lambda must be positive".into()));
        }
        let inst = Self { m, n, lambda, n1, n2, eta_real, eta_torus_num, tau, thickness };
        let r = inst.eta_norm();
        let (n1f, lo, hi) = (n1 as f64, 0.5 * n1 as f64, 2.0 * n1 as f64);
        if r < lo || r > hi {
            return Err(LabError::Precondition(format!(
                "|eta| = {r} outside the dyadic window [{lo}, {hi}] of N1 = {n1f}"
            )));
        }
        Ok(inst)
    }

    pub fn eta_torus(&self) -> f64 {
        self.eta_torus_num as f64 / self.lambda
    }

    pub fn eta_norm_sq(&self) -> f64 {
        self.eta_real.iter().map(|x| x * x).sum::<f64>() + self.eta_torus().powi(2)
    }

    pub fn eta_norm(&self) -> f64 {
        self.eta_norm_sq().sqrt()
    }

    /// `mu_k = tau/2 - |eta|^2/4 - (k/lambda - eta_torus/2)^2`.
    pub fn mu(&self, k: i64) -> f64 {
        let off = k as f64 / self.lambda - 0.5 * self.eta_torus();
        0.5 * self.tau - 0.25 * self.eta_norm_sq() - off * off
    }

    /// Closed form of the first difference `mu_{k+1} - mu_k` (matches the
    /// finite difference to rounding).
    pub fn mu_increment(&self, k: i64) -> f64 {
        -(2 * k + 1) as f64 / (self.lambda * self.lambda) + self.eta_torus() / self.lambda
    }

    /// Range of slice indices that can intersect the annulus `|xi| <= 2 N2`.
    pub fn slice_range(&self) -> std::ops::RangeInclusive<i64> {
        let bound = (2.0 * self.n2 as f64 * self.lambda).ceil() as i64;
        -bound..=bound
    }
}

/// One slice of the set: index, shifted radius, and the unconstrained
/// closed-form section length.
#[derive(Debug, Clone, Copy)]
pub struct SliceProfile {
    pub k: i64,
    pub mu: f64,
    pub length: f64,
}

/// Exact measure of `{ s : | (s - a)^2 - mu | <= thickness/2 }` in `s`
/// (independent of the shift `a`): empty below `-thickness/2`, two symmetric
/// intervals that merge once `mu <= thickness/2`.
pub fn slice_length_closed_form(mu: f64, thickness: f64) -> Result<f64> {
    if !(thickness > 0.0) {
        return Err(LabError::Precondition(format!(
            "thickness must be positive, got {thickness}"
        )));
    }
    let h = 0.5 * thickness;
    if mu < -h {
        return Ok(0.0);
    }
    let outer = (mu + h).sqrt();
    let inner = (mu - h).max(0.0).sqrt();
    Ok(2.0 * (outer - inner))
}

/// `mu_k` over a slice-index range, with the unconstrained section lengths.
pub fn mu_sequence(
    inst: &CountingInstance,
    k_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<SliceProfile>> {
    if inst.m != 1 {
        return Err(LabError::UnsupportedRegime(
            "mu_sequence is the (m, n) = (1, 1) slice decomposition".into(),
        ));
    }
    k_range
        .map(|k| {
            let mu = inst.mu(k);
            Ok(SliceProfile { k, mu, length: slice_length_closed_form(mu, inst.thickness)? })
        })
        .collect()
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// The two (possibly merged) intervals `{ s : |(s-a)^2 - mu| <= h }` around
/// center `a`.
fn slice_intervals(a: f64, mu: f64, half: f64) -> [(f64, f64); 2] {
    if mu < -half {
        return [(0.0, 0.0), (0.0, 0.0)];
    }
    let outer = (mu + half).sqrt();
    let inner = (mu - half).max(0.0).sqrt();
    [(a - outer, a - inner), (a + inner, a + outer)]
}

/// `{ s : lo_sq <= s^2 <= hi_sq }` as up to two intervals; empty when
/// `hi_sq < 0`.
fn ring_intervals(lo_sq: f64, hi_sq: f64) -> [(f64, f64); 2] {
    if hi_sq <= 0.0 {
        return [(0.0, 0.0), (0.0, 0.0)];
    }
    let hi = hi_sq.sqrt();
    let lo = lo_sq.max(0.0).sqrt();
    [(-hi, -lo), (lo, hi)]
}

fn intervals_overlap_len(a: &[(f64, f64); 2], b: &[(f64, f64); 2]) -> f64 {
    let mut acc = 0.0;
    for ia in a {
        if ia.1 > ia.0 {
            for ib in b {
                acc += overlap(*ia, *ib);
            }
        }
    }
    acc
}

/// Weighted measure of `C` by exact interval arithmetic: per-slice closed
/// forms intersected with the annulus `N2/2 <= |xi| <= 2 N2`, weighted
/// `1/lambda` for the discrete direction, plus an outer quadrature over the
/// second Euclidean coordinate in the `(2, 1)` case.
pub fn measure_c(inst: &CountingInstance) -> Result<f64> {
    match inst.m {
        1 => measure_c_11(inst),
        2 => measure_c_21(inst, 2048),
        _ => Err(LabError::UnsupportedRegime("measure_c covers m in {1, 2}".into())),
    }
}

fn measure_c_11(inst: &CountingInstance) -> Result<f64> {
    let half = 0.5 * inst.thickness;
    let a = 0.5 * inst.eta_real[0];
    let n2 = inst.n2 as f64;
    let mut acc = 0.0;
    for k in inst.slice_range() {
        let mu = inst.mu(k);
        if mu < -half {
            continue;
        }
        let xi2 = k as f64 / inst.lambda;
        let lo_sq = 0.25 * n2 * n2 - xi2 * xi2;
        let hi_sq = 4.0 * n2 * n2 - xi2 * xi2;
        let slice = slice_intervals(a, mu, half);
        let ring = ring_intervals(lo_sq, hi_sq);
        acc += intervals_overlap_len(&slice, &ring);
    }
    Ok(acc / inst.lambda)
}

/// Case 2(a) reduction: fix the second Euclidean coordinate, reuse the 1-D
/// slice geometry, integrate over it by the midpoint rule.
fn measure_c_21(inst: &CountingInstance, xi2_steps: usize) -> Result<f64> {
    let half = 0.5 * inst.thickness;
    let a1 = 0.5 * inst.eta_real[0];
    let a2 = 0.5 * inst.eta_real[1];
    let n2 = inst.n2 as f64;
    let lo = -2.0 * n2;
    let hi = 2.0 * n2;
    let step = (hi - lo) / xi2_steps as f64;
    let ks: Vec<i64> = inst.slice_range().collect();
    let mut acc = 0.0;
    for j in 0..xi2_steps {
        let xi2 = lo + (j as f64 + 0.5) * step;
        let mut sect = 0.0;
        for &k in &ks {
            let mu_prime = inst.mu(k) - (xi2 - a2) * (xi2 - a2);
            if mu_prime < -half {
                continue;
            }
            let xi3 = k as f64 / inst.lambda;
            let lo_sq = 0.25 * n2 * n2 - xi2 * xi2 - xi3 * xi3;
            let hi_sq = 4.0 * n2 * n2 - xi2 * xi2 - xi3 * xi3;
            let slice = slice_intervals(a1, mu_prime, half);
            let ring = ring_intervals(lo_sq, hi_sq);
            sect += intervals_overlap_len(&slice, &ring);
        }
        acc += sect * step;
    }
    Ok(acc / inst.lambda)
}

/// Dense-grid brute force: Euclidean steps of `1/(grid_factor * N1)`,
/// exact slice enumeration in the discrete direction.
pub fn measure_c_bruteforce(inst: &CountingInstance, grid_factor: u32) -> Result<f64> {
    let n2 = inst.n2 as f64;
    let step = 1.0 / (grid_factor as f64 * inst.n1 as f64);
    let r = 2.0 * n2;
    let steps = (2.0 * r / step).ceil() as usize;
    let eta_t = inst.eta_torus();
    let ks: Vec<i64> = inst.slice_range().collect();
    let shell = |xi_sq: f64, diff_sq: f64| -> bool {
        let v = xi_sq + diff_sq - inst.tau;
        v.abs() <= inst.thickness
            && xi_sq >= 0.25 * n2 * n2
            && xi_sq <= 4.0 * n2 * n2
    };
    let total: f64 = match inst.m {
        1 => {
            let rows = map_indexed(ExecMode::default(), ks.len(), |ki| {
                let k = ks[ki];
                let xi2 = k as f64 / inst.lambda;
                let d2 = xi2 - eta_t;
                let mut acc = 0.0;
                for i in 0..steps {
                    let xi1 = -r + (i as f64 + 0.5) * step;
                    let xi_sq = xi1 * xi1 + xi2 * xi2;
                    let diff_sq = (xi1 - inst.eta_real[0]).powi(2) + d2 * d2;
                    if shell(xi_sq, diff_sq) {
                        acc += step;
                    }
                }
                acc
            });
            rows.iter().sum()
        }
        2 => {
            let rows = map_indexed(ExecMode::default(), ks.len(), |ki| {
                let k = ks[ki];
                let xi3 = k as f64 / inst.lambda;
                let d3 = xi3 - eta_t;
                let mut acc = 0.0;
                for i in 0..steps {
                    let xi1 = -r + (i as f64 + 0.5) * step;
                    for j in 0..steps {
                        let xi2 = -r + (j as f64 + 0.5) * step;
                        let xi_sq = xi1 * xi1 + xi2 * xi2 + xi3 * xi3;
                        let diff_sq = (xi1 - inst.eta_real[0]).powi(2)
                            + (xi2 - inst.eta_real[1]).powi(2)
                            + d3 * d3;
                        if shell(xi_sq, diff_sq) {
                            acc += step * step;
                        }
                    }
                }
                acc
            });
            rows.iter().sum()
        }
        _ => return Err(LabError::UnsupportedRegime("brute force covers m in {1, 2}".into())),
    };
    Ok(total / inst.lambda)
}

/// `tau` putting the shell through the point `rho * eta/|eta|` (annulus
/// tangency probes).
pub fn tau_through_radius(
    m: usize,
    eta_real: &[f64],
    eta_torus: f64,
    rho: f64,
) -> f64 {
    let mut norm_sq = eta_torus * eta_torus;
    for x in eta_real {
        norm_sq += x * x;
    }
    let norm = norm_sq.sqrt().max(1e-300);
    // xi = rho * eta/|eta|: tau = |xi|^2 + |eta - xi|^2
    let scale = rho / norm;
    let mut tau = 0.0;
    for x in eta_real.iter().take(m) {
        let xi = x * scale;
        tau += xi * xi + (x - xi) * (x - xi);
    }
    let xit = eta_torus * scale;
    tau + xit * xit + (eta_torus - xit) * (eta_torus - xit)
}

/// Result of a supremum search over `(eta, tau)`.
#[derive(Debug, Clone)]
pub struct SupResult {
    pub sup: f64,
    pub mean: f64,
    pub evaluated: usize,
    pub argmax: Option<CountingInstance>,
}

/// Maximizes `measure_c` over randomized and adversarial `(eta, tau)` draws.
/// Adversarial draws pin some `mu_k` into `[-1, 1]` (the resonant slices)
/// and aim the shell at annulus tangencies.
pub fn measure_c_sup(
    m: usize,
    n: usize,
    lambda: f64,
    n1: u64,
    n2: u64,
    thickness: f64,
    draws: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<SupResult> {
    if draws < 100 {
        return Err(LabError::Precondition(format!("need at least 100 draws, got {draws}")));
    }
    let measures = map_indexed(mode, draws, |i| -> Result<(f64, CountingInstance)> {
        let mut rng = stream_rng(seed, &[0x51, i as u64]);
        let inst = random_instance(m, n, lambda, n1, n2, thickness, i, &mut rng)?;
        let v = measure_c(&inst)?;
        Ok((v, inst))
    });
    let mut sup = -1.0;
    let mut argmax = None;
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in measures {
        let (v, inst) = r?;
        sum += v;
        count += 1;
        if v > sup {
            sup = v;
            argmax = Some(inst);
        }
    }
    Ok(SupResult { sup, mean: sum / count.max(1) as f64, evaluated: count, argmax })
}

/// Mixed random/adversarial instance generator. The adversarial classes
/// cover the proof's worst cases: `tau` pinning some `mu_k` into the
/// resonant window, `tau` putting the shell tangent to the annulus, and
/// `eta` aligned with the discrete axis (small Euclidean components), which
/// is the configuration whose slices actually reach the annulus when
/// `N1 >> N2`.
fn random_instance(
    m: usize,
    n: usize,
    lambda: f64,
    n1: u64,
    n2: u64,
    thickness: f64,
    index: usize,
    rng: &mut impl Rng,
) -> Result<CountingInstance> {
    let n1f = n1 as f64;
    let n2f = n2 as f64;
    let class = index % 6;
    let aligned = matches!(class, 2 | 4 | 5);
    // |eta| in the dyadic window, torus component on the lattice
    let r = rng.gen_range(0.55 * n1f..1.9 * n1f);
    let (eta_real, eta_t_num) = if aligned {
        // Euclidean components held at the annulus scale; the torus
        // numerator carries essentially all of |eta|
        let spread = 2.0 * n2f;
        let e: Vec<f64> = match m {
            1 => vec![rng.gen_range(-spread..spread)],
            2 => vec![rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)],
            _ => return Err(LabError::UnsupportedRegime("m in {1, 2}".into())),
        };
        let e_sq: f64 = e.iter().map(|x| x * x).sum();
        let want = (r * r - e_sq).max(0.3 * n1f * n1f).sqrt();
        ((e), (want * lambda).round() as i64)
    } else {
        let max_t = ((r * 0.995) * lambda).floor() as i64;
        let tnum = rng.gen_range(-max_t..=max_t);
        let eta_t = tnum as f64 / lambda;
        let leftover = (r * r - eta_t * eta_t).max(0.0).sqrt();
        let e = match m {
            1 => vec![if rng.gen_bool(0.5) { leftover } else { -leftover }],
            2 => {
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                vec![leftover * phi.cos(), leftover * phi.sin()]
            }
            _ => return Err(LabError::UnsupportedRegime("m in {1, 2}".into())),
        };
        (e, tnum)
    };
    let eta_t = eta_t_num as f64 / lambda;
    // clamp back into the dyadic window if the alignment overshot
    let norm = (eta_real.iter().map(|x| x * x).sum::<f64>() + eta_t * eta_t).sqrt();
    let (eta_real, eta_t_num) = if norm < 0.5 * n1f || norm > 2.0 * n1f {
        let scale = (n1f / norm).max(0.501 * n1f / norm).min(1.999 * n1f / norm);
        (
            eta_real.iter().map(|x| x * scale).collect::<Vec<_>>(),
            ((eta_t * scale) * lambda).round() as i64,
        )
    } else {
        (eta_real, eta_t_num)
    };
    let eta_t = eta_t_num as f64 / lambda;
    let norm_sq = eta_real.iter().map(|x| x * x).sum::<f64>() + eta_t * eta_t;

    let tau = match class {
        // resonant: pin mu_{k*} into the window of surviving slices, with
        // k* ranged over the annulus-compatible indices
        1 | 2 => {
            let kmax = (2.0 * n2f * lambda).floor() as i64;
            let kstar = rng.gen_range(-kmax..=kmax);
            let hi = (4.0 * n2f * n2f).min(16.0);
            let target: f64 = rng.gen_range(-thickness..hi);
            let off = kstar as f64 / lambda - 0.5 * eta_t;
            2.0 * (target + off * off + 0.25 * norm_sq)
        }
        // tangency: shell through a point of the annulus
        3 | 4 => {
            let rho = [0.5 * n2f, n2f, 2.0 * n2f][rng.gen_range(0..3usize)];
            tau_through_radius(m, &eta_real, eta_t, rho)
                + rng.gen_range(-2.0 * thickness..2.0 * thickness)
        }
        // plain random over the geometrically possible range
        _ => {
            let lo = 0.45 * norm_sq;
            let hi = (norm_sq.sqrt() + 2.0 * n2f).powi(2) + 4.0 * n2f * n2f;
            rng.gen_range(lo..hi)
        }
    };
    CountingInstance::new(m, n, lambda, n1, n2, eta_real, eta_t_num, tau, thickness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_length_reference_values() {
        // spec'd endpoints of the quadratic inequality
        assert_eq!(slice_length_closed_form(-1.0, 1.0).unwrap(), 0.0);
        let v = slice_length_closed_form(1.0, 1.0).unwrap();
        assert!((v - 2.0 * (1.5f64.sqrt() - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((v - 1.035276).abs() < 1e-6);
        let merged = slice_length_closed_form(0.25, 1.0).unwrap();
        assert!((merged - 2.0 * 0.75f64.sqrt()).abs() < 1e-12);
        assert!((merged - 1.732051).abs() < 1e-6);
        assert!(slice_length_closed_form(1.0, 0.0).is_err());
    }

    #[test]
    fn mu_closed_forms() {
        // eta_2 = 0, tau = |eta|^2/2 gives mu_k = -k^2/lambda^2
        let lam = 4.0;
        let inst = CountingInstance::new(
            1, 1, lam, 8, 2, vec![8.0], 0, 32.0, 1.0,
        )
        .unwrap();
        for k in -5..=5 {
            assert!((inst.mu(k) + (k as f64 / lam).powi(2)).abs() < 1e-12);
            assert!((inst.mu(-k) - inst.mu(k)).abs() < 1e-12);
        }
        // first difference matches the closed form to rounding
        let inst2 = CountingInstance::new(
            1, 1, lam, 16, 2, vec![9.0], 50, 150.0, 1.0,
        )
        .unwrap();
        for k in -20..=20 {
            let fd = inst2.mu(k + 1) - inst2.mu(k);
            assert!((fd - inst2.mu_increment(k)).abs() < 1e-10);
        }
    }

    #[test]
    fn stored_fixture_monotone() {
        // lambda=8, N1=64, eta=(0,64), tau=4096: monotone over k in [0, 8*lambda]
        let inst = CountingInstance::new(
            1, 1, 8.0, 64, 8, vec![0.0], 512, 4096.0, 1.0,
        )
        .unwrap();
        let profiles = mu_sequence(&inst, 0..=64).unwrap();
        for w in profiles.windows(2) {
            assert!(w[1].mu > w[0].mu);
        }
    }

    #[test]
    fn empty_shell_when_tau_zero() {
        let inst = CountingInstance::new(
            1, 1, 4.0, 32, 2, vec![32.0], 0, 0.0, 1.0,
        )
        .unwrap();
        assert_eq!(measure_c(&inst).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_matches_bruteforce_11() {
        let inst = CountingInstance::new(
            1, 1, 4.0, 16, 4, vec![10.0], 50, 180.0, 1.0,
        )
        .unwrap();
        let a = measure_c(&inst).unwrap();
        let b = measure_c_bruteforce(&inst, 64).unwrap();
        if a > 1e-6 {
            assert!((a - b).abs() <= 0.02 * a + 1e-6, "closed={a}, brute={b}");
        }
    }
}
