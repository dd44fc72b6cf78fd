//! Sharpness certificates: the frequency-box wave packets that saturate the
//! bilinear constants, and the demonstration that the global-in-time product
//! norm diverges when only one Euclidean direction is present.
//!
//! Packet families (all built as indicator boxes on the frequency lattice):
//!
//! * `RealSeparated` on `R x T_lambda`: both packets have transverse width
//!   `N2`; the carriers are separated by `N1` in the Euclidean direction, so
//!   the fast packet crosses the slow one at relative speed `4 pi N1`.
//!   Certifies the `N2^{d-1}/N1` branch.
//! * `Torus1d` on `R x T_lambda`: single torus modes `N1`, `N2` with unit
//!   Euclidean boxes: the product modulus is flat, certifying `1/lambda`.
//! * `TorusHighd` on `R^2 x T_lambda`: `N2`-slabs carried by torus modes
//!   `N1`, `N2`, certifying `N2^{d-3}/lambda`.
//! * `GlobalFailure` on `R x T_lambda`: both data share the low-pass Gaussian
//!   profile in the Euclidean direction, so the bilinear norm over `[0, T]`
//!   reduces exactly to `lambda^{-3/2} ||e^{it D} phi||_{L^4(R x [0,T])}^2`,
//!   which grows like a positive multiple of `sqrt(log T)`.

use num_complex::Complex64;

use crate::bilinear::predicted_constant;
use crate::cutoff::CutoffSpec;
use crate::error::LabError;
use crate::fit::{fit_affine_in_log, LineFit};
use crate::modes::LatticeSpec;
use crate::par::{map_indexed, ExecMode};
use crate::separable::{bilinear_l2_adaptive, AxisModes, SeparableField};
use crate::Result;

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremizerFamily {
    RealSeparated,
    Torus1d,
    TorusHighd,
    GlobalFailure,
}

/// One sharpness instance: family plus `(lambda, N1, N2)`, with the derived
/// time horizon and Euclidean box length.
#[derive(Debug, Clone)]
pub struct ExtremizerCase {
    pub family: ExtremizerFamily,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub n1: u64,
    pub n2: u64,
    /// Window `[0, t_horizon]` over which the product norm is taken.
    pub t_horizon: f64,
    /// Euclidean truncation; sized so packets never wrap within the window.
    pub box_length: f64,
}

impl ExtremizerCase {
    pub fn new(family: ExtremizerFamily, lambda: f64, n1: u64, n2: u64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(LabError::Precondition("lambda must be positive".into()));
        }
        if n1 < n2 || n2 == 0 {
            return Err(LabError::Precondition(format!("need N1 >= N2 >= 1, got {n1}, {n2}")));
        }
        let (m, n) = match family {
            ExtremizerFamily::RealSeparated | ExtremizerFamily::Torus1d => (1, 1),
            ExtremizerFamily::TorusHighd => (2, 1),
            ExtremizerFamily::GlobalFailure => (1, 1),
        };
        let n1f = n1 as f64;
        let n2f = n2 as f64;
        // packet coherence time: boxes of width ~N2 disperse after ~1/N2^2
        let t_horizon = match family {
            ExtremizerFamily::Torus1d => 1.0,
            ExtremizerFamily::GlobalFailure => 10.0,
            _ => (1.0 / (n2f * n2f)).min(1.0),
        };
        // fastest Euclidean carrier among the pair
        let travel_band = match family {
            ExtremizerFamily::RealSeparated => n1f + 2.0 * n2f,
            ExtremizerFamily::Torus1d => 0.5,
            ExtremizerFamily::TorusHighd => 0.5 * n2f,
            ExtremizerFamily::GlobalFailure => 1.0,
        };
        let box_length = 64.0 * (4.0 * PI * travel_band * t_horizon).max(1.0);
        Ok(Self { family, m, n, lambda, n1, n2, t_horizon, box_length })
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.m, self.n, self.lambda, self.box_length)
    }

    fn torus_mode_numerator(&self, scale: u64) -> Result<i64> {
        let exact = scale as f64 * self.lambda;
        let num = exact.round();
        if (exact - num).abs() > 1e-9 {
            return Err(LabError::Precondition(format!(
                "torus frequency {scale} is not on the 1/lambda lattice (lambda = {})",
                self.lambda
            )));
        }
        Ok(num as i64)
    }
}

fn indicator_freq_interval(circumference: f64, lo: f64, hi: f64) -> AxisModes {
    let lo_num = (lo * circumference).ceil() as i64;
    let hi_num = (hi * circumference).floor() as i64;
    if hi_num < lo_num {
        AxisModes { circumference, modes: vec![] }
    } else {
        AxisModes::indicator(circumference, lo_num, hi_num)
    }
}

/// The indicator-box data pair of the case. Returned as separable fields;
/// norms come out of [`SeparableField::l2_norm`] and equal the box measures
/// under the weighted lattice measure.
pub fn build_pair(case: &ExtremizerCase) -> Result<(SeparableField, SeparableField)> {
    let l = case.box_length;
    let lam = case.lambda;
    let n1 = case.n1 as f64;
    let n2 = case.n2 as f64;
    match case.family {
        ExtremizerFamily::RealSeparated => {
            // f: xi_1 - N1 in [N2, 2N2]; g: xi_1 in [N2, 2N2]; both with
            // |xi_2| <= N2/2 on the torus lattice
            let transverse = indicator_freq_interval(lam, -0.5 * n2, 0.5 * n2);
            let f = SeparableField::new(vec![
                indicator_freq_interval(l, n1 + n2, n1 + 2.0 * n2),
                transverse.clone(),
            ])?;
            let g = SeparableField::new(vec![
                indicator_freq_interval(l, n2, 2.0 * n2),
                transverse,
            ])?;
            Ok((f, g))
        }
        ExtremizerFamily::Torus1d => {
            let base = indicator_freq_interval(l, -0.5, 0.5);
            let f = SeparableField::new(vec![
                base.clone(),
                AxisModes::single(lam, case.torus_mode_numerator(case.n1)?),
            ])?;
            let g = SeparableField::new(vec![
                base,
                AxisModes::single(lam, case.torus_mode_numerator(case.n2)?),
            ])?;
            Ok((f, g))
        }
        ExtremizerFamily::TorusHighd => {
            let slab = indicator_freq_interval(l, -0.5 * n2, 0.5 * n2);
            let f = SeparableField::new(vec![
                slab.clone(),
                slab.clone(),
                AxisModes::single(lam, case.torus_mode_numerator(case.n1)?),
            ])?;
            let g = SeparableField::new(vec![
                slab.clone(),
                slab,
                AxisModes::single(lam, case.torus_mode_numerator(case.n2)?),
            ])?;
            Ok((f, g))
        }
        ExtremizerFamily::GlobalFailure => {
            let mut modes = Vec::new();
            let bound = l.ceil() as i64;
            for k in -bound..=bound {
                let v = DispersiveProfile::phi_hat(k as f64 / l);
                if v.abs() > 1e-14 {
                    modes.push((k, Complex64::new(v, 0.0)));
                }
            }
            let base = AxisModes { circumference: l, modes };
            let f = SeparableField::new(vec![
                base.clone(),
                AxisModes::single(lam, case.torus_mode_numerator(case.n1)?),
            ])?;
            let g = SeparableField::new(vec![
                base,
                AxisModes::single(lam, case.torus_mode_numerator(case.n2)?),
            ])?;
            Ok((f, g))
        }
    }
}

/// Outcome of one sharpness measurement.
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub lhs: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub k_pred: f64,
    /// `lhs / (K^{1/2} |f| |g|)`, zero when degenerate.
    pub ratio: f64,
    pub steps: usize,
    pub t_horizon: f64,
    pub degenerate: bool,
}

/// Measures `r = lhs / (K^{1/2} |f| |g|)` for the case's packet pair over
/// `[0, t_horizon]`, refining the time quadrature until stable.
pub fn lower_bound_check(case: &ExtremizerCase) -> Result<RatioReport> {
    if case.family == ExtremizerFamily::GlobalFailure {
        return Err(LabError::UnsupportedRegime(
            "the global-failure family is measured by global_failure_growth".into(),
        ));
    }
    let (f, g) = build_pair(case)?;
    let norm_f = f.l2_norm();
    let norm_g = g.l2_norm();
    let k_pred = predicted_constant(case.m, case.n, case.lambda, case.n1, case.n2)?;
    if norm_f == 0.0 || norm_g == 0.0 {
        return Ok(RatioReport {
            lhs: 0.0,
            norm_f,
            norm_g,
            k_pred,
            ratio: 0.0,
            steps: 0,
            t_horizon: case.t_horizon,
            degenerate: true,
        });
    }
    let (lhs, steps) =
        bilinear_l2_adaptive(&f, &g, 0.0, case.t_horizon, 256, 5e-3, 1 << 14)?;
    let ratio = lhs / (k_pred.sqrt() * norm_f * norm_g);
    Ok(RatioReport {
        lhs,
        norm_f,
        norm_g,
        k_pred,
        ratio,
        steps,
        t_horizon: case.t_horizon,
        degenerate: false,
    })
}

/// The dyadic ladders used to certify each branch of `K` in trend form.
pub fn standard_ladder(family: ExtremizerFamily) -> Result<Vec<ExtremizerCase>> {
    match family {
        ExtremizerFamily::RealSeparated => [8u64, 16, 32, 64]
            .iter()
            .map(|&n1| ExtremizerCase::new(family, 4.0, n1, 4))
            .collect(),
        ExtremizerFamily::Torus1d => [2.0f64, 4.0, 8.0, 16.0]
            .iter()
            .map(|&lam| ExtremizerCase::new(family, lam, 16, 2))
            .collect(),
        ExtremizerFamily::TorusHighd => [2.0f64, 4.0, 8.0, 16.0]
            .iter()
            .map(|&lam| ExtremizerCase::new(family, lam, 32, 2))
            .collect(),
        ExtremizerFamily::GlobalFailure => Err(LabError::UnsupportedRegime(
            "global failure has no ratio ladder; use global_failure_growth".into(),
        )),
    }
}

/// Direct modulus of a one-axis packet at position `x`, time `t` (mode-sum
/// path, independent of the FFT evaluator; used by transport tests).
pub fn axis_modulus(axis: &AxisModes, x: f64, t: f64) -> f64 {
    let c = axis.circumference;
    let mut acc = Complex64::default();
    for &(k, a) in &axis.modes {
        let xi = k as f64 / c;
        let phase = TAU * x * xi - 4.0 * PI * PI * xi * xi * t;
        acc += a * Complex64::from_polar(1.0, phase);
    }
    acc.norm() / c
}

// ---------------------------------------------------------------------------
// Global-in-time failure: the dispersive profile and its L^4 growth.
// ---------------------------------------------------------------------------

/// The low-pass Gaussian `phi = P_{<1}(e^{-y^2})` on `R`, sampled once on a
/// wide window; all downstream evaluation is quadrature against these
/// samples.
#[derive(Debug, Clone)]
pub struct DispersiveProfile {
    w_half: f64,
    dw: f64,
    samples: Vec<Complex64>,
    /// `|phi|_{L^2(R)}`.
    pub l2: f64,
    /// `|phi_hat|_{L^4(R)}^4`; drives the predicted log-growth slope.
    pub l4_hat_fourth: f64,
    pub degenerate: bool,
}

impl DispersiveProfile {
    /// `phi_hat(xi) = eta_1(2 xi) sqrt(pi) e^{-pi^2 xi^2}` (the transform of
    /// `e^{-y^2}` under the `2*pi` convention, cut below frequency one).
    pub fn phi_hat(xi: f64) -> f64 {
        CutoffSpec.eta1(2.0 * xi) * PI.sqrt() * (-PI * PI * xi * xi).exp()
    }

    pub fn gaussian_lowpass() -> Self {
        let w_half = 48.0;
        let samples_n = 6144usize; // dw = 1/64
        let dw = 2.0 * w_half / samples_n as f64;
        // phi(w) by Simpson over the compact frequency support [-1, 1]
        let xi_nodes = 2001usize;
        let dxi = 2.0 / (xi_nodes - 1) as f64;
        let phi_vals: Vec<f64> =
            (0..xi_nodes).map(|i| Self::phi_hat(-1.0 + i as f64 * dxi)).collect();
        let samples: Vec<Complex64> = map_indexed(ExecMode::default(), samples_n, |p| {
            let w = -w_half + p as f64 * dw;
            let mut acc = Complex64::default();
            for (i, &ph) in phi_vals.iter().enumerate() {
                let simpson = if i == 0 || i == xi_nodes - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let xi = -1.0 + i as f64 * dxi;
                acc += simpson * ph * Complex64::from_polar(1.0, TAU * w * xi);
            }
            acc * (dxi / 3.0)
        });
        let mut l2_sq = 0.0;
        let mut l4 = 0.0;
        for (i, &ph) in phi_vals.iter().enumerate() {
            let simpson = if i == 0 || i == xi_nodes - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            l2_sq += simpson * ph * ph;
            l4 += simpson * ph.powi(4);
        }
        l2_sq *= dxi / 3.0;
        l4 *= dxi / 3.0;
        Self { w_half, dw, samples, l2: l2_sq.sqrt(), l4_hat_fourth: l4, degenerate: false }
    }

    pub fn zero() -> Self {
        Self {
            w_half: 1.0,
            dw: 1.0,
            samples: vec![Complex64::default(); 2],
            l2: 0.0,
            l4_hat_fourth: 0.0,
            degenerate: true,
        }
    }

    /// Predicted slope of `|u|_{L^4([0,T])}^4` against `ln T` from the
    /// stationary-phase profile: `|phi_hat|_4^4 / (4 pi)`.
    pub fn predicted_log_slope(&self) -> f64 {
        self.l4_hat_fourth / (4.0 * PI)
    }

    /// `|e^{it D} phi (x)|` via the Fresnel factorization
    /// `|u(x,t)| = (4 pi t)^{-1/2} |ghat_t(x / (4 pi t))|` with
    /// `g_t(w) = phi(w) e^{i w^2 / (4 t)}`, evaluating the transform by
    /// direct quadrature at the requested points.
    pub fn modulus_at(&self, xs: &[f64], t: f64) -> Vec<f64> {
        assert!(t > 0.0);
        let pref = 1.0 / (4.0 * PI * t).sqrt();
        xs.iter()
            .map(|&x| {
                let xi = x / (4.0 * PI * t);
                let mut acc = Complex64::default();
                for (p, &s) in self.samples.iter().enumerate() {
                    let w = -self.w_half + p as f64 * self.dw;
                    let phase = w * w / (4.0 * t) - TAU * w * xi;
                    acc += s * Complex64::from_polar(1.0, phase);
                }
                pref * (acc * self.dw).norm()
            })
            .collect()
    }

    /// `Gamma(t) = |u(t)|_{L^4(R)}^4` through the chirp-FFT route (valid for
    /// `t >~ 0.25` where the chirped spectrum stays under the sample
    /// Nyquist).
    pub fn l4_gamma_chirp(&self, t: f64) -> f64 {
        assert!(t > 0.0);
        let m = self.samples.len().next_power_of_two() * 4;
        let mut buf = vec![Complex64::default(); m];
        for (p, &s) in self.samples.iter().enumerate() {
            let w = -self.w_half + p as f64 * self.dw;
            buf[p] = s * Complex64::from_polar(1.0, w * w / (4.0 * t));
        }
        crate::fourier::fft_1d_forward(&mut buf);
        // |ghat(j/(m dw))| = dw |DFT_j|; integrate |ghat|^4 over xi
        let dxi = 1.0 / (m as f64 * self.dw);
        let sum: f64 = buf.iter().map(|v| (self.dw * v.norm()).powi(4)).sum();
        sum * dxi / (4.0 * PI * t)
    }

    /// `Gamma(t)` by direct frequency quadrature (valid for `t <~ 1`, where
    /// the wave has not outrun the sampled x-range).
    pub fn l4_gamma_direct(&self, t: f64) -> f64 {
        let x_half = 4.0 * PI * t + 64.0;
        let dx = 0.125;
        let nx = (2.0 * x_half / dx).ceil() as usize;
        let xi_nodes = 1601usize;
        let dxi = 2.0 / (xi_nodes - 1) as f64;
        let spectrum: Vec<Complex64> = (0..xi_nodes)
            .map(|i| {
                let xi = -1.0 + i as f64 * dxi;
                let simpson = if i == 0 || i == xi_nodes - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                Complex64::from_polar(
                    simpson * Self::phi_hat(xi) * dxi / 3.0,
                    -4.0 * PI * PI * xi * xi * t,
                )
            })
            .collect();
        let vals = map_indexed(ExecMode::default(), nx, |j| {
            let x = -x_half + (j as f64 + 0.5) * dx;
            let mut acc = Complex64::default();
            for (i, &sp) in spectrum.iter().enumerate() {
                let xi = -1.0 + i as f64 * dxi;
                acc += sp * Complex64::from_polar(1.0, TAU * x * xi);
            }
            acc.norm_sqr().powi(2)
        });
        vals.iter().sum::<f64>() * dx
    }

    pub fn l4_gamma(&self, t: f64) -> f64 {
        if self.degenerate {
            return 0.0;
        }
        if t < 0.75 {
            self.l4_gamma_direct(t)
        } else {
            self.l4_gamma_chirp(t)
        }
    }
}

/// One row of the growth table.
#[derive(Debug, Clone, Copy)]
pub struct GrowthRow {
    pub t_horizon: f64,
    /// `|e^{it D} phi|_{L^4(R x [0, T])}^4`.
    pub l4_fourth: f64,
    /// `|U f . U g|_{L^2(R x T_lambda x [0, T])} = lambda^{-3/2} sqrt(l4_fourth)`.
    pub bilinear_lhs: f64,
}

#[derive(Debug, Clone)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub fit: LineFit,
    pub predicted_slope: f64,
    pub degenerate: bool,
}

/// Growth of the fourth-power `L^4` norm over `[0, T]` for the `T` ladder,
/// plus the affine-in-`log T` fit certifying divergence in trend.
pub fn global_failure_growth(
    profile: &DispersiveProfile,
    lambda: f64,
    t_list: &[f64],
) -> Result<GrowthTable> {
    if t_list.len() < 2 {
        return Err(LabError::Precondition("need at least two horizons".into()));
    }
    let mut sorted = t_list.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted[0] <= 1.0 {
        return Err(LabError::Precondition("horizons must exceed 1".into()));
    }
    if profile.degenerate {
        let rows =
            sorted.iter().map(|&t| GrowthRow { t_horizon: t, l4_fourth: 0.0, bilinear_lhs: 0.0 }).collect();
        return Ok(GrowthTable {
            rows,
            fit: LineFit { slope: 0.0, intercept: 0.0, max_residual: 0.0, rms_residual: 0.0 },
            predicted_slope: 0.0,
            degenerate: true,
        });
    }

    // F(T) = int_0^T Gamma; trapezoid on [0,1], log-trapezoid above.
    let early_nodes = 25usize;
    let mut f_at_one = 0.0;
    {
        let h = 1.0 / (early_nodes - 1) as f64;
        let gammas = map_indexed(ExecMode::default(), early_nodes, |j| {
            let t = (j as f64 * h).max(1e-4);
            profile.l4_gamma(t)
        });
        for (j, g) in gammas.iter().enumerate() {
            let w = if j == 0 || j == early_nodes - 1 { 0.5 } else { 1.0 };
            f_at_one += w * g * h;
        }
    }
    let t_max = *sorted.last().unwrap();
    let per_decade = 96usize;
    let decades = (t_max.ln() / 10f64.ln()).max(0.1);
    let n_nodes = ((decades * per_decade as f64).ceil() as usize).max(16) + 1;
    let du = t_max.ln() / (n_nodes - 1) as f64;
    // Gamma(e^u) e^u on the log grid
    let gu = map_indexed(ExecMode::default(), n_nodes, |j| {
        let t = (j as f64 * du).exp();
        profile.l4_gamma(t) * t
    });
    // cumulative integral at each log node
    let mut cumulative = vec![0.0f64; n_nodes];
    for j in 1..n_nodes {
        cumulative[j] = cumulative[j - 1] + 0.5 * (gu[j - 1] + gu[j]) * du;
    }
    let f_of = |t: f64| -> f64 {
        let u = t.ln().clamp(0.0, t_max.ln());
        let pos = u / du;
        let j = (pos.floor() as usize).min(n_nodes - 2);
        let frac = pos - j as f64;
        f_at_one + cumulative[j] + frac * (cumulative[j + 1] - cumulative[j])
    };

    let rows: Vec<GrowthRow> = sorted
        .iter()
        .map(|&t| {
            let f = f_of(t);
            GrowthRow { t_horizon: t, l4_fourth: f, bilinear_lhs: lambda.powf(-1.5) * f.sqrt() }
        })
        .collect();
    let ts: Vec<f64> = rows.iter().map(|r| r.t_horizon).collect();
    let fs: Vec<f64> = rows.iter().map(|r| r.l4_fourth).collect();
    let fit = fit_affine_in_log(&ts, &fs)?;
    Ok(GrowthTable { rows, fit, predicted_slope: profile.predicted_log_slope(), degenerate: false })
}

/// One decay sample: `sqrt(t) * min_{|x| <= t/1000} |u(x, t)|`.
#[derive(Debug, Clone, Copy)]
pub struct DecayRow {
    pub t: f64,
    pub scaled_min_modulus: f64,
}

#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
    pub anchor: f64,
    pub degenerate: bool,
}

/// Tracks the dispersive lower bound `|u(x,t)| >~ t^{-1/2}` on the cone
/// `|x| <= t/1000`: returns `sqrt(t) min |u|` per time, anchored at the
/// first entry.
pub fn decay_profile(profile: &DispersiveProfile, t_list: &[f64]) -> Result<DecayProfile> {
    if t_list.is_empty() {
        return Err(LabError::Precondition("need at least one time".into()));
    }
    if t_list.iter().any(|&t| t < 2.0) {
        return Err(LabError::Precondition("decay profile is a large-time statement; t >= 2".into()));
    }
    if profile.degenerate {
        let rows = t_list.iter().map(|&t| DecayRow { t, scaled_min_modulus: 0.0 }).collect();
        return Ok(DecayProfile { rows, anchor: 0.0, degenerate: true });
    }
    let rows: Vec<DecayRow> = t_list
        .iter()
        .map(|&t| {
            let nx = 33usize;
            let xs: Vec<f64> = (0..nx).map(|j| t / 1000.0 * j as f64 / (nx - 1) as f64).collect();
            let mods = profile.modulus_at(&xs, t);
            let min = mods.iter().cloned().fold(f64::INFINITY, f64::min);
            DecayRow { t, scaled_min_modulus: t.sqrt() * min }
        })
        .collect();
    let anchor = rows[0].scaled_min_modulus;
    Ok(DecayProfile { rows, anchor, degenerate: false })
}

/// Lattice cross-check of the global-failure reduction at small horizons:
/// evaluates the actual bilinear norm of the lattice pair over `[0, T]`
/// through the separable quadrature. Errors if the packet would wrap.
pub fn global_failure_lhs_lattice(case: &ExtremizerCase, t: f64) -> Result<f64> {
    if case.family != ExtremizerFamily::GlobalFailure {
        return Err(LabError::Precondition("expected the global-failure family".into()));
    }
    let travel = 4.0 * PI * 1.0 * t + 2.0 * 48.0;
    if travel > 0.5 * case.box_length {
        return Err(LabError::Precondition(format!(
            "box wraparound within [0, {t}]: travel {travel} exceeds half the box {}; enlarge the box",
            case.box_length
        )));
    }
    let (f, g) = build_pair(case)?;
    let (lhs, _) = bilinear_l2_adaptive(&f, &g, 0.0, t, 256, 5e-3, 1 << 14)?;
    Ok(lhs)
}
