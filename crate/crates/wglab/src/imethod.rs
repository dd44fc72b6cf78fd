//! Split-step spectral solver for the (2k+1)-order defocusing NLS
//! `i u_t + Delta u = |u|^{2k} u` on the mixed domain, the smoothing
//! multiplier `I_N` mapping `H^s` to `H^1`, and the modified-energy
//! increment experiment.
//!
//! The linear half of the flow is exact (frequency multiplier); Strang
//! splitting carries the nonlinearity, so mass is conserved to rounding and
//! the energy drift is second order in `dt`.

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::LabError;
use crate::field::{Domain, SpectralField};
use crate::fit::{fit_log_log, LineFit};
use crate::fourier::fft_nd;
use crate::geometry::Geometry;
use crate::par::ExecMode;
use crate::rng::stream_rng;
use crate::Result;

use rand::Rng;

const PI: f64 = std::f64::consts::PI;

/// The multiplier profile `psi`: 1 below 1, `r^{s-1}` above 2, and a
/// monotone C^1 Hermite bridge on `[1, 2]`.
#[derive(Debug, Clone, Copy)]
pub struct IMultiplierSpec {
    pub n: u64,
    pub s: f64,
}

impl IMultiplierSpec {
    pub fn new(n: u64, s: f64) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(LabError::Precondition(format!(
                "cutoff must be a dyadic integer, got {n}"
            )));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(LabError::Precondition(format!("regularity s must lie in (0, 1], got {s}")));
        }
        Ok(Self { n, s })
    }

    /// The 1-D profile `psi(r)`.
    pub fn psi(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= 1.0 || self.s == 1.0 {
            1.0
        } else if r >= 2.0 {
            r.powf(self.s - 1.0)
        } else {
            // Hermite data: value/slope 1, 0 at r=1 and 2^{s-1}, (s-1) 2^{s-2} at r=2
            let t = r - 1.0;
            let y1 = 2f64.powf(self.s - 1.0);
            let m1 = (self.s - 1.0) * 2f64.powf(self.s - 2.0);
            let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
            let h01 = -2.0 * t * t * t + 3.0 * t * t;
            let h11 = t * t * t - t * t;
            h00 + h01 * y1 + h11 * m1
        }
    }

    /// `m_N(xi) = psi(|xi|/N)`.
    pub fn multiplier(&self, xi_norm: f64) -> f64 {
        self.psi(xi_norm / self.n as f64)
    }
}

/// Frequency multiplication by `m_N`; identity on fields band-limited under
/// the cutoff.
pub fn apply_i_multiplier(f: &SpectralField, spec: &IMultiplierSpec) -> Result<SpectralField> {
    let was_physical = f.domain() == Domain::Physical;
    let hat = f.to_frequency()?;
    let (geometry, _, mut values) = hat.into_parts();
    geometry.for_each_freq(|flat, xi| {
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        values[flat] *= spec.multiplier(norm);
    });
    let out = SpectralField::new(geometry, Domain::Frequency, values)?;
    if was_physical {
        out.inverse_transform()
    } else {
        Ok(out)
    }
}

/// The Hamiltonian of `i u_t + Delta u = nu |u|^{2k} u`:
/// `int 1/2 |grad u|^2 + nu/(2k+2) |u|^{2k+2}`. The gradient term is summed
/// spectrally, the potential term by the grid quadrature. `nu = 1` is the
/// standard defocusing energy; `nu = 0` reduces to the linear Hamiltonian,
/// which the control experiments rely on.
pub fn energy_with_coefficient(u: &SpectralField, k: u32, nu: f64) -> Result<f64> {
    let phys = u.to_physical()?;
    let hat = u.to_frequency()?;
    let g = phys.geometry();
    let w = g.measure_weight();
    let hat_values = hat.values();
    let mut acc = 0.0;
    g.for_each_freq(|flat, xi| {
        let grad_sq = xi.iter().map(|x| (2.0 * PI * x).powi(2)).sum::<f64>();
        acc += grad_sq * hat_values[flat].norm_sqr();
    });
    let kinetic = 0.5 * w * acc;
    let p = 2 * k as i32 + 2;
    let pot: f64 = phys.values().iter().map(|v| v.norm_sqr().powi(p / 2)).sum::<f64>()
        * g.cell_volume()
        / p as f64;
    Ok(kinetic + nu * pot)
}

/// The standard defocusing energy `E(u)` (`nu = 1`).
pub fn energy(u: &SpectralField, k: u32) -> Result<f64> {
    energy_with_coefficient(u, k, 1.0)
}

/// Sobolev norm `( sum w (1 + 4 pi^2 |xi|^2)^s |u_hat|^2 )^{1/2}`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> Result<f64> {
    let hat = u.to_frequency()?;
    let g = hat.geometry();
    let w = g.measure_weight();
    let values = hat.values();
    let mut acc = 0.0;
    g.for_each_freq(|flat, xi| {
        let xi_sq = xi.iter().map(|x| x * x).sum::<f64>();
        acc += (1.0 + 4.0 * PI * PI * xi_sq).powf(s) * values[flat].norm_sqr();
    });
    Ok((w * acc).sqrt())
}

/// Solver configuration for one evolution.
#[derive(Debug, Clone)]
pub struct NlsRun {
    pub geometry: Geometry,
    /// Nonlinearity order index: the power is `|u|^{2k} u`.
    pub k: u32,
    /// Coefficient in front of the nonlinearity (0 switches it off).
    pub nonlinearity: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Trace samples are taken every `sample_every` steps (and at both ends).
    pub sample_every: usize,
}

impl NlsRun {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(LabError::Precondition("nonlinearity index k must be >= 1".into()));
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) {
            return Err(LabError::Precondition("dt and t_end must be positive".into()));
        }
        Ok(())
    }
}

/// Time series of the conserved and almost-conserved quantities.
#[derive(Debug, Clone)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// `E(I_N u)`; empty when no multiplier was supplied.
    pub modified: Vec<f64>,
}

impl EnergyTrace {
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0.max(1e-300)
    }

    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1e-300)
    }

    /// Largest modified-energy increment over the trace.
    pub fn modified_increment(&self) -> f64 {
        if self.modified.is_empty() {
            return 0.0;
        }
        let e0 = self.modified[0];
        self.modified.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

/// Strang-splitting evolution of `u0` with per-sample conserved-quantity
/// bookkeeping. Aborts with a diagnostic if the sup norm grows by 1e6.
pub fn split_step_evolve(
    run: &NlsRun,
    u0: &SpectralField,
    imult: Option<&IMultiplierSpec>,
) -> Result<EnergyTrace> {
    run.validate()?;
    if u0.geometry() != &run.geometry {
        return Err(LabError::GeometryMismatch);
    }
    let phys = u0.to_physical()?;
    let g = run.geometry.clone();
    let shape: Vec<usize> = g.grid_points().to_vec();
    let steps = (run.t_end / run.dt).round().max(1.0) as usize;
    let dt = run.t_end / steps as f64;

    // exact linear multiplier for one step
    let mut linear_phase = vec![Complex64::default(); g.total_points()];
    g.for_each_freq(|flat, xi| {
        let xi_sq: f64 = xi.iter().map(|x| x * x).sum();
        linear_phase[flat] = Complex64::from_polar(1.0, -4.0 * PI * PI * xi_sq * dt);
    });

    let mut values = phys.values().to_vec();
    let sup0 = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mode = ExecMode::default();
    let kexp = run.k as i32;
    let half = 0.5 * run.nonlinearity * dt;

    let mut trace = EnergyTrace {
        times: Vec::new(),
        mass: Vec::new(),
        energy: Vec::new(),
        modified: Vec::new(),
    };
    // conserved quantities are measured against the Hamiltonian actually
    // driving the run, so the linear control conserves them exactly
    let nu = run.nonlinearity;
    let mut record = |t: f64, values: &[Complex64]| -> Result<()> {
        let field =
            SpectralField::new(g.clone(), Domain::Physical, values.to_vec())?;
        trace.times.push(t);
        trace.mass.push(field.l2_norm().powi(2));
        trace.energy.push(energy_with_coefficient(&field, run.k, nu)?);
        if let Some(spec) = imult {
            let smoothed = apply_i_multiplier(&field, spec)?;
            trace.modified.push(energy_with_coefficient(&smoothed, run.k, nu)?);
        }
        Ok(())
    };
    record(0.0, &values)?;

    let nonlinear_half = |values: &mut [Complex64]| {
        crate::par::for_each_chunk_mut(mode, values, 1 << 14, |_, chunk| {
            for v in chunk {
                let amp_sq = v.norm_sqr();
                let theta = -half * amp_sq.powi(kexp);
                *v *= Complex64::from_polar(1.0, theta);
            }
        });
    };

    let sample_every = run.sample_every.max(1);
    for step in 0..steps {
        nonlinear_half(&mut values);
        fft_nd(&mut values, &shape, FftDirection::Forward, mode);
        let inv_total = 1.0 / g.total_points() as f64;
        crate::par::for_each_chunk_mut(mode, &mut values, 1 << 14, |ci, chunk| {
            let base = ci * (1 << 14);
            for (i, v) in chunk.iter_mut().enumerate() {
                *v *= linear_phase[base + i] * inv_total;
            }
        });
        fft_nd(&mut values, &shape, FftDirection::Inverse, mode);
        nonlinear_half(&mut values);

        let done = step + 1;
        if done % sample_every == 0 || done == steps {
            let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if !sup.is_finite() || sup > 1e6 * (sup0 + 1e-300) {
                return Err(LabError::NumericalAbort(format!(
                    "sup-norm blow-up at t = {:.6}: {sup:.3e} from initial {sup0:.3e}",
                    done as f64 * dt
                )));
            }
            record(done as f64 * dt, &values)?;
        }
    }
    Ok(trace)
}

/// Randomized `H^s`-shaped data band-limited under `2N` by the smooth tensor
/// cutoff, normalized so that `|I_N u0|_{H^1} = 1`.
pub fn hs_data(
    geometry: &Geometry,
    spec: &IMultiplierSpec,
    seed: u64,
) -> Result<SpectralField> {
    let mut rng = stream_rng(seed, &[0x1d, spec.n]);
    let cutoff = crate::cutoff::CutoffSpec;
    let nf = spec.n as f64;
    let decay = spec.s + 1.05;
    let total = geometry.total_points();
    let mut values = vec![Complex64::default(); total];
    let mut phases: Vec<f64> = Vec::with_capacity(total);
    for _ in 0..total {
        phases.push(rng.gen_range(0.0..std::f64::consts::TAU));
    }
    geometry.for_each_freq(|flat, xi| {
        let env: f64 = xi.iter().map(|&x| cutoff.eta1(x / nf)).product();
        if env > 0.0 {
            let xi_sq: f64 = xi.iter().map(|x| x * x).sum();
            let amp = env * (1.0 + xi_sq).powf(-0.5 * decay);
            values[flat] = Complex64::from_polar(amp, phases[flat]);
        }
    });
    let raw = SpectralField::new(geometry.clone(), Domain::Frequency, values)?;
    let smoothed = apply_i_multiplier(&raw, spec)?;
    let h1 = sobolev_norm(&smoothed, 1.0)?;
    if h1 == 0.0 {
        return Err(LabError::Degenerate("data normalization hit an empty band".into()));
    }
    Ok(raw.scale(Complex64::new(1.0 / h1, 0.0)))
}

#[derive(Debug, Clone)]
pub struct IncrementRow {
    pub n: u64,
    pub lambda: f64,
    pub dt: f64,
    pub grid: Vec<usize>,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub increment: f64,
}

#[derive(Debug, Clone)]
pub struct IncrementReport {
    pub rows: Vec<IncrementRow>,
    pub fit: LineFit,
    pub s: f64,
    pub alpha: f64,
    pub k: u32,
}

/// Geometry of one increment run: `lambda = N^alpha`, Euclidean box 4,
/// grids sized for alias-free cubic products of band `2N` data.
pub fn increment_geometry(n: u64, alpha: f64) -> Result<(Geometry, f64)> {
    let lambda = (n as f64).powf(alpha).max(1.0);
    let band = 2.0 * n as f64;
    let box_length = 4.0;
    let gx = ((4.0 * band * box_length).ceil() as usize).next_power_of_two();
    let gy = ((4.0 * band * lambda).ceil() as usize).next_power_of_two();
    Ok((Geometry::new(1, 1, lambda, box_length, vec![gx, gy])?, lambda))
}

/// Ladder measurement of the modified-energy increment over `[0, 1]`:
/// for each `N`, the torus is rescaled to `lambda = N^alpha`, data is drawn
/// and normalized, and `max_t |E(I_N u(t)) - E(I_N u(0))|` is recorded. The
/// returned fit is `log increment` against `log N`.
pub fn increment_experiment(
    s: f64,
    alpha: f64,
    k: u32,
    n_list: &[u64],
    dt: f64,
    nonlinearity: f64,
    seed: u64,
) -> Result<IncrementReport> {
    if n_list.len() < 2 {
        return Err(LabError::Precondition("need a ladder of at least 2 cutoffs".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec = IMultiplierSpec::new(n, s)?;
        let (geometry, lambda) = increment_geometry(n, alpha)?;
        let data = hs_data(&geometry, &spec, seed)?.to_physical()?;
        let run = NlsRun {
            geometry: geometry.clone(),
            k,
            nonlinearity,
            dt,
            t_end: 1.0,
            sample_every: ((1.0 / dt) as usize / 16).max(1),
        };
        let trace = split_step_evolve(&run, &data, Some(&spec))?;
        rows.push(IncrementRow {
            n,
            lambda,
            dt,
            grid: geometry.grid_points().to_vec(),
            mass_drift: trace.mass_drift(),
            energy_drift: trace.energy_drift(),
            increment: trace.modified_increment(),
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let incs: Vec<f64> = rows.iter().map(|r| r.increment.max(1e-300)).collect();
    let fit = fit_log_log(&ns, &incs)?;
    Ok(IncrementReport { rows, fit, s, alpha, k })
}
