//! Experiment execution: deterministic grid expansion, per-cell seeding,
//! parallel evaluation with results assembled in grid order, per-row failure
//! capture, and summary statistics.

use std::time::Instant;

use wglab::bilinear::predicted_constant;
use wglab::counting::measure_c_sup;
use wglab::extremizers::{
    decay_profile, global_failure_growth, lower_bound_check, DispersiveProfile, ExtremizerCase,
    ExtremizerFamily,
};
use wglab::fit::{fit_log_log, fit_two_term};
use wglab::imethod::{
    hs_data, increment_geometry, split_step_evolve, IMultiplierSpec, NlsRun,
};
use wglab::lp::DyadicBand;
use wglab::modes::{draw_band_modes, BilinearPairs, LatticeSpec};
use wglab::par::{map_indexed, ExecMode};
use wglab::rng::stream_rng;

use crate::config::{n1_values, parse_family, Config};
use crate::error::{CliError, ExitCode};
use crate::output::{fmt_f64, Table};

pub struct RunOutcome {
    pub table: Table,
    pub summary: Vec<(String, String)>,
    pub numerical_failures: usize,
}

fn median(sorted: &mut Vec<f64>) -> f64 {
    sorted.retain(|v| v.is_finite());
    if sorted.is_empty() {
        return f64::NAN;
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn refuse_if_over(estimate: f64, ceiling: f64, what: &str) -> Result<(), CliError> {
    if estimate > ceiling {
        return Err(CliError::new(
            ExitCode::Resource,
            format!(
                "refusing to run: estimated {estimate:.3e} work units ({what}) exceed the ceiling {ceiling:.3e}; \
                 raise limits.max_work_units or shrink the grid"
            ),
        ));
    }
    Ok(())
}

pub fn run(config: &Config, mode: ExecMode) -> Result<RunOutcome, CliError> {
    match config {
        Config::Bilinear(c) => run_bilinear(c, mode),
        Config::Measure(c) => run_measure(c, mode),
        Config::Extremizer(c) => run_extremizer(c, mode),
        Config::Imethod(c) => run_imethod(c),
        Config::Decay(c) => run_decay(c),
    }
}

// ---------------------------------------------------------------------------
// bilinear-sweep
// ---------------------------------------------------------------------------

struct BilinearCell {
    lambda: f64,
    n1: u64,
    n2: u64,
    t: f64,
    draw: usize,
}

fn run_bilinear(c: &crate::config::BilinearConfig, mode: ExecMode) -> Result<RunOutcome, CliError> {
    let mut cells = Vec::new();
    for &lambda in &c.grid.lambda {
        for &n2 in &c.grid.n2 {
            for n1 in n1_values(&c.grid, n2) {
                for &t in &c.grid.t {
                    for draw in 0..c.draws {
                        cells.push(BilinearCell { lambda, n1, n2, t, draw });
                    }
                }
            }
        }
    }
    let est = cells.len() as f64 * (c.modes_per_field as f64).powi(2);
    refuse_if_over(est, c.limits.max_work_units, "pair interactions")?;

    let seed = c.seed;
    let (m, n) = (c.m, c.n);
    let modes = c.modes_per_field;
    let box_length = c.box_length;
    let results = map_indexed(mode, cells.len(), |i| {
        let cell = &cells[i];
        let t0 = Instant::now();
        let out = (|| -> wglab::Result<(f64, f64, f64, f64, f64)> {
            let boxl = box_length.unwrap_or(if m >= 2 { 32.0 * cell.t.sqrt() } else { 32.0 });
            let lattice = LatticeSpec::new(m, n, cell.lambda, boxl)?;
            let mut rng = stream_rng(seed, &[1, i as u64]);
            let f = draw_band_modes(lattice, DyadicBand::new(cell.n1)?, modes, &mut rng)?;
            let g = draw_band_modes(lattice, DyadicBand::new(cell.n2)?, modes, &mut rng)?;
            let pairs = BilinearPairs::build(&f, &g)?;
            let lhs = pairs.norm(0.0, cell.t);
            let k_pred = predicted_constant(m, n, cell.lambda, cell.n1, cell.n2)?;
            Ok((lhs, f.l2_norm(), g.l2_norm(), k_pred, boxl))
        })();
        (out, t0.elapsed().as_secs_f64())
    });

    let header = vec![
        "m", "n", "lambda", "L", "N1", "N2", "T", "steps", "lhs", "norm_f", "norm_g", "k_pred",
        "ratio", "seconds",
    ];
    let mut table = Table::new(header);
    let mut ratios = Vec::new();
    let mut failures = Vec::new();
    for (cell, (res, secs)) in cells.iter().zip(&results) {
        let (lhs, norm_f, norm_g, k_pred, boxl, ratio) = match res {
            Ok((lhs, nf, ng, k, boxl)) => {
                let ratio = lhs / (k.sqrt() * nf * ng);
                ratios.push(ratio);
                (*lhs, *nf, *ng, *k, *boxl, ratio)
            }
            Err(e) => {
                failures.push(format!(
                    "cell (lambda={}, N1={}, N2={}, T={}, draw={}): {e}",
                    cell.lambda, cell.n1, cell.n2, cell.t, cell.draw
                ));
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            }
        };
        table.push(vec![
            c.m.to_string(),
            c.n.to_string(),
            fmt_f64(cell.lambda),
            fmt_f64(boxl),
            cell.n1.to_string(),
            cell.n2.to_string(),
            fmt_f64(cell.t),
            "0".to_string(),
            fmt_f64(lhs),
            fmt_f64(norm_f),
            fmt_f64(norm_g),
            fmt_f64(k_pred),
            fmt_f64(ratio),
            fmt_f64(*secs),
        ]);
    }
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    let med = median(&mut ratios.clone());
    let mut summary = vec![
        ("kind".into(), "bilinear-sweep".into()),
        ("rows".into(), table.rows.len().to_string()),
        ("ratio_max".into(), fmt_f64(max)),
        ("ratio_median".into(), fmt_f64(med)),
        ("ratio_spread_max_over_median".into(), fmt_f64(max / med)),
        ("failures".into(), failures.len().to_string()),
        ("result_digest_sha256_excl_seconds".into(), table.digest()),
    ];
    // two-term diagnostic fit of the squared ratio against (1/lambda, N2/N1)
    if ratios.len() >= 3 {
        let us: Vec<f64> = cells.iter().map(|c| 1.0 / c.lambda).collect();
        let vs: Vec<f64> = cells.iter().map(|c| c.n2 as f64 / c.n1 as f64).collect();
        let ys: Vec<f64> = results
            .iter()
            .map(|(r, _)| r.as_ref().map(|(lhs, nf, ng, ..)| (lhs / (nf * ng)).powi(2)).unwrap_or(f64::NAN))
            .collect();
        let ok: Vec<usize> = (0..ys.len()).filter(|&i| ys[i].is_finite()).collect();
        if ok.len() >= 3 {
            let fu: Vec<f64> = ok.iter().map(|&i| us[i]).collect();
            let fv: Vec<f64> = ok.iter().map(|&i| vs[i]).collect();
            let fy: Vec<f64> = ok.iter().map(|&i| ys[i]).collect();
            if let Ok((a, b, rms)) = fit_two_term(&fu, &fv, &fy) {
                summary.push(("fit_lhs2_coeff_inv_lambda".into(), fmt_f64(a)));
                summary.push(("fit_lhs2_coeff_n2_over_n1".into(), fmt_f64(b)));
                summary.push(("fit_rms_residual".into(), fmt_f64(rms)));
            }
        }
    }
    for f in &failures {
        summary.push(("failure".into(), f.clone()));
    }
    Ok(RunOutcome { table, summary, numerical_failures: failures.len() })
}

// ---------------------------------------------------------------------------
// measure-sweep
// ---------------------------------------------------------------------------

fn run_measure(c: &crate::config::MeasureConfig, mode: ExecMode) -> Result<RunOutcome, CliError> {
    struct Cell {
        lambda: f64,
        n1: u64,
        n2: u64,
    }
    let mut cells = Vec::new();
    for &lambda in &c.lambda {
        for &n2 in &c.n2 {
            for &r in &c.n1_over_n2 {
                cells.push(Cell { lambda, n1: n2 * r, n2 });
            }
        }
    }
    let est: f64 = cells
        .iter()
        .map(|cell| c.draws as f64 * (4.0 * cell.n2 as f64 * cell.lambda + 64.0))
        .sum();
    refuse_if_over(est, c.limits.max_work_units, "slice operations")?;

    let d = c.m + c.n;
    let bound_target = |cell: &Cell| -> f64 {
        let (n1, n2) = (cell.n1 as f64, cell.n2 as f64);
        match c.m {
            1 => 1.0 / cell.lambda + n2 / n1,
            _ => c.thickness * n2.powi(d as i32 - 3) * (1.0 / cell.lambda + n2 * n2 / n1),
        }
    };

    let results = map_indexed(mode, cells.len(), |i| {
        let cell = &cells[i];
        let t0 = Instant::now();
        let sup = measure_c_sup(
            c.m,
            c.n,
            cell.lambda,
            cell.n1,
            cell.n2,
            c.thickness,
            c.draws,
            wglab::rng::mix64(c.seed ^ i as u64),
            ExecMode::Sequential, // cells already run in parallel
        );
        (sup, t0.elapsed().as_secs_f64())
    });

    let header = vec![
        "m", "n", "lambda", "N1", "N2", "thickness", "draws", "sup_measure", "bound_target",
        "sup_ratio", "seconds",
    ];
    let mut table = Table::new(header);
    let mut sup_ratios = Vec::new();
    let mut failures = Vec::new();
    for (cell, (res, secs)) in cells.iter().zip(&results) {
        let target = bound_target(cell);
        let (sup, ratio) = match res {
            Ok(r) => {
                let ratio = r.sup / target;
                sup_ratios.push(ratio);
                (r.sup, ratio)
            }
            Err(e) => {
                failures.push(format!(
                    "cell (lambda={}, N1={}, N2={}): {e}",
                    cell.lambda, cell.n1, cell.n2
                ));
                (f64::NAN, f64::NAN)
            }
        };
        table.push(vec![
            c.m.to_string(),
            c.n.to_string(),
            fmt_f64(cell.lambda),
            cell.n1.to_string(),
            cell.n2.to_string(),
            fmt_f64(c.thickness),
            c.draws.to_string(),
            fmt_f64(sup),
            fmt_f64(target),
            fmt_f64(ratio),
            fmt_f64(*secs),
        ]);
    }
    let max = sup_ratios.iter().cloned().fold(0.0f64, f64::max);
    let min = sup_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let med = median(&mut sup_ratios.clone());
    let mut summary = vec![
        ("kind".into(), "measure-sweep".into()),
        ("rows".into(), table.rows.len().to_string()),
        ("sup_ratio_max".into(), fmt_f64(max)),
        ("sup_ratio_min".into(), fmt_f64(min)),
        ("sup_ratio_median".into(), fmt_f64(med)),
        ("sup_ratio_spread_max_over_min".into(), fmt_f64(max / min)),
        ("failures".into(), failures.len().to_string()),
        ("result_digest_sha256_excl_seconds".into(), table.digest()),
    ];
    for f in &failures {
        summary.push(("failure".into(), f.clone()));
    }
    Ok(RunOutcome { table, summary, numerical_failures: failures.len() })
}

// ---------------------------------------------------------------------------
// extremizer
// ---------------------------------------------------------------------------

fn run_extremizer(
    c: &crate::config::ExtremizerConfig,
    mode: ExecMode,
) -> Result<RunOutcome, CliError> {
    let family = parse_family(&c.family)?;
    let header = vec![
        "family", "m", "n", "lambda", "L", "N1", "N2", "T", "steps", "lhs", "norm_f", "norm_g",
        "k_pred", "ratio", "seconds",
    ];
    let mut table = Table::new(header);
    let mut summary = vec![
        ("kind".into(), "extremizer".into()),
        ("family".into(), c.family.clone()),
    ];
    let mut failures: Vec<String> = Vec::new();

    if family == ExtremizerFamily::GlobalFailure {
        let lambda = c.lambda[0];
        let (n1, n2) = (c.n1[0], c.n2);
        let t_list = c.t.clone().expect("validated");
        let est = 200.0 * 6144.0 * (t_list.len() as f64 + 25.0);
        refuse_if_over(est, c.limits.max_work_units, "quadrature nodes")?;
        let t0 = Instant::now();
        let profile = DispersiveProfile::gaussian_lowpass();
        let growth = global_failure_growth(&profile, lambda, &t_list)
            .map_err(|e| CliError::new(ExitCode::Numerical, e.to_string()))?;
        let secs = t0.elapsed().as_secs_f64() / growth.rows.len() as f64;
        let norm = profile.l2 / lambda.sqrt();
        for row in &growth.rows {
            table.push(vec![
                c.family.clone(),
                "1".into(),
                "1".into(),
                fmt_f64(lambda),
                "nan".into(),
                n1.to_string(),
                n2.to_string(),
                fmt_f64(row.t_horizon),
                "0".into(),
                fmt_f64(row.bilinear_lhs),
                fmt_f64(norm),
                fmt_f64(norm),
                "nan".into(),
                "nan".into(),
                fmt_f64(secs),
            ]);
        }
        summary.push(("log_fit_intercept".into(), fmt_f64(growth.fit.intercept)));
        summary.push(("log_fit_slope".into(), fmt_f64(growth.fit.slope)));
        summary.push(("log_fit_max_residual".into(), fmt_f64(growth.fit.max_residual)));
        summary.push(("predicted_slope".into(), fmt_f64(growth.predicted_slope)));
    } else {
        let mut cases = Vec::new();
        for &lambda in &c.lambda {
            for &n1 in &c.n1 {
                cases.push(
                    ExtremizerCase::new(family, lambda, n1, c.n2)
                        .map_err(|e| CliError::new(ExitCode::Config, e.to_string()))?,
                );
            }
        }
        let est: f64 = cases
            .iter()
            .map(|case| {
                let env = 4.0 * c.n2 as f64 * (case.box_length + case.lambda);
                16384.0 * env.max(64.0)
            })
            .sum();
        refuse_if_over(est, c.limits.max_work_units, "quadrature nodes")?;
        let results = map_indexed(mode, cases.len(), |i| {
            let t0 = Instant::now();
            (lower_bound_check(&cases[i]), t0.elapsed().as_secs_f64())
        });
        let mut ratios = Vec::new();
        for (case, (res, secs)) in cases.iter().zip(&results) {
            match res {
                Ok(rep) => {
                    if !rep.degenerate {
                        ratios.push(rep.ratio);
                    }
                    table.push(vec![
                        c.family.clone(),
                        case.m.to_string(),
                        case.n.to_string(),
                        fmt_f64(case.lambda),
                        fmt_f64(case.box_length),
                        case.n1.to_string(),
                        case.n2.to_string(),
                        fmt_f64(rep.t_horizon),
                        rep.steps.to_string(),
                        fmt_f64(rep.lhs),
                        fmt_f64(rep.norm_f),
                        fmt_f64(rep.norm_g),
                        fmt_f64(rep.k_pred),
                        fmt_f64(rep.ratio),
                        fmt_f64(*secs),
                    ]);
                }
                Err(e) => {
                    failures.push(format!(
                        "case (lambda={}, N1={}): {e}",
                        case.lambda, case.n1
                    ));
                    table.push(vec![
                        c.family.clone(),
                        case.m.to_string(),
                        case.n.to_string(),
                        fmt_f64(case.lambda),
                        fmt_f64(case.box_length),
                        case.n1.to_string(),
                        case.n2.to_string(),
                        fmt_f64(case.t_horizon),
                        "0".into(),
                        "nan".into(),
                        "nan".into(),
                        "nan".into(),
                        "nan".into(),
                        "nan".into(),
                        fmt_f64(*secs),
                    ]);
                }
            }
        }
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().cloned().fold(0.0f64, f64::max);
        summary.push(("ratio_min".into(), fmt_f64(min)));
        summary.push(("ratio_max".into(), fmt_f64(max)));
        summary.push(("ladder_stability_min_over_max".into(), fmt_f64(min / max)));
    }
    summary.push(("failures".into(), failures.len().to_string()));
    summary.push(("result_digest_sha256_excl_seconds".into(), table.digest()));
    for f in &failures {
        summary.push(("failure".into(), f.clone()));
    }
    Ok(RunOutcome { table, summary, numerical_failures: failures.len() })
}

// ---------------------------------------------------------------------------
// imethod
// ---------------------------------------------------------------------------

fn run_imethod(c: &crate::config::ImethodConfig) -> Result<RunOutcome, CliError> {
    let alpha = c.alpha.unwrap_or((1.0 - c.s) / c.s);
    let mut est = 0.0;
    for &n in &c.n {
        let (geometry, _) = increment_geometry(n, alpha)
            .map_err(|e| CliError::new(ExitCode::Config, e.to_string()))?;
        est += geometry.total_points() as f64 * (1.0 / c.dt) * 2.0;
    }
    refuse_if_over(est, c.limits.max_work_units, "grid-point-steps")?;

    let header = vec![
        "s", "alpha", "k", "N", "lambda", "dt", "grid_x", "grid_y", "mass_drift", "energy_drift",
        "increment", "seconds",
    ];
    let mut table = Table::new(header);
    let mut failures = Vec::new();
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    // evolutions run one at a time; the FFT kernels inside are parallel
    for &n in &c.n {
        let t0 = Instant::now();
        let row = (|| -> wglab::Result<(f64, Vec<usize>, f64, f64, f64)> {
            let spec = IMultiplierSpec::new(n, c.s)?;
            let (geometry, lambda) = increment_geometry(n, alpha)?;
            let data = hs_data(&geometry, &spec, c.seed)?.to_physical()?;
            let run = NlsRun {
                geometry: geometry.clone(),
                k: c.k,
                nonlinearity: c.nonlinearity,
                dt: c.dt,
                t_end: 1.0,
                sample_every: ((1.0 / c.dt) as usize / 16).max(1),
            };
            let trace = split_step_evolve(&run, &data, Some(&spec))?;
            Ok((
                lambda,
                geometry.grid_points().to_vec(),
                trace.mass_drift(),
                trace.energy_drift(),
                trace.modified_increment(),
            ))
        })();
        let secs = t0.elapsed().as_secs_f64();
        match row {
            Ok((lambda, grid, mass, energy, inc)) => {
                pairs.push((n as f64, inc.max(1e-300)));
                table.push(vec![
                    fmt_f64(c.s),
                    fmt_f64(alpha),
                    c.k.to_string(),
                    n.to_string(),
                    fmt_f64(lambda),
                    fmt_f64(c.dt),
                    grid[0].to_string(),
                    grid[1].to_string(),
                    fmt_f64(mass),
                    fmt_f64(energy),
                    fmt_f64(inc),
                    fmt_f64(secs),
                ]);
            }
            Err(e) => {
                failures.push(format!("N={n}: {e}"));
                table.push(vec![
                    fmt_f64(c.s),
                    fmt_f64(alpha),
                    c.k.to_string(),
                    n.to_string(),
                    "nan".into(),
                    fmt_f64(c.dt),
                    "0".into(),
                    "0".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    fmt_f64(secs),
                ]);
            }
        }
    }
    let mut summary = vec![
        ("kind".into(), "imethod".into()),
        ("s".into(), fmt_f64(c.s)),
        ("alpha".into(), fmt_f64(alpha)),
        ("k".into(), c.k.to_string()),
    ];
    if pairs.len() >= 2 {
        let ns: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let incs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        if let Ok(fit) = fit_log_log(&ns, &incs) {
            summary.push(("increment_slope".into(), fmt_f64(fit.slope)));
            summary.push(("increment_fit_max_residual".into(), fmt_f64(fit.max_residual)));
        }
        let monotone = incs.windows(2).all(|w| w[1] < w[0]);
        summary.push(("increments_strictly_decreasing".into(), monotone.to_string()));
    }
    summary.push(("failures".into(), failures.len().to_string()));
    summary.push(("result_digest_sha256_excl_seconds".into(), table.digest()));
    for f in &failures {
        summary.push(("failure".into(), f.clone()));
    }
    Ok(RunOutcome { table, summary, numerical_failures: failures.len() })
}

// ---------------------------------------------------------------------------
// decay
// ---------------------------------------------------------------------------

fn run_decay(c: &crate::config::DecayConfig) -> Result<RunOutcome, CliError> {
    let est = c.t.len() as f64 * 6144.0 * 33.0;
    refuse_if_over(est, c.limits.max_work_units, "quadrature nodes")?;
    let t0 = Instant::now();
    let profile = DispersiveProfile::gaussian_lowpass();
    let decay = decay_profile(&profile, &c.t)
        .map_err(|e| CliError::new(ExitCode::Numerical, e.to_string()))?;
    let secs = t0.elapsed().as_secs_f64() / c.t.len() as f64;
    let header = vec!["t", "scaled_min_modulus", "anchor_ratio", "seconds"];
    let mut table = Table::new(header);
    for row in &decay.rows {
        table.push(vec![
            fmt_f64(row.t),
            fmt_f64(row.scaled_min_modulus),
            fmt_f64(row.scaled_min_modulus / decay.anchor),
            fmt_f64(secs),
        ]);
    }
    let worst = decay
        .rows
        .iter()
        .map(|r| {
            let q = r.scaled_min_modulus / decay.anchor;
            q.max(1.0 / q)
        })
        .fold(1.0f64, f64::max);
    let summary = vec![
        ("kind".into(), "decay".into()),
        ("anchor".into(), fmt_f64(decay.anchor)),
        ("worst_drift_factor".into(), fmt_f64(worst)),
        ("degenerate".into(), decay.degenerate.to_string()),
        ("failures".into(), "0".into()),
        ("result_digest_sha256_excl_seconds".into(), table.digest()),
    ];
    Ok(RunOutcome { table, summary, numerical_failures: 0 })
}
