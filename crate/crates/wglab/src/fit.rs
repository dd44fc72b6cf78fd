//! Least-squares helpers for the scaling laws measured by the sweeps.

use crate::error::LabError;
use crate::Result;

/// Result of a one-variable linear fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual over the fitted points.
    pub max_residual: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(LabError::Fit("x/y length mismatch".into()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(LabError::Fit(format!("need at least 2 points, got {n}")));
    }
    let nf = n as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = nf * sxx - sx * sx;
    if det.abs() < 1e-12 * nf * sxx.max(1.0) {
        return Err(LabError::Fit("degenerate design matrix (constant abscissa)".into()));
    }
    let slope = (nf * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / nf;
    let mut max_r: f64 = 0.0;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        max_r = max_r.max(r.abs());
        ss += r * r;
    }
    Ok(LineFit { slope, intercept, max_residual: max_r, rms_residual: (ss / nf).sqrt() })
}

/// OLS in log-log space: fits `y = C * x^slope` and reports residuals of
/// `ln y` against the fitted line. All inputs must be positive.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(LabError::Fit("log-log fit requires positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    line_fit(&lx, &ly)
}

/// Fits `y = a + b * ln x` (the log-growth law of the global-failure demo).
pub fn fit_affine_in_log(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(LabError::Fit("abscissa must be positive for a log fit".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    line_fit(&lx, ys)
}

/// Two-term law `y = a * u + b * v` fitted by normal equations; returns
/// `(a, b, rms_residual)`.
pub fn fit_two_term(us: &[f64], vs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = ys.len();
    if us.len() != n || vs.len() != n {
        return Err(LabError::Fit("length mismatch".into()));
    }
    if n < 3 {
        return Err(LabError::Fit(format!("need at least 3 records, got {n}")));
    }
    let suu: f64 = us.iter().map(|u| u * u).sum();
    let svv: f64 = vs.iter().map(|v| v * v).sum();
    let suv: f64 = us.iter().zip(vs).map(|(u, v)| u * v).sum();
    let suy: f64 = us.iter().zip(ys).map(|(u, y)| u * y).sum();
    let svy: f64 = vs.iter().zip(ys).map(|(v, y)| v * y).sum();
    let det = suu * svv - suv * suv;
    if det.abs() <= 1e-12 * (suu * svv).max(1e-300) {
        return Err(LabError::Fit("degenerate design matrix (collinear regressors)".into()));
    }
    let a = (svv * suy - suv * svy) / det;
    let b = (suu * svy - suv * suy) / det;
    let mut ss = 0.0;
    for i in 0..n {
        let r = ys[i] - a * us[i] - b * vs[i];
        ss += r * r;
    }
    Ok((a, b, (ss / n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovered() {
        let xs: Vec<f64> = (0..6).map(|j| 2f64.powi(j)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
        let fit = fit_log_log(&xs, &ys).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-10);
        assert!(fit.max_residual < 1e-10);
    }

    #[test]
    fn two_term_synthetic_inversion() {
        // y = 1/lambda + n2/n1 over a small grid
        let mut us = vec![];
        let mut vs = vec![];
        let mut ys = vec![];
        for lam in [1.0f64, 4.0, 16.0] {
            for ratio in [0.125f64, 0.25, 1.0] {
                us.push(1.0 / lam);
                vs.push(ratio);
                ys.push(1.0 / lam + ratio);
            }
        }
        let (a, b, rms) = fit_two_term(&us, &vs, &ys).unwrap();
        assert!((a - 1.0).abs() < 1e-2);
        assert!((b - 1.0).abs() < 1e-2);
        assert!(rms < 1e-10);
    }

    #[test]
    fn degenerate_inputs_error() {
        assert!(fit_log_log(&[2.0], &[1.0]).is_err());
        assert!(fit_log_log(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_two_term(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]).is_err());
        let r = fit_two_term(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0]);
        assert!(r.is_err());
    }
}
