//! The 1-D smooth cutoff eta_1 and its tensor products.
//!
//! eta_1 is even, equals 1 on [-1, 1], vanishes outside [-2, 2], and is
//! monotone on [1, 2]. The transition uses the standard exp(-1/x) gluing,
//! which is infinitely differentiable.

/// `exp(-1/x)` for `x > 0`, else 0 — the C-infinity gluing block.
fn glue(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 for `r <= 0`, 0 for `r >= 1`, strictly decreasing between.
pub fn smooth_step_down(r: f64) -> f64 {
    let a = glue(1.0 - r);
    let b = glue(r);
    if a == 0.0 && b == 0.0 {
        // only reachable at r outside [0,1] by rounding
        return if r <= 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// The Littlewood-Paley profile.
#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffSpec;

impl CutoffSpec {
    /// eta_1 evaluated at `r`.
    pub fn eta1(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            smooth_step_down(r - 1.0)
        }
    }

    /// Tensor cutoff `eta^d(xi) = prod_i eta_1(xi_i)`.
    pub fn eta_d(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&x| self.eta1(x)).product()
    }
}
