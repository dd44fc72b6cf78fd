//! Multi-dimensional FFT on flat row-major arrays, with a process-wide plan
//! cache safe for concurrent lookup.
//!
//! Strided axes are handled by cache-blocked transposes so every 1-D pass
//! runs on contiguous lines and parallelizes across them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::par::{for_each_chunk_mut, map_indexed, ExecMode};

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, matches!(dir, FftDirection::Forward));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(len, dir))
        .clone()
}

/// Unnormalized forward DFT (kernel `e^{-2*pi*i*jk/M}`) of a 1-D buffer.
pub fn fft_1d_forward(data: &mut [Complex64]) {
    plan(data.len(), FftDirection::Forward).process(data);
}

/// Unnormalized inverse DFT (kernel `e^{+2*pi*i*jk/M}`, no `1/M`).
pub fn fft_1d_inverse(data: &mut [Complex64]) {
    plan(data.len(), FftDirection::Inverse).process(data);
}

const TILE: usize = 64;

/// Out-of-place blocked transpose of a `rows x cols` row-major matrix into
/// `dst` (`cols x rows`), parallel over row bands.
fn transpose_into(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize, mode: ExecMode) {
    assert_eq!(src.len(), rows * cols);
    assert_eq!(dst.len(), rows * cols);
    // parallelize over bands of destination rows (source columns)
    for_each_chunk_mut(mode, dst, TILE * rows, |band, chunk| {
        let c0 = band * TILE;
        let band_cols = chunk.len() / rows;
        for r0 in (0..rows).step_by(TILE) {
            let r1 = (r0 + TILE).min(rows);
            for c in 0..band_cols {
                let col = c0 + c;
                for r in r0..r1 {
                    chunk[c * rows + r] = src[r * cols + col];
                }
            }
        }
    });
}

fn fft_lines(data: &mut [Complex64], len: usize, dir: FftDirection, mode: ExecMode) {
    let fft = plan(len, dir);
    // batch a few lines per task to amortize dispatch
    let lines_per_task = (1 << 16) / len.max(1);
    let chunk = len * lines_per_task.max(1);
    for_each_chunk_mut(mode, data, chunk, |_, c| {
        for line in c.chunks_mut(len) {
            fft.process(line);
        }
    });
}

/// Transform every axis of a row-major array of the given shape. The result
/// is the unnormalized separable DFT; callers apply measure weights.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], dir: FftDirection, mode: ExecMode) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    let d = shape.len();
    for axis in (0..d).rev() {
        let len = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            fft_lines(data, len, dir, mode);
            continue;
        }
        // view each outer block as a (len x stride) matrix; transpose so the
        // transform axis becomes contiguous, run the lines, transpose back
        let block = len * stride;
        let mut scratch = vec![Complex64::default(); block];
        for blk in data.chunks_mut(block) {
            transpose_into(blk, &mut scratch, len, stride, mode);
            fft_lines(&mut scratch, len, dir, mode);
            transpose_into(&scratch, blk, stride, len, mode);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_matches_direct_dft() {
        let n = 8;
        let mut data: Vec<Complex64> =
            (0..n).map(|j| Complex64::new(j as f64, (j * j) as f64 * 0.1)).collect();
        let orig = data.clone();
        fft_1d_forward(&mut data);
        for k in 0..n {
            let mut acc = Complex64::default();
            for j in 0..n {
                let ph = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                acc += orig[j] * Complex64::new(ph.cos(), ph.sin());
            }
            assert!((acc - data[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn transpose_round_trip() {
        let (rows, cols) = (48usize, 80usize);
        let src: Vec<Complex64> =
            (0..rows * cols).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let mut t = vec![Complex64::default(); rows * cols];
        let mut back = vec![Complex64::default(); rows * cols];
        transpose_into(&src, &mut t, rows, cols, ExecMode::Sequential);
        transpose_into(&t, &mut back, cols, rows, ExecMode::Parallel);
        assert_eq!(src, back);
        for r in 0..rows {
            for c in 0..cols {
                assert_eq!(t[c * rows + r], src[r * cols + c]);
            }
        }
    }

    #[test]
    fn nd_round_trip() {
        let shape = [4usize, 8, 4];
        let total: usize = shape.iter().product();
        let mut data: Vec<Complex64> =
            (0..total).map(|j| Complex64::new((j % 7) as f64, (j % 5) as f64)).collect();
        let orig = data.clone();
        fft_nd(&mut data, &shape, FftDirection::Forward, ExecMode::Sequential);
        fft_nd(&mut data, &shape, FftDirection::Inverse, ExecMode::Parallel);
        let scale = 1.0 / total as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a * scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn nd_matches_axis_by_axis_direct() {
        // 2-D forward against a direct double-loop DFT
        let (r, c) = (4usize, 8usize);
        let mut data: Vec<Complex64> =
            (0..r * c).map(|j| Complex64::new((j % 5) as f64 * 0.7, (j % 3) as f64)).collect();
        let orig = data.clone();
        fft_nd(&mut data, &[r, c], FftDirection::Forward, ExecMode::Sequential);
        let tau = std::f64::consts::TAU;
        for kr in 0..r {
            for kc in 0..c {
                let mut acc = Complex64::default();
                for jr in 0..r {
                    for jc in 0..c {
                        let ph = -tau * (kr * jr) as f64 / r as f64
                            - tau * (kc * jc) as f64 / c as f64;
                        acc += orig[jr * c + jc] * Complex64::new(ph.cos(), ph.sin());
                    }
                }
                assert!((acc - data[kr * c + kc]).norm() < 1e-9);
            }
        }
    }
}
