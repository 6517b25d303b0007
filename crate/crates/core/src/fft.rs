//! Multidimensional complex FFTs assembled from batched 1-D transforms.
//!
//! Axes are transformed one at a time. The contiguous last axis is
//! transformed in place; every other axis is gathered into contiguous
//! lines, transformed, and scattered back. Each line is independent so
//! the work splits across threads without changing any floating-point
//! result.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

const LINES_PER_TASK: usize = 64;

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Unnormalized forward DFT, `F_k = Σ_x f(x) e^{-i k·(x - x_0)}`.
pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, true);
}

/// Inverse DFT including the `1/N^n` factor.
pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, false);
    let norm = 1.0 / grid.len() as f64;
    data.par_iter_mut().for_each(|z| *z *= norm);
}

fn transform(grid: &Grid, data: &mut [Complex64], forward: bool) {
    assert_eq!(data.len(), grid.len(), "buffer does not match grid");
    let n = grid.points_per_axis();
    let fft = plan(n, forward);
    let mut scratch = Vec::new();
    for axis in 0..grid.dim() {
        transform_axis(data, &mut scratch, n, grid.stride(axis), fft.as_ref());
    }
}

fn transform_axis(
    data: &mut [Complex64],
    scratch: &mut Vec<Complex64>,
    n: usize,
    inner: usize,
    fft: &dyn Fft<f64>,
) {
    if inner == 1 {
        data.par_chunks_mut(n * LINES_PER_TASK)
            .for_each(|chunk| fft.process(chunk));
        return;
    }
    scratch.resize(data.len(), Complex64::new(0.0, 0.0));
    {
        let src = &*data;
        scratch
            .par_chunks_mut(n * LINES_PER_TASK)
            .enumerate()
            .for_each(|(task, chunk)| {
                let first = task * LINES_PER_TASK;
                for (j, line) in chunk.chunks_mut(n).enumerate() {
                    let l = first + j;
                    let base = (l / inner) * n * inner + l % inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = src[base + k * inner];
                    }
                }
                fft.process(chunk);
            });
    }
    let lines = &*scratch;
    data.par_chunks_mut(inner).enumerate().for_each(|(c, row)| {
        let (outer, k) = (c / n, c % n);
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = lines[(outer * inner + i) * n + k];
        }
    });
}
