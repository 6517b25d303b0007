//! Initial excitations.
//!
//! `random_fourier` draws, for every lattice mode `m` in flat transform
//! order, two values `u₁, u₂` from `ChaCha8Rng::seed_from_u64(seed)`
//! (`Rng::random::<f64>()`, uniform on `[0, 1)`) and sets
//! `ξ_m = √6 ((u₁ - ½) + i(u₂ - ½))`, which has unit variance. Modes with
//! `|m| > cutoff` are zeroed after drawing, so the stream never depends on
//! the cutoff. The field is `v_j = A Σ_m ξ_m (1 + |k_m|²)^{-s/2} e^{2πi m·j/N}`.

use gpcq_core::fft;
use gpcq_core::{Complex64, ComplexField, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ComplexValue;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant {
        c: ComplexValue,
    },
    Gaussian {
        amplitude: ComplexValue,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    RandomFourier {
        /// Falls back to the run seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        decay_exponent: f64,
        /// Largest retained `|m|` in lattice units.
        cutoff: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        amplitude: Option<ComplexValue>,
    },
}

/// Boundary-shell level above which generated data is flagged as not
/// decayed toward the box edge.
pub const BOUNDARY_THRESHOLD: f64 = 1e-3;

pub fn generate_initial(data: &InitialData, grid: Grid, run_seed: u64) -> Result<ComplexField, String> {
    match data {
        InitialData::Constant { c } => {
            let c = c.value();
            if !c.is_finite() {
                return Err("constant value must be finite".into());
            }
            Ok(ComplexField::constant(grid, c))
        }
        InitialData::Gaussian { amplitude, sigma, center } => {
            let a = amplitude.value();
            if !a.is_finite() {
                return Err("amplitude must be finite".into());
            }
            if !(*sigma > 0.0 && sigma.is_finite()) {
                return Err(format!("sigma must be positive, got {sigma}"));
            }
            let x0 = match center {
                None => vec![0.0; grid.dim()],
                Some(c) if c.len() == grid.dim() && c.iter().all(|x| x.is_finite()) => c.clone(),
                Some(c) => return Err(format!("center needs {} finite offsets, got {c:?}", grid.dim())),
            };
            let s2 = sigma * sigma;
            Ok(ComplexField::from_fn(grid, move |x| {
                let r2: f64 = x.iter().zip(&x0).map(|(a, b)| (a - b) * (a - b)).sum();
                a * (-r2 / s2).exp()
            }))
        }
        InitialData::RandomFourier {
            seed,
            decay_exponent,
            cutoff,
            amplitude,
        } => {
            let s = *decay_exponent;
            let min_s = grid.dim() as f64 / 2.0 + 1.0;
            if !(s > min_s && s.is_finite()) {
                return Err(format!("decay_exponent must exceed n/2 + 1 = {min_s}, got {s}"));
            }
            if !(*cutoff > 0.0) {
                return Err(format!("cutoff must be positive, got {cutoff}"));
            }
            let amp = amplitude.map(|a| a.value()).unwrap_or(Complex64::new(1.0, 0.0));
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(run_seed));
            let k2 = grid.k_squared();
            let scale = 6f64.sqrt();
            let n_total = grid.len() as f64;
            let mut coeffs = Vec::with_capacity(grid.len());
            for (flat, &k) in k2.iter().enumerate() {
                let u1: f64 = rng.random();
                let u2: f64 = rng.random();
                let idx = grid.unravel(flat);
                let m2: f64 = idx[..grid.dim()]
                    .iter()
                    .map(|&i| (grid.mode(i) as f64).powi(2))
                    .sum();
                let xi = scale * Complex64::new(u1 - 0.5, u2 - 0.5);
                let c = if m2.sqrt() <= *cutoff {
                    amp * xi * (1.0 + k).powf(-s / 2.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                // The inverse transform divides by N^n; undo it to get a plain sum.
                coeffs.push(c * n_total);
            }
            fft::inverse(&grid, &mut coeffs);
            ComplexField::from_values(grid, coeffs).map_err(|e| e.to_string())
        }
    }
}
