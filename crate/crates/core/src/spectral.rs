//! Spectral differential operators, the free Schrödinger group and the
//! grid quadrature norms.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{chunked_sum, ComplexField};
use crate::grid::Grid;

/// Unnormalized DFT of a field.
pub fn spectrum(f: &ComplexField) -> Vec<Complex64> {
    let mut buf = f.values().to_vec();
    fft::forward(f.grid(), &mut buf);
    buf
}

/// Field whose DFT is `spec`.
pub fn from_spectrum(grid: Grid, mut spec: Vec<Complex64>) -> ComplexField {
    fft::inverse(&grid, &mut spec);
    ComplexField::from_raw(grid, spec)
}

fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidExponent(r));
    }
    Ok(())
}

/// `(h^n Σ |f|^r)^{1/r}`, or the grid maximum for `r = ∞`.
pub fn lp_norm(f: &ComplexField, r: f64) -> Result<f64> {
    check_exponent(r)?;
    if r == f64::INFINITY {
        return Ok(f.max_abs());
    }
    let sum = if r == 2.0 {
        chunked_sum(f.values(), |z| z.norm_sqr())
    } else {
        chunked_sum(f.values(), |z| z.norm().powf(r))
    };
    Ok((f.grid().cell_volume() * sum).powf(1.0 / r))
}

/// Same quadrature as [`lp_norm`] for a nonnegative pointwise density
/// (such as `|∇v|` or `|v|·|∇v|`).
pub fn density_lp_norm(grid: &Grid, density: &[f64], r: f64) -> Result<f64> {
    check_exponent(r)?;
    if density.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "density has {} values for a grid of {}",
            density.len(),
            grid.len()
        )));
    }
    if r == f64::INFINITY {
        return Ok(density.par_iter().cloned().reduce(|| 0.0, f64::max));
    }
    let sum = if r == 2.0 {
        chunked_sum(density, |&d| d * d)
    } else {
        chunked_sum(density, |&d| d.abs().powf(r))
    };
    Ok((grid.cell_volume() * sum).powf(1.0 / r))
}

/// Component `j` is the inverse transform of `i k_j f̂`.
pub fn spectral_gradient(f: &ComplexField) -> Vec<ComplexField> {
    let grid = *f.grid();
    let spec = spectrum(f);
    (0..grid.dim())
        .map(|axis| {
            let kj = grid.k_component(axis);
            let comp: Vec<Complex64> = spec
                .par_iter()
                .zip(kj.par_iter())
                .map(|(&c, &k)| c * Complex64::new(0.0, k))
                .collect();
            from_spectrum(grid, comp)
        })
        .collect()
}

/// Pointwise `|∇f| = (Σ_j |∂_j f|²)^{1/2}`.
pub fn gradient_magnitude(f: &ComplexField) -> Vec<f64> {
    let grad = spectral_gradient(f);
    (0..f.grid().len())
        .into_par_iter()
        .map(|i| grad.iter().map(|g| g.values()[i].norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// Spectral Laplacian, multiplier `-|k|²`.
pub fn laplacian(f: &ComplexField) -> ComplexField {
    let grid = *f.grid();
    let mut spec = spectrum(f);
    let k2 = grid.k_squared();
    spec.par_iter_mut()
        .zip(k2.par_iter())
        .for_each(|(c, &k)| *c *= -k);
    from_spectrum(grid, spec)
}

/// `∫|∇f|²` by Parseval: `(V / N^{2n}) Σ_k |k|² |F_k|²`.
pub fn h1dot_norm_sq(f: &ComplexField) -> f64 {
    let grid = f.grid();
    let spec = spectrum(f);
    let k2 = grid.k_squared();
    let n = grid.len() as f64;
    let weighted: Vec<f64> = spec
        .par_iter()
        .zip(k2.par_iter())
        .map(|(c, &k)| k * c.norm_sqr())
        .collect();
    grid.volume() / (n * n) * chunked_sum(&weighted, |&x| x)
}

pub fn h1dot_norm(f: &ComplexField) -> f64 {
    h1dot_norm_sq(f).sqrt()
}

/// Multiplier for `e^{itΔ}` at every flat spectral index.
pub fn propagator_phases(grid: &Grid, t: f64) -> Vec<Complex64> {
    grid.k_squared()
        .into_par_iter()
        .map(|k| Complex64::from_polar(1.0, -k * t))
        .collect()
}

/// `e^{itΔ} f`: multiplies `f̂(k)` by `e^{-i|k|² t}`.
pub fn free_propagator(f: &ComplexField, t: f64) -> ComplexField {
    let grid = *f.grid();
    let mut spec = spectrum(f);
    let phases = propagator_phases(&grid, t);
    spec.par_iter_mut()
        .zip(phases.par_iter())
        .for_each(|(c, p)| *c *= p);
    from_spectrum(grid, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexField::from_values(grid, values).unwrap()
    }

    fn plane_wave(grid: Grid, modes: &[i64]) -> (ComplexField, Vec<f64>) {
        let k: Vec<f64> = modes
            .iter()
            .map(|&m| 2.0 * std::f64::consts::PI * m as f64 / grid.box_length())
            .collect();
        let kk = k.clone();
        let f = ComplexField::from_fn(grid, move |x| {
            let phase: f64 = x.iter().zip(&kk).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, phase)
        });
        (f, k)
    }

    #[test]
    fn lp_norm_trivial_cases() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let zero = ComplexField::zeros(g);
        for r in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(lp_norm(&zero, r).unwrap(), 0.0);
        }
        let c = Complex64::new(3.0, -4.0);
        let f = ComplexField::constant(g, c);
        let v = g.volume();
        for r in [1.0, 2.0, 4.0, 6.0] {
            let got = lp_norm(&f, r).unwrap();
            let want = 5.0 * v.powf(1.0 / r);
            assert!((got - want).abs() <= 1e-14 * want, "r={r}");
        }
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 5.0);
    }

    #[test]
    fn lp_norm_rejects_small_exponent() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let f = ComplexField::zeros(g);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
        assert!(lp_norm(&f, f64::NAN).is_err());
    }

    #[test]
    fn lp_norm_matches_direct_loop() {
        let g = Grid::new(3, 16, 5.0).unwrap();
        let f = random_field(g, 7);
        let h3 = g.spacing().powi(3);
        let mut acc = 0.0;
        for i in 0..16 {
            for j in 0..16 {
                for k in 0..16 {
                    let z = f.values()[(i * 16 + j) * 16 + k];
                    acc += z.norm().powi(4);
                }
            }
        }
        let want = (h3 * acc).powf(0.25);
        let got = lp_norm(&f, 4.0).unwrap();
        assert!((got - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn gradient_of_plane_wave() {
        let g = Grid::new(3, 16, 3.0).unwrap();
        let (f, k) = plane_wave(g, &[2, -3, 7]);
        let grad = spectral_gradient(&f);
        for (j, comp) in grad.iter().enumerate() {
            for (d, z) in comp.values().iter().zip(f.values()) {
                let want = Complex64::new(0.0, k[j]) * z;
                assert!((d - want).norm() <= 1e-12 * (1.0 + k[j].abs()));
            }
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = Grid::new(4, 8, 3.0).unwrap();
        let f = ComplexField::constant(g, Complex64::new(2.0, 1.0));
        for comp in spectral_gradient(&f) {
            assert!(comp.max_abs() <= 1e-14);
        }
        assert!(h1dot_norm(&f) <= 1e-14);
    }

    #[test]
    fn gradient_norm_matches_parseval() {
        let g = Grid::new(3, 16, 4.0).unwrap();
        let f = random_field(g, 11);
        let via_grad: f64 = spectral_gradient(&f)
            .iter()
            .map(|c| lp_norm(c, 2.0).unwrap().powi(2))
            .sum();
        // Independent Parseval sum, computed sequentially.
        let spec = spectrum(&f);
        let k2 = g.k_squared();
        let n = g.len() as f64;
        let mut parseval = 0.0;
        for (c, k) in spec.iter().zip(&k2) {
            parseval += k * c.norm_sqr();
        }
        parseval *= g.volume() / (n * n);
        assert!((via_grad - parseval).abs() <= 1e-12 * parseval);
        let h1 = h1dot_norm(&f);
        assert!((h1 * h1 - via_grad).abs() <= 1e-12 * via_grad);
    }

    #[test]
    fn h1dot_of_plane_wave() {
        let g = Grid::new(4, 8, 2.0).unwrap();
        let (f, k) = plane_wave(g, &[1, 0, -2, 3]);
        let kn = k.iter().map(|x| x * x).sum::<f64>().sqrt();
        let want = kn * g.volume().sqrt();
        assert!((h1dot_norm(&f) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn propagator_properties() {
        let g = Grid::new(3, 16, 6.0).unwrap();
        let f = random_field(g, 3);
        let same = free_propagator(&f, 0.0);
        for (a, b) in same.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-14);
        }
        let n0 = lp_norm(&f, 2.0).unwrap();
        let n1 = lp_norm(&free_propagator(&f, 0.37), 2.0).unwrap();
        assert!((n0 - n1).abs() <= 1e-13 * n0);

        let composed = free_propagator(&free_propagator(&f, 0.2), 0.3);
        let direct = free_propagator(&f, 0.5);
        let diff = lp_norm(&composed.sub(&direct).unwrap(), 2.0).unwrap();
        assert!(diff <= 1e-12 * n0);
    }

    #[test]
    fn propagator_on_plane_wave_is_a_phase() {
        let g = Grid::new(3, 16, 6.0).unwrap();
        let (f, k) = plane_wave(g, &[1, 2, -5]);
        let k2: f64 = k.iter().map(|x| x * x).sum();
        let t = 0.81;
        let out = free_propagator(&f, t);
        let rot = Complex64::from_polar(1.0, -k2 * t);
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b * rot).norm() <= 1e-12);
        }
    }

    #[test]
    fn laplacian_pairs_with_gradient() {
        let g = Grid::new(3, 16, 5.0).unwrap();
        let f = random_field(g, 5);
        let lap = laplacian(&f);
        let pairing = -f.grid().cell_volume()
            * f.values()
                .iter()
                .zip(lap.values())
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>();
        let h1 = h1dot_norm_sq(&f);
        assert!((pairing - h1).abs() <= 1e-11 * h1);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = Grid::new(4, 8, 5.0).unwrap();
        let f = random_field(g, 9);
        let back = from_spectrum(g, spectrum(&f));
        let scale = lp_norm(&f, 2.0).unwrap();
        let diff = lp_norm(&back.sub(&f).unwrap(), 2.0).unwrap();
        assert!(diff <= 1e-13 * scale);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn lp_norm_is_absolutely_homogeneous(
                seed in 0u64..1000,
                re in -5.0f64..5.0,
                im in -5.0f64..5.0,
                r in prop_oneof![Just(1.0), Just(2.0), Just(2.4), Just(4.0), Just(6.0), Just(f64::INFINITY)],
            ) {
                let g = Grid::new(3, 8, 2.5).unwrap();
                let f = random_field(g, seed);
                let c = Complex64::new(re, im);
                let lhs = lp_norm(&f.scale(c), r).unwrap();
                let rhs = c.norm() * lp_norm(&f, r).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
            }
        }
    }
}
