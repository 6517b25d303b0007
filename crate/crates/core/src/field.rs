use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Chunk length for every parallel reduction. Partial sums are formed per
/// chunk and then added sequentially, so results do not depend on the
/// number of worker threads.
pub(crate) const REDUCTION_CHUNK: usize = 4096;

pub(crate) fn chunked_sum<T, F>(data: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let partials: Vec<f64> = data
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| chunk.iter().map(&f).sum::<f64>())
        .collect();
    partials.iter().sum()
}

pub(crate) fn chunked_sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = len.div_ceil(REDUCTION_CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * REDUCTION_CHUNK;
            let end = (start + REDUCTION_CHUNK).min(len);
            (start..end).map(&f).sum::<f64>()
        })
        .collect();
    partials.iter().sum()
}

/// Complex samples on a [`Grid`], row-major with the last axis contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Build from a closure of the physical coordinates.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let dim = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|flat| {
                let idx = grid.unravel(flat);
                let mut x = [0.0; 4];
                for axis in 0..dim {
                    x[axis] = grid.coordinate(idx[axis]);
                }
                f(&x[..dim])
            })
            .collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::Format(format!("non-finite value at offset {i}")));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan; internal producers guarantee it.
    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[cfg(test)]
    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.par_iter().all(|z| z.is_finite())
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        Self {
            grid: self.grid,
            values: self.values.par_iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_map<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync,
    {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `max |f|` over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values
            .par_iter()
            .map(|z| z.norm())
            .reduce(|| 0.0, f64::max)
    }

    /// `max |f|` over points on the outermost grid shell; a torus
    /// wraparound diagnostic.
    pub fn boundary_shell_max(&self) -> f64 {
        let grid = self.grid;
        self.values
            .par_iter()
            .enumerate()
            .filter(|(i, _)| grid.on_boundary_shell(*i))
            .map(|(_, z)| z.norm())
            .reduce(|| 0.0, f64::max)
    }

    /// `∫ g(f(x)) dx` by grid quadrature.
    pub fn integrate<F>(&self, g: F) -> f64
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        self.grid.cell_volume() * chunked_sum(&self.values, |&z| g(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_values_rejects_wrong_length_and_nan() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        assert!(ComplexField::from_values(g, vec![Complex64::new(0.0, 0.0); 7]).is_err());
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(ComplexField::from_values(g, v).is_err());
    }

    #[test]
    fn shell_max_ignores_interior() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let mut f = ComplexField::zeros(g);
        let centre = 4 * 64 + 4 * 8 + 4;
        f.values_mut()[centre] = Complex64::new(5.0, 0.0);
        f.values_mut()[1] = Complex64::new(0.0, 2.0);
        assert_eq!(f.max_abs(), 5.0);
        assert_eq!(f.boundary_shell_max(), 2.0);
    }

    #[test]
    fn chunked_sum_matches_sequential() {
        let data: Vec<f64> = (0..10_007).map(|i| (i as f64).sin()).collect();
        let seq: f64 = data
            .chunks(REDUCTION_CHUNK)
            .map(|c| c.iter().sum::<f64>())
            .sum();
        assert_eq!(chunked_sum(&data, |&x| x), seq);
        assert_eq!(chunked_sum_indexed(data.len(), |i| data[i]), seq);
    }
}
