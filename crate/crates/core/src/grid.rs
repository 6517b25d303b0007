use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic lattice on the box `[-L/2, L/2)^n`.
///
/// Points sit at `x_i = -L/2 + i h` with `h = L / N`, so index `N/2` is the
/// box centre and indices `0`, `N - 1` form the outermost shell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        if !(3..=4).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 3 or 4, got {dim}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
            box_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Quadrature weight `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Total number of points, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major stride of `axis` (the last axis is contiguous).
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    pub fn coordinate(&self, index: usize) -> f64 {
        -0.5 * self.box_length + index as f64 * self.spacing()
    }

    /// Integer frequency `m ∈ [-N/2, N/2)` stored at FFT slot `index`.
    pub fn mode(&self, index: usize) -> i64 {
        let n = self.points_per_axis;
        if index < n / 2 {
            index as i64
        } else {
            index as i64 - n as i64
        }
    }

    /// Angular wavenumber `2πm/L` at FFT slot `index`.
    pub fn wavenumber(&self, index: usize) -> f64 {
        2.0 * PI * self.mode(index) as f64 / self.box_length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.points_per_axis)
            .map(|i| self.wavenumber(i))
            .collect()
    }

    /// Largest representable wavenumber magnitude per axis, `πN/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points_per_axis as f64 / self.box_length
    }

    /// Per-axis indices of a flat row-major offset.
    pub fn unravel(&self, flat: usize) -> [usize; 4] {
        let n = self.points_per_axis;
        let mut out = [0usize; 4];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % n;
            rem /= n;
        }
        out
    }

    /// `|k|^2` at every flat spectral index.
    pub fn k_squared(&self) -> Vec<f64> {
        let ks = self.wavenumbers();
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                idx[..self.dim].iter().map(|&i| ks[i] * ks[i]).sum()
            })
            .collect()
    }

    /// `k_axis` at every flat spectral index.
    pub fn k_component(&self, axis: usize) -> Vec<f64> {
        let ks = self.wavenumbers();
        let n = self.points_per_axis;
        let stride = self.stride(axis);
        (0..self.len()).map(|flat| ks[(flat / stride) % n]).collect()
    }

    /// Whether a flat offset lies on the outermost shell of the box.
    pub fn on_boundary_shell(&self, flat: usize) -> bool {
        let last = self.points_per_axis - 1;
        self.unravel(flat)[..self.dim]
            .iter()
            .any(|&i| i == 0 || i == last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(2, 16, 1.0).is_err());
        assert!(Grid::new(3, 12, 1.0).is_err());
        assert!(Grid::new(3, 4, 1.0).is_err());
        assert!(Grid::new(4, 16, 0.0).is_err());
        assert!(Grid::new(4, 16, f64::NAN).is_err());
    }

    #[test]
    fn spacing_times_n_is_box_length() {
        for &l in &[1.0, 16.0, 7.3, 2.0 * PI] {
            let g = Grid::new(3, 32, l).unwrap();
            assert_eq!(g.spacing() * 32.0, l);
            assert_eq!(g.len(), 32 * 32 * 32);
        }
    }

    #[test]
    fn frequency_lattice_covers_half_open_range() {
        let g = Grid::new(3, 8, 2.0 * PI).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.mode(i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.wavenumber(5), -3.0);
    }

    #[test]
    fn centre_and_shell() {
        let g = Grid::new(3, 8, 4.0).unwrap();
        assert_eq!(g.coordinate(4), 0.0);
        assert_eq!(g.coordinate(0), -2.0);
        assert!(g.on_boundary_shell(0));
        let centre = 4 * 64 + 4 * 8 + 4;
        assert!(!g.on_boundary_shell(centre));
        assert_eq!(g.unravel(centre)[..3], [4, 4, 4]);
    }
}
