use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic 1D grid: `y_j = y_min + j * dy`, `dy = (y_max - y_min) / n`.
///
/// `y_max` itself is the periodic image of `y_min` and is not sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    pub n_points: usize,
    pub y_min: f64,
    pub y_max: f64,
}

/// Minimum point count accepted for scenario runs.
pub const PRODUCTION_MIN_POINTS: usize = 1024;

impl Grid {
    pub fn new(n_points: usize, y_min: f64, y_max: f64) -> Result<Self> {
        if n_points < 4 || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n_points",
                reason: "must be a power of two >= 4",
            });
        }
        if !(y_min.is_finite() && y_max.is_finite() && y_max > y_min) {
            return Err(Error::InvalidParameter {
                name: "y_range",
                reason: "need finite y_min < y_max",
            });
        }
        Ok(Self { n_points, y_min, y_max })
    }

    /// Symmetric grid over `[-half_width, half_width)`.
    pub fn symmetric(n_points: usize, half_width: f64) -> Result<Self> {
        Self::new(n_points, -half_width, half_width)
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.n_points as f64
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.y(j)).collect()
    }

    /// Angular wavenumbers in FFT order; the Nyquist bin is negative.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (self.y_max - self.y_min);
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
                m as f64 * dk
            })
            .collect()
    }

    /// Largest representable wavenumber.
    pub fn nyquist(&self) -> f64 {
        PI / self.dy()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.y_min + self.y_max).abs() <= 1e-12 * self.y_max.abs().max(1.0)
    }

    /// Index of the sample at `-y_j` on a symmetric periodic grid.
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n_points - j) % self.n_points
    }

    /// Index of the sample nearest to `y` (clamped to the grid).
    pub fn nearest_index(&self, y: f64) -> usize {
        let f = libm::round((y - self.y_min) / self.dy());
        if f <= 0.0 {
            0
        } else {
            (f as usize).min(self.n_points - 1)
        }
    }
}
