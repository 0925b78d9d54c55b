use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::wavepacket::{Particle, SlitConfig};

/// Largest `|psi|` tolerated at either grid edge.
pub const BOUNDARY_LIMIT: f64 = 1e-10;

/// Complex amplitude sampled on a [`Grid`] at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl WaveField {
    pub fn zeros(grid: Grid, time: f64) -> Self {
        Self {
            grid,
            values: alloc::vec![Complex64::new(0.0, 0.0); grid.n_points],
            time,
        }
    }

    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            values: (0..grid.n_points).map(|j| f(grid.y(j))).collect(),
            time,
        }
    }

    /// `integral |psi|^2 dy` by the rectangle rule (spectrally accurate on a periodic grid).
    pub fn norm_sqr(&self) -> f64 {
        self.grid.dy() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `integral |psi|^2 dy` over samples with `keep(y)` true.
    pub fn norm_sqr_where(&self, keep: impl Fn(f64) -> bool) -> f64 {
        let g = self.grid;
        self.grid.dy()
            * self
                .values
                .iter()
                .enumerate()
                .filter(|(j, _)| keep(g.y(*j)))
                .map(|(_, z)| z.norm_sqr())
                .sum::<f64>()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WaveField) -> Complex64 {
        self.grid.dy()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `max(|psi_0|, |psi_{n-1}|)`.
    pub fn boundary_magnitude(&self) -> f64 {
        let first = self.values.first().map_or(0.0, |z| z.norm());
        let last = self.values.last().map_or(0.0, |z| z.norm());
        first.max(last)
    }

    pub fn max_abs_diff(&self, other: &WaveField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `||self - other|| / ||other||` in L2.
    pub fn relative_l2(&self, reference: &WaveField) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = reference.values.iter().map(|b| b.norm_sqr()).sum();
        libm::sqrt(num / den)
    }

    pub fn add(&self, other: &WaveField) -> Result<WaveField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &WaveField) -> Result<WaveField> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &WaveField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<WaveField> {
        if self.grid != other.grid || self.time != other.time {
            return Err(Error::GridMismatch);
        }
        Ok(WaveField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
            time: self.time,
        })
    }

    /// The field reflected through `y = 0` on a symmetric periodic grid.
    pub fn mirrored(&self) -> WaveField {
        let g = self.grid;
        WaveField {
            grid: g,
            values: (0..g.n_points).map(|j| self.values[g.mirror_index(j)]).collect(),
            time: self.time,
        }
    }
}

/// How a [`BranchedField`] came to be; closed-form operations need to know.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Output of `initial_state`, at t = 0.
    Initial(SlitConfig),
    /// Output of `propagate_analytic`.
    Analytic(SlitConfig),
    /// Anything else (masked, spectrally propagated, imaged, ...).
    Processed,
}

/// Two unnormalized branches (one per slit) whose sum is the physical field.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedField {
    pub branch_a: WaveField,
    pub branch_b: WaveField,
    pub particle: Particle,
    pub origin: Origin,
}

impl BranchedField {
    pub fn new(branch_a: WaveField, branch_b: WaveField, particle: Particle) -> Result<Self> {
        if branch_a.grid != branch_b.grid || branch_a.time != branch_b.time {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            branch_a,
            branch_b,
            particle,
            origin: Origin::Processed,
        })
    }

    pub fn grid(&self) -> Grid {
        self.branch_a.grid
    }

    pub fn time(&self) -> f64 {
        self.branch_a.time
    }

    /// Slit parameters when the field is still in closed form.
    pub fn closed_form(&self) -> Option<&SlitConfig> {
        match &self.origin {
            Origin::Initial(c) | Origin::Analytic(c) => Some(c),
            Origin::Processed => None,
        }
    }

    pub fn total(&self) -> WaveField {
        WaveField {
            grid: self.grid(),
            values: self
                .branch_a
                .values
                .iter()
                .zip(&self.branch_b.values)
                .map(|(a, b)| a + b)
                .collect(),
            time: self.time(),
        }
    }

    pub fn total_intensity(&self) -> Vec<f64> {
        self.branch_a
            .values
            .iter()
            .zip(&self.branch_b.values)
            .map(|(a, b)| (a + b).norm_sqr())
            .collect()
    }

    pub fn total_norm_sqr(&self) -> f64 {
        self.grid().dy() * self.total_intensity().iter().sum::<f64>()
    }

    pub fn branch_norms(&self) -> [f64; 2] {
        [self.branch_a.norm_sqr(), self.branch_b.norm_sqr()]
    }

    /// `<branch_a|branch_b>`.
    pub fn branch_overlap(&self) -> Complex64 {
        self.branch_a.inner(&self.branch_b)
    }

    pub fn boundary_magnitude(&self) -> f64 {
        self.branch_a
            .boundary_magnitude()
            .max(self.branch_b.boundary_magnitude())
            .max(self.total().boundary_magnitude())
    }

    /// Applies `f(y, psi)` pointwise to both branches; the result is `Processed`.
    pub fn map_pointwise(&self, f: impl Fn(f64, Complex64) -> Complex64) -> BranchedField {
        let g = self.grid();
        let apply = |w: &WaveField| WaveField {
            grid: g,
            values: w.values.iter().enumerate().map(|(j, z)| f(g.y(j), *z)).collect(),
            time: w.time,
        };
        BranchedField {
            branch_a: apply(&self.branch_a),
            branch_b: apply(&self.branch_b),
            particle: self.particle,
            origin: Origin::Processed,
        }
    }

    /// Branches swapped and reflected through `y = 0`.
    pub fn mirrored_swapped(&self) -> BranchedField {
        BranchedField {
            branch_a: self.branch_b.mirrored(),
            branch_b: self.branch_a.mirrored(),
            particle: self.particle,
            origin: Origin::Processed,
        }
    }
}
