//! The apparatus behind the slits: dark-fringe survey, absorbing wires,
//! a thin lens imaging the slit plane onto two detectors, and the two-mode
//! analysis of each branch.
//!
//! Distances along the beam are expressed as drift times, since the
//! transverse motion obeys the free Schrodinger equation in `t`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{BranchedField, WaveField};
use crate::metrics::{self, ConditionalStats, Interval};
use crate::wavepacket::{propagate_spectral, transport_absorbing, SlitConfig};

/// Located intensity minima.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FringeMap {
    pub minima_positions: Vec<f64>,
    pub minima_intensities: Vec<f64>,
    /// Median gap between adjacent minima.
    pub fringe_spacing: f64,
    /// Largest total intensity sampled in the window.
    pub peak_intensity: f64,
}

/// Strict local minima of `|psi_total|^2` in `window`, refined to sub-grid
/// accuracy by a three-point parabola.
pub fn find_dark_fringes(field: &BranchedField, window: Interval) -> Result<FringeMap> {
    let ys = field.grid().positions();
    let intensity = field.total_intensity();
    let minima = metrics::strict_extrema(&ys, &intensity, window, true);
    if minima.len() < 2 {
        return Err(Error::NoInterference { found: minima.len() });
    }
    let mut gaps: Vec<f64> = minima.windows(2).map(|w| w[1].position - w[0].position).collect();
    gaps.sort_by(f64::total_cmp);
    let mid = gaps.len() / 2;
    let fringe_spacing = if gaps.len() % 2 == 1 {
        gaps[mid]
    } else {
        0.5 * (gaps[mid - 1] + gaps[mid])
    };
    let peak_intensity = ys
        .iter()
        .zip(&intensity)
        .filter(|(y, _)| window.contains(**y))
        .map(|(_, i)| *i)
        .fold(0.0, f64::max);
    Ok(FringeMap {
        minima_positions: minima.iter().map(|m| m.position).collect(),
        minima_intensities: minima.iter().map(|m| m.value).collect(),
        fringe_spacing,
        peak_intensity,
    })
}

/// Ideal absorbing wires of equal full width.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WireGrid {
    pub positions: Vec<f64>,
    pub width: f64,
}

impl WireGrid {
    pub fn new(mut positions: Vec<f64>, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "wire width",
                reason: "must be finite and > 0",
            });
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "wire positions",
                reason: "must be finite",
            });
        }
        positions.sort_by(f64::total_cmp);
        if positions.windows(2).any(|w| w[1] - w[0] <= width) {
            return Err(Error::InvalidParameter {
                name: "wire positions",
                reason: "wires overlap",
            });
        }
        Ok(Self { positions, width })
    }

    pub fn empty() -> Self {
        Self {
            positions: Vec::new(),
            width: 1.0,
        }
    }

    /// Wires on the `count` minima closest to the centre of the surveyed
    /// minima, each `width_fraction` of the fringe spacing wide.
    pub fn from_fringes(map: &FringeMap, count: usize, width_fraction: f64) -> Result<Self> {
        if !(width_fraction > 0.0 && width_fraction < 0.5) {
            return Err(Error::InvalidParameter {
                name: "width_fraction",
                reason: "must lie in (0, 0.5)",
            });
        }
        if count > map.minima_positions.len() {
            return Err(Error::InvalidParameter {
                name: "wire count",
                reason: "more wires than surveyed dark fringes",
            });
        }
        let first = map.minima_positions[0];
        let last = map.minima_positions[map.minima_positions.len() - 1];
        let center = 0.5 * (first + last);
        let mut by_distance = map.minima_positions.clone();
        by_distance.sort_by(|a, b| (a - center).abs().total_cmp(&(b - center).abs()));
        by_distance.truncate(count);
        Self::new(by_distance, width_fraction * map.fringe_spacing)
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn blocks(&self, y: f64) -> bool {
        let h = 0.5 * self.width;
        self.positions.iter().any(|p| (y - p).abs() <= h)
    }

    /// Mirror image through `y = 0`.
    pub fn mirrored(&self) -> WireGrid {
        let mut positions: Vec<f64> = self.positions.iter().map(|p| -p).collect();
        positions.reverse();
        WireGrid {
            positions,
            width: self.width,
        }
    }
}

/// Field behind the wires together with the flux they absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskOutcome {
    pub field: BranchedField,
    /// Flux removed from each branch, `[A, B]`.
    pub blocked_per_branch: [f64; 2],
    /// Pre-mask total intensity integrated over the wires.
    pub blocked_total: f64,
}

/// Zeroes both branches inside every wire.
pub fn apply_wires(field: &BranchedField, wires: &WireGrid) -> MaskOutcome {
    if wires.is_empty() {
        return MaskOutcome {
            field: field.clone(),
            blocked_per_branch: [0.0, 0.0],
            blocked_total: 0.0,
        };
    }
    let blocked_total = field.total().norm_sqr_where(|y| wires.blocks(y));
    let blocked_per_branch = [
        field.branch_a.norm_sqr_where(|y| wires.blocks(y)),
        field.branch_b.norm_sqr_where(|y| wires.blocks(y)),
    ];
    let masked = field.map_pointwise(|y, z| if wires.blocks(y) { Complex64::new(0.0, 0.0) } else { z });
    MaskOutcome {
        field: masked,
        blocked_per_branch,
        blocked_total,
    }
}

/// Thin lens centred on `y = 0`; distances are drift times.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LensSpec {
    pub focal_length: f64,
    pub aperture_halfwidth: f64,
    pub object_distance: f64,
    pub image_distance: f64,
    /// Fraction of the grid at each edge used as an absorbing layer during
    /// the transport to the image plane; 0 selects exact periodic transport
    /// and makes any wraparound an error.
    #[cfg_attr(feature = "serde", serde(default))]
    pub absorbing_layer: f64,
}

impl LensSpec {
    /// Lens of focal length `focal_length` imaging the plane `object_distance`
    /// behind the slits; the image distance follows from the lens law.
    pub fn imaging(focal_length: f64, object_distance: f64, aperture_halfwidth: f64) -> Result<Self> {
        if !(focal_length > 0.0 && object_distance > focal_length) {
            return Err(Error::InvalidParameter {
                name: "lens",
                reason: "need 0 < focal_length < object_distance for a real image",
            });
        }
        let image_distance = 1.0 / (1.0 / focal_length - 1.0 / object_distance);
        let lens = Self {
            focal_length,
            aperture_halfwidth,
            object_distance,
            image_distance,
            absorbing_layer: 0.0,
        };
        lens.validate()?;
        Ok(lens)
    }

    pub fn with_absorbing_layer(self, fraction: f64) -> Self {
        Self {
            absorbing_layer: fraction,
            ..self
        }
    }

    /// Transverse magnification `-image_distance / object_distance`.
    pub fn magnification(&self) -> f64 {
        -self.image_distance / self.object_distance
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.focal_length) && positive(self.object_distance) && positive(self.image_distance)) {
            return Err(Error::InvalidParameter {
                name: "lens",
                reason: "focal length and distances must be finite and > 0",
            });
        }
        if !(self.aperture_halfwidth.is_finite() && self.aperture_halfwidth >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "aperture_halfwidth",
                reason: "must be finite and >= 0",
            });
        }
        let lhs = 1.0 / self.object_distance + 1.0 / self.image_distance;
        let rhs = 1.0 / self.focal_length;
        if (lhs - rhs).abs() > 1e-12 * rhs {
            return Err(Error::InvalidParameter {
                name: "lens",
                reason: "1/object + 1/image must equal 1/focal",
            });
        }
        if !(0.0..0.5).contains(&self.absorbing_layer) {
            return Err(Error::InvalidParameter {
                name: "absorbing_layer",
                reason: "must lie in [0, 0.5)",
            });
        }
        Ok(())
    }
}

/// Field at the image plane and the flux lost on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagingOutcome {
    pub field: BranchedField,
    /// Flux outside the aperture, per branch.
    pub aperture_loss: [f64; 2],
    /// Flux taken out by the absorbing layer, per branch.
    pub absorbed: [f64; 2],
}

impl ImagingOutcome {
    pub fn leaked(&self) -> [f64; 2] {
        [
            self.aperture_loss[0] + self.absorbed[0],
            self.aperture_loss[1] + self.absorbed[1],
        ]
    }
}

/// Quadratic phase kick `exp(-i m y^2 / (2 hbar T_f))`, aperture stop, then
/// free transport to the image plane.
pub fn image_through_lens(field: &BranchedField, lens: &LensSpec) -> Result<ImagingOutcome> {
    lens.validate()?;
    let t = field.time();
    if (t - lens.object_distance).abs() > 1e-9 * lens.object_distance.max(1.0) {
        return Err(Error::LensPlacement {
            field_time: t,
            object_distance: lens.object_distance,
        });
    }
    let p = field.particle;
    let curvature = p.mass / (2.0 * p.hbar * lens.focal_length);
    let half = lens.aperture_halfwidth;
    let before = field.branch_norms();
    let kicked = field.map_pointwise(|y, z| {
        if y.abs() < half {
            z * Complex64::from_polar(1.0, -curvature * y * y)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let after = kicked.branch_norms();
    let aperture_loss = [before[0] - after[0], before[1] - after[1]];
    let (out, absorbed) = if lens.absorbing_layer > 0.0 {
        transport_absorbing(&kicked, lens.image_distance, lens.absorbing_layer)?
    } else {
        (propagate_spectral(&kicked, lens.image_distance)?, [0.0, 0.0])
    };
    Ok(ImagingOutcome {
        field: out,
        aperture_loss,
        absorbed,
    })
}

/// Probabilities collected by the two detectors. `D_A` covers `y < split`,
/// `D_B` covers `y > split`; a sample exactly on the split is shared equally.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorCounts {
    pub p_da_total: f64,
    pub p_db_total: f64,
    pub p_da_from_a: f64,
    pub p_db_from_a: f64,
    pub p_da_from_b: f64,
    pub p_db_from_b: f64,
}

impl DetectorCounts {
    pub fn conditional_stats(&self, prior_a: f64) -> ConditionalStats {
        ConditionalStats::new(
            [self.p_da_from_a, self.p_db_from_a],
            [self.p_da_from_b, self.p_db_from_b],
            prior_a,
        )
    }
}

fn split_integrals(w: &WaveField, split: f64) -> (f64, f64) {
    let g = w.grid;
    let (mut below, mut above) = (0.0, 0.0);
    for (j, z) in w.values.iter().enumerate() {
        let y = g.y(j);
        let i = z.norm_sqr();
        if y < split {
            below += i;
        } else if y > split {
            above += i;
        } else {
            below += 0.5 * i;
            above += 0.5 * i;
        }
    }
    (below * g.dy(), above * g.dy())
}

/// Integrates each branch and the total over the two detector windows.
pub fn detect(field: &BranchedField, split_point: f64) -> DetectorCounts {
    let (da, db) = split_integrals(&field.total(), split_point);
    let (da_a, db_a) = split_integrals(&field.branch_a, split_point);
    let (da_b, db_b) = split_integrals(&field.branch_b, split_point);
    DetectorCounts {
        p_da_total: da,
        p_db_total: db,
        p_da_from_a: da_a,
        p_db_from_a: db_a,
        p_da_from_b: da_b,
        p_db_from_b: db_b,
    }
}

/// Detector statistics plus the full flux ledger of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorReport {
    pub p_da_total: f64,
    pub p_db_total: f64,
    pub p_da_from_a: f64,
    pub p_db_from_a: f64,
    pub p_da_from_b: f64,
    pub p_db_from_b: f64,
    /// Total intensity absorbed by the wires.
    pub blocked_flux: f64,
    /// Total flux that reached neither detector (aperture and absorbing layer).
    pub leaked_flux: f64,
    pub blocked_flux_a: f64,
    pub blocked_flux_b: f64,
    pub leaked_flux_a: f64,
    pub leaked_flux_b: f64,
    /// Branch norms entering the apparatus.
    pub input_norm_a: f64,
    pub input_norm_b: f64,
}

impl DetectorReport {
    pub fn assemble(
        counts: DetectorCounts,
        input: [f64; 2],
        blocked: [f64; 2],
        blocked_total: f64,
        leaked: [f64; 2],
        leaked_total: f64,
    ) -> Self {
        Self {
            p_da_total: counts.p_da_total,
            p_db_total: counts.p_db_total,
            p_da_from_a: counts.p_da_from_a,
            p_db_from_a: counts.p_db_from_a,
            p_da_from_b: counts.p_da_from_b,
            p_db_from_b: counts.p_db_from_b,
            blocked_flux: blocked_total,
            leaked_flux: leaked_total,
            blocked_flux_a: blocked[0],
            blocked_flux_b: blocked[1],
            leaked_flux_a: leaked[0],
            leaked_flux_b: leaked[1],
            input_norm_a: input[0],
            input_norm_b: input[1],
        }
    }

    /// `input - (D_A + D_B + blocked + leaked)` per branch.
    pub fn bookkeeping_residual(&self) -> [f64; 2] {
        [
            self.input_norm_a - (self.p_da_from_a + self.p_db_from_a + self.blocked_flux_a + self.leaked_flux_a),
            self.input_norm_b - (self.p_da_from_b + self.p_db_from_b + self.blocked_flux_b + self.leaked_flux_b),
        ]
    }

    pub fn conditional_stats(&self) -> ConditionalStats {
        let total = self.input_norm_a + self.input_norm_b;
        let prior = if total > 0.0 { self.input_norm_a / total } else { 0.5 };
        ConditionalStats::new(
            [self.p_da_from_a, self.p_db_from_a],
            [self.p_da_from_b, self.p_db_from_b],
            prior,
        )
    }
}

/// Largest Gram condition number accepted by [`mode_contributions`].
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Coefficients of each branch over the two slit-centred Gaussian modes
/// `g_+-(y) = C(t) exp(-(y -+ y0)^2 / Omega(t))`.
///
/// Rows are branches `[A, B]`, columns modes `[+, -]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeContributions {
    /// Each branch projected as it stands.
    pub direct: [[Complex64; 2]; 2],
    /// Each branch after the mutually cancelling odd content is removed.
    pub surviving: [[Complex64; 2]; 2],
    pub gram: [[Complex64; 2]; 2],
    pub condition: f64,
    /// Relative L2 norm of what the two modes leave unexplained.
    pub residual_direct: [f64; 2],
    pub residual_surviving: [f64; 2],
}

impl ModeContributions {
    /// `P(mode | branch)` from the surviving coefficients, weighted by mode norms.
    pub fn surviving_stats(&self, prior_a: f64) -> ConditionalStats {
        let w = |row: [Complex64; 2]| [row[0].norm_sqr() * self.gram[0][0].re, row[1].norm_sqr() * self.gram[1][1].re];
        ConditionalStats::new(w(self.surviving[0]), w(self.surviving[1]), prior_a)
    }

    /// Mode-level distinguishability of the surviving parts.
    pub fn distinguishability(&self) -> Result<f64> {
        metrics::distinguishability(&self.surviving_stats(0.5))
    }

    /// Largest difference between the two surviving rows.
    pub fn row_mismatch(&self) -> f64 {
        (self.surviving[0][0] - self.surviving[1][0])
            .norm()
            .max((self.surviving[0][1] - self.surviving[1][1]).norm())
    }
}

struct TwoModeBasis {
    modes: [WaveField; 2],
    gram: [[Complex64; 2]; 2],
    inverse: [[Complex64; 2]; 2],
    condition: f64,
}

impl TwoModeBasis {
    fn new(modes: [WaveField; 2]) -> Result<Self> {
        let gram = [
            [modes[0].inner(&modes[0]), modes[0].inner(&modes[1])],
            [modes[1].inner(&modes[0]), modes[1].inner(&modes[1])],
        ];
        // Hermitian PSD 2x2: eigenvalues from trace and determinant
        let tr = gram[0][0].re + gram[1][1].re;
        let det = (gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]).re;
        let disc = libm::sqrt((tr * tr - 4.0 * det).max(0.0));
        let (hi, lo) = (0.5 * (tr + disc), 0.5 * (tr - disc));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition.is_nan() || condition > MAX_GRAM_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        let d = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
        let inverse = [[gram[1][1] / d, -gram[0][1] / d], [-gram[1][0] / d, gram[0][0] / d]];
        Ok(Self {
            modes,
            gram,
            inverse,
            condition,
        })
    }

    /// Dual-basis coefficients and the relative residual.
    fn project(&self, f: &WaveField) -> ([Complex64; 2], f64) {
        let rhs = [self.modes[0].inner(f), self.modes[1].inner(f)];
        let c = [
            self.inverse[0][0] * rhs[0] + self.inverse[0][1] * rhs[1],
            self.inverse[1][0] * rhs[0] + self.inverse[1][1] * rhs[1],
        ];
        let norm = f.norm_sqr();
        if norm == 0.0 {
            return (c, 0.0);
        }
        let g = f.grid;
        let resid: f64 = (0..g.n_points)
            .map(|j| (f.values[j] - c[0] * self.modes[0].values[j] - c[1] * self.modes[1].values[j]).norm_sqr())
            .sum::<f64>()
            * g.dy();
        (c, libm::sqrt(resid / norm))
    }
}

fn scale_add(x: &WaveField, s: Complex64, y: &WaveField) -> WaveField {
    WaveField {
        grid: x.grid,
        values: x.values.iter().zip(&y.values).map(|(a, b)| a + s * b).collect(),
        time: x.time,
    }
}

/// Splits the branches into surviving parts: even parts are kept, and along
/// the common odd direction the smaller branch contribution cancels against
/// the larger. The two parts always sum to the physical field.
pub fn surviving_parts(field: &BranchedField) -> Result<[WaveField; 2]> {
    if !field.grid().is_symmetric() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "parity split needs a grid symmetric about y = 0",
        });
    }
    let half = Complex64::new(0.5, 0.0);
    let parity = |w: &WaveField| {
        let m = w.mirrored();
        let even = scale_add(w, Complex64::new(1.0, 0.0), &m);
        let odd = scale_add(w, -Complex64::new(1.0, 0.0), &m);
        let scale = |v: WaveField| WaveField {
            values: v.values.iter().map(|z| z * half).collect(),
            ..v
        };
        (scale(even), scale(odd))
    };
    let (even_a, odd_a) = parity(&field.branch_a);
    let (even_b, odd_b) = parity(&field.branch_b);
    let diff = odd_a.sub(&odd_b)?;
    let diff_norm = libm::sqrt(diff.norm_sqr());
    if diff_norm == 0.0 {
        return Ok([field.branch_a.clone(), field.branch_b.clone()]);
    }
    let s = WaveField {
        values: diff.values.iter().map(|z| z / diff_norm).collect(),
        ..diff
    };
    let alpha = s.inner(&odd_a);
    let beta = -s.inner(&odd_b);
    // odd_a = alpha s + perp_a, odd_b = -beta s + perp_b
    let perp_a = scale_add(&odd_a, -alpha, &s);
    let perp_b = scale_add(&odd_b, beta, &s);
    let base_a = even_a.add(&perp_a)?;
    let base_b = even_b.add(&perp_b)?;
    Ok(if alpha.norm() >= beta.norm() {
        [scale_add(&base_a, alpha - beta, &s), base_b]
    } else {
        [base_a, scale_add(&base_b, -(beta - alpha), &s)]
    })
}

/// Decomposes both branches over the two slit modes evaluated at the field's
/// time stamp, directly and after removing the cancelling content.
pub fn mode_contributions(field: &BranchedField, slit: &SlitConfig) -> Result<ModeContributions> {
    let grid = field.grid();
    let t = field.time();
    let modes = [
        WaveField::from_fn(grid, t, |y| slit.mode(1.0, t, y)),
        WaveField::from_fn(grid, t, |y| slit.mode(-1.0, t, y)),
    ];
    let basis = TwoModeBasis::new(modes)?;
    let (ca, ra) = basis.project(&field.branch_a);
    let (cb, rb) = basis.project(&field.branch_b);
    let [sa, sb] = surviving_parts(field)?;
    let (csa, rsa) = basis.project(&sa);
    let (csb, rsb) = basis.project(&sb);
    Ok(ModeContributions {
        direct: [ca, cb],
        surviving: [csa, csb],
        gram: basis.gram,
        condition: basis.condition,
        residual_direct: [ra, rb],
        residual_surviving: [rsa, rsb],
    })
}
