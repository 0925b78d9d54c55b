//! Gaussian two-slit wave packets under free evolution `H = p^2 / 2m`.
//!
//! Each slit launches a normalized Gaussian of width `epsilon` centred at
//! `+-y0`. The closed form at time `t` is
//!
//! ```text
//! psi_+-(y, t) = C(t) exp(-(y -+ y0)^2 / Omega(t)),
//! Omega(t)     = epsilon^2 + 2 i hbar t / m,
//! C(t)         = (pi/2)^(-1/4) (epsilon + 2 i hbar t / (m epsilon))^(-1/2)
//! ```
//!
//! with the principal square root. The spectral propagator evolves any field
//! exactly on the periodic grid and serves as the independent check on the
//! closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::field::{BranchedField, Origin, WaveField, BOUNDARY_LIMIT};
use crate::grid::Grid;

/// Initial branch overlap must stay below this.
pub const MAX_INITIAL_OVERLAP: f64 = 1e-10;
/// Physical fields are normalized to this tolerance.
pub const NORM_TOL: f64 = 1e-9;

/// Mass and reduced Planck constant of the transported particle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Particle {
    pub mass: f64,
    pub hbar: f64,
}

impl Default for Particle {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0 }
    }
}

impl Particle {
    /// `hbar / m`, the coefficient that turns times into squared lengths.
    pub fn diffusivity(&self) -> f64 {
        self.hbar / self.mass
    }
}

/// Two-slit source geometry and amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlitConfig {
    pub epsilon: f64,
    pub y0: f64,
    /// Amplitude of the packet centred at `+y0`.
    pub amp_a: Complex64,
    /// Amplitude of the packet centred at `-y0`.
    pub amp_b: Complex64,
    pub mass: f64,
    pub hbar: f64,
}

impl Default for SlitConfig {
    fn default() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            epsilon: 0.5,
            y0: 5.0,
            amp_a: Complex64::new(h, 0.0),
            amp_b: Complex64::new(h, 0.0),
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

impl SlitConfig {
    /// Only slit A open.
    pub fn single_a(self) -> Self {
        Self {
            amp_a: Complex64::new(1.0, 0.0),
            amp_b: Complex64::new(0.0, 0.0),
            ..self
        }
    }

    /// Only slit B open.
    pub fn single_b(self) -> Self {
        Self {
            amp_a: Complex64::new(0.0, 0.0),
            amp_b: Complex64::new(1.0, 0.0),
            ..self
        }
    }

    /// Real amplitudes `(sqrt(p_a), sqrt(1 - p_a))`.
    pub fn with_weight_a(self, p_a: f64) -> Self {
        Self {
            amp_a: Complex64::new(libm::sqrt(p_a), 0.0),
            amp_b: Complex64::new(libm::sqrt(1.0 - p_a), 0.0),
            ..self
        }
    }

    pub fn particle(&self) -> Particle {
        Particle {
            mass: self.mass,
            hbar: self.hbar,
        }
    }

    /// `|<A|B>|` for the normalized initial packets, `exp(-2 y0^2 / epsilon^2)`.
    pub fn initial_overlap(&self) -> f64 {
        libm::exp(-2.0 * self.y0 * self.y0 / (self.epsilon * self.epsilon))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.epsilon) {
            return Err(invalid("epsilon", "must be finite and > 0"));
        }
        if !positive(self.y0) {
            return Err(invalid("y0", "must be finite and > 0"));
        }
        if !positive(self.mass) {
            return Err(invalid("mass", "must be finite and > 0"));
        }
        if !positive(self.hbar) {
            return Err(invalid("hbar", "must be finite and > 0"));
        }
        if self.epsilon >= self.y0 || self.initial_overlap() >= MAX_INITIAL_OVERLAP {
            return Err(invalid("epsilon", "packets overlap initially (need exp(-2 y0^2/eps^2) < 1e-10)"));
        }
        let total = self.amp_a.norm_sqr() + self.amp_b.norm_sqr();
        if !total.is_finite() || (total - 1.0).abs() > 1e-12 {
            return Err(invalid("amplitudes", "|a|^2 + |b|^2 must equal 1"));
        }
        Ok(())
    }

    /// `Omega(t) = epsilon^2 + 2 i hbar t / m`.
    pub fn omega(&self, t: f64) -> Complex64 {
        Complex64::new(self.epsilon * self.epsilon, 2.0 * self.hbar * t / self.mass)
    }

    /// `C(t) = (pi/2)^(-1/4) (epsilon + 2 i hbar t / (m epsilon))^(-1/2)`.
    pub fn prefactor(&self, t: f64) -> Complex64 {
        let inner = Complex64::new(self.epsilon, 2.0 * self.hbar * t / (self.mass * self.epsilon));
        libm::pow(PI / 2.0, -0.25) / inner.sqrt()
    }

    /// Unit-amplitude mode centred at `sign * y0`: `C(t) exp(-(y - sign y0)^2 / Omega)`.
    pub fn mode(&self, sign: f64, t: f64, y: f64) -> Complex64 {
        let d = y - sign * self.y0;
        self.prefactor(t) * (-(d * d) / self.omega(t)).exp()
    }

    /// Far-field fringe spacing `pi hbar t / (m y0)` of the intensity.
    pub fn far_field_spacing(&self, t: f64) -> f64 {
        PI * self.hbar * t / (self.mass * self.y0)
    }
}

fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}

fn check_boundary(field: &BranchedField) -> Result<()> {
    let magnitude = field.boundary_magnitude();
    if magnitude < BOUNDARY_LIMIT {
        Ok(())
    } else {
        Err(Error::BoundaryViolation {
            magnitude,
            limit: BOUNDARY_LIMIT,
        })
    }
}

/// Samples the two slit packets at t = 0.
pub fn initial_state(cfg: &SlitConfig, grid: Grid) -> Result<BranchedField> {
    cfg.validate()?;
    let branch = |amp: Complex64, sign: f64| WaveField::from_fn(grid, 0.0, |y| amp * cfg.mode(sign, 0.0, y));
    let field = BranchedField {
        branch_a: branch(cfg.amp_a, 1.0),
        branch_b: branch(cfg.amp_b, -1.0),
        particle: cfg.particle(),
        origin: Origin::Initial(*cfg),
    };
    check_boundary(&field)?;
    let norm = field.total_norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(invalid("grid", "too coarse to resolve the packets (norm off by > 1e-9)"));
    }
    Ok(field)
}

/// Closed-form state at time `t`, anchored at the t = 0 initial state.
pub fn propagate_analytic(field: &BranchedField, t: f64) -> Result<BranchedField> {
    let cfg = match field.origin {
        Origin::Initial(cfg) if field.time() == 0.0 => cfg,
        _ => return Err(Error::NotInitialState),
    };
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", "must be finite and >= 0"));
    }
    let grid = field.grid();
    let c = cfg.prefactor(t);
    let inv_omega = cfg.omega(t).inv();
    let branch = |amp: Complex64, sign: f64| {
        let scale = amp * c;
        WaveField::from_fn(grid, t, |y| {
            let d = y - sign * cfg.y0;
            scale * (-(d * d) * inv_omega).exp()
        })
    };
    let out = BranchedField {
        branch_a: branch(cfg.amp_a, 1.0),
        branch_b: branch(cfg.amp_b, -1.0),
        particle: field.particle,
        origin: Origin::Analytic(cfg),
    };
    check_boundary(&out)?;
    Ok(out)
}

/// Exact free evolution on a periodic grid via the momentum representation.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    fft: Fft,
    /// `hbar k^2 / (2m)`, the phase rate of each momentum bin.
    rates: Vec<f64>,
    grid: Grid,
}

impl SpectralPropagator {
    pub fn new(grid: Grid, particle: Particle) -> Result<Self> {
        let fft = Fft::new(grid.n_points)?;
        let rates = grid
            .wavenumbers()
            .into_iter()
            .map(|k| 0.5 * particle.hbar * k * k / particle.mass)
            .collect();
        Ok(Self { fft, rates, grid })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Evolves one wave field by `dt` in place.
    pub fn step(&self, field: &mut WaveField, dt: f64) {
        self.fft.forward(&mut field.values);
        for (z, &w) in field.values.iter_mut().zip(&self.rates) {
            let ph = -w * dt;
            *z *= Complex64::new(libm::cos(ph), libm::sin(ph));
        }
        self.fft.inverse(&mut field.values);
        field.time += dt;
    }

    /// Evolves both branches by `dt`; no boundary check.
    pub fn step_branches(&self, field: &BranchedField, dt: f64) -> BranchedField {
        let mut out = BranchedField {
            branch_a: field.branch_a.clone(),
            branch_b: field.branch_b.clone(),
            particle: field.particle,
            origin: Origin::Processed,
        };
        self.step(&mut out.branch_a, dt);
        self.step(&mut out.branch_b, dt);
        out
    }
}

/// Free evolution by `dt` from the field's current time stamp.
///
/// Fails with [`Error::Wraparound`] if the result reaches the grid edges.
pub fn propagate_spectral(field: &BranchedField, dt: f64) -> Result<BranchedField> {
    if !dt.is_finite() {
        return Err(invalid("dt", "must be finite"));
    }
    let prop = SpectralPropagator::new(field.grid(), field.particle)?;
    let out = prop.step_branches(field, dt);
    let magnitude = out.boundary_magnitude();
    if magnitude >= BOUNDARY_LIMIT {
        return Err(Error::Wraparound { magnitude });
    }
    Ok(out)
}

/// Free transport with an absorbing layer at both grid edges.
///
/// Flux that reaches the outer `layer_fraction` of the grid is damped out
/// each sub-step instead of wrapping around. Sub-steps are short enough that
/// the fastest representable component cannot cross half the layer in one
/// step. Returns the field and the flux absorbed from each branch.
pub fn transport_absorbing(field: &BranchedField, duration: f64, layer_fraction: f64) -> Result<(BranchedField, [f64; 2])> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(invalid("duration", "must be finite and >= 0"));
    }
    if !(layer_fraction > 0.0 && layer_fraction < 0.5) {
        return Err(invalid("layer_fraction", "must lie in (0, 0.5)"));
    }
    let grid = field.grid();
    let prop = SpectralPropagator::new(grid, field.particle)?;
    let mask = absorbing_mask(grid, layer_fraction);

    let width = layer_fraction * (grid.y_max - grid.y_min);
    let v_max = field.particle.diffusivity() * grid.nyquist();
    let max_step = 0.5 * width / v_max;
    let steps = libm::ceil(duration / max_step).max(1.0) as usize;
    let dt = duration / steps as f64;

    let mut out = BranchedField {
        branch_a: field.branch_a.clone(),
        branch_b: field.branch_b.clone(),
        particle: field.particle,
        origin: Origin::Processed,
    };
    let before = out.branch_norms();
    for _ in 0..steps {
        for branch in [&mut out.branch_a, &mut out.branch_b] {
            prop.step(branch, dt);
            branch.values.iter_mut().zip(&mask).for_each(|(z, m)| *z *= *m);
        }
    }
    // exact target time, independent of accumulated sub-step sums
    out.branch_a.time = field.time() + duration;
    out.branch_b.time = field.time() + duration;
    let after = out.branch_norms();
    Ok((out, [before[0] - after[0], before[1] - after[1]]))
}

/// 1 in the interior, falling as `cos^2` to 0 across the outer layers.
/// Symmetric under `Grid::mirror_index`.
fn absorbing_mask(grid: Grid, layer_fraction: f64) -> Vec<f64> {
    let n = grid.n_points;
    let layer = ((layer_fraction * n as f64) as usize).max(1);
    (0..n)
        .map(|j| {
            let depth = if j < layer {
                layer - j
            } else if j > n - layer {
                j + layer - n
            } else {
                0
            };
            let x = depth as f64 / layer as f64;
            let c = libm::cos(0.5 * PI * x);
            c * c
        })
        .collect()
}

/// Parity decomposition of the closed-form branches.
#[derive(Debug, Clone, PartialEq)]
pub struct CoshSinhParts {
    pub cosh_a: WaveField,
    pub sinh_a: WaveField,
    pub cosh_b: WaveField,
    pub sinh_b: WaveField,
}

impl CoshSinhParts {
    /// `cosh_a + sinh_a`, the reconstructed branch A.
    pub fn branch_a(&self) -> WaveField {
        self.cosh_a.add(&self.sinh_a).expect("parts share one grid")
    }

    /// `cosh_b - sinh_b`, the reconstructed branch B.
    pub fn branch_b(&self) -> WaveField {
        self.cosh_b.sub(&self.sinh_b).expect("parts share one grid")
    }
}

/// `exp(w) cosh(z)` and `exp(w) sinh(z)`, falling back to the product form
/// of exponentials when `cosh(z)` alone would overflow.
fn exp_cosh_sinh(w: Complex64, z: Complex64) -> (Complex64, Complex64) {
    if z.re.abs() < 300.0 && w.re > -700.0 {
        let e = w.exp();
        (e * z.cosh(), e * z.sinh())
    } else {
        let p = (w + z).exp();
        let m = (w - z).exp();
        ((p + m) * 0.5, (p - m) * 0.5)
    }
}

/// Splits each closed-form branch into its `cosh(2 y y0 / Omega)` (even) and
/// `sinh(2 y y0 / Omega)` (odd) parts, so that `branch_a = cosh_a + sinh_a`
/// and `branch_b = cosh_b - sinh_b`.
pub fn cosh_sinh_decompose(field: &BranchedField) -> Result<CoshSinhParts> {
    let cfg = *field.closed_form().ok_or(Error::NotAnalytic)?;
    let t = field.time();
    let grid = field.grid();
    let c = cfg.prefactor(t);
    let inv_omega = cfg.omega(t).inv();
    let (mut ch, mut sh) = (Vec::with_capacity(grid.n_points), Vec::with_capacity(grid.n_points));
    for j in 0..grid.n_points {
        let y = grid.y(j);
        let w = -(y * y + cfg.y0 * cfg.y0) * inv_omega;
        let z = 2.0 * y * cfg.y0 * inv_omega;
        let (a, b) = exp_cosh_sinh(w, z);
        ch.push(c * a);
        sh.push(c * b);
    }
    let scaled = |v: &[Complex64], amp: Complex64| WaveField {
        grid,
        values: v.iter().map(|z| amp * z).collect(),
        time: t,
    };
    Ok(CoshSinhParts {
        cosh_a: scaled(&ch, cfg.amp_a),
        sinh_a: scaled(&sh, cfg.amp_a),
        cosh_b: scaled(&ch, cfg.amp_b),
        sinh_b: scaled(&sh, cfg.amp_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> Grid {
        Grid::symmetric(4096, 256.0).unwrap()
    }

    #[test]
    fn prefactor_matches_initial_normalization() {
        let cfg = SlitConfig::default();
        let c0 = cfg.prefactor(0.0);
        let expected = libm::pow(PI / 2.0, -0.25) / libm::sqrt(cfg.epsilon);
        assert!((c0.re - expected).abs() < 1e-15 && c0.im == 0.0);
    }

    #[test]
    fn prefactor_is_continuous_in_time() {
        // principal branch: no sign flips while stepping t finely
        let cfg = SlitConfig::default();
        let mut prev = cfg.prefactor(0.0);
        for i in 1..=200_000 {
            let c = cfg.prefactor(i as f64 * 1e-3);
            // a branch flip would jump by ~2|C|
            assert!((c - prev).norm() < 0.05 * c.norm(), "jump at step {i}");
            assert!(c.re > 0.0);
            prev = c;
        }
    }

    #[test]
    fn initial_state_norms() {
        let cfg = SlitConfig::default();
        let f = initial_state(&cfg, small_grid()).unwrap();
        assert!((f.total_norm_sqr() - 1.0).abs() < 1e-12);
        let [na, nb] = f.branch_norms();
        assert!((na - 0.5).abs() < 1e-12 && (nb - 0.5).abs() < 1e-12);

        let single = initial_state(&cfg.single_a(), small_grid()).unwrap();
        let [na, nb] = single.branch_norms();
        assert!((na - 1.0).abs() < 1e-12 && nb == 0.0);
        // branch A sits at +y0
        let g = single.grid();
        let peak = (0..g.n_points)
            .max_by(|&i, &j| single.branch_a.values[i].norm().total_cmp(&single.branch_a.values[j].norm()))
            .unwrap();
        assert!((g.y(peak) - cfg.y0).abs() <= g.dy());
    }

    #[test]
    fn initial_state_rejects_bad_config() {
        let g = small_grid();
        let cfg = SlitConfig {
            epsilon: 4.0,
            ..SlitConfig::default()
        };
        assert!(initial_state(&cfg, g).is_err());
        let cfg = SlitConfig {
            amp_a: Complex64::new(1.0, 0.0),
            ..SlitConfig::default()
        };
        assert!(initial_state(&cfg, g).is_err());
        let narrow = Grid::symmetric(1024, 6.0).unwrap();
        assert!(matches!(
            initial_state(&SlitConfig::default(), narrow),
            Err(Error::BoundaryViolation { .. })
        ));
    }

    #[test]
    fn analytic_at_zero_is_identity() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let g = propagate_analytic(&f, 0.0).unwrap();
        assert!(g.branch_a.max_abs_diff(&f.branch_a) < 1e-14);
        assert!(g.branch_b.max_abs_diff(&f.branch_b) < 1e-14);
    }

    #[test]
    fn analytic_requires_initial_state() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let g = propagate_analytic(&f, 1.0).unwrap();
        assert_eq!(propagate_analytic(&g, 2.0), Err(Error::NotInitialState));
        let h = propagate_spectral(&f, 0.0).unwrap();
        assert_eq!(propagate_analytic(&h, 2.0), Err(Error::NotInitialState));
    }

    #[test]
    fn spectral_identity_and_composition() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let same = propagate_spectral(&f, 0.0).unwrap();
        assert!(same.branch_a.max_abs_diff(&f.branch_a) < 1e-14);
        let one = propagate_spectral(&f, 4.0).unwrap();
        let two = propagate_spectral(&propagate_spectral(&f, 2.0).unwrap(), 2.0).unwrap();
        assert!(one.branch_a.max_abs_diff(&two.branch_a) < 1e-12);
        assert!(one.branch_b.max_abs_diff(&two.branch_b) < 1e-12);
        assert_eq!(two.time(), 4.0);
    }

    #[test]
    fn spectral_detects_wraparound() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        assert!(matches!(propagate_spectral(&f, 100.0), Err(Error::Wraparound { .. })));
    }

    #[test]
    fn spectral_matches_analytic_on_small_grid() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let a = propagate_analytic(&f, 5.0).unwrap();
        let s = propagate_spectral(&f, 5.0).unwrap();
        assert!(s.branch_a.relative_l2(&a.branch_a) < 1e-8);
        assert!(s.total().relative_l2(&a.total()) < 1e-8);
    }

    #[test]
    fn decomposition_reconstructs_branches() {
        let f = initial_state(&SlitConfig::default().with_weight_a(0.7), small_grid()).unwrap();
        for &t in &[0.0, 3.0, 10.0] {
            let g = propagate_analytic(&f, t).unwrap();
            let parts = cosh_sinh_decompose(&g).unwrap();
            assert!(parts.branch_a().max_abs_diff(&g.branch_a) < 1e-12);
            assert!(parts.branch_b().max_abs_diff(&g.branch_b) < 1e-12);
        }
    }

    #[test]
    fn decomposition_needs_closed_form() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let s = propagate_spectral(&f, 1.0).unwrap();
        assert_eq!(cosh_sinh_decompose(&s), Err(Error::NotAnalytic));
    }

    #[test]
    fn absorbing_transport_matches_free_when_contained() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let (t, lost) = transport_absorbing(&f, 5.0, 0.1).unwrap();
        let s = propagate_spectral(&f, 5.0).unwrap();
        assert!(t.branch_a.max_abs_diff(&s.branch_a) < 1e-12);
        assert!(lost[0].abs() < 1e-14 && lost[1].abs() < 1e-14);
    }

    #[test]
    fn absorbing_transport_removes_escaping_flux() {
        let f = initial_state(&SlitConfig::default(), small_grid()).unwrap();
        let (t, lost) = transport_absorbing(&f, 100.0, 0.1).unwrap();
        let [na, nb] = t.branch_norms();
        assert!((na + lost[0] - 0.5).abs() < 1e-12);
        assert!((nb + lost[1] - 0.5).abs() < 1e-12);
        assert!(lost[0] > 0.01);
    }

    #[test]
    fn absorbing_mask_is_mirror_symmetric() {
        let grid = Grid::symmetric(256, 10.0).unwrap();
        let m = absorbing_mask(grid, 0.1);
        for j in 0..256 {
            assert_eq!(m[j], m[grid.mirror_index(j)]);
        }
        assert!(m[0] < 1e-30);
        assert_eq!(m[128], 1.0);
    }
}
