//! Spin-1/2 "two-slit" interferometer.
//!
//! The two `S_z` eigenstates stand in for the two wave packets leaving the
//! slits. A homogeneous field along y rotates them into each other; after a
//! quarter period the down components of the two branches cancel (dark port)
//! and the up components add (bright port).

use core::f64::consts::FRAC_PI_2;
use core::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitudes over the fixed basis {up, down}.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinState {
    pub amp_up: Complex64,
    pub amp_down: Complex64,
}

impl SpinState {
    pub const fn new(amp_up: Complex64, amp_down: Complex64) -> Self {
        Self { amp_up, amp_down }
    }

    pub const fn up() -> Self {
        Self::new(ONE, ZERO)
    }

    pub const fn down() -> Self {
        Self::new(ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }

    /// Equal-weight superposition (|up> + |down>)/sqrt(2).
    pub fn symmetric() -> Self {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(h, h)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_up.norm_sqr() + self.amp_down.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// <self|other>
    pub fn inner(&self, other: &SpinState) -> Complex64 {
        self.amp_up.conj() * other.amp_up + self.amp_down.conj() * other.amp_down
    }

    /// Outcome probabilities of a z-basis spin detector, `(p_up, p_down)`.
    pub fn click_probabilities(&self) -> (f64, f64) {
        (self.amp_up.norm_sqr(), self.amp_down.norm_sqr())
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SpinState) -> f64 {
        let du = (self.amp_up - other.amp_up).norm();
        let dd = (self.amp_down - other.amp_down).norm();
        du.max(dd)
    }

    /// Density matrix `[[rho_uu, rho_ud], [rho_du, rho_dd]]` of the normalized state.
    fn density(&self) -> Option<[[Complex64; 2]; 2]> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return None;
        }
        let (u, d) = (self.amp_up, self.amp_down);
        Some([
            [u * u.conj() / n, u * d.conj() / n],
            [d * u.conj() / n, d * d.conj() / n],
        ])
    }
}

impl Add for SpinState {
    type Output = SpinState;

    fn add(self, rhs: SpinState) -> SpinState {
        SpinState::new(self.amp_up + rhs.amp_up, self.amp_down + rhs.amp_down)
    }
}

impl Mul<Complex64> for SpinState {
    type Output = SpinState;

    fn mul(self, rhs: Complex64) -> SpinState {
        SpinState::new(self.amp_up * rhs, self.amp_down * rhs)
    }
}

impl Mul<f64> for SpinState {
    type Output = SpinState;

    fn mul(self, rhs: f64) -> SpinState {
        SpinState::new(self.amp_up * rhs, self.amp_down * rhs)
    }
}

/// Evolution under `H = B S_y` with hbar = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinEvolver {
    field_strength: f64,
    tau: f64,
}

impl Default for SpinEvolver {
    fn default() -> Self {
        Self {
            field_strength: 1.0,
            tau: FRAC_PI_2,
        }
    }
}

impl SpinEvolver {
    pub fn new(field_strength: f64) -> Result<Self> {
        if !(field_strength.is_finite() && field_strength > 0.0) {
            return Err(Error::InvalidParameter {
                name: "field_strength",
                reason: "must be finite and > 0",
            });
        }
        Ok(Self {
            field_strength,
            tau: FRAC_PI_2 / field_strength,
        })
    }

    pub fn field_strength(&self) -> f64 {
        self.field_strength
    }

    /// Quarter-period time `pi / (2B)`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `U(t) = cos(Bt/2) I + i sin(Bt/2) sigma_y`, returned row-major.
    ///
    /// Since `i sigma_y = [[0, 1], [-1, 0]]` the matrix is real.
    pub fn matrix(&self, duration: f64) -> [[f64; 2]; 2] {
        let half = 0.5 * self.field_strength * duration;
        let (s, c) = (libm::sin(half), libm::cos(half));
        [[c, s], [-s, c]]
    }

    /// Applies `U(duration)`; `duration` must be non-negative.
    pub fn evolve(&self, state: SpinState, duration: f64) -> Result<SpinState> {
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: "must be finite and >= 0",
            });
        }
        let m = self.matrix(duration);
        Ok(SpinState::new(
            state.amp_up * m[0][0] + state.amp_down * m[0][1],
            state.amp_up * m[1][0] + state.amp_down * m[1][1],
        ))
    }

    /// Evolves both branches by `duration`.
    pub fn evolve_branches(&self, state: BranchedSpinState, duration: f64) -> Result<BranchedSpinState> {
        Ok(BranchedSpinState {
            branch_up_origin: self.evolve(state.branch_up_origin, duration)?,
            branch_down_origin: self.evolve(state.branch_down_origin, duration)?,
        })
    }
}

/// Free function form of [`SpinEvolver::evolve`].
pub fn evolve(state: SpinState, evolver: &SpinEvolver, duration: f64) -> Result<SpinState> {
    evolver.evolve(state, duration)
}

/// The two unnormalized contributions from the up and down initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BranchedSpinState {
    pub branch_up_origin: SpinState,
    pub branch_down_origin: SpinState,
}

impl BranchedSpinState {
    /// `|psi>_0` split as `|up>/sqrt(2)` and `|down>/sqrt(2)`.
    pub fn initial() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            branch_up_origin: SpinState::up() * h,
            branch_down_origin: SpinState::down() * h,
        }
    }

    /// The physical state.
    pub fn total(&self) -> SpinState {
        self.branch_up_origin + self.branch_down_origin
    }

    pub fn total_norm_sqr(&self) -> f64 {
        self.total().norm_sqr()
    }
}

/// Evolves the symmetric initial state for one quarter period, branch by branch.
pub fn make_interference_state(evolver: &SpinEvolver) -> BranchedSpinState {
    let tau = evolver.tau();
    // tau > 0 by construction
    evolver
        .evolve_branches(BranchedSpinState::initial(), tau)
        .expect("tau is positive and finite")
}

/// Drops the down component of each branch (destructive port).
pub fn project_dark_port(state: BranchedSpinState) -> BranchedSpinState {
    let keep_up = |s: SpinState| SpinState::new(s.amp_up, ZERO);
    BranchedSpinState {
        branch_up_origin: keep_up(state.branch_up_origin),
        branch_down_origin: keep_up(state.branch_down_origin),
    }
}

/// Trace distance between the normalized branch states.
///
/// 0 means the branches are the same ray (no which-initial-state information),
/// 1 means they are orthogonal. A branch with zero norm leaves the other one
/// fully identified and yields 1.
pub fn which_initial_state_info(state: &BranchedSpinState) -> Result<f64> {
    let rho = state.branch_up_origin.density();
    let sigma = state.branch_down_origin.density();
    match (rho, sigma) {
        (None, None) => Err(Error::FullyAbsorbed),
        (Some(_), None) | (None, Some(_)) => Ok(1.0),
        (Some(r), Some(s)) => Ok(trace_distance(&r, &s)),
    }
}

/// `(1/2) tr |rho - sigma|` for unit-trace 2x2 density matrices.
///
/// The difference is Hermitian and traceless, so its eigenvalues are
/// `+-sqrt(|d00|^2 + |d01|^2)`.
fn trace_distance(rho: &[[Complex64; 2]; 2], sigma: &[[Complex64; 2]; 2]) -> f64 {
    let d00 = rho[0][0] - sigma[0][0];
    let d01 = rho[0][1] - sigma[0][1];
    libm::sqrt(d00.norm_sqr() + d01.norm_sqr()).min(1.0)
}

/// Snapshot of every stage of the spin interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinPipeline {
    pub tau: f64,
    pub interference: BranchedSpinState,
    pub projected: BranchedSpinState,
    pub final_projected: BranchedSpinState,
    pub final_unprojected: BranchedSpinState,
    /// Norm lost at the dark port.
    pub dark_port_loss: f64,
    pub info_with_projection: f64,
    pub info_without_projection: f64,
}

/// Runs preparation, quarter-period evolution, dark-port projection and a
/// further quarter period, alongside the same run without projection.
pub fn run_pipeline(evolver: &SpinEvolver) -> Result<SpinPipeline> {
    let tau = evolver.tau();
    let interference = make_interference_state(evolver);
    let projected = project_dark_port(interference);
    let final_projected = evolver.evolve_branches(projected, tau)?;
    let final_unprojected = evolver.evolve_branches(interference, tau)?;
    Ok(SpinPipeline {
        tau,
        interference,
        projected,
        final_projected,
        final_unprojected,
        dark_port_loss: interference.total_norm_sqr() - projected.total_norm_sqr(),
        info_with_projection: which_initial_state_info(&final_projected)?,
        info_without_projection: which_initial_state_info(&final_unprojected)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    // Independent check: the generator route, U(t) = exp(-i t B sigma_y / 2)
    // summed as a power series (sigma_y^2 = I).
    fn series_matrix(b: f64, t: f64) -> [[Complex64; 2]; 2] {
        let i = Complex64::new(0.0, 1.0);
        let sy = [[ZERO, -i], [i, ZERO]];
        let x = i * (b * t / 2.0);
        let mut acc = [[ONE, ZERO], [ZERO, ONE]];
        let mut term = [[ONE, ZERO], [ZERO, ONE]];
        for k in 1..60 {
            let mut next = [[ZERO; 2]; 2];
            for r in 0..2 {
                for col in 0..2 {
                    for m in 0..2 {
                        next[r][col] += term[r][m] * sy[m][col] * x / (k as f64);
                    }
                }
            }
            term = next;
            for r in 0..2 {
                for col in 0..2 {
                    acc[r][col] += term[r][col];
                }
            }
        }
        acc
    }

    #[test]
    fn matrix_matches_exponential_series() {
        let ev = SpinEvolver::new(1.3).unwrap();
        for &t in &[0.0, 0.4, ev.tau(), 2.0 * ev.tau(), 5.1] {
            let m = ev.matrix(t);
            let s = series_matrix(1.3, t);
            for r in 0..2 {
                for col in 0..2 {
                    assert!((s[r][col] - c(m[r][col])).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn quarter_period_rotations() {
        let ev = SpinEvolver::default();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let up = ev.evolve(SpinState::up(), ev.tau()).unwrap();
        assert!(up.max_abs_diff(&SpinState::new(c(h), c(-h))) < 1e-15);
        let down = ev.evolve(SpinState::down(), ev.tau()).unwrap();
        assert!(down.max_abs_diff(&SpinState::new(c(h), c(h))) < 1e-15);
    }

    #[test]
    fn half_period_swaps_basis_states() {
        let ev = SpinEvolver::default();
        let up = ev.evolve(SpinState::up(), 2.0 * ev.tau()).unwrap();
        assert!(up.max_abs_diff(&(SpinState::down() * -1.0)) < 1e-13);
        let down = ev.evolve(SpinState::down(), 2.0 * ev.tau()).unwrap();
        assert!(down.max_abs_diff(&SpinState::up()) < 1e-13);
    }

    #[test]
    fn zero_duration_is_identity() {
        let ev = SpinEvolver::new(2.5).unwrap();
        let s = SpinState::new(Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.7));
        assert_eq!(ev.evolve(s, 0.0).unwrap(), s);
    }

    #[test]
    fn rejects_negative_duration_and_bad_field() {
        let ev = SpinEvolver::default();
        assert!(ev.evolve(SpinState::up(), -1.0).is_err());
        assert!(SpinEvolver::new(0.0).is_err());
        assert!(SpinEvolver::new(f64::NAN).is_err());
    }

    #[test]
    fn interference_state_branches() {
        let st = make_interference_state(&SpinEvolver::default());
        let expected_a = SpinState::new(c(0.5), c(-0.5));
        let expected_b = SpinState::new(c(0.5), c(0.5));
        assert!(st.branch_up_origin.max_abs_diff(&expected_a) < 1e-15);
        assert!(st.branch_down_origin.max_abs_diff(&expected_b) < 1e-15);
        assert!(st.total().max_abs_diff(&SpinState::up()) < 1e-15);
        assert!((st.branch_up_origin.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((st.branch_down_origin.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dark_port_projection() {
        let st = project_dark_port(make_interference_state(&SpinEvolver::default()));
        let half_up = SpinState::new(c(0.5), ZERO);
        assert!(st.branch_up_origin.max_abs_diff(&half_up) < 1e-15);
        assert!(st.branch_down_origin.max_abs_diff(&half_up) < 1e-15);
        // the sum had nothing in the dark port
        let before = make_interference_state(&SpinEvolver::default());
        assert!((before.total_norm_sqr() - st.total_norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn dark_port_single_branch_loses_half() {
        // oracle: projector P = diag(1, 0) applied as a matrix product
        let s = SpinState::new(c(0.5), c(-0.5));
        let p = [[1.0, 0.0], [0.0, 0.0]];
        let oracle = SpinState::new(
            s.amp_up * p[0][0] + s.amp_down * p[0][1],
            s.amp_up * p[1][0] + s.amp_down * p[1][1],
        );
        let st = project_dark_port(BranchedSpinState {
            branch_up_origin: s,
            branch_down_origin: SpinState::zero(),
        });
        assert!(st.branch_up_origin.max_abs_diff(&oracle) < 1e-15);
        assert!((s.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((st.branch_up_origin.norm_sqr() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn info_values() {
        let orth = BranchedSpinState {
            branch_up_origin: SpinState::up(),
            branch_down_origin: SpinState::down(),
        };
        assert!((which_initial_state_info(&orth).unwrap() - 1.0).abs() < 1e-15);

        let interf = make_interference_state(&SpinEvolver::default());
        assert!((which_initial_state_info(&interf).unwrap() - 1.0).abs() < 1e-12);

        let p = run_pipeline(&SpinEvolver::default()).unwrap();
        assert!(p.info_with_projection.abs() < 1e-12);
        assert!((p.info_without_projection - 1.0).abs() < 1e-12);
        assert!(p.dark_port_loss.abs() < 1e-15);
    }

    #[test]
    fn info_errors_when_fully_absorbed() {
        let z = BranchedSpinState {
            branch_up_origin: SpinState::zero(),
            branch_down_origin: SpinState::zero(),
        };
        assert_eq!(which_initial_state_info(&z), Err(Error::FullyAbsorbed));
        let one = BranchedSpinState {
            branch_up_origin: SpinState::up(),
            branch_down_origin: SpinState::zero(),
        };
        assert_eq!(which_initial_state_info(&one).unwrap(), 1.0);
    }

    #[test]
    fn info_is_phase_insensitive() {
        let s = SpinState::new(c(0.6), Complex64::new(0.0, 0.8));
        let b = BranchedSpinState {
            branch_up_origin: s,
            branch_down_origin: s * Complex64::new(0.0, -0.5),
        };
        assert!(which_initial_state_info(&b).unwrap() < 1e-15);
    }

    #[test]
    fn final_state_matches_further_evolution() {
        let p = run_pipeline(&SpinEvolver::default()).unwrap();
        let q = 0.5 * core::f64::consts::FRAC_1_SQRT_2;
        let e = SpinState::new(c(q), c(-q));
        assert!(p.final_projected.branch_up_origin.max_abs_diff(&e) < 1e-15);
        assert!(p.final_projected.branch_down_origin.max_abs_diff(&e) < 1e-15);
    }
}
