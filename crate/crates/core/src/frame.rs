//! Randomized checker for the shared-dark-component theorem.
//!
//! Two orthogonal branch states that both carry a component along a common
//! direction `gamma` (with opposite signs, so it cancels in the sum) are
//! written as
//!
//! ```text
//! psi_A = a alpha + c1 gamma
//! psi_B = b beta  - c2 gamma,     gamma _|_ alpha, gamma _|_ beta
//! ```
//!
//! `<psi_A|psi_B> = 0` forces `<alpha|beta> = conj(c1) c2 / (conj(a) b)`, so the
//! surviving parts can never be orthogonal while `c1 c2 != 0`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Smallest Hilbert-space dimension that fits alpha, beta and gamma.
pub const MIN_DIM: usize = 3;
/// Tolerance for construction residuals.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Per-trial check: overlap modulus must exceed this.
pub const NONZERO_FLOOR: f64 = 1e-12;
/// Per-trial check: deviation from `|c1 c2| / (|a| |b|)` must stay below this.
pub const DEVIATION_TOL: f64 = 1e-9;

const MAX_ATTEMPTS: usize = 64;

/// Coefficients of the two branch decompositions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl FrameCoefficients {
    /// Real positive `c1`, `c2` with `a`, `b` fixed by normalization and given phases.
    pub fn real(c1: f64, c2: f64, phase_a: f64, phase_b: f64) -> Self {
        let ma = libm::sqrt((1.0 - c1 * c1).max(0.0));
        let mb = libm::sqrt((1.0 - c2 * c2).max(0.0));
        Self {
            a: Complex64::from_polar(ma, phase_a),
            b: Complex64::from_polar(mb, phase_b),
            c1: Complex64::new(c1, 0.0),
            c2: Complex64::new(c2, 0.0),
        }
    }

    /// `|c1 c2| / (|a| |b|)`, the forced overlap modulus.
    pub fn predicted_modulus(&self) -> f64 {
        self.c1.norm() * self.c2.norm() / (self.a.norm() * self.b.norm())
    }

    /// The forced overlap `conj(c1) c2 / (conj(a) b)`.
    pub fn predicted_overlap(&self) -> Complex64 {
        self.c1.conj() * self.c2 / (self.a.conj() * self.b)
    }
}

/// A concrete realization of the two-branch structure in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameInstance {
    pub coefficients: FrameCoefficients,
    pub dim: usize,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
}

/// Options for the sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleOptions {
    /// Draw `c1`, `c2` with random phases instead of real positive values.
    pub complex_coefficients: bool,
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

fn normalize(x: &mut [Complex64]) {
    let n = norm(x);
    x.iter_mut().for_each(|z| *z /= n);
}

/// Removes the components of `x` along each (unit) vector in `basis`, twice.
fn orthogonalize(x: &mut [Complex64], basis: &[&[Complex64]]) {
    for _ in 0..2 {
        for e in basis {
            let p = inner(e, x);
            x.iter_mut().zip(e.iter()).for_each(|(xi, ei)| *xi -= p * ei);
        }
    }
}

fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Random unit vector orthogonal to every vector of `basis`.
fn random_unit_orthogonal<R: Rng>(rng: &mut R, dim: usize, basis: &[&[Complex64]]) -> Vec<Complex64> {
    loop {
        let mut v = gaussian_vector(rng, dim);
        orthogonalize(&mut v, basis);
        // a near-degenerate draw is discarded
        if norm(&v) > 1e-3 {
            normalize(&mut v);
            return v;
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < MIN_DIM {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "must be >= 3",
        });
    }
    Ok(())
}

impl FrameInstance {
    /// Builds an instance for the given coefficients, drawing the vectors from `rng`.
    pub fn build<R: Rng>(dim: usize, coefficients: FrameCoefficients, rng: &mut R) -> Result<Self> {
        check_dim(dim)?;
        let FrameCoefficients { a, b, c1, c2 } = coefficients;
        if (a.norm_sqr() + c1.norm_sqr() - 1.0).abs() > CONSTRUCTION_TOL
            || (b.norm_sqr() + c2.norm_sqr() - 1.0).abs() > CONSTRUCTION_TOL
        {
            return Err(Error::InvalidParameter {
                name: "coefficients",
                reason: "|a|^2 + |c1|^2 and |b|^2 + |c2|^2 must equal 1",
            });
        }
        if c1.norm() == 0.0 && c2.norm() == 0.0 && (a.norm() == 0.0 || b.norm() == 0.0) {
            return Err(Error::InvalidParameter {
                name: "coefficients",
                reason: "degenerate branches",
            });
        }
        let product = c1.norm() * c2.norm();
        let bound = a.norm() * b.norm();
        if product > bound {
            return Err(Error::Unsatisfiable { product, bound });
        }
        let target = coefficients.predicted_overlap();

        let mut gamma = gaussian_vector(rng, dim);
        normalize(&mut gamma);
        let alpha = random_unit_orthogonal(rng, dim, &[&gamma]);
        let w = random_unit_orthogonal(rng, dim, &[&gamma, &alpha]);
        let perp = libm::sqrt((1.0 - target.norm_sqr()).max(0.0));
        let beta = alpha
            .iter()
            .zip(&w)
            .map(|(x, y)| target * x + y * perp)
            .collect();

        Ok(Self {
            coefficients,
            dim,
            alpha,
            beta,
            gamma,
        })
    }

    pub fn psi_a(&self) -> Vec<Complex64> {
        let FrameCoefficients { a, c1, .. } = self.coefficients;
        self.alpha.iter().zip(&self.gamma).map(|(x, g)| a * x + c1 * g).collect()
    }

    pub fn psi_b(&self) -> Vec<Complex64> {
        let FrameCoefficients { b, c2, .. } = self.coefficients;
        self.beta.iter().zip(&self.gamma).map(|(x, g)| b * x - c2 * g).collect()
    }

    /// Largest violation among the structural invariants: unit alpha/beta/gamma,
    /// gamma orthogonality, branch normalization and branch orthogonality.
    pub fn max_invariant_residual(&self) -> f64 {
        let psi_a = self.psi_a();
        let psi_b = self.psi_b();
        [
            (norm(&self.alpha) - 1.0).abs(),
            (norm(&self.beta) - 1.0).abs(),
            (norm(&self.gamma) - 1.0).abs(),
            inner(&self.gamma, &self.alpha).norm(),
            inner(&self.gamma, &self.beta).norm(),
            (norm(&psi_a) - 1.0).abs(),
            (norm(&psi_b) - 1.0).abs(),
            inner(&psi_a, &psi_b).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn sample_with<R: Rng>(rng: &mut R, dim: usize, options: SampleOptions) -> Result<FrameInstance> {
    check_dim(dim)?;
    for _ in 0..MAX_ATTEMPTS {
        let c1: f64 = rng.random_range(0.0..1.0);
        let c2: f64 = rng.random_range(0.0..1.0);
        // c1 c2 <= |a||b| reduces to c1^2 + c2^2 <= 1
        if c1 <= 0.0 || c2 <= 0.0 || c1 * c1 + c2 * c2 > 1.0 {
            continue;
        }
        let tau = core::f64::consts::TAU;
        let mut coeffs = FrameCoefficients::real(c1, c2, rng.random_range(0.0..tau), rng.random_range(0.0..tau));
        if options.complex_coefficients {
            coeffs.c1 = Complex64::from_polar(c1, rng.random_range(0.0..tau));
            coeffs.c2 = Complex64::from_polar(c2, rng.random_range(0.0..tau));
        }
        match FrameInstance::build(dim, coeffs, rng) {
            Err(Error::Unsatisfiable { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_ATTEMPTS,
    })
}

/// Deterministic random instance for `(dim, seed)` with real positive `c1`, `c2`.
pub fn sample_instance(dim: usize, seed: u64) -> Result<FrameInstance> {
    sample_instance_with(dim, seed, SampleOptions::default())
}

pub fn sample_instance_with(dim: usize, seed: u64, options: SampleOptions) -> Result<FrameInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&mut rng, dim, options)
}

/// Instance for trial `trial` of a run seeded with `seed`; each trial reads its own stream.
pub fn sample_trial(dim: usize, seed: u64, trial: u64, options: SampleOptions) -> Result<FrameInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    sample_with(&mut rng, dim, options)
}

/// `<alpha|beta>` evaluated from the stored vectors.
pub fn surviving_overlap(inst: &FrameInstance) -> Complex64 {
    inner(&inst.alpha, &inst.beta)
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialOutcome {
    pub overlap_modulus: f64,
    pub predicted_modulus: f64,
    pub deviation: f64,
    pub construction_residual: f64,
}

impl TrialOutcome {
    pub fn violates(&self) -> bool {
        !(self.overlap_modulus > NONZERO_FLOOR && self.deviation < DEVIATION_TOL)
    }
}

pub fn evaluate(inst: &FrameInstance) -> TrialOutcome {
    let overlap_modulus = surviving_overlap(inst).norm();
    let predicted_modulus = inst.coefficients.predicted_modulus();
    TrialOutcome {
        overlap_modulus,
        predicted_modulus,
        deviation: (overlap_modulus - predicted_modulus).abs(),
        construction_residual: inst.max_invariant_residual(),
    }
}

/// Aggregate of a theorem check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremReport {
    pub trials: u64,
    pub dim: usize,
    pub seed: u64,
    pub samples: usize,
    pub min_overlap_modulus: f64,
    pub max_overlap_modulus: f64,
    pub max_deviation: f64,
    pub max_construction_residual: f64,
    pub violations: usize,
    pub passed: bool,
}

impl TheoremReport {
    /// Folds per-trial outcomes in trial order.
    pub fn from_outcomes(dim: usize, seed: u64, outcomes: &[TrialOutcome]) -> Self {
        let mut report = TheoremReport {
            trials: outcomes.len() as u64,
            dim,
            seed,
            samples: outcomes.len(),
            min_overlap_modulus: f64::INFINITY,
            max_overlap_modulus: 0.0,
            max_deviation: 0.0,
            max_construction_residual: 0.0,
            violations: 0,
            passed: false,
        };
        for o in outcomes {
            report.min_overlap_modulus = report.min_overlap_modulus.min(o.overlap_modulus);
            report.max_overlap_modulus = report.max_overlap_modulus.max(o.overlap_modulus);
            report.max_deviation = report.max_deviation.max(o.deviation);
            report.max_construction_residual = report.max_construction_residual.max(o.construction_residual);
            report.violations += o.violates() as usize;
        }
        report.passed = !outcomes.is_empty() && report.violations == 0;
        report
    }
}

/// Runs `trials` independent samples and checks the overlap law on each.
pub fn check_theorem(trials: u64, dim: usize, seed: u64) -> Result<TheoremReport> {
    check_theorem_with(trials, dim, seed, SampleOptions::default())
}

pub fn check_theorem_with(trials: u64, dim: usize, seed: u64, options: SampleOptions) -> Result<TheoremReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "must be >= 1",
        });
    }
    check_dim(dim)?;
    let outcomes = (0..trials)
        .map(|t| run_trial(dim, seed, t, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(TheoremReport::from_outcomes(dim, seed, &outcomes))
}

/// One trial, errors tagged with the trial index.
pub fn run_trial(dim: usize, seed: u64, trial: u64, options: SampleOptions) -> Result<TrialOutcome> {
    sample_trial(dim, seed, trial, options)
        .map(|inst| evaluate(&inst))
        .map_err(|e| Error::Trial {
            trial,
            source: Box::new(e),
        })
}
