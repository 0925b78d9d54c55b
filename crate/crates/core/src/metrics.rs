//! Interference and which-way measures.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` on the y axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn symmetric(half_width: f64) -> Self {
        Self::new(-half_width, half_width)
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// A sampled extremum refined by a three-point parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub position: f64,
    pub value: f64,
}

/// Parabola vertex through `(-1, l), (0, c), (1, r)`: `(offset, value)`.
pub fn parabolic_vertex(l: f64, c: f64, r: f64) -> (f64, f64) {
    let curvature = l - 2.0 * c + r;
    if curvature == 0.0 {
        return (0.0, c);
    }
    let offset = 0.5 * (l - r) / curvature;
    (offset, c - 0.25 * (l - r) * offset)
}

/// Strict interior extrema of `values` whose sample positions lie in `window`.
///
/// `minima` selects minima (`true`) or maxima (`false`).
pub fn strict_extrema(ys: &[f64], values: &[f64], window: Interval, minima: bool) -> Vec<Extremum> {
    let n = values.len().min(ys.len());
    let mut out = Vec::new();
    for j in 1..n.saturating_sub(1) {
        if !window.contains(ys[j]) {
            continue;
        }
        let (l, c, r) = (values[j - 1], values[j], values[j + 1]);
        let hit = if minima { c < l && c < r } else { c > l && c > r };
        if hit {
            let (offset, v) = parabolic_vertex(l, c, r);
            let dy = ys[j + 1] - ys[j];
            let value = if minima { v.max(0.0) } else { v };
            out.push(Extremum {
                index: j,
                position: ys[j] + offset * dy,
                value,
            });
        }
    }
    out
}

/// Number of central fringe periods averaged by [`visibility`].
pub const VISIBILITY_PERIODS: usize = 5;

/// Fringe visibility `(I_max - I_min) / (I_max + I_min)`.
///
/// Every minimum with a maximum on both sides contributes one value, using
/// the mean of its two neighbouring maxima; the result is averaged over the
/// five such minima closest to the window centre.
pub fn visibility(ys: &[f64], intensity: &[f64], window: Interval) -> Result<f64> {
    let maxima = strict_extrema(ys, intensity, window, false);
    let minima = strict_extrema(ys, intensity, window, true);
    if maxima.len() < 2 || minima.is_empty() {
        return Err(Error::ExtremumDetection("need at least two maxima and one minimum in window"));
    }
    let mut periods: Vec<(f64, f64)> = minima
        .iter()
        .filter_map(|m| {
            let left = maxima.iter().rev().find(|x| x.index < m.index)?;
            let right = maxima.iter().find(|x| x.index > m.index)?;
            let i_max = 0.5 * (left.value + right.value);
            let v = (i_max - m.value) / (i_max + m.value);
            Some(((m.position - window.center()).abs(), v))
        })
        .collect();
    if periods.is_empty() {
        return Err(Error::ExtremumDetection("no minimum is bracketed by maxima"));
    }
    periods.sort_by(|a, b| a.0.total_cmp(&b.0));
    let used = &periods[..periods.len().min(VISIBILITY_PERIODS)];
    Ok(used.iter().map(|p| p.1).sum::<f64>() / used.len() as f64)
}

/// Detector-click probabilities conditioned on the source branch.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionalStats {
    /// `(P(D_A | A), P(D_B | A))`, unrenormalized.
    pub p_click_given_a: [f64; 2],
    /// `(P(D_A | B), P(D_B | B))`, unrenormalized.
    pub p_click_given_b: [f64; 2],
    pub prior_a: f64,
}

impl ConditionalStats {
    pub fn new(p_click_given_a: [f64; 2], p_click_given_b: [f64; 2], prior_a: f64) -> Self {
        Self {
            p_click_given_a,
            p_click_given_b,
            prior_a,
        }
    }

    /// Conditionals rescaled to their surviving flux.
    pub fn renormalized(&self) -> Result<([f64; 2], [f64; 2])> {
        Ok((
            renormalize(self.p_click_given_a, 'A')?,
            renormalize(self.p_click_given_b, 'B')?,
        ))
    }

    /// `1 - sum` per branch: the flux lost before the detectors.
    pub fn deficits(&self) -> [f64; 2] {
        [
            1.0 - self.p_click_given_a.iter().sum::<f64>(),
            1.0 - self.p_click_given_b.iter().sum::<f64>(),
        ]
    }
}

fn renormalize(p: [f64; 2], branch: char) -> Result<[f64; 2]> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidParameter {
            name: "conditional",
            reason: "probabilities must be finite and >= 0",
        });
    }
    let s = p[0] + p[1];
    if s <= 0.0 {
        return Err(Error::ZeroSurvivingFlux { branch });
    }
    Ok([p[0] / s, p[1] / s])
}

/// `D = (1/2) sum_d |P(d|A) - P(d|B)|` over renormalized conditionals.
pub fn distinguishability(stats: &ConditionalStats) -> Result<f64> {
    let (qa, qb) = stats.renormalized()?;
    Ok((0.5 * ((qa[0] - qb[0]).abs() + (qa[1] - qb[1]).abs())).min(1.0))
}

/// `I(slit; detector)` in bits for the joint law built from the prior and
/// the renormalized conditionals.
pub fn mutual_information(stats: &ConditionalStats) -> Result<f64> {
    let pa = stats.prior_a;
    if !(pa > 0.0 && pa < 1.0) {
        return Err(Error::InvalidParameter {
            name: "prior_a",
            reason: "must lie in (0, 1)",
        });
    }
    let (qa, qb) = stats.renormalized()?;
    let priors = [pa, 1.0 - pa];
    let rows = [qa, qb];
    let marginal = [pa * qa[0] + (1.0 - pa) * qb[0], pa * qa[1] + (1.0 - pa) * qb[1]];
    let mut info = 0.0;
    for (prior, row) in priors.iter().zip(&rows) {
        for (q, m) in row.iter().zip(&marginal) {
            if *q > 0.0 {
                info += prior * q * libm::log2(q / m);
            }
        }
    }
    Ok(info.clamp(0.0, 1.0))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * libm::log2(x) } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// `V^2 + D^2`; at most 1 for one consistent accounting.
pub fn duality_budget(v: f64, d: f64) -> f64 {
    v * v + d * d
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn distinguishability_examples() {
        let d = |a, b| distinguishability(&ConditionalStats::new(a, b, 0.5)).unwrap();
        assert_eq!(d([1.0, 0.0], [0.0, 1.0]), 1.0);
        assert_eq!(d([0.5, 0.5], [0.5, 0.5]), 0.0);
        assert!((d([0.75, 0.25], [0.25, 0.75]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn renormalization_is_applied() {
        let s = ConditionalStats::new([0.3, 0.1], [0.1, 0.3], 0.5);
        assert!((distinguishability(&s).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(s.deficits(), [0.6, 0.6]);
        let dead = ConditionalStats::new([0.0, 0.0], [0.1, 0.3], 0.5);
        assert_eq!(distinguishability(&dead), Err(Error::ZeroSurvivingFlux { branch: 'A' }));
    }

    #[test]
    fn mutual_information_examples() {
        let mi = |a, b| mutual_information(&ConditionalStats::new(a, b, 0.5)).unwrap();
        assert!((mi([1.0, 0.0], [0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert_eq!(mi([0.3, 0.7], [0.3, 0.7]), 0.0);
        // direct joint-law evaluation: 1 - H(0.75)
        let expected = 1.0 - (-(0.75f64) * libm::log2(0.75) - 0.25 * libm::log2(0.25));
        assert!((expected - 0.1887).abs() < 1e-4);
        assert!((mi([0.75, 0.25], [0.25, 0.75]) - expected).abs() < 1e-12);
        assert!(mutual_information(&ConditionalStats::new([1.0, 0.0], [0.0, 1.0], 1.0)).is_err());
    }

    #[test]
    fn duality_examples() {
        assert_eq!(duality_budget(1.0, 0.0), 1.0);
        assert_eq!(duality_budget(0.0, 1.0), 1.0);
    }

    fn sample_fringes(p_a: f64) -> (Vec<f64>, Vec<f64>) {
        // two-beam pattern under a wide envelope
        let ys: Vec<f64> = (0..4000).map(|j| -20.0 + j as f64 * 0.01).collect();
        let (a, b) = (libm::sqrt(p_a), libm::sqrt(1.0 - p_a));
        let i = ys
            .iter()
            .map(|y| {
                let env = libm::exp(-y * y / 400.0);
                env * (a * a + b * b + 2.0 * a * b * libm::cos(2.0 * PI * y / 3.0))
            })
            .collect();
        (ys, i)
    }

    #[test]
    fn visibility_of_two_beam_pattern() {
        let (ys, i) = sample_fringes(0.5);
        let v = visibility(&ys, &i, Interval::symmetric(10.0)).unwrap();
        assert!(v > 0.999, "v = {v}");
        let (ys, i) = sample_fringes(0.9);
        let v = visibility(&ys, &i, Interval::symmetric(10.0)).unwrap();
        assert!((v - 0.6).abs() < 0.01, "v = {v}");
    }

    #[test]
    fn visibility_needs_fringes() {
        let ys: Vec<f64> = (0..100).map(|j| j as f64 * 0.1 - 5.0).collect();
        let g: Vec<f64> = ys.iter().map(|y| libm::exp(-y * y)).collect();
        assert!(visibility(&ys, &g, Interval::symmetric(5.0)).is_err());
    }

    #[test]
    fn parabola_vertex_is_exact_for_quadratics() {
        let f = |x: f64| 3.0 * (x - 0.3) * (x - 0.3) + 1.0;
        let (o, v) = parabolic_vertex(f(-1.0), f(0.0), f(1.0));
        assert!((o - 0.3).abs() < 1e-14 && (v - 1.0).abs() < 1e-14);
    }
}
