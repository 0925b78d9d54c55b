//! Pipeline outputs checked against independent closed-form and quadrature
//! references that share no code with the library.

use num_complex::Complex64;
use whichway_core::optics::{apply_wires, find_dark_fringes, WireGrid};
use whichway_core::scenario::{observation_field, run_scenario, ScenarioConfig, ScenarioKind, ScenarioOutcome, WaveRun};
use whichway_core::wavepacket::{initial_state, propagate_analytic, propagate_spectral, SlitConfig};

/// Free Gaussian packet centred at `c`, written in the textbook
/// (1 + i t / t0) form rather than through the library's prefactor.
fn packet(eps: f64, c: f64, t: f64, y: f64) -> Complex64 {
    let spread = Complex64::new(1.0, 2.0 * t / (eps * eps));
    let norm = (2.0 / (core::f64::consts::PI * eps * eps)).powf(0.25);
    let width = Complex64::new(eps * eps, 2.0 * t);
    norm / spread.sqrt() * (-(y - c) * (y - c) / width).exp()
}

fn oracle_intensity(s: &SlitConfig, t: f64, y: f64) -> f64 {
    (s.amp_a * packet(s.epsilon, s.y0, t, y) + s.amp_b * packet(s.epsilon, -s.y0, t, y)).norm_sqr()
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - r * (hi - lo);
        let x2 = lo + r * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn wave(cfg: &ScenarioConfig) -> WaveRun {
    match run_scenario(cfg).unwrap() {
        ScenarioOutcome::Wave(run) => *run,
        other => panic!("unexpected outcome {other:?}"),
    }
}

#[test]
fn analytic_field_matches_textbook_packets() {
    let cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    let field = observation_field(&cfg).unwrap();
    let inten = field.total_intensity();
    let g = field.grid();
    let peak = inten.iter().cloned().fold(0.0, f64::max);
    for j in (0..g.n_points).step_by(97) {
        let want = oracle_intensity(&cfg.slit, cfg.time, g.y(j));
        assert!((inten[j] - want).abs() < 1e-12 * peak.max(1.0), "y={} {} vs {}", g.y(j), inten[j], want);
    }
}

#[test]
fn dark_fringes_match_brute_force_minima() {
    let cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    let field = observation_field(&cfg).unwrap();
    let map = find_dark_fringes(&field, cfg.fringe_window).unwrap();
    assert_eq!(map.minima_positions.len(), 20);
    let spacing = cfg.slit.far_field_spacing(cfg.time);
    assert!((map.fringe_spacing - spacing).abs() < 1e-3 * spacing);
    let oracle = |y: f64| oracle_intensity(&cfg.slit, cfg.time, y);
    for (&pos, &val) in map.minima_positions.iter().zip(&map.minima_intensities) {
        let (y, v) = golden_min(oracle, pos - spacing / 4.0, pos + spacing / 4.0);
        assert!((pos - y).abs() < 1e-3, "minimum at {pos}, brute force {y}");
        assert!((val - v).abs() < 1e-3 * map.peak_intensity * 1e-3, "value {val} vs {v}");
        assert!(val < 1e-3 * map.peak_intensity);
    }
    // the innermost pair sits closest to the ideal zero
    for (&pos, &val) in map.minima_positions.iter().zip(&map.minima_intensities) {
        if pos.abs() < spacing {
            assert!(val < 1e-5 * map.peak_intensity, "central minimum {val}");
        }
    }
}

#[test]
fn blocked_flux_matches_quadrature() {
    let cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    let field = observation_field(&cfg).unwrap();
    let map = find_dark_fringes(&field, cfg.fringe_window).unwrap();
    let wires = WireGrid::from_fringes(&map, 10, 0.05).unwrap();
    let out = apply_wires(&field, &wires);

    let oracle = |y: f64| oracle_intensity(&cfg.slit, cfg.time, y);
    let g = field.grid();
    let on_grid: f64 = (0..g.n_points).map(|j| g.y(j)).filter(|&y| wires.blocks(y)).map(oracle).sum::<f64>() * g.dy();
    assert!((out.blocked_total - on_grid).abs() < 1e-9, "{} vs {}", out.blocked_total, on_grid);
    let removed = field.total_norm_sqr() - out.field.total_norm_sqr();
    assert!((out.blocked_total - removed).abs() < 1e-12);

    let continuous: f64 = wires
        .positions
        .iter()
        .map(|&p| simpson(oracle, p - wires.width / 2.0, p + wires.width / 2.0, 400))
        .sum();
    assert!((out.blocked_total - continuous).abs() < 0.1 * continuous, "{} vs {}", out.blocked_total, continuous);
}

#[test]
fn spectral_and_analytic_agree_across_times() {
    let cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    let init = initial_state(&cfg.slit, cfg.grid).unwrap();
    for t in [1.0, 10.0, 100.0] {
        let a = propagate_analytic(&init, t).unwrap();
        let s = propagate_spectral(&init, t).unwrap();
        assert!(s.total().relative_l2(&a.total()) < 1e-8);
        assert!((s.total_norm_sqr() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn spectral_propagation_is_linear_and_preserves_overlap() {
    let cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    let init = initial_state(&cfg.slit, cfg.grid).unwrap();
    let out = propagate_spectral(&init, 30.0).unwrap();
    let overlap0 = init.branch_overlap();
    assert!((out.branch_overlap() - overlap0).norm() < 1e-12);
    let [na, nb] = init.branch_norms();
    let [ma, mb] = out.branch_norms();
    assert!((na - ma).abs() < 1e-12 && (nb - mb).abs() < 1e-12);
}

#[test]
fn flux_bookkeeping_closes_in_every_wave_scenario() {
    for kind in [ScenarioKind::Afshar, ScenarioKind::SingleSlit, ScenarioKind::Wheeler] {
        let run = wave(&ScenarioConfig::defaults(kind));
        let [ra, rb] = run.detector.bookkeeping_residual();
        assert!(ra.abs() < 1e-6 && rb.abs() < 1e-6, "{kind:?}: {ra} {rb}");
        assert!(run.detector.blocked_flux >= 0.0);
    }
}

#[test]
fn swapping_slits_mirrors_the_detectors() {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    cfg.slit = cfg.slit.with_weight_a(0.6);
    let fwd = wave(&cfg).detector;
    cfg.slit = cfg.slit.with_weight_a(0.4);
    let rev = wave(&cfg).detector;
    let pairs = [
        (fwd.p_da_from_a, rev.p_db_from_b),
        (fwd.p_db_from_a, rev.p_da_from_b),
        (fwd.p_da_total, rev.p_db_total),
        (fwd.blocked_flux, rev.blocked_flux),
    ];
    for (x, y) in pairs {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn unequal_weights_lower_the_visibility() {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::Afshar);
    cfg.slit = cfg.slit.with_weight_a(0.9);
    let run = wave(&cfg);
    let v = run.metrics.visibility.unwrap();
    let ideal = 2.0 * (0.9f64 * 0.1).sqrt();
    assert!((v - ideal).abs() < 0.02, "V = {v}");
    assert!(run.metrics.mode_distinguishability.unwrap() > 0.1);
}
