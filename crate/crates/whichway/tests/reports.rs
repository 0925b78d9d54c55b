use whichway::config::RunConfig;
use whichway::output::{write_run, IMAGE_PLANE_FILE, PRE_LENS_FILE, REPORT_FILE};
use whichway::report::{execute, RunReport};
use whichway::sweep::{sweep, SweepParam};
use whichway_core::scenario::{ScenarioKind, WireSpec};

const KINDS: [ScenarioKind; 5] = [
    ScenarioKind::SpinToy,
    ScenarioKind::TheoremCheck,
    ScenarioKind::Afshar,
    ScenarioKind::SingleSlit,
    ScenarioKind::Wheeler,
];

#[test]
fn config_round_trip_is_idempotent() {
    for kind in KINDS {
        let mut cfg = RunConfig::defaults(kind);
        cfg.scenario.slit = cfg.scenario.slit.with_weight_a(0.3);
        cfg.scenario.time = 1.0 / 3.0 + 50.0;
        let text = cfg.to_json().unwrap();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg, "{kind:?}");
        assert_eq!(back.to_json().unwrap(), text);
    }
    let explicit = r#"{"kind": "afshar", "wires": {"explicit": {"positions": [3.0, -3.0], "width": 0.5}}, "output_dir": "x"}"#;
    let cfg = RunConfig::parse(explicit).unwrap();
    assert_eq!(RunConfig::parse(&cfg.to_json().unwrap()).unwrap(), cfg);
}

#[test]
fn reports_are_deterministic() {
    for kind in KINDS {
        let cfg = RunConfig::defaults(kind);
        let a = execute(&cfg).unwrap().report.without_timing();
        let b = execute(&cfg).unwrap().report.without_timing();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap(), "{kind:?}");
        assert_eq!(a.provenance.parameter_hash, b.provenance.parameter_hash);
    }
}

#[test]
fn written_report_parses_back_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let done = execute(&RunConfig::defaults(ScenarioKind::Wheeler)).unwrap();
    let path = write_run(dir.path(), &done).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    let back: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, done.report);
    for file in [REPORT_FILE, PRE_LENS_FILE, IMAGE_PLANE_FILE] {
        assert!(dir.path().join(file).is_file(), "{file}");
    }
    let csv = std::fs::read_to_string(dir.path().join(PRE_LENS_FILE)).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "y,intensity,intensity_branch_a,intensity_branch_b");
    assert_eq!(csv.lines().count(), 1 + 16384);
}

#[test]
fn spin_and_theorem_runs_write_only_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let done = execute(&RunConfig::defaults(ScenarioKind::SpinToy)).unwrap();
    write_run(dir.path(), &done).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert!(done.report.spin.is_some() && done.report.detector.is_none());
}

#[test]
fn parameter_hash_ignores_output_dir_only() {
    let base = RunConfig::defaults(ScenarioKind::Afshar);
    let mut moved = base.clone();
    moved.output_dir = Some("elsewhere".into());
    let mut changed = base.clone();
    changed.scenario.seed = 7;
    let h = |c: &RunConfig| whichway::report::parameter_hash(c).unwrap();
    assert_eq!(h(&base), h(&moved));
    assert_ne!(h(&base), h(&changed));
}

#[test]
fn single_slit_inherits_the_two_slit_fringe_map() {
    let afshar = execute(&RunConfig::defaults(ScenarioKind::Afshar)).unwrap().report;
    let single = execute(&RunConfig::defaults(ScenarioKind::SingleSlit)).unwrap().report;
    assert!(single.provenance.fringe_map_hash.is_some());
    assert_eq!(single.provenance.fringe_map_hash, afshar.provenance.fringe_map_hash);
    assert_eq!(single.reference_fringe_map, afshar.fringe_map);
    assert_eq!(single.wires, afshar.wires);
}

#[test]
fn blocked_flux_grows_with_wire_width() {
    let base = RunConfig::defaults(ScenarioKind::Afshar);
    let widths = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2];
    let entries = sweep(&base, SweepParam::WireWidthFraction, &widths);
    let blocked: Vec<f64> = entries.iter().map(|e| e.report.as_ref().unwrap().detector.as_ref().unwrap().blocked_flux).collect();
    assert!(blocked.windows(2).all(|w| w[0] < w[1]), "{blocked:?}");
    for (e, w) in entries.iter().zip(widths) {
        assert_eq!(e.value, w);
    }
}

#[test]
fn amplitude_ratio_trades_visibility_for_mode_distinguishability() {
    let mut base = RunConfig::defaults(ScenarioKind::Afshar);
    base.scenario.wires = WireSpec::None;
    let ratios = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
    let entries = sweep(&base, SweepParam::AmplitudeRatio, &ratios);
    let mut prev_v = f64::INFINITY;
    let mut prev_d = -1.0;
    for (e, p) in entries.iter().zip(ratios) {
        let m = e.report.as_ref().unwrap().metrics.clone().unwrap();
        let v = m.visibility.unwrap();
        let d = m.mode_distinguishability.unwrap();
        let two_beam = 2.0 * (p * (1.0 - p)).sqrt();
        assert!((v - two_beam).abs() < 0.02, "p={p}: V={v} vs {two_beam}");
        assert!(v < prev_v && d > prev_d, "p={p}: V={v}, D={d}");
        prev_v = v;
        prev_d = d;
    }
}

#[test]
fn sweep_results_do_not_depend_on_order() {
    let base = RunConfig::defaults(ScenarioKind::Wheeler);
    let values = [0.5, 2.0, 20.0, 5.0];
    let fwd = sweep(&base, SweepParam::LensAperture, &values);
    let mut rev_values = values;
    rev_values.reverse();
    let mut rev = sweep(&base, SweepParam::LensAperture, &rev_values);
    rev.reverse();
    let strip = |es: &[whichway::sweep::SweepEntry]| -> Vec<_> {
        es.iter().map(|e| (e.value, e.report.as_ref().map(|r| r.without_timing()), e.error.clone())).collect()
    };
    assert_eq!(strip(&fwd), strip(&rev));
}

#[test]
fn sweep_collects_per_value_errors() {
    let base = RunConfig::defaults(ScenarioKind::Afshar);
    let entries = sweep(&base, SweepParam::Time, &[100.0, -1.0]);
    assert!(entries[0].report.is_some() && entries[0].error.is_none());
    assert!(entries[1].report.is_none() && entries[1].error.as_deref().unwrap().contains("time"));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            RunConfig::load(&path).unwrap().validate().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
