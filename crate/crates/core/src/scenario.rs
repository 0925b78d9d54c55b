//! End-to-end pipelines for each named configuration.
//!
//! Everything here is deterministic; the companion crate adds file IO,
//! provenance and sweeps on top of [`run_scenario`].

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{BranchedField, WaveField};
use crate::frame::{self, SampleOptions, TheoremReport};
use crate::grid::{Grid, PRODUCTION_MIN_POINTS};
use crate::metrics::{self, Interval};
use crate::optics::{
    self, apply_wires, detect, find_dark_fringes, image_through_lens, mode_contributions, DetectorReport, FringeMap,
    LensSpec, ModeContributions, WireGrid,
};
use crate::spin::{self, SpinEvolver, SpinPipeline};
use crate::wavepacket::{initial_state, propagate_analytic, propagate_spectral, transport_absorbing, SlitConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScenarioKind {
    SpinToy,
    TheoremCheck,
    Afshar,
    SingleSlit,
    Wheeler,
}

/// Wire placement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WireSpec {
    None,
    /// On the `count` central dark fringes, `width_fraction` of the spacing wide.
    Auto { count: usize, width_fraction: f64 },
    Explicit(WireGrid),
}

impl WireSpec {
    pub const DEFAULT_COUNT: usize = 10;
    pub const DEFAULT_WIDTH_FRACTION: f64 = 0.05;

    pub fn auto() -> Self {
        WireSpec::Auto {
            count: Self::DEFAULT_COUNT,
            width_fraction: Self::DEFAULT_WIDTH_FRACTION,
        }
    }
}

/// Lens placed at the observation plane (object distance = observation time).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LensConfig {
    pub focal_length: f64,
    pub aperture_halfwidth: f64,
    pub absorbing_layer: f64,
}

impl Default for LensConfig {
    fn default() -> Self {
        Self {
            focal_length: 50.0,
            aperture_halfwidth: 1000.0,
            absorbing_layer: 0.1,
        }
    }
}

impl LensConfig {
    pub fn spec(&self, object_distance: f64) -> Result<LensSpec> {
        Ok(LensSpec::imaging(self.focal_length, object_distance, self.aperture_halfwidth)?
            .with_absorbing_layer(self.absorbing_layer))
    }
}

/// Crossing-beams geometry: packet A (at `+y0`) moves towards `-y`, packet B
/// towards `+y`; they cross at `t = m y0 / (hbar k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WheelerConfig {
    pub momentum: f64,
    pub detect_time: f64,
    pub absorbing_layer: f64,
}

impl Default for WheelerConfig {
    fn default() -> Self {
        Self {
            momentum: 2.0,
            detect_time: 40.0,
            absorbing_layer: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremConfig {
    pub trials: u64,
    pub dim: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub complex_coefficients: bool,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            dim: 3,
            complex_coefficients: false,
        }
    }
}

/// Every parameter of one run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub slit: SlitConfig,
    pub grid: Grid,
    /// Observation time: lens plane for afshar / single slit.
    pub time: f64,
    pub fringe_window: Interval,
    pub visibility_window: Interval,
    pub wires: WireSpec,
    pub lens: LensConfig,
    pub split_point: f64,
    pub wheeler: WheelerConfig,
    pub spin_field_strength: f64,
    pub theorem: TheoremConfig,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Desk-scale defaults for `kind`.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let base = ScenarioConfig {
            kind,
            slit: SlitConfig::default(),
            grid: Grid {
                n_points: 32768,
                y_min: -2048.0,
                y_max: 2048.0,
            },
            time: 100.0,
            fringe_window: Interval::symmetric(600.0),
            visibility_window: Interval::symmetric(200.0),
            wires: WireSpec::auto(),
            lens: LensConfig::default(),
            split_point: 0.0,
            wheeler: WheelerConfig::default(),
            spin_field_strength: 1.0,
            theorem: TheoremConfig::default(),
            seed: 0,
        };
        match kind {
            ScenarioKind::Wheeler => ScenarioConfig {
                slit: SlitConfig {
                    epsilon: 4.0,
                    y0: 20.0,
                    ..SlitConfig::default()
                },
                grid: Grid {
                    n_points: 16384,
                    y_min: -256.0,
                    y_max: 256.0,
                },
                time: 10.0,
                fringe_window: Interval::symmetric(10.0),
                visibility_window: Interval::symmetric(6.0),
                ..base
            },
            _ => base,
        }
    }

    /// Checks every field before any computation.
    pub fn validate(&self) -> Result<()> {
        let invalid = |name, reason| Err(Error::InvalidParameter { name, reason });
        match self.kind {
            ScenarioKind::SpinToy => {
                SpinEvolver::new(self.spin_field_strength)?;
                return Ok(());
            }
            ScenarioKind::TheoremCheck => {
                if self.theorem.trials == 0 {
                    return invalid("theorem.trials", "must be >= 1");
                }
                if self.theorem.dim < frame::MIN_DIM {
                    return invalid("theorem.dim", "must be >= 3");
                }
                return Ok(());
            }
            _ => {}
        }
        self.slit.validate()?;
        Grid::new(self.grid.n_points, self.grid.y_min, self.grid.y_max)?;
        if self.grid.n_points < PRODUCTION_MIN_POINTS {
            return invalid("grid.n_points", "must be >= 1024");
        }
        if !self.grid.is_symmetric() {
            return invalid("grid", "must be symmetric about y = 0");
        }
        for w in [self.fringe_window, self.visibility_window] {
            if !(w.lo.is_finite() && w.hi.is_finite() && w.lo < w.hi) {
                return invalid("window", "need finite lo < hi");
            }
        }
        if !self.split_point.is_finite() {
            return invalid("split_point", "must be finite");
        }
        match &self.wires {
            WireSpec::None => {}
            WireSpec::Auto { count, width_fraction } => {
                if *count == 0 {
                    return invalid("wires.count", "must be >= 1");
                }
                if !(*width_fraction > 0.0 && *width_fraction < 0.5) {
                    return invalid("wires.width_fraction", "must lie in (0, 0.5)");
                }
                let open = |z: Complex64| z.norm_sqr() > 0.0;
                if self.kind == ScenarioKind::Afshar && !(open(self.slit.amp_a) && open(self.slit.amp_b)) {
                    return invalid("wires", "auto wires need both slits open");
                }
            }
            WireSpec::Explicit(w) => {
                WireGrid::new(w.positions.clone(), w.width)?;
            }
        }
        if !(self.time.is_finite() && self.time > 0.0) {
            return invalid("time", "must be finite and > 0");
        }
        match self.kind {
            ScenarioKind::Wheeler => {
                let w = &self.wheeler;
                if !(w.momentum.is_finite() && w.momentum > 0.0) {
                    return invalid("wheeler.momentum", "must be finite and > 0");
                }
                if w.detect_time.is_nan() || w.detect_time <= self.crossing_time() {
                    return invalid("wheeler.detect_time", "must come after the crossing");
                }
                if !(w.absorbing_layer > 0.0 && w.absorbing_layer < 0.5) {
                    return invalid("wheeler.absorbing_layer", "must lie in (0, 0.5)");
                }
            }
            _ => {
                self.lens.spec(self.time)?;
            }
        }
        Ok(())
    }

    /// Crossing time of the wheeler beams.
    pub fn crossing_time(&self) -> f64 {
        self.slit.mass * self.slit.y0 / (self.slit.hbar * self.wheeler.momentum)
    }

    /// Same configuration with equal real amplitudes on both slits.
    pub fn symmetric_reference(&self) -> ScenarioConfig {
        ScenarioConfig {
            kind: ScenarioKind::Afshar,
            slit: self.slit.with_weight_a(0.5),
            ..self.clone()
        }
    }
}

/// Quantitative which-way and interference figures of a wave run.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsBlock {
    /// Fringe visibility of the unmasked pattern before the lens.
    pub visibility: Option<f64>,
    /// Branch-resolved detector distinguishability (renormalized).
    pub distinguishability: Option<f64>,
    pub mutual_information_bits: Option<f64>,
    /// Renormalized `P(D_A|A), P(D_B|A)` and `P(D_A|B), P(D_B|B)`.
    pub renormalized_given_a: Option<[f64; 2]>,
    pub renormalized_given_b: Option<[f64; 2]>,
    /// Surviving-content mode distinguishability of the unmasked field.
    pub mode_distinguishability: Option<f64>,
    pub mode_row_mismatch: Option<f64>,
    /// Same, for the wire-masked field entering the lens.
    pub mode_distinguishability_masked: Option<f64>,
    /// `V^2 + D^2` with D from the mode accounting.
    pub duality_budget_mode: Option<f64>,
    /// `V^2 + D^2` with D from the detectors (different accounting; informational).
    pub duality_budget_detector: Option<f64>,
    /// Relative change of `p_da_total`, `p_db_total` when the wires go in.
    pub wire_effect_da: Option<f64>,
    pub wire_effect_db: Option<f64>,
}

/// A wave-optics run with everything needed for reports and plots.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveRun {
    pub lens: Option<LensSpec>,
    pub fringe_map: Option<FringeMap>,
    /// Fringe map the wires were built from when inherited from another run.
    pub reference_fringe_map: Option<FringeMap>,
    pub wires: WireGrid,
    pub detector: DetectorReport,
    /// Same pipeline without wires.
    pub detector_no_wires: Option<DetectorReport>,
    pub metrics: MetricsBlock,
    pub modes: Option<ModeContributions>,
    pub pre_lens: BranchedField,
    pub image_plane: BranchedField,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ScenarioOutcome {
    Spin(SpinPipeline),
    Theorem(TheoremReport),
    Wave(alloc::boxed::Box<WaveRun>),
}

/// Executes the pipeline for `cfg.kind`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    Ok(match cfg.kind {
        ScenarioKind::SpinToy => ScenarioOutcome::Spin(spin::run_pipeline(&SpinEvolver::new(cfg.spin_field_strength)?)?),
        ScenarioKind::TheoremCheck => ScenarioOutcome::Theorem(frame::check_theorem_with(
            cfg.theorem.trials,
            cfg.theorem.dim,
            cfg.seed,
            SampleOptions {
                complex_coefficients: cfg.theorem.complex_coefficients,
            },
        )?),
        ScenarioKind::Afshar => ScenarioOutcome::Wave(alloc::boxed::Box::new(run_afshar(cfg)?)),
        ScenarioKind::SingleSlit => ScenarioOutcome::Wave(alloc::boxed::Box::new(run_single_slit(cfg)?)),
        ScenarioKind::Wheeler => ScenarioOutcome::Wave(alloc::boxed::Box::new(run_wheeler(cfg)?)),
    })
}

/// Pre-lens field of the two-slit source at `cfg.time`.
pub fn observation_field(cfg: &ScenarioConfig) -> Result<BranchedField> {
    propagate_analytic(&initial_state(&cfg.slit, cfg.grid)?, cfg.time)
}

/// Dark fringes of the pre-lens pattern (afshar geometry) or of the
/// crossing region (wheeler geometry).
pub fn fringe_map(cfg: &ScenarioConfig) -> Result<FringeMap> {
    cfg.validate()?;
    let field = match cfg.kind {
        ScenarioKind::Wheeler => wheeler_crossing_field(cfg)?,
        ScenarioKind::SingleSlit => observation_field(&cfg.symmetric_reference())?,
        _ => observation_field(cfg)?,
    };
    find_dark_fringes(&field, cfg.fringe_window)
}

fn resolve_wires(spec: &WireSpec, map: Option<&FringeMap>) -> Result<WireGrid> {
    match spec {
        WireSpec::None => Ok(WireGrid::empty()),
        WireSpec::Explicit(w) => Ok(w.clone()),
        WireSpec::Auto { count, width_fraction } => {
            let map = map.ok_or(Error::NoInterference { found: 0 })?;
            WireGrid::from_fringes(map, *count, *width_fraction)
        }
    }
}

struct Stage {
    detector: DetectorReport,
    image_plane: BranchedField,
    masked: BranchedField,
}

/// wires -> lens -> detectors
fn lens_stage(pre_lens: &BranchedField, wires: &WireGrid, lens: &LensSpec, split: f64) -> Result<Stage> {
    let input = pre_lens.branch_norms();
    let mask = apply_wires(pre_lens, wires);
    let imaging = image_through_lens(&mask.field, lens)?;
    let counts = detect(&imaging.field, split);
    let leaked_total = mask.field.total_norm_sqr() - imaging.field.total_norm_sqr();
    Ok(Stage {
        detector: DetectorReport::assemble(
            counts,
            input,
            mask.blocked_per_branch,
            mask.blocked_total,
            imaging.leaked(),
            leaked_total,
        ),
        image_plane: imaging.field,
        masked: mask.field,
    })
}

fn detector_metrics(block: &mut MetricsBlock, detector: &DetectorReport) {
    let stats = detector.conditional_stats();
    block.distinguishability = metrics::distinguishability(&stats).ok();
    block.mutual_information_bits = metrics::mutual_information(&stats).ok();
    if let Ok((qa, qb)) = stats.renormalized() {
        block.renormalized_given_a = Some(qa);
        block.renormalized_given_b = Some(qb);
    }
}

fn relative_change(with: f64, without: f64) -> f64 {
    if without == 0.0 {
        if with == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (with - without).abs() / without
    }
}

fn wave_metrics(
    cfg: &ScenarioConfig,
    pre_lens: &BranchedField,
    stage: &Stage,
    no_wires: Option<&DetectorReport>,
    modes: Option<&ModeContributions>,
    masked_modes: Option<&ModeContributions>,
) -> MetricsBlock {
    let mut block = MetricsBlock::default();
    let ys = pre_lens.grid().positions();
    block.visibility = metrics::visibility(&ys, &pre_lens.total_intensity(), cfg.visibility_window).ok();
    detector_metrics(&mut block, &stage.detector);
    if let Some(m) = modes {
        block.mode_distinguishability = m.distinguishability().ok();
        block.mode_row_mismatch = Some(m.row_mismatch());
    }
    block.mode_distinguishability_masked = masked_modes.and_then(|m| m.distinguishability().ok());
    if let Some(v) = block.visibility {
        block.duality_budget_mode = block.mode_distinguishability.map(|d| metrics::duality_budget(v, d));
        block.duality_budget_detector = block.distinguishability.map(|d| metrics::duality_budget(v, d));
    }
    if let Some(reference) = no_wires {
        block.wire_effect_da = Some(relative_change(stage.detector.p_da_total, reference.p_da_total));
        block.wire_effect_db = Some(relative_change(stage.detector.p_db_total, reference.p_db_total));
    }
    block
}

fn run_two_slit(cfg: &ScenarioConfig, inherited: Option<FringeMap>) -> Result<WaveRun> {
    let pre_lens = observation_field(cfg)?;
    let lens = cfg.lens.spec(cfg.time)?;
    let own_map = find_dark_fringes(&pre_lens, cfg.fringe_window).ok();
    let wires = resolve_wires(&cfg.wires, inherited.as_ref().or(own_map.as_ref()))?;
    let stage = lens_stage(&pre_lens, &wires, &lens, cfg.split_point)?;
    let no_wires = if wires.is_empty() {
        None
    } else {
        Some(lens_stage(&pre_lens, &WireGrid::empty(), &lens, cfg.split_point)?.detector)
    };
    let modes = mode_contributions(&pre_lens, &cfg.slit).ok();
    let masked_modes = if wires.is_empty() {
        None
    } else {
        mode_contributions(&stage.masked, &cfg.slit).ok()
    };
    let metrics = wave_metrics(cfg, &pre_lens, &stage, no_wires.as_ref(), modes.as_ref(), masked_modes.as_ref());
    Ok(WaveRun {
        lens: Some(lens),
        fringe_map: own_map,
        reference_fringe_map: inherited,
        wires,
        detector: stage.detector,
        detector_no_wires: no_wires,
        metrics,
        modes,
        pre_lens,
        image_plane: stage.image_plane,
    })
}

fn run_afshar(cfg: &ScenarioConfig) -> Result<WaveRun> {
    run_two_slit(cfg, None)
}

/// Slit B closed; wires come from the fringe map of the matching symmetric run.
fn run_single_slit(cfg: &ScenarioConfig) -> Result<WaveRun> {
    let reference = cfg.symmetric_reference();
    let map = find_dark_fringes(&observation_field(&reference)?, reference.fringe_window)?;
    let single = ScenarioConfig {
        slit: cfg.slit.single_a(),
        ..cfg.clone()
    };
    run_two_slit(&single, Some(map))
}

/// Initial wheeler packets: A at `+y0` with momentum `-hbar k`, B at `-y0` with `+hbar k`.
pub fn wheeler_initial(cfg: &ScenarioConfig) -> Result<BranchedField> {
    let field = initial_state(&cfg.slit, cfg.grid)?;
    let k = cfg.wheeler.momentum;
    let boost = |w: &WaveField, sign: f64| WaveField {
        values: w
            .values
            .iter()
            .enumerate()
            .map(|(j, z)| z * Complex64::from_polar(1.0, sign * k * w.grid.y(j)))
            .collect(),
        ..w.clone()
    };
    BranchedField::new(boost(&field.branch_a, -1.0), boost(&field.branch_b, 1.0), field.particle)
}

/// Wheeler field at the crossing time.
pub fn wheeler_crossing_field(cfg: &ScenarioConfig) -> Result<BranchedField> {
    propagate_spectral(&wheeler_initial(cfg)?, cfg.crossing_time())
}

fn run_wheeler(cfg: &ScenarioConfig) -> Result<WaveRun> {
    let crossing = wheeler_crossing_field(cfg)?;
    let map = find_dark_fringes(&crossing, cfg.fringe_window).ok();
    let wires = resolve_wires(&cfg.wires, map.as_ref())?;
    let drift = cfg.wheeler.detect_time - crossing.time();

    let transport = |wires: &WireGrid| -> Result<Stage> {
        let input = crossing.branch_norms();
        let mask = apply_wires(&crossing, wires);
        let (out, absorbed) = transport_absorbing(&mask.field, drift, cfg.wheeler.absorbing_layer)?;
        let counts = detect(&out, cfg.split_point);
        let leaked_total = mask.field.total_norm_sqr() - out.total_norm_sqr();
        Ok(Stage {
            detector: DetectorReport::assemble(
                counts,
                input,
                mask.blocked_per_branch,
                mask.blocked_total,
                absorbed,
                leaked_total,
            ),
            image_plane: out,
            masked: mask.field,
        })
    };
    let stage = transport(&wires)?;
    let no_wires = if wires.is_empty() {
        None
    } else {
        Some(transport(&WireGrid::empty())?.detector)
    };
    let metrics = wave_metrics(cfg, &crossing, &stage, no_wires.as_ref(), None, None);
    Ok(WaveRun {
        lens: None,
        fringe_map: map,
        reference_fringe_map: None,
        wires,
        detector: stage.detector,
        detector_no_wires: no_wires,
        metrics,
        modes: None,
        pre_lens: crossing,
        image_plane: stage.image_plane,
    })
}

/// Branch-resolved detector distinguishability of a report.
pub fn detector_distinguishability(report: &DetectorReport) -> Result<f64> {
    metrics::distinguishability(&report.conditional_stats())
}

/// Intensity profile rows `(y, total, branch_a, branch_b)`.
pub fn intensity_rows(field: &BranchedField) -> Vec<[f64; 4]> {
    let g = field.grid();
    (0..g.n_points)
        .map(|j| {
            let a = field.branch_a.values[j];
            let b = field.branch_b.values[j];
            [g.y(j), (a + b).norm_sqr(), a.norm_sqr(), b.norm_sqr()]
        })
        .collect()
}

pub use optics::DetectorCounts;
