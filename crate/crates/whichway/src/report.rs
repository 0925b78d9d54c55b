use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use whichway_core::frame::TheoremReport;
use whichway_core::optics::{DetectorReport, FringeMap, LensSpec, ModeContributions, WireGrid};
use whichway_core::scenario::{run_scenario, MetricsBlock, ScenarioKind, ScenarioOutcome, WaveRun};
use whichway_core::spin::SpinPipeline;

use crate::config::RunConfig;
use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// SHA-256 of the canonical config text.
    pub parameter_hash: String,
    /// SHA-256 of the fringe map the wires were built from. For
    /// `single_slit` this is the map of the matching two-slit run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe_map_hash: Option<String>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe_map: Option<FringeMap>,
    /// Map of the matching two-slit run whose dark fringes placed the wires.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_fringe_map: Option<FringeMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wires: Option<WireGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lens: Option<LensSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_no_wires: Option<DetectorReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModeContributions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinPipeline>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremReport>,
    pub provenance: Provenance,
}

impl RunReport {
    /// Same report with the wall-clock field zeroed, for comparisons.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        r.provenance.wall_time_seconds = 0.0;
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(crate::format::to_json_string(self)?)
    }
}

/// A finished run: the report plus the fields behind the plot files.
pub struct Completed {
    pub report: RunReport,
    pub wave: Option<Box<WaveRun>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn parameter_hash(cfg: &RunConfig) -> Result<String> {
    // output location does not change the numbers
    let canonical = RunConfig {
        output_dir: None,
        ..cfg.clone()
    };
    Ok(sha256_hex(canonical.to_json()?.as_bytes()))
}

pub fn fringe_map_hash(map: &FringeMap) -> Result<String> {
    Ok(sha256_hex(crate::format::to_json_string(map)?.as_bytes()))
}

/// Validates `cfg`, runs its pipeline and assembles the report.
pub fn execute(cfg: &RunConfig) -> Result<Completed> {
    cfg.validate()?;
    let start = Instant::now();
    let outcome = run_scenario(&cfg.scenario).map_err(AppError::from_core)?;
    let wall = start.elapsed().as_secs_f64();

    let mut report = RunReport {
        config: cfg.clone(),
        fringe_map: None,
        reference_fringe_map: None,
        wires: None,
        lens: None,
        detector: None,
        detector_no_wires: None,
        metrics: None,
        modes: None,
        spin: None,
        theorem: None,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameter_hash: parameter_hash(cfg)?,
            fringe_map_hash: None,
            wall_time_seconds: wall,
        },
    };
    let wave = match outcome {
        ScenarioOutcome::Spin(p) => {
            report.spin = Some(p);
            None
        }
        ScenarioOutcome::Theorem(t) => {
            report.theorem = Some(t);
            None
        }
        ScenarioOutcome::Wave(run) => {
            let source_map = match cfg.scenario.kind {
                ScenarioKind::SingleSlit => run.reference_fringe_map.as_ref(),
                _ => run.fringe_map.as_ref(),
            };
            report.provenance.fringe_map_hash = source_map.map(fringe_map_hash).transpose()?;
            report.fringe_map = run.fringe_map.clone();
            report.reference_fringe_map = run.reference_fringe_map.clone();
            report.wires = Some(run.wires.clone());
            report.lens = run.lens;
            report.detector = Some(run.detector);
            report.detector_no_wires = run.detector_no_wires;
            report.metrics = Some(run.metrics.clone());
            report.modes = run.modes;
            Some(run)
        }
    };
    Ok(Completed { report, wave })
}
