//! One-parameter sweeps. Entries run in parallel; results keep input order
//! and a failing value is recorded rather than aborting the sweep.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use whichway_core::scenario::WireSpec;

use crate::config::RunConfig;
use crate::error::{AppError, Result};
use crate::format::float;
use crate::report::{execute, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Wire width as a fraction of the fringe spacing (auto wires).
    WireWidthFraction,
    /// Number of auto wires.
    WireCount,
    /// Observation time (object distance of the lens).
    Time,
    /// Weight `|a|^2` of slit A; slit B gets the rest.
    AmplitudeRatio,
    /// Lens aperture half-width.
    LensAperture,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] = [
        SweepParam::WireWidthFraction,
        SweepParam::WireCount,
        SweepParam::Time,
        SweepParam::AmplitudeRatio,
        SweepParam::LensAperture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::WireWidthFraction => "wire_width_fraction",
            SweepParam::WireCount => "wire_count",
            SweepParam::Time => "time",
            SweepParam::AmplitudeRatio => "amplitude_ratio",
            SweepParam::LensAperture => "lens_aperture",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let bad = |reason: String| AppError::Config(format!("{}={}: {reason}", self.name(), value));
        let mut cfg = base.clone();
        let s = &mut cfg.scenario;
        match self {
            SweepParam::WireWidthFraction | SweepParam::WireCount => {
                let WireSpec::Auto { count, width_fraction } = &mut s.wires else {
                    return Err(bad("needs auto wires".into()));
                };
                if self == SweepParam::WireCount {
                    if !(value >= 0.0 && value.fract() == 0.0) {
                        return Err(bad("wire count must be a whole number".into()));
                    }
                    *count = value as usize;
                } else {
                    *width_fraction = value;
                }
            }
            SweepParam::Time => s.time = value,
            SweepParam::AmplitudeRatio => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(bad("weight must lie in [0, 1]".into()));
                }
                s.slit = s.slit.with_weight_a(value);
            }
            SweepParam::LensAperture => s.lens.aperture_halfwidth = value,
        }
        Ok(cfg)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.replace('-', "_");
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| format!("unknown sweep parameter `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RunReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepEntry {
    fn figures(&self) -> [Option<f64>; 5] {
        let Some(r) = &self.report else { return [None; 5] };
        let m = r.metrics.as_ref();
        [
            r.detector.as_ref().map(|d| d.blocked_flux),
            m.and_then(|m| m.distinguishability),
            m.and_then(|m| m.visibility),
            m.and_then(|m| m.mutual_information_bits),
            m.and_then(|m| m.mode_distinguishability),
        ]
    }
}

pub fn sweep(base: &RunConfig, param: SweepParam, values: &[f64]) -> Vec<SweepEntry> {
    values
        .par_iter()
        .map(|&value| {
            let outcome = param.apply(base, value).and_then(|cfg| execute(&cfg));
            match outcome {
                Ok(done) => SweepEntry {
                    value,
                    report: Some(done.report),
                    error: None,
                },
                Err(e) => SweepEntry {
                    value,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Columns `value, blocked_flux, D, V, I, D_mode, error`; missing figures are empty.
pub fn sweep_csv(entries: &[SweepEntry]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["value", "blocked_flux", "D", "V", "I", "D_mode", "error"])?;
    for e in entries {
        let mut row = vec![float(e.value)];
        row.extend(e.figures().iter().map(|x| x.map(float).unwrap_or_default()));
        row.push(e.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| AppError::Csv(e.into_error().into()))
}
