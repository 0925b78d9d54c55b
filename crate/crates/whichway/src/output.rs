//! Run directories: `report.json`, `intensity_pre_lens.csv` and
//! `intensity_image_plane.csv`. Every file is written to a temporary
//! sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use whichway_core::field::{BranchedField, WaveField};
use whichway_core::scenario::intensity_rows;

use crate::error::{AppError, Result};
use crate::format::float;
use crate::report::Completed;

pub const REPORT_FILE: &str = "report.json";
pub const PRE_LENS_FILE: &str = "intensity_pre_lens.csv";
pub const IMAGE_PLANE_FILE: &str = "intensity_image_plane.csv";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let fail = |source| AppError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(fail)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(fail)?;
    }
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| float(x)))?;
    }
    w.into_inner().map_err(|e| AppError::Csv(e.into_error().into()))
}

/// Columns `y, intensity, intensity_branch_a, intensity_branch_b`.
pub fn intensity_csv(field: &BranchedField) -> Result<Vec<u8>> {
    csv_bytes(
        &["y", "intensity", "intensity_branch_a", "intensity_branch_b"],
        intensity_rows(field).into_iter().map(|r| r.to_vec()),
    )
}

/// Columns `y, re, im, intensity`.
pub fn field_csv(field: &WaveField) -> Result<Vec<u8>> {
    let g = field.grid;
    csv_bytes(
        &["y", "re", "im", "intensity"],
        field.values.iter().enumerate().map(|(j, z)| vec![g.y(j), z.re, z.im, z.norm_sqr()]),
    )
}

/// Writes the run directory and returns the report path.
pub fn write_run(dir: &Path, run: &Completed) -> Result<PathBuf> {
    if let Some(wave) = &run.wave {
        write_atomic(&dir.join(PRE_LENS_FILE), &intensity_csv(&wave.pre_lens)?)?;
        write_atomic(&dir.join(IMAGE_PLANE_FILE), &intensity_csv(&wave.image_plane)?)?;
    }
    let path = dir.join(REPORT_FILE);
    write_atomic(&path, run.report.to_json()?.as_bytes())?;
    Ok(path)
}
