// SPDX-License-Identifier: Apache-2.0

//! Atomic artifact writes: each file is written to a temporary sibling and
//! renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::report::{ComparisonReport, Table};
use crate::error::{Error, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_bytes(t: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&t.columns).map_err(io)?;
    for r in &t.rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Writes `report.json`, `tables/<name>.csv` and `raw/<name>.jsonl` under
/// `dir`; returns the paths written.
pub fn write_artifacts(report: &ComparisonReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for t in &report.tables {
        let p = dir.join("tables").join(format!("{}.csv", t.name));
        write_atomic(&p, &csv_bytes(t)?)?;
        written.push(p);
    }
    for (name, lines) in &report.raw {
        let p = dir.join("raw").join(format!("{name}.jsonl"));
        let mut body = lines.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        write_atomic(&p, body.as_bytes())?;
        written.push(p);
    }
    let p = dir.join("report.json");
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    write_atomic(&p, &json)?;
    written.push(p);
    Ok(written)
}
