//! Field snapshots (flat little-endian f64 + JSON sidecar) and CSV slices.

use super::grid::Grid2D;
use super::scalar::{Axis, ScalarField};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub name: String,
    pub time: f64,
}

/// Writes `<dir>/<stem>.bin` and `<dir>/<stem>.json`; returns the binary path.
pub fn write_snapshot(dir: &Path, stem: &str, name: &str, time: f64, field: &ScalarField) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let g = field.grid;
    let bin = dir.join(format!("{stem}.bin"));
    let mut bytes = Vec::with_capacity(8 * field.len());
    for v in &field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin, bytes)?;
    let meta = SnapshotMeta { nx: g.nx, ny: g.ny, lx: g.lx, ly: g.ly, name: name.to_string(), time };
    fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&meta)?)?;
    Ok(bin)
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot(bin: &Path) -> Result<(SnapshotMeta, ScalarField)> {
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(bin.with_extension("json"))?)?;
    let bytes = fs::read(bin)?;
    if bytes.len() != 8 * meta.nx * meta.ny {
        return Err(Error::Invalid(format!(
            "{} has {} bytes, expected {}",
            bin.display(),
            bytes.len(),
            8 * meta.nx * meta.ny
        )));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let grid = Grid2D::new(meta.nx, meta.ny, meta.lx, meta.ly)?;
    Ok((meta, ScalarField::new(grid, values)))
}

/// Writes the 1-D slice of `field` along `axis` at transverse index `at` as CSV `coord,value`.
pub fn write_slice_csv(path: &Path, field: &ScalarField, axis: Axis, at: usize) -> Result<()> {
    let g = field.grid;
    let mut out = fs::File::create(path)?;
    writeln!(out, "coord,value")?;
    match axis {
        Axis::X1 => {
            for i in 0..g.nx {
                writeln!(out, "{:.17e},{:.17e}", i as f64 * g.hx(), field.values[g.index(i, at)])?;
            }
        }
        Axis::X2 => {
            for j in 0..g.ny {
                writeln!(out, "{:.17e},{:.17e}", j as f64 * g.hy(), field.values[g.index(at, j)])?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::new(16, 32, 1.0, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |x, y| x + 10.0 * y);
        let bin = write_snapshot(dir.path(), "n0_0001", "n0", 0.25, &f).unwrap();
        let (meta, back) = read_snapshot(&bin).unwrap();
        assert_eq!(meta.name, "n0");
        assert_eq!(back, f);
        write_slice_csv(&dir.path().join("s.csv"), &f, Axis::X2, 3).unwrap();
        let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
        assert_eq!(text.lines().count(), 33);
    }
}
