//! CSV and JSON writers shared by the experiments and the CLI. All CSVs
//! have a header row, LF line endings and shortest round-trip decimals.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::grid::GridFunction;
use crate::steady::{LengthMap, ShootOutcome};

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?)))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Generic numeric table.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(num))?;
    }
    w.flush()?;
    Ok(())
}

/// `x,u,du` with `du` the centered first difference.
pub fn write_profile(path: &Path, u: &GridFunction) -> Result<()> {
    let du = u.centered_derivative();
    write_table(path, &["x", "u", "du"], u.xs().zip(u.values()).zip(du).map(|((x, &v), d)| vec![x, v, d]))
}

/// Long format `t,x,u`.
pub fn write_snapshots(path: &Path, times: &[f64], snapshots: &[GridFunction]) -> Result<()> {
    let rows = times
        .iter()
        .zip(snapshots)
        .flat_map(|(&t, g)| g.xs().zip(g.values()).map(move |(x, &v)| vec![t, x, v]).collect::<Vec<_>>());
    write_table(path, &["t", "x", "u"], rows)
}

pub fn write_zeros(path: &Path, zeros: &[(f64, f64)]) -> Result<()> {
    write_table(path, &["t", "x0"], zeros.iter().map(|&(t, x)| vec![t, x]))
}

/// `alpha,L,outcome`; escapes get an empty `L`.
pub fn write_length_map(path: &Path, map: &LengthMap) -> Result<()> {
    let mut rows: Vec<(f64, Option<f64>, ShootOutcome)> =
        map.points.iter().map(|&(a, l)| (a, Some(l), ShootOutcome::ReturnAt)).collect();
    rows.extend(map.escapes.iter().map(|&(a, o)| (a, None, o)));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut w = writer(path)?;
    w.write_record(["alpha", "L", "outcome"])?;
    for (a, l, o) in rows {
        w.write_record([num(a), l.map(num).unwrap_or_default(), o.as_str().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of string cells under `header`.
pub fn write_records(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/p.csv");
        write_profile(&p, &GridFunction::sample(1.0, 4, |x| x * x)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,u,du");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[2], "0.25,0.0625,0.5");
    }
}
