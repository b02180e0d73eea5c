use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Write labelled columns as CSV, preceded by an optional `# comment` line.
pub fn write_curve<W: Write>(mut out: W, columns: &[(&str, &[f64])], comment: Option<&str>) -> Result<()> {
    let Some(rows) = columns.first().map(|c| c.1.len()) else {
        return Err(Error::arg("no columns to write"));
    };
    if let Some((name, _)) = columns.iter().find(|c| c.1.len() != rows) {
        return Err(Error::arg(format!("column '{name}' differs in length")));
    }
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns.iter().map(|c| c.0))?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c.1[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_curve(path: impl AsRef<Path>, columns: &[(&str, &[f64])], comment: Option<&str>) -> Result<()> {
    let mut buf = Vec::new();
    write_curve(&mut buf, columns, comment)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Columns of a CSV written by [`write_curve`], with their header names.
pub fn read_curve(path: impl AsRef<Path>) -> Result<Vec<(String, Vec<f64>)>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut cols: Vec<(String, Vec<f64>)> = r.headers()?.iter().map(|h| (h.to_string(), Vec::new())).collect();
    if cols.is_empty() {
        return Err(Error::arg("curve CSV has no header"));
    }
    for rec in r.records() {
        let rec = rec?;
        for (col, f) in cols.iter_mut().zip(rec.iter()) {
            col.1.push(f.parse().map_err(|_| Error::arg(format!("not a number: '{f}'")))?);
        }
    }
    Ok(cols)
}

/// Square or rectangular matrix, one row per line; `#` lines are skipped.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::arg(format!("not a number: '{f}'"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::arg("matrix CSV must have equal, non-empty rows"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for i in 0..m.nrows() {
        w.write_record(m.row(i).iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let t = [0.0, 0.1, 0.2];
        let v = [1.0, 0.5, 1e-300];
        export_curve(&p, &[("time_s", &t), ("value", &v)], Some("x")).unwrap();
        let back = read_curve(&p).unwrap();
        assert_eq!(back[0].0, "time_s");
        assert_eq!(back[1].1, v);
    }

    #[test]
    fn two_columns_with_comment() {
        let mut out = Vec::new();
        let t = [0.0, 0.5];
        let v = [1.0, -2.25];
        write_curve(&mut out, &[("time_s", &t), ("value", &v)], Some("window_s=0.02")).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s, "# window_s=0.02\ntime_s,value\n0,1\n0.5,-2.25\n");
    }

    #[test]
    fn unequal_columns_rejected() {
        let mut out = Vec::new();
        assert!(write_curve(&mut out, &[("a", &[1.0]), ("b", &[1.0, 2.0])], None).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -0.1, 1e-17, 3.0, 4.5, 0.3333333333333333]);
        write_matrix_csv(&p, &m).unwrap();
        assert_eq!(read_matrix_csv(&p).unwrap(), m);
        std::fs::write(&p, "1,2\n3\n").unwrap();
        assert!(read_matrix_csv(&p).is_err());
    }
}
