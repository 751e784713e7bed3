use std::fs::File;
use std::path::{Path, PathBuf};

use super::IoError;

pub const ENERGY_HEADER: &[&str] = &["t", "E", "D", "work", "residual"];
pub const SYNC_HEADER: &[&str] = &["t", "hs_norm", "Q_index", "lambda_Q"];
pub const MONITOR_HEADER: &[&str] = &["t", "f1", "f2", "lr_norm_b", "int_f1", "int_f2", "int_lps", "Q_a", "Q_b"];
pub const RADIAL_HEADER: &[&str] = &["t", "j2", "hall", "divergence"];
pub const HEAT_HEADER: &[&str] = &["t", "ratio", "expected", "rel_err", "leakage"];
pub const SCALING_HEADER: &[&str] = &["kind", "q", "original", "rescaled", "rel_err"];
pub const SHELL_HEADER: &[&str] = &["kind", "q", "shell_quantity", "lowpass_linf", "shell_pass", "tail_pass", "pass"];

/// 17 significant digits; infinities print as `inf`.
pub fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Row-at-a-time CSV writer, flushed after every row so partial runs stay readable.
pub struct CsvSeries {
    writer: csv::Writer<File>,
    width: usize,
    path: PathBuf,
}

impl CsvSeries {
    pub fn create(path: impl AsRef<Path>, header: &[&str]) -> Result<Self, IoError> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| IoError::file(path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header)?;
        writer.flush().map_err(|e| IoError::file(path, e))?;
        Ok(Self {
            writer,
            width: header.len(),
            path: path.to_path_buf(),
        })
    }

    pub fn push(&mut self, row: &[f64]) -> Result<(), IoError> {
        self.push_fields(row.iter().map(|v| fmt_value(*v)))
    }

    /// Rows with non-numeric leading columns.
    pub fn push_fields<I, S>(&mut self, fields: I) -> Result<(), IoError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let record = csv::ByteRecord::from_iter(fields);
        assert_eq!(record.len(), self.width, "row width does not match header");
        self.writer.write_byte_record(&record)?;
        self.writer.flush().map_err(|e| IoError::file(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_roundtrip_through_text() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, f64::INFINITY] {
            let s = fmt_value(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_value(f64::INFINITY), "inf");
    }

    #[test]
    fn rows_are_visible_before_drop() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        let mut w = CsvSeries::create(&path, ENERGY_HEADER).unwrap();
        w.push(&[0.0, 1.0, 2.0, 0.0, 1e-17]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,E,D,work,residual"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 1.0, 2.0, 0.0, 1e-17]);
    }
}
