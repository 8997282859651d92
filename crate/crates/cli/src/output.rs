//! Series tables and run reports, written atomically.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use resonance::friedrichs::CharTime;
use resonance::numerics::C64;

use crate::CliError;

/// Column-major numeric table; the first four columns are always `t, re, im, abs`.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(extra: &[&str]) -> Self {
        let mut columns: Vec<String> = ["t", "re", "im", "abs"].iter().map(|s| s.to_string()).collect();
        columns.extend(extra.iter().map(|s| s.to_string()));
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, value: C64, extra: &[f64]) {
        assert_eq!(extra.len() + 4, self.columns.len(), "row width does not match the header");
        let mut row = vec![t, value.re, value.im, value.norm()];
        row.extend_from_slice(extra);
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// 17 significant digits, so every value round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub key: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A finite number, or a string marker for infinities and NaN.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn time(t: CharTime) -> Value {
    match t {
        CharTime::Finite(x) => number(x),
        CharTime::Infinite => Value::from("inf"),
    }
}

pub fn complex(z: C64) -> Value {
    Value::from(vec![number(z.re), number(z.im)])
}

/// Insertion-ordered map of reported quantities.
#[derive(Debug, Clone, Default)]
pub struct Quantities(pub Map<String, Value>);

impl Quantities {
    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn num(&mut self, key: &str, x: f64) {
        self.set(key, number(x));
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_full_precision() {
        let mut t = Table::new(&["extra"]);
        let x = 0.1 + 0.2;
        t.push(x, C64::new(1.0 / 3.0, -2.0f64.sqrt()), &[std::f64::consts::PI]);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,re,im,abs,extra");
        let parsed: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, t.rows()[0]);
    }

    #[test]
    fn infinities_become_markers() {
        assert_eq!(number(f64::INFINITY), Value::from("inf"));
        assert_eq!(time(CharTime::Infinite), Value::from("inf"));
        assert_eq!(number(2.5), Value::from(2.5));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested").join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
