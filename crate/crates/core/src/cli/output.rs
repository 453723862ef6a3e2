//! Report and table serialization.

use crate::error::{Error, Result};
use crate::report::{Summary, VerificationReport};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Output format of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// The JSON document written by `verify` and `inference`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument<'a> {
    pub reports: &'a [VerificationReport],
    pub summary: Summary,
}

/// A column-oriented table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Comma-separated, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| float(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// An array of objects keyed by column name, in header order.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                for (h, v) in self.header.iter().zip(r) {
                    m.insert(h.clone(), json_float(*v));
                }
                serde_json::Value::Object(m)
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

fn json_float(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
}

/// `{:.16e}` gives 17 significant digits, enough to round-trip.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Reports as JSON (`{reports, summary}`) or as one CSV row per report.
pub fn render_reports(reports: &[VerificationReport], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let doc = ReportDocument { reports, summary: Summary::of(reports) };
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut out = String::from("identity,subject,residual,tolerance,pass,flags,note\n");
            for r in reports {
                let identity = serde_json::to_value(r.identity)?;
                let flags: Vec<String> = r
                    .flags
                    .iter()
                    .map(|f| serde_json::to_value(f).map(|v| v.as_str().unwrap_or_default().to_string()))
                    .collect::<Result<_, _>>()?;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    identity.as_str().unwrap_or_default(),
                    csv_text(&r.subject),
                    float(r.residual),
                    float(r.tolerance),
                    r.pass,
                    csv_text(&flags.join(";")),
                    csv_text(r.note.as_deref().unwrap_or("")),
                ));
            }
            Ok(out)
        }
    }
}

/// Write `text` to `path` through a temporary file in the same directory
/// and a rename; `None` writes to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(p).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Identity;

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(t.to_csv(), "a,b\n1.0000000000000000e0,5.0000000000000000e-1\n");
        assert_eq!(t.column("b").unwrap(), vec![0.5]);
    }

    proptest::proptest! {
        #[test]
        fn any_finite_float_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            proptest::prop_assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn report_csv_quotes_text() {
        let r = VerificationReport::scalar(Identity::IntrinsicEntropy, "a, b", 0.5, 0.5, 1e-6).note("x \"y\"");
        let csv = render_reports(&[r], Format::Csv).unwrap();
        assert!(csv.contains("intrinsic_entropy,\"a, b\","));
        assert!(csv.trim_end().ends_with("\"x \"\"y\"\"\""));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        emit(Some(&p), "one").unwrap();
        emit(Some(&p), "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
