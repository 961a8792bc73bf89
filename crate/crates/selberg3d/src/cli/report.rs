//! Versioned reports: a header with run-dependent fields and a deterministic
//! body.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::Format;
use super::CliError;

/// Report schema version.
pub const SCHEMA: u32 = 1;

/// Modules whose versions are recorded in every report.
const MODULES: [&str; 8] = ["h3geom", "specfun", "lattice", "bianchi", "repchar", "eisenstein", "zeta", "cli"];

/// Bounds, tolerances and inputs of a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Provenance {
    pub inputs: BTreeMap<String, Value>,
    pub bounds: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub modules: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new() -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        Self { modules: MODULES.iter().map(|m| (m.to_string(), version.clone())).collect(), ..Self::default() }
    }

    pub fn input(mut self, k: &str, v: impl Serialize) -> Self {
        self.inputs.insert(k.into(), to_value(v));
        self
    }

    pub fn bound(mut self, k: &str, v: impl Serialize) -> Self {
        self.bounds.insert(k.into(), to_value(v));
        self
    }

    pub fn tol(mut self, k: &str, v: f64) -> Self {
        self.tolerances.insert(k.into(), v);
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// A rectangular table for CSV output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Outcome of a command before it is written.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub provenance: Provenance,
    pub result: Value,
    pub table: Option<Table>,
    /// False when a tolerance check failed.
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, provenance: Provenance, result: Value) -> Self {
        Self { command: command.into(), provenance, result, table: None, passed: true }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_passed(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    pub fn body(&self) -> Value {
        json!({
            "command": self.command,
            "provenance": self.provenance,
            "result": self.result,
            "passed": self.passed,
        })
    }

    /// Renders the report; `header` carries the run-dependent fields.
    pub fn render(&self, format: Format, header: &Header) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let doc = json!({ "schema": SCHEMA, "header": header, "body": self.body() });
                Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
            }
            Format::Csv => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| CliError::Config(format!("`{}` has no tabular output; use --format json", self.command)))?;
                let mut out = format!("# {}\n", json!({ "schema": SCHEMA, "header": header }));
                let meta = json!({ "command": self.command, "provenance": self.provenance, "passed": self.passed });
                out.push_str(&format!("# {meta}\n"));
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.columns).map_err(io_err)?;
                for r in &table.rows {
                    w.write_record(r).map_err(io_err)?;
                }
                out.push_str(&String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).expect("utf8"));
                Ok(out)
            }
        }
    }
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Fields that differ between otherwise identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub timestamp_unix: u64,
    pub wall_time_s: f64,
    pub threads: usize,
}

/// Writes `text` to `path`, or to standard output.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// The part of a rendered report that must not change between runs.
pub fn body_of(rendered: &str) -> Result<String, CliError> {
    if rendered.starts_with('#') {
        // CSV: everything after the header line
        return Ok(rendered.split_once('\n').map(|x| x.1.to_string()).unwrap_or_default());
    }
    let v: Value = serde_json::from_str(rendered).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(v.get("body").map(|b| b.to_string()).unwrap_or_default())
}

pub fn rational(q: Rational64) -> Value {
    json!({ "num": q.numer(), "den": q.denom() })
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Fixed-width rendering for CSV cells; `{:e}` round-trips exactly.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new(&["s_re", "s_im", "value_re", "value_im"]);
        t.push(vec![num(2.0), num(0.0), num(1.5), num(-0.25)]);
        Report::new("zeta partial", Provenance::new().bound("height", 2).tol("kl", 1e-16), json!({ "n": 1 })).with_table(t)
    }

    #[test]
    fn body_excludes_header() {
        let r = sample();
        let h1 = Header { timestamp_unix: 1, wall_time_s: 0.5, threads: 1 };
        let h2 = Header { timestamp_unix: 2, wall_time_s: 0.7, threads: 8 };
        for f in [Format::Json, Format::Csv] {
            let a = r.render(f, &h1).unwrap();
            let b = r.render(f, &h2).unwrap();
            assert_ne!(a, b);
            assert_eq!(body_of(&a).unwrap(), body_of(&b).unwrap());
        }
    }

    #[test]
    fn json_layout() {
        let h = Header { timestamp_unix: 1, wall_time_s: 0.5, threads: 1 };
        let v: Value = serde_json::from_str(&sample().render(Format::Json, &h).unwrap()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["body"]["provenance"]["bounds"]["height"], 2);
        assert_eq!(v["body"]["provenance"]["modules"]["zeta"], env!("CARGO_PKG_VERSION"));
        assert_eq!(rational(Rational64::new(-2, 6)), json!({ "num": -1, "den": 3 }));
    }

    #[test]
    fn csv_layout() {
        let h = Header { timestamp_unix: 1, wall_time_s: 0.5, threads: 1 };
        let text = sample().render(Format::Csv, &h).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {\"header\""));
        assert_eq!(lines[2], "s_re,s_im,value_re,value_im");
        assert_eq!(lines[3], "2e0,0e0,1.5e0,-2.5e-1");
        let no_table = Report::new("x", Provenance::new(), json!(null));
        assert!(no_table.render(Format::Csv, &h).is_err());
    }
}
