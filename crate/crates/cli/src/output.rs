//! Rendering, atomic file output and the error type with its exit codes.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use uscsim::format::{round_sig, Table};
use uscsim::Error;

use crate::args::Format;

/// What a command produced. At least one of the fields is set.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: Option<Table>,
    pub report: Option<Value>,
    /// Plain-text rendering used instead of CSV.
    pub text: Option<String>,
    /// Default to CSV (or text) when no format is requested.
    pub prefer_table: bool,
}

impl Output {
    pub fn table(t: Table) -> Self {
        Output { table: Some(t), report: None, text: None, prefer_table: true }
    }

    pub fn report(v: Value) -> Self {
        Output { table: None, report: Some(v), text: None, prefer_table: false }
    }

    pub fn report_with_table(v: Value, t: Table) -> Self {
        Output { table: Some(t), report: Some(v), text: None, prefer_table: false }
    }

    pub fn render(self, format: Option<Format>, config: &Value) -> Result<String, CliError> {
        let format = format.unwrap_or(if self.prefer_table { Format::Csv } else { Format::Json });
        match format {
            Format::Csv => {
                if let Some(text) = self.text {
                    return Ok(text);
                }
                let t = self.table.ok_or_else(|| {
                    CliError::from(Error::InvalidParameter("this command only writes JSON".into()))
                })?;
                let mut t = t.meta("config", serde_json::to_string(config)?);
                // config first, so the provenance of a file is its first line
                t.meta.rotate_right(1);
                Ok(t.to_csv())
            }
            Format::Json => {
                let body = match (self.report, self.table) {
                    (Some(r), _) => r,
                    (None, Some(t)) => table_json(&t),
                    (None, None) => Value::Null,
                };
                let v = match body {
                    Value::Object(mut m) => {
                        m.insert("config".into(), config.clone());
                        Value::Object(m)
                    }
                    other => json!({ "config": config, "data": other }),
                };
                let mut s = serde_json::to_string_pretty(&rounded(v))?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

fn table_json(t: &Table) -> Value {
    let meta: Map<String, Value> = t.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({ "meta": meta, "columns": t.columns, "rows": t.rows })
}

/// Rounds every float to the 12 significant digits used in CSV output.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub code: u8,
}

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { kind: "invalid_input", message: message.into(), code: EXIT_INVALID }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { kind: "io", message: format!("{}: {e}", path.display()), code: EXIT_IO }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message, "exit_code": self.code }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError { kind: "numerical", message: e.to_string(), code: EXIT_NUMERICAL }
        } else {
            CliError::invalid(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::invalid(format!("json: {e}"))
    }
}
