//! Fixed-precision numeric formatting and a small CSV table type.
//!
//! Every float is printed with 12 significant digits so repeated runs produce
//! byte-identical files.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// 12 significant digits in scientific notation; `-0` is printed as `0`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0f64);
    }
    format!("{x:.11e}")
}

/// `x` rounded to the precision `fmt_num` prints.
pub fn round_sig(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

/// Column-oriented numeric table with `#` metadata lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { meta: Vec::new(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim_start();
                let (k, v) = rest.split_once(": ").unwrap_or((rest, ""));
                table.meta.push((k.to_string(), v.to_string()));
            } else if line.is_empty() {
                continue;
            } else if !header_seen {
                table.columns = line.split(',').map(str::to_string).collect();
                header_seen = true;
            } else {
                let row = line
                    .split(',')
                    .map(|c| c.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
                if row.len() != table.columns.len() {
                    return Err(Error::DimensionMismatch { expected: table.columns.len(), actual: row.len() });
                }
                table.rows.push(row);
            }
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-0.0), fmt_num(0.0));
        assert_eq!(fmt_num(0.1234567890123456), "1.23456789012e-1");
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(["lambda", "E1"]).meta("units", "hbar*omega0");
        t.push(vec![0.0, -0.5]);
        t.push(vec![0.25, std::f64::consts::PI]);
        let back = Table::parse_csv(&t.to_csv()).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.get_meta("units"), Some("hbar*omega0"));
        assert_eq!(back.rows[1][1], round_sig(std::f64::consts::PI));
    }
}
