//! CSV tables and JSON result records.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use corrlab::Tolerances;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// `%.12g`: 12 significant digits, fixed notation for exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "true" } else { "false" }.to_string())
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(x) => out.push_str(&format_float(*x)),
                    Cell::Text(s) => write!(out, "{s}").expect("write to string"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// JSON document emitted by the non-tabular subcommands.
#[derive(Debug, Serialize)]
pub struct ResultRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: Value,
    pub tolerances: TolerancesRecord,
    pub output: Value,
}

#[derive(Debug, Serialize)]
pub struct TolerancesRecord {
    pub hermitian: f64,
    pub positivity: f64,
    pub degenerate: f64,
    pub crossover_angle: f64,
}

impl From<&Tolerances> for TolerancesRecord {
    fn from(t: &Tolerances) -> Self {
        Self {
            hermitian: t.hermitian,
            positivity: t.positivity,
            degenerate: t.degenerate,
            crossover_angle: t.crossover_angle,
        }
    }
}

impl ResultRecord {
    pub fn new(command: &'static str, input: Value, tol: &Tolerances, output: Value) -> Self {
        Self {
            tool: "corrlab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            input,
            tolerances: tol.into(),
            output,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable record");
        s.push('\n');
        s
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-0.25), "-0.25");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(format_float(123456.789), "123456.789");
        assert_eq!(format_float(1e15), "1e15");
        assert_eq!(format_float(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_float(0.99999999999999), "1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b", "label"]);
        t.push(vec![0.5.into(), 1e-20.into(), "C".into()]);
        t.push(vec![2.0.into(), (-1.5).into(), false.into()]);
        assert_eq!(t.to_csv(), "a,b,label\n0.5,1e-20,C\n2,-1.5,false\n");
    }
}
