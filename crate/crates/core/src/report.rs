//! Tabular reports shared by scans and the command-line front end.
//!
//! CSV output uses LF line endings, RFC-4180 quoting and 17 significant
//! digits for every float, so values survive a text round trip bit-exactly.
//! JSON output carries the same numbers with keys in sorted order.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// Format a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn to_csv_field(&self) -> String {
        match self {
            Cell::Num(x) => fmt17(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(i) => Value::Number((*i).into()),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
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

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "true" } else { "false" }.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::input(format!(
                "unknown format `{other}` (expected csv|json)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// A table of scan results plus free-form summary fields.
///
/// The CSV form contains only the table; summary fields appear in the JSON
/// form under `meta`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanReport {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: BTreeMap<String, Cell>,
}

impl ScanReport {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.insert(key.to_string(), value.into());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of a numeric column, in row order.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        wtr.write_record(&self.columns)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let meta: Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let mut top = Map::new();
        top.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        top.insert("meta".into(), Value::Object(meta));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_json_value())?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv_string(),
            OutputFormat::Json => self.to_json_string(),
        }
    }

    /// Write the report to `path`, returning the path written.
    pub fn write_to<P: AsRef<Path>>(
        &self,
        format: OutputFormat,
        path: P,
    ) -> Result<std::path::PathBuf> {
        let text = self.render(format)?;
        let path = path.as_ref();
        let mut f = fs::File::create(path)?;
        f.write_all(text.as_bytes())?;
        Ok(path.to_path_buf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScanReport {
        let mut r = ScanReport::new(&["eps", "value", "label"]);
        r.push_row(vec![
            Cell::Num(0.1),
            Cell::Num(std::f64::consts::PI / 7.0),
            Cell::Text("a,b".into()),
        ]);
        r.set_meta("sup", 1.25);
        r
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = ScanReport::new(&["eps", "value", "gap", "log_rate"]);
        assert_eq!(r.to_csv_string().unwrap(), "eps,value,gap,log_rate\n");
    }

    #[test]
    fn csv_quotes_and_uses_lf() {
        let text = sample().to_csv_string().unwrap();
        assert!(!text.contains('\r'));
        assert!(text.contains("\"a,b\""));
        assert!(text.starts_with("eps,value,label\n"));
    }

    #[test]
    fn csv_and_json_carry_identical_numbers() {
        let r = sample();
        let csv_text = r.to_csv_string().unwrap();
        let line = csv_text.lines().nth(1).unwrap();
        let csv_value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        let json: Value = serde_json::from_str(&r.to_json_string().unwrap()).unwrap();
        let json_value = json["rows"][0]["value"].as_f64().unwrap();
        assert_eq!(csv_value.to_bits(), (std::f64::consts::PI / 7.0).to_bits());
        assert_eq!(json_value.to_bits(), csv_value.to_bits());
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            0.0,
            -0.0,
            f64::MIN_POSITIVE,
        ] {
            let back: f64 = fmt17(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
