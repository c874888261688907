//! CSV and JSON rendering of command results.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => sig9(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Non-finite values have no JSON literal.
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Nine significant digits, fixed notation for moderate exponents.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Output of one command: a table of rows and optional summary fields.
/// CSV carries the table (or the summary as `field,value` pairs when there
/// is no table); JSON carries both.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub command: &'static str,
    pub summary: Vec<(&'static str, Cell)>,
    pub table: Option<Table>,
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl Document {
    pub fn render(&self, format: Format, with_timestamp: bool) -> anyhow::Result<String> {
        let stamp = with_timestamp.then(timestamp);
        match format {
            Format::Json => {
                let mut root = Map::new();
                root.insert("command".into(), Value::from(self.command));
                if let Some(t) = stamp {
                    root.insert("generated_at".into(), Value::from(t));
                }
                if !self.summary.is_empty() {
                    let summary: Map<String, Value> =
                        self.summary.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
                    root.insert("summary".into(), Value::Object(summary));
                }
                if let Some(t) = &self.table {
                    root.insert("rows".into(), t.json_rows());
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(root))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut out = Vec::new();
                if let Some(t) = stamp {
                    out.extend_from_slice(format!("# generated_at: {t}\n").as_bytes());
                }
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    match &self.table {
                        Some(table) => {
                            w.write_record(&table.columns)?;
                            for r in &table.rows {
                                w.write_record(r.iter().map(Cell::csv))?;
                            }
                        }
                        None => {
                            w.write_record(["field", "value"])?;
                            for (k, v) in &self.summary {
                                w.write_record([k.to_string(), v.csv()])?;
                            }
                        }
                    }
                    w.flush()?;
                }
                Ok(String::from_utf8(out)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.054899123456), "0.0548991235");
        assert_eq!(sig9(1.0), "1.00000000");
        assert_eq!(sig9(-0.325323), "-0.325323000");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1.5e-9), "1.50000000e-9");
        assert_eq!(sig9(1e-5), "1.00000000e-5");
        assert_eq!(sig9(2.5e-4), "0.000250000000");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_without_table_lists_fields() {
        let doc = Document {
            command: "x",
            summary: vec![("a", Cell::Int(3)), ("b", Cell::Empty)],
            table: None,
        };
        assert_eq!(doc.render(Format::Csv, false).unwrap(), "field,value\na,3\nb,\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new(&["z", "a"]);
        t.push(vec![Cell::Num(0.5), Cell::Num(f64::NAN)]);
        let doc = Document {
            command: "x",
            summary: vec![],
            table: Some(t),
        };
        let s = doc.render(Format::Json, false).unwrap();
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.contains("null"));
    }
}
