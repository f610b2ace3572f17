//! Long-format tables and their CSV / JSON encodings.

use crate::config::{Format, Resolved};
use serde_json::{json, Value};
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// Shortest round-trip decimal; scientific below `1e-4` in magnitude.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        "0".into()
    } else if x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format_number(*v),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Num(v) if v.is_finite() => json!(v),
        Cell::Num(v) => json!(format_number(*v)),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
    }
}

pub fn metadata(cfg: &Resolved, timestamp: u64) -> Value {
    json!({
        "artifact": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "generated_unix": timestamp,
        "config": cfg,
    })
}

/// CSV: one `#`-prefixed metadata line, the header, then the rows.
pub fn write_csv<W: Write>(w: W, table: &Table, meta: &Value) -> std::io::Result<()> {
    let mut w = w;
    writeln!(w, "# {meta}")?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(&table.columns)?;
    for row in &table.rows {
        c.write_record(row.iter().map(cell_text))?;
    }
    c.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(w: W, table: &Table, meta: &Value) -> std::io::Result<()> {
    let rows: Vec<Value> = table.rows.iter().map(|r| Value::Array(r.iter().map(cell_json).collect())).collect();
    let doc = json!({ "metadata": meta, "columns": table.columns, "rows": rows });
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)
}

pub fn write<W: Write>(w: W, format: Format, table: &Table, meta: &Value) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(w, table, meta),
        Format::Json => write_json(w, table, meta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1234.5), "1234.5");
        assert_eq!(format_number(3.2e-5), "3.2e-5");
        assert_eq!(format_number(-1e-7), "-1e-7");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(0.0001), "0.0001");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["protocol", "N", "qfi"]);
        t.push(vec!["single".into(), 3usize.into(), 1.5e-6.into()]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &t, &json!({"k": 1})).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "# {\"k\":1}\nprotocol,N,qfi\nsingle,3,1.5e-6\n");
    }
}
