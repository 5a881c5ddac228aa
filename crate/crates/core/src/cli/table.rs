//! Fixed-schema output tables, rendered as CSV or JSON.

use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A number already formatted as a decimal or scientific literal.
    Num(String),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Numbers joined by `;` in CSV, an array in JSON.
    List(Vec<String>),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(s) | Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::List(v) => v.join(";"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(s) => number(s),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::List(v) => Value::Array(v.iter().map(|s| number(s)).collect()),
            Cell::Empty => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(s) => s.parse().ok(),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

/// Literal number when it parses as JSON, otherwise a string (`inf`, `nan`).
fn number(s: &str) -> Value {
    match serde_json::from_str::<Number>(s) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(s.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub subcommand: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(subcommand: &'static str, columns: &'static [&'static str]) -> Self {
        Self {
            subcommand,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()
    }

    pub fn write_json<W: Write>(&self, out: &mut W, digits: u32) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    m.insert((*c).to_string(), cell.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        root.insert("subcommand".into(), Value::String(self.subcommand.into()));
        root.insert("digits".into(), Value::from(digits));
        root.insert(
            "columns".into(),
            Value::Array(self.columns.iter().map(|c| Value::String((*c).into())).collect()),
        );
        root.insert("rows".into(), Value::Array(rows));
        serde_json::to_writer_pretty(&mut *out, &Value::Object(root))?;
        out.write_all(b"\n")
    }
}
