use muntz::{Matrix, MpFloat, Real};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::Failure;

/// Fixed significant digits so identical runs print identical bytes.
#[derive(Clone, Copy)]
pub struct Fmt {
    digits: usize,
}

impl Fmt {
    pub fn for_bits(bits: u32) -> Self {
        Fmt {
            digits: MpFloat::decimal_digits(bits),
        }
    }

    pub fn s(&self, x: &MpFloat) -> String {
        x.to_sci_string(self.digits)
    }

    pub fn n(&self, x: &MpFloat) -> Value {
        Value::String(self.s(x))
    }

    pub fn v(&self, xs: &[MpFloat]) -> Value {
        Value::Array(xs.iter().map(|x| self.n(x)).collect())
    }

    pub fn m(&self, m: &Matrix<MpFloat>) -> Value {
        Value::Array((0..m.rows()).map(|i| self.v(m.row(i))).collect())
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub precision_bits: u32,
    pub result: Value,
    pub table: Table,
}

impl Report {
    pub fn render(&self) -> Result<String, Failure> {
        match self.config.format {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "precision_bits": self.precision_bits,
                    "config": self.config,
                    "result": self.result,
                });
                let mut text = serde_json::to_string_pretty(&doc)
                    .map_err(|e| Failure::config("OutputError", e.to_string()))?;
                text.push('\n');
                Ok(text)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Failure::config("OutputError", e.to_string());
                w.write_record(&self.table.header).map_err(io)?;
                for row in &self.table.rows {
                    w.write_record(row).map_err(io)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Failure::config("OutputError", e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Failure::config("OutputError", e.to_string()))
            }
        }
    }
}
