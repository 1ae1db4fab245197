//! Output records and their JSON / CSV renderings.

use std::io::Write;

use cardguess::pmf::{format_rational, to_f64};
use cardguess::Rational;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A rectangular view of a result, used for CSV output: key columns first,
/// then value columns.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// One invocation's output.
#[derive(Debug, Clone)]
pub struct Record {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub result: Value,
    pub seed: Option<u64>,
    pub table: Table,
}

impl Record {
    pub fn to_json(&self) -> Value {
        let mut metadata = Map::new();
        metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Some(seed) = self.seed {
            metadata.insert("seed".into(), json!(seed));
        }
        json!({
            "command": self.command,
            "parameters": self.parameters,
            "result": self.result,
            "metadata": metadata,
        })
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                // serde_json's map is ordered by key, so output is deterministic.
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(out);
                writer.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    writer.write_record(row)?;
                }
                writer.flush()
            }
        }
    }
}

/// Twelve significant digits; plain notation for moderate magnitudes,
/// scientific otherwise.
pub fn decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let digits = (11 - exponent).max(0) as usize;
        let text = format!("{x:.digits$}");
        // A rounding carry can add a digit; re-round at the new magnitude.
        let rounded: f64 = text.parse().unwrap_or(x);
        let exponent2 = rounded.abs().log10().floor() as i32;
        if exponent2 != exponent {
            let digits = (11 - exponent2).max(0) as usize;
            return format!("{rounded:.digits$}");
        }
        text
    } else {
        format!("{x:.11e}")
    }
}

pub fn exact(value: &Rational) -> Value {
    json!(format_rational(value))
}

pub fn exact_string(value: &Rational) -> String {
    format_rational(value)
}

pub fn exact_decimal(value: &Rational) -> String {
    decimal(to_f64(value))
}
