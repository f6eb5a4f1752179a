//! Report assembly and JSON/CSV rendering.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Format, Outcome};

pub const SCHEMA: &str = "drinfeld-forms/1";

/// A command echo, its rows, and any extra top-level fields. Rows must be
/// flat JSON objects so that CSV can mirror them.
pub struct Report {
    pub command: &'static str,
    pub echo: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Map<String, Value>>,
    pub extra: Map<String, Value>,
    pub seed: u64,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Report { command, echo: Map::new(), columns, rows: Vec::new(), extra: Map::new(), seed: 0 }
    }

    pub fn echo(mut self, key: &str, v: impl Serialize) -> Self {
        self.echo.insert(key.into(), serde_json::to_value(v).expect("serializable"));
        self
    }

    pub fn row(&mut self, fields: Vec<(&str, Value)>) {
        self.rows.push(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    }

    pub fn extra(&mut self, key: &str, v: impl Serialize) {
        self.extra.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    fn to_json(&self, passed: bool) -> Value {
        let mut top = Map::new();
        top.insert("schema".into(), SCHEMA.into());
        top.insert("command".into(), self.command.into());
        for (k, v) in &self.echo {
            top.insert(k.clone(), v.clone());
        }
        top.insert("seed".into(), self.seed.into());
        top.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        for (k, v) in &self.extra {
            top.insert(k.clone(), v.clone());
        }
        top.insert("status".into(), if passed { "pass" } else { "fail" }.into());
        Value::Object(top)
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(outcome: &Outcome, format: Format) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &outcome.report.to_json(outcome.passed))?;
            writeln!(out)
        }
        Format::Csv => {
            let report = &outcome.report;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&report.columns)?;
            for row in &report.rows {
                w.write_record(report.columns.iter().map(|c| row.get(*c).map(csv_cell).unwrap_or_default()))?;
            }
            w.flush()
        }
    }
}
