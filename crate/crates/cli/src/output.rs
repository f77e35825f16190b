//! One JSON document per invocation, or CSV for node listings.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "conecalc/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Output {
    body: Map<String, Value>,
    timings: bool,
    csv: Option<Vec<u8>>,
    failed: bool,
}

impl Output {
    pub fn new(command: &str, timings: bool) -> Self {
        let mut body = Map::new();
        body.insert("schema".into(), json!(SCHEMA));
        body.insert("command".into(), json!(command));
        Self {
            body,
            timings,
            csv: None,
            failed: false,
        }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.body.insert(key.to_string(), value);
    }

    /// Merges the fields of a JSON object into the top level.
    pub fn extend(&mut self, value: Value) {
        if let Value::Object(m) = value {
            self.body.extend(m);
        }
    }

    /// Wall-clock data, dropped under `--no-timestamp`.
    pub fn timing(&mut self, key: &str, value: Value) {
        if self.timings {
            self.insert(key, value);
        }
    }

    pub fn diagnostic(&mut self, msg: &str) {
        eprintln!("conecalc: {msg}");
    }

    pub fn error(&mut self, msg: &str) {
        self.failed = true;
        eprintln!("error: {msg}");
        self.insert("error", json!(msg));
    }

    /// Replaces the JSON document with a CSV table of points.
    pub fn csv<'a>(&mut self, dim: usize, rows: impl Iterator<Item = &'a [f64]>) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record((0..dim).map(|i| format!("x{i}")))?;
        for row in rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        self.csv = Some(w.into_inner().map_err(|e| e.into_error())?);
        Ok(())
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        let mut stdout = std::io::stdout().lock();
        if let (Some(bytes), false) = (&self.csv, self.failed) {
            stdout.write_all(bytes)?;
            return stdout.flush();
        }
        if self.timings {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            self.body.insert("timestamp".into(), json!(secs));
        }
        serde_json::to_writer_pretty(&mut stdout, &Value::Object(self.body))?;
        writeln!(stdout)?;
        stdout.flush()
    }
}
