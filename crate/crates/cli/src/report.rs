use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Serialize)]
pub struct Versions {
    pub fracsob: &'static str,
    pub fracsob_cli: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            fracsob: fracsob::VERSION,
            fracsob_cli: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub rows: Vec<Value>,
    pub versions: Versions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

impl Report {
    pub fn new(command: &str, config: Value, rows: Vec<Value>, timestamp: bool) -> Self {
        let timestamp_unix = timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Report {
            command: command.to_string(),
            config,
            rows,
            versions: Versions::current(),
            timestamp_unix,
        }
    }

    /// A row failed its tolerance when it carries `"passed": false`.
    pub fn all_passed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.get("passed").and_then(Value::as_bool) != Some(false))
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    /// Flattens the rows; columns are the union of row keys in first-seen
    /// order.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut columns: Vec<String> = Vec::new();
        for row in &self.rows {
            if let Value::Object(map) = row {
                for key in map.keys() {
                    if !columns.contains(key) {
                        columns.push(key.clone());
                    }
                }
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&columns)?;
        let empty = Map::new();
        for row in &self.rows {
            let map = row.as_object().unwrap_or(&empty);
            let record: Vec<String> = columns.iter().map(|c| cell(map.get(c))).collect();
            w.write_record(&record)?;
        }
        w.flush()
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// JSON number, or `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Relative error, or absolute when the reference is 0.
pub fn rel_err(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        (value - reference).abs() / reference.abs()
    }
}
