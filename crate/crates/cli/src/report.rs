//! JSON run reports. Keys are sorted and every field except `timing_ms` is a
//! pure function of the inputs, so reports diff cleanly across runs.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::files::write_to;
use crate::{CliResult, Failure};

pub struct Report {
    command: &'static str,
    config: Value,
    fields: Map<String, Value>,
    start: Instant,
}

impl Report {
    pub fn new(command: &'static str, config: &impl Serialize) -> Self {
        Self {
            command,
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            fields: Map::new(),
            start: Instant::now(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.fields.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn write(self, path: Option<&Path>) -> CliResult {
        let Some(path) = path else { return Ok(()) };
        let mut out = self.fields;
        out.insert("command".into(), json!(self.command));
        out.insert("config".into(), self.config);
        out.insert(
            "timing_ms".into(),
            json!(self.start.elapsed().as_secs_f64() * 1e3),
        );
        let text = serde_json::to_string_pretty(&Value::Object(out))
            .map_err(|e| Failure::Data(e.to_string()))?;
        write_to(path, |w| {
            writeln!(w, "{text}")?;
            Ok(())
        })
    }
}
