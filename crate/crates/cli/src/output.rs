//! All artifact writes go through [`Writer`]. JSON floats become decimal
//! strings with a fixed number of significant digits so that reports are
//! byte-stable across runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

/// Significant digits of every float written to JSON.
pub const FLOAT_DIGITS: usize = 17;
pub const REPORT_SCHEMA: u32 = 1;

pub struct Writer {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_bytes(&mut self, name: &str, contents: Vec<u8>) -> Result<PathBuf> {
        let text = String::from_utf8(contents).context("artifact is not UTF-8")?;
        self.write_text(name, &text)
    }

    /// `{"header": …, "report": …}` with floats rendered as decimal strings.
    pub fn write_report(&mut self, name: &str, command: &str, report: Value) -> Result<PathBuf> {
        let doc = json!({
            "header": {
                "tool": "virasoro",
                "version": env!("CARGO_PKG_VERSION"),
                "command": command,
                "schema": REPORT_SCHEMA,
                "float_digits": FLOAT_DIGITS,
            },
            "report": decimalize(report),
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// `x` in scientific notation with [`FLOAT_DIGITS`] significant digits.
pub fn decimal(x: f64) -> String {
    if x.is_finite() {
        format!("{:.*e}", FLOAT_DIGITS - 1, x)
    } else {
        x.to_string()
    }
}

pub fn decimalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(decimal(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) => Value::Array(items.into_iter().map(decimalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, decimalize(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_become_strings_integers_stay() {
        let v = decimalize(json!({"a": 0.5, "b": [1, 2.25], "c": "x"}));
        assert_eq!(v["a"], json!("5.0000000000000000e-1"));
        assert_eq!(v["b"][0], json!(1));
        assert_eq!(v["b"][1], json!("2.2500000000000000e0"));
    }
}
