use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::params::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or arguments: exit 2.
    Validation(String),
    /// Errors raised by the library.
    Module(msl::Error),
    Io(String),
}

impl From<msl::Error> for CliError {
    fn from(e: msl::Error) -> Self {
        CliError::Module(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use msl::Error as E;
        match self {
            CliError::Validation(_) => 2,
            CliError::Module(
                E::DimensionMismatch { .. }
                | E::InvalidArgument(_)
                | E::BodyDefinition(_)
                | E::NotStrictlyConvex(_)
                | E::Unsupported(_)
                | E::ResolutionTooCoarse(_),
            ) => 2,
            CliError::Module(_) | CliError::Io(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message, extra) = match self {
            CliError::Validation(m) => ("validation", m.clone(), Value::Null),
            CliError::Io(m) => ("io", m.clone(), Value::Null),
            CliError::Module(e) => {
                let extra = match e {
                    msl::Error::CertificateFailed { gauge_max, attempts } => {
                        json!({ "gauge_max": gauge_max, "attempts": attempts })
                    }
                    _ => Value::Null,
                };
                (e.kind(), e.to_string(), extra)
            }
        };
        let mut err = json!({ "kind": kind, "message": message, "exit_code": self.exit_code() });
        if !extra.is_null() {
            err["details"] = extra;
        }
        json!({ "error": err })
    }
}

pub struct Output {
    pub result: Value,
    csv: Option<String>,
}

impl Output {
    pub fn new(result: Value, csv: Option<String>) -> Self {
        Output { result, csv }
    }

    /// The command's own table, or `path,value` rows of every scalar leaf
    /// outside arrays.
    pub fn csv(&self) -> String {
        if let Some(c) = &self.csv {
            return c.clone();
        }
        let mut s = String::from("path,value\n");
        flatten("", &self.result, &mut s);
        s
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(_) | Value::Null => {}
        Value::String(s) => out.push_str(&format!("{prefix},\"{}\"\n", s.replace('"', "\"\""))),
        other => out.push_str(&format!("{prefix},{other}\n")),
    }
}

pub fn render(command: &str, params: Value, out: &Output, format: Format) -> String {
    match format {
        Format::Csv => out.csv(),
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("command".into(), json!(command));
            doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            doc.insert("params".into(), params);
            doc.insert("result".into(), out.result.clone());
            let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
            s.push('\n');
            s
        }
    }
}

pub fn write(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed reader (`| head`) is not an error
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}
