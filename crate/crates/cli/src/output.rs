//! Record emission in JSON lines, CSV or `key=value` text.

use serde::Serialize;
use serde_json::Value;
use std::io::{self, Write};

use crate::args::Format;

pub struct Output<'a> {
    format: Format,
    sink: &'a mut dyn Write,
    header: Option<Vec<String>>,
}

impl<'a> Output<'a> {
    pub fn new(format: Format, sink: &'a mut dyn Write) -> Self {
        Output {
            format,
            sink,
            header: None,
        }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn record<T: Serialize>(&mut self, record: &T) -> io::Result<()> {
        let value = serde_json::to_value(record).map_err(io::Error::other)?;
        match self.format {
            Format::Json => {
                serde_json::to_writer(&mut *self.sink, &value).map_err(io::Error::other)?;
                writeln!(self.sink)
            }
            Format::Text => {
                let pairs = flatten(&value);
                let line: Vec<String> = pairs.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(self.sink, "{}", line.join(" "))
            }
            Format::Csv => {
                let pairs = flatten(&value);
                let keys: Vec<String> = pairs.iter().map(|(k, _)| k.clone()).collect();
                if self.header.as_ref() != Some(&keys) {
                    self.csv_row(&keys)?;
                    self.header = Some(keys);
                }
                let values: Vec<String> = pairs.into_iter().map(|(_, v)| v).collect();
                self.csv_row(&values)
            }
        }
    }

    /// Preformatted text, written only in text mode.
    pub fn text(&mut self, s: &str) -> io::Result<()> {
        if self.format == Format::Text {
            self.sink.write_all(s.as_bytes())?;
        }
        Ok(())
    }

    /// Raw bytes regardless of format (used for native CSV tables).
    pub fn raw(&mut self, s: &str) -> io::Result<()> {
        self.sink.write_all(s.as_bytes())
    }

    fn csv_row(&mut self, fields: &[String]) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(fields).map_err(io::Error::other)?;
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.sink.write_all(&bytes)
    }
}

/// Dotted-path scalars of a JSON value, in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

fn walk(value: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                walk(v, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(v, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((prefix, s.clone())),
        Value::Null => out.push((prefix, String::new())),
        other => out.push((prefix, other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens_nested() {
        let v = json!({"a": 1, "b": {"c": "x", "d": [true, null]}});
        assert_eq!(
            flatten(&v),
            vec![
                ("a".to_string(), "1".to_string()),
                ("b.c".to_string(), "x".to_string()),
                ("b.d.0".to_string(), "true".to_string()),
                ("b.d.1".to_string(), String::new()),
            ]
        );
    }

    #[test]
    fn csv_header_once() {
        let mut buf = Vec::new();
        {
            let mut out = Output::new(Format::Csv, &mut buf);
            out.record(&json!({"n": 1, "v": "a,b"})).unwrap();
            out.record(&json!({"n": 2, "v": "c"})).unwrap();
        }
        assert_eq!(String::from_utf8(buf).unwrap(), "n,v\n1,\"a,b\"\n2,c\n");
    }
}
