use serde_json::{Map, Value};

/// Ordered key/value report. Text mode prints `key=value` lines (a list of
/// strings becomes one line per item); JSON mode prints one object.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
    /// Text mode prints only this field's value.
    bare: Option<String>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    /// A report whose text form is just `value`.
    pub fn bare(key: &str, value: impl Into<Value>) -> Report {
        Report {
            fields: vec![(key.to_string(), value.into())],
            bare: Some(key.to_string()),
        }
    }

    pub fn put(mut self, key: &str, value: impl Into<Value>) -> Report {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let map: Map<String, Value> = self.fields.iter().cloned().collect();
            let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("values are serializable");
            s.push('\n');
            return s;
        }
        let mut out = String::new();
        for (k, v) in &self.fields {
            if self.bare.as_deref() == Some(k.as_str()) {
                out.push_str(&scalar(v));
                out.push('\n');
                continue;
            }
            match v {
                Value::Array(items) if items.iter().all(Value::is_string) => {
                    if items.is_empty() {
                        out.push_str(&format!("{k}=\n"));
                    }
                    for item in items {
                        out.push_str(&format!("{k}={}\n", scalar(item)));
                    }
                }
                _ => out.push_str(&format!("{k}={}\n", scalar(v))),
            }
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
