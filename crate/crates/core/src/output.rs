//! Report serialization: key-sorted JSON with fixed float formatting, and a
//! flat `key = value` text form.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

/// Formats a float with 17 significant digits; non-finite values become `null`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (None, Some(i)) => i.to_string(),
            _ => format_float(n.as_f64().unwrap_or(f64::NAN)),
        },
        // strings, bools and null share serde_json's own encoding
        other => other.to_string(),
    }
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_json(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(_) => out.push_str("[]"),
        Value::Object(_) => out.push_str("{}"),
        other => out.push_str(&scalar(other)),
    }
}

/// Pretty JSON with sorted keys (serde_json's default map is ordered).
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize infallibly");
    let mut out = String::new();
    write_json(&mut out, &v, 0);
    out.push('\n');
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, item, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, out);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix} = {s}");
        }
        other => {
            let text = match other {
                Value::Array(_) => "[]".to_string(),
                _ => scalar(other),
            };
            let _ = writeln!(out, "{prefix} = {text}");
        }
    }
}

/// One `path = value` line per leaf, paths dotted with `[i]` for array slots.
/// Top-level keys listed in `skip` are left out.
pub fn to_text<T: Serialize>(value: &T, skip: &[&str]) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize infallibly");
    if let Value::Object(map) = &mut v {
        for k in skip {
            map.remove(*k);
        }
    }
    let mut out = String::new();
    flatten("", &v, &mut out);
    out
}

/// Parses the text form back into `(path, value)` pairs.
pub fn parse_text(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
