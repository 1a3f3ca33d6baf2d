//! Report formatting: every numeric output is rounded to 12 significant
//! digits before printing, so reports are stable across runs and platforms
//! and human diffs stay readable.

use serde_json::Value;

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude.abs() > 250 {
        return x; // scaling would overflow; leave as-is
    }
    let scale = 10f64.powi(digits - 1 - magnitude);
    (x * scale).round() / scale
}

/// Rounds every number in a JSON tree in place.
pub fn round_tree(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(x, 12)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

/// Pretty JSON with 12-significant-digit numbers.
pub fn to_json_string(value: &Value) -> String {
    let mut rounded = value.clone();
    round_tree(&mut rounded);
    serde_json::to_string_pretty(&rounded).expect("serializable value")
}

/// Formats one number for CSV cells.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mut s = format!("{}", round_sig(x, 12));
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") {
        s.push_str(".0");
    }
    s
}

/// Key-value CSV from a JSON tree: one `path,value` row per leaf.
pub fn to_flat_csv(value: &Value) -> String {
    let mut rows = vec!["key,value".to_string()];
    flatten("", value, &mut rows);
    rows.join("\n") + "\n"
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&path, v, rows);
            }
        }
        Value::Array(items) => {
            for (k, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{k}]"), v, rows);
            }
        }
        Value::Number(n) => {
            let cell = n.as_f64().map_or_else(|| n.to_string(), fmt_num);
            rows.push(format!("{prefix},{cell}"));
        }
        Value::Bool(b) => rows.push(format!("{prefix},{b}")),
        Value::String(s) => rows.push(format!("{prefix},{}", s.replace(',', ";"))),
        Value::Null => rows.push(format!("{prefix},")),
    }
}
