//! Plain-text rendering of a JSON report.
//!
//! Objects become `key: value` lines, nested blocks are indented, arrays of
//! flat objects become aligned tables and multi-line strings are printed as
//! indented blocks.

use serde_json::{Map, Value};

pub fn text(report: &Value) -> String {
    let mut out = String::new();
    if let Some(inv) = report.get("invocation").and_then(|v| v.get("command")).and_then(Value::as_str) {
        let status = report.get("status").and_then(Value::as_str).unwrap_or("");
        out.push_str(&format!("{inv}: {status}\n"));
    }
    match report.get("result") {
        Some(Value::Object(m)) => object(&mut out, m, 0),
        Some(other) => out.push_str(&format!("{}\n", scalar(other))),
        None => object(&mut out, report.as_object().unwrap_or(&Map::new()), 0),
    }
    out
}

fn pad(depth: usize) -> String {
    "  ".repeat(depth)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(xs) if xs.iter().all(is_scalar) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            format!("[{}]", items.join(", "))
        }
        Value::Object(m) if m.values().all(is_scalar) => {
            let items: Vec<String> = m.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect();
            format!("{{{}}}", items.join(", "))
        }
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    match v {
        Value::String(s) => !s.contains('\n'),
        Value::Array(_) | Value::Object(_) => false,
        _ => true,
    }
}

/// Short enough to sit on one line: scalars, arrays of scalars and objects
/// of scalars.
fn is_inline(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(is_scalar),
        Value::Object(m) => m.values().all(is_scalar),
        other => is_scalar(other),
    }
}

fn object(out: &mut String, m: &Map<String, Value>, depth: usize) {
    for (k, v) in m {
        entry(out, k, v, depth);
    }
}

fn entry(out: &mut String, key: &str, v: &Value, depth: usize) {
    let p = pad(depth);
    match v {
        Value::String(s) if s.contains('\n') => {
            out.push_str(&format!("{p}{key}:\n"));
            for line in s.lines() {
                out.push_str(&format!("{p}  {line}\n"));
            }
        }
        v if is_inline(v) => out.push_str(&format!("{p}{key}: {}\n", scalar(v))),
        Value::Array(xs) if is_table(xs) => {
            out.push_str(&format!("{p}{key}:\n"));
            table(out, xs, depth + 1);
        }
        Value::Array(xs) => {
            out.push_str(&format!("{p}{key}:\n"));
            for (i, x) in xs.iter().enumerate() {
                entry(out, &format!("[{i}]"), x, depth + 1);
            }
        }
        Value::Object(m) => {
            out.push_str(&format!("{p}{key}:\n"));
            object(out, m, depth + 1);
        }
        other => out.push_str(&format!("{p}{key}: {}\n", scalar(other))),
    }
}

fn is_table(xs: &[Value]) -> bool {
    !xs.is_empty()
        && xs.iter().all(|x| match x {
            Value::Object(m) => m.values().all(|v| is_inline(v)),
            _ => false,
        })
}

fn table(out: &mut String, rows: &[Value], depth: usize) {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.as_object().unwrap().keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_else(|| "-".into())).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap())
        .collect();
    let line = |vals: &[String]| -> String {
        let parts: Vec<String> = vals
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v}{}", " ".repeat(w - v.chars().count())))
            .collect();
        format!("{}{}\n", pad(depth), parts.join("  ").trim_end())
    };
    out.push_str(&line(&cols));
    for r in &cells {
        out.push_str(&line(r));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_tables_and_blocks() {
        let r = json!({
            "invocation": {"command": "check"},
            "status": "ok",
            "result": {
                "statuses": [{"node": "x0", "status": "C1Holds"}, {"node": "x10", "status": "Open"}],
                "graph": "a = !b\nb = !c\n",
                "n": 3,
            }
        });
        let t = text(&r);
        assert!(t.starts_with("check: ok\n"));
        assert!(t.contains("  node  status\n  x0    C1Holds\n  x10   Open\n"));
        assert!(t.contains("graph:\n  a = !b\n  b = !c\n"));
        assert!(t.contains("n: 3\n"));
    }
}
