//! Plain-text rendering. Reports are flattened to `path  value` rows;
//! rationals are already strings, so nothing is lost.

use serde_json::Value;

use crate::checks::PaperCheck;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        rows.push((prefix.to_string(), s));
        return;
    }
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                rows.push((prefix.to_string(), "{}".into()));
            }
            for (k, item) in map {
                flatten(&join(k), item, rows);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), item, rows);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

pub fn table(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

pub fn paper_check_table(report: &PaperCheck) -> String {
    let width = report.criteria.iter().map(|c| c.title.len()).max().unwrap_or(0);
    let mut out = format!("{:>2}  {:<width$}  result\n", "#", "criterion");
    for c in &report.criteria {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:>2}  {:<width$}  {verdict}\n", c.id, c.title));
    }
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    let summary = if failed == 0 {
        "all criteria passed".to_string()
    } else {
        format!("{failed} of {} criteria failed", report.criteria.len())
    };
    out.push_str(&format!(
        "{summary} (seed {}, {} samples, deviation grid {})\n",
        report.seed, report.samples, report.deviation_grid
    ));
    out
}
