use serde_json::Value;

pub fn json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

/// One `path<TAB>value` line per leaf, in document order.
pub fn table(v: &Value) -> String {
    let mut lines = Vec::new();
    walk(v, String::new(), &mut lines);
    lines.join("\n")
}

fn walk(v: &Value, path: String, out: &mut Vec<String>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| walk(x, join(k), out)),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push(format!("{path}\t[{}]", items.join(", ")));
        }
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(x, join(&i.to_string()), out)),
        other => out.push(format!("{path}\t{}", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattens_nested_values() {
        let v = serde_json::json!({"a": {"b": 1, "c": ["x", "y"]}, "d": [{"e": null}]});
        assert_eq!(table(&v), "a.b\t1\na.c\t[x, y]\nd.0.e\tnull");
    }
}
