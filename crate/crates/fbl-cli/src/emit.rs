// SPDX-License-Identifier: Apache-2.0
//! Report formatting. Every float goes out with 12 significant digits.

use serde::Serialize;
use serde_json::Value;

pub const SIG_DIGITS: usize = 12;

/// Round to `SIG_DIGITS` significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Decimal text for CSV cells.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let v = Value::from(round_sig(x));
        v.to_string()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                *v = Value::from(round_sig(f));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn json<T: Serialize>(report: &T) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(report)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1234567890123456), 0.123456789012);
        assert_eq!(round_sig(-9.87654321098765e-30), -9.87654321099e-30);
        assert_eq!(round_sig(2.0), 2.0);
        assert!(round_sig(f64::NAN).is_nan());
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_rounds_nested_floats_only() {
        let s = json(&serde_json::json!({"a": [1.0000000000001, 7], "b": {"c": "x"}})).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"][0], 1.0);
        assert_eq!(v["a"][1], 7);
        assert_eq!(v["b"]["c"], "x");
    }
}
