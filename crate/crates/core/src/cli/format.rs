//! Bit-stable text output: `%.17g` numbers, JSON with sorted keys, CSV.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

/// C `printf("%.17g", v)`.
pub fn g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let x: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&x) {
        let m = strip_zeros(mantissa);
        let sign = if x < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", x.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - x) as usize, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON with `%.17g` floats; non-finite numbers are already `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&g17(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// `t,re_u,im_u` rows with LF endings.
pub fn solution_csv(points: impl IntoIterator<Item = (f64, Complex64)>) -> String {
    let mut out = String::from("t,re_u,im_u\n");
    for (t, u) in points {
        let _ = writeln!(out, "{},{},{}", g17(t), g17(u.re), g17(u.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (0.0, "0"),
            (1.5e300, "1.5000000000000001e+300"),
        ];
        for (v, want) in cases {
            assert_eq!(g17(v), want, "{v}");
        }
    }

    #[test]
    fn json_is_sorted_and_stable() {
        #[derive(Serialize)]
        struct S {
            z: f64,
            a: Option<f64>,
            n: usize,
            v: Vec<f64>,
        }
        let s = to_json(&S {
            z: 0.1,
            a: None,
            n: 3,
            v: vec![],
        })
        .unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": null,\n  \"n\": 3,\n  \"v\": [],\n  \"z\": 0.10000000000000001\n}\n"
        );
    }

    #[test]
    fn csv_layout() {
        let s = solution_csv([(-1.0, Complex64::new(2.0, 0.0))]);
        assert_eq!(s, "t,re_u,im_u\n-1,2,0\n");
    }

    proptest! {
        #[test]
        fn round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
