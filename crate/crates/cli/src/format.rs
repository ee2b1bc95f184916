//! Deterministic number formatting shared by every output path.

/// Twelve significant digits in exponent notation; `inf`, `-inf`, `nan`
/// for non-finite values. Negative zero prints as zero.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Like [`num`] but returns a JSON number carrying the rounded value.
pub fn json_num(x: f64) -> serde_json::Value {
    match num(x).parse::<f64>() {
        Ok(v) if v.is_finite() => serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into),
        _ => serde_json::Value::String(num(x)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(num(23.0), "2.30000000000e1");
        assert_eq!(num(-0.0), "0.00000000000e0");
        assert_eq!(num(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(json_num(1.0 / 3.0), serde_json::json!(0.333333333333));
    }
}
