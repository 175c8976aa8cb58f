//! Locale-independent number printing with 17 significant digits.

/// Formats `v` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, exponent form outside `[1e-4, 1e17)`.
pub fn sig17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// A JSON number whose text is [`sig17`] of `v`. Non-finite values map to null.
pub(crate) fn json_number(v: f64) -> serde_json::Value {
    if !v.is_finite() {
        return serde_json::Value::Null;
    }
    let n: serde_json::Number = sig17(v).parse().expect("sig17 emits valid JSON numbers");
    serde_json::Value::Number(n)
}
