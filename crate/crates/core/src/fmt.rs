//! Number formatting shared by the CSV writers.

/// Formats `x` with 17 significant digits in the style of C's `%.17g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros removed. Enough digits to round-trip any `f64`.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        strip_zeros(&s)
    } else {
        format!("{}e{}", strip_zeros(mantissa), exp)
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
