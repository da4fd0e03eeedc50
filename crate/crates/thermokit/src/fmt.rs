//! Fixed float formatting for report files.

/// Formats `x` with 6 significant digits in the style of C's `%g`: plain
/// notation for exponents in [-4, 6), scientific otherwise, trailing zeros
/// trimmed.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0128, "0.0128"),
            (17.96875, "17.9688"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.0000123456789, "1.23457e-05"),
            (0.000123456789, "0.000123457"),
            (-2.5, "-2.5"),
            (1.0, "1"),
            (999999.5, "1e+06"),
            (-0.0, "0"),
            (2.2e-16, "2.2e-16"),
            (0.00001, "1e-05"),
        ];
        for (x, want) in cases {
            assert_eq!(sig6(x), want, "{x}");
        }
    }
}
