//! Float formatting equivalent to C's `%.17g`.
//!
//! Seventeen significant digits round-trip every `f64`, so a CSV value can be
//! parsed back to the exact bits that produced it.

const SIGNIFICANT: i32 = 17;

pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    // Scientific rendering fixes the decimal exponent after rounding.
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("`e` formatting has an exponent");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    if (-4..SIGNIFICANT).contains(&exponent) {
        let decimals = (SIGNIFICANT - 1 - exponent) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            strip_zeros(mantissa.to_string()),
            exponent.abs()
        )
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::fmt_g17;

    #[test]
    fn matches_c_printf() {
        let cases = [
            (0.40625, "0.40625"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.10000000000000001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (1.8, "1.8"),
            (100.0, "100"),
            (1e-5, "1.0000000000000001e-05"),
            (0.0001, "0.0001"),
            (1e17, "1e+17"),
            (12345678901234567.0, "12345678901234568"),
            (6.02214076e23, "6.0221407599999999e+23"),
            (f64::MIN_POSITIVE, "2.2250738585072014e-308"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn round_trips() {
        let mut x = 0.123_456_789_f64;
        for _ in 0..200 {
            let s = fmt_g17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            x = x * 7.3 + 1e-3;
            if x > 1e30 {
                x = 1.0 / x;
            }
        }
    }
}
