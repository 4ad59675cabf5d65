//! Exact rational helpers: parsing of `p/q` and finite decimal literals, and
//! rendering to text (exact and approximate).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`; panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Rational {
    ratio(1, 2)
}

/// Parses an optionally signed integer, fraction `p/q`, or finite decimal
/// `a.b`. Returns `None` for anything else, including a zero denominator.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());

    let value = if let Some((p, q)) = body.split_once('/') {
        if !all_digits(p) || !all_digits(q) {
            return None;
        }
        let den: BigInt = q.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Rational::new(p.parse().ok()?, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if !all_digits(frac) || !(whole.is_empty() || all_digits(whole)) {
            return None;
        }
        let digits = format!("{whole}{frac}");
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        Rational::new(num, den)
    } else {
        if !all_digits(body) {
            return None;
        }
        Rational::from_integer(body.parse().ok()?)
    };
    Some(if negative { -value } else { value })
}

/// Exact text form: `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering rounded (half away from zero) to `sig` significant
/// digits, with trailing zeros trimmed. Computed with integer arithmetic so
/// huge denominators do not lose the leading digits.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);
    let lower = num_traits::pow(ten.clone(), sig - 1);
    let upper = &lower * &ten;

    // choose k so that floor(a * 10^k) has exactly `sig` digits
    let e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let mut k = sig as i64 - 1 - e;
    let scaled = |k: i64| -> Rational {
        if k >= 0 {
            &a * Rational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            &a / Rational::from_integer(num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    loop {
        let f = scaled(k).floor().to_integer();
        if f < lower {
            k += 1;
        } else if f >= upper {
            k -= 1;
        } else {
            break;
        }
    }
    let s = scaled(k);
    let (q, rem) = s.numer().div_rem(s.denom());
    let mut m = q;
    if &rem * BigInt::from(2) >= *s.denom() {
        m += BigInt::one();
    }
    if m >= upper {
        m /= &ten;
        k -= 1;
    }

    let digits = m.to_string();
    let mut out = if k <= 0 {
        let mut d = digits;
        d.extend(std::iter::repeat_n('0', (-k) as usize));
        d
    } else {
        let k = k as usize;
        let padded = if digits.len() <= k {
            format!("{}{}", "0".repeat(k - digits.len() + 1), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - k);
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        }
    };
    if negative {
        out.insert(0, '-');
    }
    out
}

/// Default display precision used by reports.
pub const DISPLAY_DIGITS: usize = 12;

pub fn approx(r: &Rational) -> String {
    to_decimal(r, DISPLAY_DIGITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("13/3"), Some(ratio(13, 3)));
        assert_eq!(parse_rational("0.3"), Some(ratio(3, 10)));
        assert_eq!(parse_rational("-2.50"), Some(ratio(-5, 2)));
        assert_eq!(parse_rational("+7"), Some(int(7)));
        assert_eq!(parse_rational(".5"), Some(half()));
        assert_eq!(parse_rational("4/8"), Some(half()));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in [
            "", "-", "1/0", "1/", "/2", "1.", "a", "1e3", "1/-2", "1.2.3", "--1",
        ] {
            assert_eq!(parse_rational(bad), None, "{bad:?}");
        }
    }

    #[test]
    fn exact_formatting() {
        assert_eq!(format_rational(&ratio(13, 3)), "13/3");
        assert_eq!(format_rational(&ratio(-6, 3)), "-2");
        assert_eq!(format_rational(&int(0)), "0");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(3, 5), 12), "0.6");
        assert_eq!(to_decimal(&ratio(1, 3), 12), "0.333333333333");
        assert_eq!(to_decimal(&ratio(2, 3), 12), "0.666666666667");
        assert_eq!(to_decimal(&ratio(61, 30), 12), "2.03333333333");
        assert_eq!(to_decimal(&int(1), 12), "1");
        assert_eq!(to_decimal(&int(1234), 2), "1200");
        assert_eq!(to_decimal(&ratio(-1, 8), 12), "-0.125");
        assert_eq!(to_decimal(&ratio(9999, 10000), 3), "1");
        assert_eq!(to_decimal(&ratio(1, 1000), 12), "0.001");
    }
}
