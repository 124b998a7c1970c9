//! Exact rationals backed by `num-rational`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a"`, `"-a/b"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let whole_val = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(whole_digits).ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_val = BigInt::from_str(frac).ok()?;
        let value = Rational::new(whole_val * &scale + frac_val, scale);
        return Some(if negative { -value } else { value });
    }
    BigInt::from_str(text).ok().map(Rational::from_integer)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators and denominators: scale down before dividing.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    num_traits::pow(base.clone(), exp as usize)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-7/10"), Some(rat(-7, 10)));
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(6, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(rat(6, 4).to_string(), "3/2");
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!(rat(1, -3).to_string(), "-1/3");
    }
}
