//! Exact rational helpers: parsing, formatting, and accurate logs of big ratios.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"9/20"`, `"0.45"`, `"3"` or `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n.trim()).ok_or_else(bad)?;
        let d = parse_decimal(d.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    if shift >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if neg { -value } else { value })
}

/// `"a/b"`, or `"a"` for integers.
pub fn fmt_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact decimal when the denominator is of the form 2^a 5^b, otherwise `"a/b"`.
pub fn fmt_decimal(x: &Q) -> String {
    let mut d = x.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return fmt_rational(x);
    }
    places = places.max(twos).max(fives);
    if places == 0 {
        return x.numer().to_string();
    }
    let scaled = x * Q::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Balanced product of many big integers.
pub fn product<I>(items: I) -> BigUint
where
    I: IntoIterator<Item = BigUint>,
{
    let mut layer: Vec<BigUint> = items.into_iter().collect();
    if layer.is_empty() {
        return BigUint::one();
    }
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        layer = next;
    }
    layer.pop().unwrap()
}

/// `a / b` as a float without overflow, for arbitrarily large positive operands.
fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    let ab = a.bits() as i64;
    let bb = b.bits() as i64;
    // Scale so the integer quotient carries ~64 significant bits.
    let shift = 64 - (ab - bb);
    let quotient = if shift >= 0 {
        (a << (shift as usize)) / b
    } else {
        a / (b << ((-shift) as usize))
    };
    let qf = quotient.to_f64().unwrap_or(f64::INFINITY);
    qf * 2f64.powi(-(shift as i32))
}

/// `ln(a / b)` for positive big integers, with full relative precision even
/// when the ratio is extremely close to one.
pub fn ln_ratio(a: &BigUint, b: &BigUint) -> f64 {
    assert!(!a.is_zero() && !b.is_zero(), "ln_ratio of zero");
    match a.cmp(b) {
        std::cmp::Ordering::Equal => 0.0,
        ord => {
            let (hi, lo) = if ord.is_gt() { (a, b) } else { (b, a) };
            let diff = hi - lo;
            let x = ratio_f64(&diff, lo);
            let v = if x < 0.5 { x.ln_1p() } else { ratio_f64(hi, lo).ln() };
            if ord.is_gt() {
                v
            } else {
                -v
            }
        }
    }
}

/// Requires a nonnegative value with unit denominator.
pub fn to_biguint(x: &Q) -> Option<BigUint> {
    if !x.denom().is_one() || x.numer().sign() == Sign::Minus {
        return None;
    }
    x.numer().to_biguint()
}

pub fn in_unit_interval(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.45").unwrap(), q(9, 20));
        assert_eq!(parse_rational("9/20").unwrap(), q(9, 20));
        assert_eq!(parse_rational("1").unwrap(), qi(1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1e-2").unwrap(), q(1, 100));
        assert_eq!(parse_rational("0.5/2").unwrap(), q(1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_terminating_decimals() {
        assert_eq!(fmt_decimal(&q(9, 20)), "0.45");
        assert_eq!(fmt_decimal(&q(1, 100)), "0.01");
        assert_eq!(fmt_decimal(&q(1, 3)), "1/3");
        assert_eq!(fmt_decimal(&qi(2)), "2");
        assert_eq!(fmt_decimal(&q(-1, 8)), "-0.125");
        assert_eq!(fmt_rational(&q(10, 9)), "10/9");
    }

    #[test]
    fn ln_ratio_is_precise_near_one() {
        let big = BigUint::from(10u32).pow(40);
        let a = &big + BigUint::one();
        let v = ln_ratio(&a, &big);
        assert!((v - 1e-40).abs() <= 1e-52);
        assert!((ln_ratio(&BigUint::from(10u32), &BigUint::from(9u32)) - (10f64 / 9.0).ln()).abs() < 1e-15);
        assert!((ln_ratio(&BigUint::from(1u32), &BigUint::from(2u32)) + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn product_tree_matches_fold() {
        let xs: Vec<BigUint> = (1u32..40).map(BigUint::from).collect();
        let fold = xs.iter().fold(BigUint::one(), |a, b| a * b);
        assert_eq!(product(xs), fold);
    }
}
