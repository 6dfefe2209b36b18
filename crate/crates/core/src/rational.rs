//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q`, `-p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let valid = |t: &str| {
        let t = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) {
        return None;
    }
    let n: BigInt = num.trim_start_matches('+').parse().ok()?;
    match den {
        None => Some(Q::from_integer(n)),
        Some(d) => {
            if !d.bytes().all(|b| b.is_ascii_digit()) || d.is_empty() {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
    }
}

/// Canonical `p/q` rendering (integers without denominator).
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact k-th root of a non-negative integer, if it exists.
fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Rational r with r^k = c and r ≥ 0 when k is even; `None` if no rational root exists.
pub fn rational_root(c: &Q, k: u32) -> Option<Q> {
    assert!(k > 0);
    if c.is_zero() {
        return Some(Q::zero());
    }
    let neg = c.is_negative();
    if neg && k % 2 == 0 {
        return None;
    }
    let a = c.abs();
    let n = int_root(a.numer(), k)?;
    let d = int_root(a.denom(), k)?;
    let r = Q::new(n, d);
    Some(if neg { -r } else { r })
}

/// c^e for a (possibly negative) integer exponent; c must be nonzero when e < 0.
pub fn pow_i(c: &Q, e: &BigInt) -> Q {
    let mag: u64 = e.abs().try_into().expect("exponent too large");
    let p = num_traits::pow(c.clone(), mag as usize);
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rational("-6/4"), Some(qf(-3, 2)));
        assert_eq!(fmt_q(&qf(-3, 2)), "-3/2");
        assert_eq!(fmt_q(&q(7)), "7");
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("a"), None);
        assert_eq!(parse_rational("--1"), None);
    }

    #[test]
    fn roots() {
        assert_eq!(rational_root(&qf(8, 27), 3), Some(qf(2, 3)));
        assert_eq!(rational_root(&q(-8), 3), Some(q(-2)));
        assert_eq!(rational_root(&q(16), 4), Some(q(2)));
        assert_eq!(rational_root(&q(-1), 2), None);
        assert_eq!(rational_root(&q(2), 2), None);
    }
}
