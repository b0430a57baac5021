//! Exact rational scalars.

use alloc::format;
use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Scalar field of every algebraic structure in this crate.
pub type Q = num_rational::BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `1/n!`
pub fn inv_factorial(n: usize) -> Q {
    let mut f = BigInt::one();
    for i in 2..=n {
        f *= BigInt::from(i);
    }
    Q::new(BigInt::one(), f)
}

/// `(-1)^e` as a scalar.
pub fn sign_q(negative: bool) -> Q {
    if negative {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Parse `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(Q::from_integer),
    }
}

/// Always emits the `p/q` form, denominator positive and reduced.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}
