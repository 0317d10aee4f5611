//! Exact number-theoretic kernels.

mod factor;
mod primes;
mod scale;
mod sieve;

pub use factor::{factor_phi, gcd, is_prime, phi, Factorization};
pub use primes::{mertens_product, primes_up_to, restricted_prime_product};
pub use scale::{exp_rational, ScaleLadder, SCALE_MANTISSA_BITS};
pub use sieve::{
    coprime_count, coprime_harmonic, integral_s, sieve_upper_bound, HarmonicTable, SieveBound,
};

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal like `"0.25"` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Config(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = i.starts_with('-');
        let i: BigInt = if i.is_empty() || i == "-" {
            BigInt::zero()
        } else {
            i.parse().map_err(|_| bad())?
        };
        let f: BigInt = f.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), s.len() - s.find('.').unwrap() - 1);
        let frac = Rational::new(f, scale);
        let ip = Rational::from_integer(i.clone());
        return Ok(if neg || i < BigInt::zero() {
            ip - frac
        } else {
            ip + frac
        });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `"num/den"` rendering (denominator omitted never, so the output is
/// uniform for CSV consumers).
pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// `⌊q⌋` for a non-negative rational as `u64`, saturating.
pub(crate) fn floor_u64(q: &Rational) -> u64 {
    use num::ToPrimitive;
    if q < &Rational::one() {
        return 0;
    }
    q.floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn renders_rationals() {
        assert_eq!(rational_string(&rat(3, 1)), "3/1");
        assert_eq!(rational_string(&rat(-2, 4)), "-1/2");
    }
}
