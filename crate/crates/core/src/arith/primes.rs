use num::{BigInt, BigUint, One};

use super::factor::Factorization;
use super::{floor_u64, Rational};
use crate::error::Result;

/// All primes `≤ x` in increasing order.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `Π (1 − 1/p)^{-1} = Π p/(p − 1)` over the given primes, exactly.
pub(crate) fn euler_factor_product<I: IntoIterator<Item = u64>>(primes: I) -> Rational {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for p in primes {
        num *= p;
        den *= p - 1;
    }
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `Π (1 − 1/p)` over the given primes, exactly.
pub(crate) fn sieve_factor_product<I: IntoIterator<Item = u64>>(primes: I) -> Rational {
    euler_factor_product(primes).recip()
}

/// `Π_{p ≤ x} (1 − 1/p)^{-1}`.
pub fn mertens_product(x: &Rational) -> Rational {
    euler_factor_product(primes_up_to(floor_u64(x)))
}

/// `Π_{p | t, p > lower} (1 − 1/p)^{-1}`.
pub fn restricted_prime_product(t: u64, lower: &Rational) -> Result<Rational> {
    let f = Factorization::of(t)?;
    Ok(euler_factor_product(
        f.primes()
            .filter(|&p| &Rational::from_integer(p.into()) > lower),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, is_prime, rat};

    #[test]
    fn mertens_examples() {
        assert_eq!(mertens_product(&int(1)), int(1));
        assert_eq!(mertens_product(&int(3)), int(3));
        assert_eq!(mertens_product(&int(10)), rat(35, 8));
        // direct product 2 · 3/2 · 5/4 · 7/6
        assert_eq!(rat(2, 1) * rat(3, 2) * rat(5, 4) * rat(7, 6), rat(35, 8));
        assert_eq!(mertens_product(&rat(0, 1)), int(1));
        assert_eq!(mertens_product(&rat(21, 2)), rat(35, 8));
    }

    #[test]
    fn restricted_examples() {
        assert_eq!(restricted_prime_product(1, &rat(0, 1)).unwrap(), int(1));
        assert_eq!(restricted_prime_product(36, &rat(5, 2)).unwrap(), rat(3, 2));
        assert_eq!(restricted_prime_product(15, &int(1)).unwrap(), rat(15, 8));
        assert_eq!(restricted_prime_product(15, &int(5)).unwrap(), int(1));
    }

    #[test]
    fn primes_are_prime() {
        let ps = primes_up_to(1000);
        assert_eq!(ps.len(), 168);
        assert!(ps.iter().all(|&p| is_prime(p)));
        assert!(primes_up_to(1).is_empty());
    }
}
