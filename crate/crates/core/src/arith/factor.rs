use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Numbers below this bound are factored through a smallest-prime-factor
/// table; larger ones fall back to trial division.
const SPF_LIMIT: usize = 1 << 21;

fn spf_table() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut spf = vec![0u32; SPF_LIMIT];
        for i in 2..SPF_LIMIT {
            if spf[i] == 0 {
                let mut j = i;
                while j < SPF_LIMIT {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        spf
    })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic primality check.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if (n as usize) < SPF_LIMIT {
        return spf_table()[n as usize] as u64 == n;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization `value = Π p^e` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("cannot factor 0".into()));
        }
        let mut factors = Vec::new();
        let mut m = n;
        if (n as usize) < SPF_LIMIT {
            let spf = spf_table();
            while m > 1 {
                let p = spf[m as usize] as u64;
                let mut e = 0;
                while m.is_multiple_of(p) {
                    m /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
        } else {
            let mut p = 2u64;
            while p.saturating_mul(p) <= m {
                if m.is_multiple_of(p) {
                    let mut e = 0;
                    while m.is_multiple_of(p) {
                        m /= p;
                        e += 1;
                    }
                    factors.push((p, e));
                }
                p += if p == 2 { 1 } else { 2 };
            }
            if m > 1 {
                factors.push((m, 1));
            }
        }
        Ok(Factorization { value: n, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` (0 when `p` does not divide the value).
    pub fn exponent(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Euler's totient `n · Π_{p | n} (1 − 1/p)`, computed exactly.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Prime factorization of `n` together with `φ(n)`.
pub fn factor_phi(n: u64) -> Result<(Factorization, u64)> {
    let f = Factorization::of(n)?;
    let phi = f.phi();
    Ok((f, phi))
}

pub fn phi(n: u64) -> Result<u64> {
    Ok(factor_phi(n)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_phi(n: u64) -> u64 {
        (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64
    }

    #[test]
    fn spec_examples() {
        let (f, p) = factor_phi(1).unwrap();
        assert!(f.is_empty());
        assert_eq!(p, 1);

        let (f, p) = factor_phi(12).unwrap();
        assert_eq!(f.factors(), &[(2, 2), (3, 1)]);
        assert_eq!(p, brute_phi(12));
        assert_eq!(p, 4);

        let (f, p) = factor_phi(65536).unwrap();
        assert_eq!(f.factors(), &[(2, 16)]);
        assert_eq!(p, brute_phi(65536));
        assert_eq!(p, 32768);
    }

    #[test]
    fn zero_is_a_domain_error() {
        assert!(matches!(factor_phi(0), Err(Error::Domain(_))));
    }

    #[test]
    fn totient_matches_gcd_count_up_to_ten_thousand() {
        for n in 1..=10_000u64 {
            assert_eq!(phi(n).unwrap(), brute_phi(n), "n = {n}");
        }
    }

    #[test]
    fn totient_is_multiplicative() {
        for m in 1..=1000u64 {
            for n in (1..=1000u64).step_by(7) {
                if gcd(m, n) == 1 {
                    assert_eq!(phi(m * n).unwrap(), phi(m).unwrap() * phi(n).unwrap());
                }
            }
        }
    }

    #[test]
    fn large_values_use_trial_division() {
        let n = 4_294_967_291u64; // largest prime below 2^32
        let f = Factorization::of(n).unwrap();
        assert_eq!(f.factors(), &[(n, 1)]);
        assert!(is_prime(n));
        let f = Factorization::of(6_442_450_938).unwrap(); // 2 · 3 · 1073741823 = 2·3·3·7·11·31·151·331
        let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(prod, 6_442_450_938);
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn display() {
        assert_eq!(Factorization::of(12).unwrap().to_string(), "2^2·3");
        assert_eq!(Factorization::of(1).unwrap().to_string(), "1");
    }
}
