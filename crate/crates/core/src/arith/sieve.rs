use num::{BigInt, BigUint, One, Zero};

use super::factor::{gcd, Factorization};
use super::primes::{euler_factor_product, primes_up_to, sieve_factor_product};
use super::{floor_u64, mertens_product, Rational};
use crate::error::{Error, Result};
use crate::real::Real;

/// `S_t(θ) = #{1 ≤ b ≤ θ : (b, t) = 1} / θ`.
pub fn coprime_count(t: u64, theta: &Rational) -> Result<Rational> {
    if theta < &Rational::one() {
        return Err(Error::Domain(format!(
            "coprime_count needs θ ≥ 1, got {theta}"
        )));
    }
    let count = (1..=floor_u64(theta)).filter(|&b| gcd(b, t) == 1).count();
    Ok(Rational::from_integer(BigInt::from(count)) / theta)
}

/// Precomputed `L / b` for `b ≤ max_b`, `L = lcm(1, …, max_b)`, so that
/// coprime harmonic sums reduce to big-integer additions.
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    lcm: BigUint,
    weights: Vec<BigUint>,
}

impl HarmonicTable {
    pub fn new(max_b: u64) -> Self {
        let mut lcm = BigUint::one();
        for p in primes_up_to(max_b) {
            let mut pk = p;
            while pk <= max_b / p {
                pk *= p;
            }
            lcm *= pk;
        }
        let weights = (0..=max_b)
            .map(|b| if b == 0 { BigUint::zero() } else { &lcm / b })
            .collect();
        HarmonicTable { lcm, weights }
    }

    pub fn max_b(&self) -> u64 {
        self.weights.len() as u64 - 1
    }

    /// `Σ_{1 ≤ b ≤ x, (b, t) = 1} 1/b` for each bound in `xs` (ascending).
    pub fn sums(&self, t: u64, xs: &[Rational]) -> Vec<Rational> {
        let mut acc = BigUint::zero();
        let mut b = 0u64;
        xs.iter()
            .map(|x| {
                let hi = floor_u64(x);
                assert!(hi <= self.max_b(), "harmonic table too small for bound {x}");
                while b < hi {
                    b += 1;
                    if gcd(b, t) == 1 {
                        acc += &self.weights[b as usize];
                    }
                }
                Rational::new(BigInt::from(acc.clone()), BigInt::from(self.lcm.clone()))
            })
            .collect()
    }

    pub fn sum(&self, t: u64, x: &Rational) -> Rational {
        self.sums(t, std::slice::from_ref(x)).pop().unwrap()
    }
}

/// `Σ_{1 ≤ b ≤ X, (b, t) = 1} 1/b`, exactly.
pub fn coprime_harmonic(t: u64, x: &Rational) -> Rational {
    HarmonicTable::new(floor_u64(x)).sum(t, x)
}

/// The logarithmic-weight sieve bound and its two-factor split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveBound {
    /// `Π_{p ≤ X, p ∤ t} (1 − 1/p)^{-1}`, computed directly.
    pub bound: Rational,
    /// `Π_{p ≤ X} (1 − 1/p)^{-1}`.
    pub mertens: Rational,
    /// `Π_{p ≤ X, p | t} (1 − 1/p)`.
    pub divisor_part: Rational,
}

impl SieveBound {
    /// The factorization identity `bound = mertens · divisor_part`.
    pub fn is_consistent(&self) -> bool {
        self.bound == &self.mertens * &self.divisor_part
    }
}

pub fn sieve_upper_bound(t: u64, x: &Rational) -> Result<SieveBound> {
    let f = Factorization::of(t)?;
    let xf = floor_u64(x);
    let primes = primes_up_to(xf);
    let bound = euler_factor_product(primes.iter().copied().filter(|&p| !t.is_multiple_of(p)));
    let divisor_part = sieve_factor_product(f.primes().filter(|&p| p <= xf));
    Ok(SieveBound {
        bound,
        mertens: mertens_product(x),
        divisor_part,
    })
}

fn product_tree(xs: &[u64]) -> BigUint {
    match xs.len() {
        0 => BigUint::one(),
        1 => BigUint::from(xs[0]),
        n => {
            let (a, b) = xs.split_at(n / 2);
            product_tree(a) * product_tree(b)
        }
    }
}

/// `∫_1^X S_t(θ) dθ = Σ_{1 ≤ b ≤ X, (b,t)=1} ln(X / b)` as a guaranteed
/// enclosure.
///
/// The sum is evaluated as the single logarithm `ln(X^c / Π b)` of an exact
/// (unreduced) fraction, so the enclosure width is that of one `ln` call.
pub fn integral_s(t: u64, x: &Rational, precision: u32) -> Result<Real> {
    if x <= &Rational::one() {
        return Ok(Real::zero(precision));
    }
    let bs: Vec<u64> = (1..=floor_u64(x)).filter(|&b| gcd(b, t) == 1).collect();
    let count = bs.len();
    let num = num::pow(x.numer().magnitude().clone(), count);
    let den = num::pow(x.denom().magnitude().clone(), count) * product_tree(&bs);
    Real::ln_fraction(&num, &den, precision)
}
