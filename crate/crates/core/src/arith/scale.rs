use std::sync::OnceLock;

use num::{BigInt, One};

use super::Rational;
use crate::real::Real;

/// Bits kept in the mantissa of each `ê_k`; relative error `≤ 2^-48`.
pub const SCALE_MANTISSA_BITS: u64 = 48;

const CACHED: usize = 512;

fn compute_exp(k: u64) -> Rational {
    if k == 0 {
        return Rational::one();
    }
    let e = Real::from_integer(k as i64, 160).exp();
    let v = e.value();
    let int_bits = v.floor().to_integer().bits() as i64;
    let shift = SCALE_MANTISSA_BITS as i64 - int_bits;
    let two = Rational::from_integer(BigInt::from(2));
    let factor = num::pow(two, shift.unsigned_abs() as usize);
    if shift >= 0 {
        (v * &factor).round() / factor
    } else {
        (v / &factor).round() * factor
    }
}

fn cache() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| (0..CACHED as u64).map(compute_exp).collect())
}

/// Rational stand-in `ê_k` for `e^k` with `|ê_k − e^k| ≤ e^k · 2^-48`.
///
/// `ê_0 = 1` exactly and the sequence is strictly increasing. Values are
/// dyadic (`mantissa · 2^j`) so scaled radii keep small denominators.
pub fn exp_rational(k: u64) -> Rational {
    match cache().get(k as usize) {
        Some(v) => v.clone(),
        None => compute_exp(k),
    }
}

/// The ladder `ê_1, …, ê_K` used for one averaging run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleLadder {
    approx: Vec<Rational>,
}

impl ScaleLadder {
    pub fn new(k_max: u64) -> Self {
        assert!(k_max >= 1, "a scale ladder needs K ≥ 1");
        ScaleLadder {
            approx: (1..=k_max).map(exp_rational).collect(),
        }
    }

    pub fn k_max(&self) -> u64 {
        self.approx.len() as u64
    }

    /// `ê_k`; `k = 0` gives 1.
    pub fn get(&self, k: u64) -> Rational {
        if k == 0 {
            Rational::one()
        } else {
            self.approx
                .get(k as usize - 1)
                .cloned()
                .unwrap_or_else(|| exp_rational(k))
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.approx
    }

    pub fn is_increasing(&self) -> bool {
        self.approx.windows(2).all(|w| w[0] < w[1]) && self.approx[0] > Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigUint, Signed, ToPrimitive};

    /// Independent oracle: `e ≈ Σ_{j ≤ 40} 1/j!` (error below 10^-47).
    fn e_series() -> Rational {
        let mut sum = Rational::one();
        let mut fact = BigUint::one();
        for j in 1u32..=40 {
            fact *= j;
            sum += Rational::new(BigInt::one(), BigInt::from(fact.clone()));
        }
        sum
    }

    fn rel_err(a: &Rational, b: &Rational) -> Rational {
        ((a - b) / b).abs()
    }

    fn tol() -> Rational {
        Rational::new(BigInt::one(), num::pow(BigInt::from(10), 12))
    }

    #[test]
    fn zero_is_exact() {
        assert_eq!(exp_rational(0), Rational::one());
    }

    #[test]
    fn matches_series_oracle() {
        let e = e_series();
        for k in 0..=60u64 {
            let exact = num::pow(e.clone(), k as usize);
            let approx = exp_rational(k);
            let err = (&approx - &exact).abs();
            assert!(err <= &exact * tol(), "k = {k}");
        }
        let e1 = exp_rational(1).to_f64().unwrap();
        assert!((e1 - std::f64::consts::E).abs() < 1e-12);
        let e2 = exp_rational(2).to_f64().unwrap();
        assert!((e2 / std::f64::consts::E.powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_is_monotone_and_consistent() {
        let ladder = ScaleLadder::new(40);
        assert!(ladder.is_increasing());
        assert_eq!(ladder.k_max(), 40);
        assert_eq!(ladder.get(0), Rational::one());
        for j in 1..10 {
            for k in 1..10 {
                let prod = ladder.get(j) * ladder.get(k);
                let direct = ladder.get(j + k);
                assert!(rel_err(&prod, &direct) <= tol());
            }
        }
    }

    #[test]
    fn values_are_dyadic() {
        for k in [1u64, 5, 30, 60] {
            let v = exp_rational(k);
            assert!(v.denom().bits() <= 64);
            assert_eq!(v.denom() & (v.denom() - BigInt::one()), BigInt::from(0));
        }
    }
}
