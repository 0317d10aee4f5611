//! Guaranteed enclosures of real numbers.
//!
//! A [`Real`] is a closed interval `[lo, hi] · 2^-scale` with big-integer
//! endpoints. Every operation rounds outward, so the true value of any
//! expression built from exact rationals, `ln` and `exp` always lies inside
//! the returned interval.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default number of significant binary digits for diagnostic reals.
pub const DEFAULT_PRECISION: u32 = 128;

/// Extra fixed-point bits carried on top of the requested precision.
pub const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    lo: BigInt,
    hi: BigInt,
    scale: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `2·atanh(zn/zd)` at fixed point `wp`, for `0 ≤ zn/zd ≤ 1/3`.
/// Returns the value and an error bound in units of `2^-wp`.
fn two_atanh_fixed(zn: &BigInt, zd: &BigInt, wp: u32) -> (BigInt, u64) {
    let z = floor_div(&(zn << wp as usize), zd);
    let z2 = (&z * &z) >> wp as usize;
    let mut p = z.clone();
    let mut sum = z;
    let mut j: u64 = 1;
    loop {
        p = (&p * &z2) >> wp as usize;
        if p.is_zero() {
            break;
        }
        sum += &p / BigInt::from(2 * j + 1);
        j += 1;
    }
    // Each term carries at most ~3.25 ulp of rounding error; the tail after
    // `p` vanishes is below 2 ulp.
    (sum * 2, 2 * (4 * j + 4))
}

fn ln2_fixed(wp: u32) -> (BigInt, u64) {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, u64)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&wp) {
        return v.clone();
    }
    let v = two_atanh_fixed(&BigInt::one(), &BigInt::from(3), wp);
    cache.lock().unwrap().insert(wp, v.clone());
    v
}

/// `ln(num/den)` at fixed point `wp` with an error bound in ulps.
fn ln_fixed(num: &BigUint, den: &BigUint, wp: u32) -> (BigInt, u64) {
    debug_assert!(!num.is_zero() && !den.is_zero());
    let mut k = num.bits() as i64 - den.bits() as i64;
    let scaled = |k: i64| -> (BigInt, BigInt) {
        let (a, b) = if k >= 0 {
            (num.clone(), den << k as usize)
        } else {
            (num << (-k) as usize, den.clone())
        };
        (BigInt::from(a), BigInt::from(b))
    };
    let (mut a, mut b) = scaled(k);
    if a < b {
        k -= 1;
        (a, b) = scaled(k);
    }
    debug_assert!(a >= b && a < &b * 2);
    let (frac, frac_err) = two_atanh_fixed(&(&a - &b), &(&a + &b), wp);
    let (ln2, ln2_err) = ln2_fixed(wp);
    let value = frac + ln2 * BigInt::from(k);
    (value, frac_err + k.unsigned_abs() * ln2_err)
}

/// `exp(x · 2^-wp)` at fixed point `wp`; returns value and error in ulps.
fn exp_fixed(x: &BigInt, wp: u32) -> (BigInt, BigInt) {
    let (ln2, ln2_err) = ln2_fixed(wp);
    let k = floor_div(x, &ln2);
    let r = x - &k * &ln2;
    let one = pow2(wp);
    let mut sum = one.clone();
    let mut term = one;
    let mut j: u64 = 1;
    loop {
        term = ((&term * &r) >> wp as usize) / BigInt::from(j);
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    let k_abs = k.abs();
    // series rounding + sensitivity of exp(r) (< 2) to the error in k·ln2
    let err = BigInt::from(2 * j + 3) + &k_abs * BigInt::from(2 * ln2_err);
    let k_i = k.to_i64().expect("exponent of exp() argument out of range");
    if k_i >= 0 {
        (sum << k_i as usize, err << k_i as usize)
    } else {
        let sh = (-k_i) as usize;
        ((sum >> sh), (err >> sh) + 1)
    }
}

impl Real {
    fn with_scale(lo: BigInt, hi: BigInt, scale: u32) -> Self {
        debug_assert!(lo <= hi);
        Real { lo, hi, scale }
    }

    /// Tightest enclosure of `q` at `precision + GUARD_BITS` fixed-point bits.
    pub fn from_rational(q: &BigRational, precision: u32) -> Self {
        let scale = precision + GUARD_BITS;
        let n = q.numer() << scale as usize;
        let d = q.denom();
        Real::with_scale(floor_div(&n, d), ceil_div(&n, d), scale)
    }

    pub fn from_integer(v: i64, precision: u32) -> Self {
        let scale = precision + GUARD_BITS;
        let x = BigInt::from(v) << scale as usize;
        Real::with_scale(x.clone(), x, scale)
    }

    pub fn zero(precision: u32) -> Self {
        Real::from_integer(0, precision)
    }

    /// Fixed-point scale in bits.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.scale))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.scale))
    }

    /// Midpoint of the enclosure.
    pub fn value(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, pow2(self.scale + 1))
    }

    /// Half-width of the enclosure: `|value() − exact| ≤ error()`.
    pub fn error(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, pow2(self.scale + 1))
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }

    pub fn error_f64(&self) -> f64 {
        self.error().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lower() <= q && q <= &self.upper()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// True when every point of `self` is `≤` every point of `other`.
    pub fn certainly_le(&self, other: &Real) -> bool {
        self.upper() <= other.lower()
    }

    fn aligned(&self, other: &Real) -> (Real, Real) {
        let s = self.scale.min(other.scale);
        (self.rescaled(s), other.rescaled(s))
    }

    fn rescaled(&self, scale: u32) -> Real {
        if scale == self.scale {
            return self.clone();
        }
        let d = pow2(self.scale - scale);
        Real::with_scale(floor_div(&self.lo, &d), ceil_div(&self.hi, &d), scale)
    }

    pub fn add(&self, other: &Real) -> Real {
        let (a, b) = self.aligned(other);
        Real::with_scale(&a.lo + &b.lo, &a.hi + &b.hi, a.scale)
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Real {
        Real::with_scale(-&self.hi, -&self.lo, self.scale)
    }

    pub fn mul(&self, other: &Real) -> Real {
        let (a, b) = self.aligned(other);
        let d = pow2(a.scale);
        let prods = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let lo = prods.iter().map(|p| floor_div(p, &d)).min().unwrap();
        let hi = prods.iter().map(|p| ceil_div(p, &d)).max().unwrap();
        Real::with_scale(lo, hi, a.scale)
    }

    /// Quotient; fails when the divisor's enclosure contains zero.
    pub fn div(&self, other: &Real) -> Result<Real> {
        let (a, b) = self.aligned(other);
        if !(b.lo.is_positive() || b.hi.is_negative()) {
            return Err(Error::Precision("divisor enclosure contains zero".into()));
        }
        let s = a.scale as usize;
        let quots = [
            (&a.lo, &b.lo),
            (&a.lo, &b.hi),
            (&a.hi, &b.lo),
            (&a.hi, &b.hi),
        ];
        let lo = quots
            .iter()
            .map(|(x, y)| floor_div(&(*x << s), y))
            .min()
            .unwrap();
        let hi = quots
            .iter()
            .map(|(x, y)| ceil_div(&(*x << s), y))
            .max()
            .unwrap();
        Ok(Real::with_scale(lo, hi, a.scale))
    }

    pub fn mul_rational(&self, q: &BigRational) -> Real {
        let (n, d) = (q.numer(), q.denom());
        let a = &self.lo * n;
        let b = &self.hi * n;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Real::with_scale(floor_div(&a, d), ceil_div(&b, d), self.scale)
    }

    /// Natural logarithm; the enclosure must be strictly positive.
    pub fn ln(&self) -> Result<Real> {
        if !self.lo.is_positive() {
            return Err(Error::Domain("ln of a non-positive enclosure".into()));
        }
        let den = BigUint::one() << self.scale as usize;
        let lo = self.lo.magnitude();
        let hi = self.hi.magnitude();
        let (l, le) = ln_fixed(lo, &den, self.scale);
        let (h, he) = if lo == hi {
            (l.clone(), le)
        } else {
            ln_fixed(hi, &den, self.scale)
        };
        Ok(Real::with_scale(
            l - BigInt::from(le),
            h + BigInt::from(he),
            self.scale,
        ))
    }

    /// `ln` of an exact positive rational.
    pub fn ln_rational(q: &BigRational, precision: u32) -> Result<Real> {
        if !q.is_positive() {
            return Err(Error::Domain(format!("ln of non-positive value {q}")));
        }
        let scale = precision + GUARD_BITS;
        let (v, e) = ln_fixed(q.numer().magnitude(), q.denom().magnitude(), scale);
        let e = BigInt::from(e);
        Ok(Real::with_scale(&v - &e, v + e, scale))
    }

    /// `ln(num/den)` for positive integers that need not be coprime.
    pub fn ln_fraction(num: &BigUint, den: &BigUint, precision: u32) -> Result<Real> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::Domain("ln of a zero fraction".into()));
        }
        let scale = precision + GUARD_BITS;
        let (v, e) = ln_fixed(num, den, scale);
        let e = BigInt::from(e);
        Ok(Real::with_scale(&v - &e, v + e, scale))
    }

    pub fn exp(&self) -> Real {
        let (l, le) = exp_fixed(&self.lo, self.scale);
        let (h, he) = if self.lo == self.hi {
            (l.clone(), le.clone())
        } else {
            exp_fixed(&self.hi, self.scale)
        };
        let lo = (l - le).max(BigInt::zero());
        Real::with_scale(lo, h + he, self.scale)
    }

    /// `self^e = exp(e · ln self)` for a positive enclosure.
    pub fn powr(&self, e: &BigRational) -> Result<Real> {
        Ok(self.ln()?.mul_rational(e).exp())
    }

    /// `max(1, self)`.
    pub fn max_one(&self) -> Real {
        let one = pow2(self.scale);
        Real::with_scale(
            self.lo.clone().max(one.clone()),
            self.hi.clone().max(one),
            self.scale,
        )
    }

    /// Floor of the enclosed value. Refuses to answer when the enclosure
    /// comes within `2^-guard_bits` of an integer.
    pub fn floor_guarded(&self, guard_bits: u32) -> Result<BigInt> {
        if guard_bits >= self.scale {
            return Err(Error::Precision(format!(
                "working precision {} too small for a 2^-{guard_bits} floor guard",
                self.scale
            )));
        }
        let one = pow2(self.scale);
        let margin = pow2(self.scale - guard_bits);
        let f_lo = floor_div(&self.lo, &one);
        let f_hi = floor_div(&self.hi, &one);
        let near_lo = &self.lo - &f_lo * &one < margin;
        let near_hi = (&f_hi + 1) * &one - &self.hi <= margin;
        if f_lo != f_hi || near_lo || near_hi {
            return Err(Error::Precision(format!(
                "value ≈ {} lies within 2^-{guard_bits} of an integer",
                self.to_f64()
            )));
        }
        Ok(f_lo)
    }
}

/// `ln x` with the convention `log x := max(1, ln x)`, for `x ≥ 1`-ish
/// rationals; values `x ≤ e` map to exactly 1.
pub fn log_floor_rational(x: &BigRational, precision: u32) -> Result<Real> {
    Ok(Real::ln_rational(x, precision)?.max_one())
}

/// Same convention applied to an enclosure.
pub fn log_floor(x: &Real) -> Result<Real> {
    Ok(x.ln()?.max_one())
}

/// Decimal rendering of an exact rational with `digits` fractional digits,
/// rounded half away from zero.
pub fn decimal_string(q: &BigRational, digits: usize) -> String {
    let scale = num::pow(BigInt::from(10), digits);
    let scaled = q * BigRational::from_integer(scale.clone());
    let r = scaled.round().to_integer();
    let neg = r.is_negative();
    let s = r.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} ± {:.2e}", self.to_f64(), self.error_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn close(x: &Real, v: f64, tol: f64) -> bool {
        (x.to_f64() - v).abs() <= tol
    }

    #[test]
    fn ln_small_values() {
        let l2 = Real::ln_rational(&q(2, 1), 128).unwrap();
        assert!(close(&l2, std::f64::consts::LN_2, 1e-15));
        assert!(l2.error_f64() < 1e-38);
        let l = Real::ln_rational(&q(1, 1), 128).unwrap();
        assert!(l.contains(&q(0, 1)));
        let l = Real::ln_rational(&q(3, 7), 128).unwrap();
        assert!(close(&l, (3.0f64 / 7.0).ln(), 1e-15));
        assert!(Real::ln_rational(&q(0, 1), 128).is_err());
    }

    #[test]
    fn exp_inverts_ln() {
        for (n, d) in [(1, 1), (5, 2), (-7, 3), (40, 1), (1, 1000)] {
            let x = Real::from_rational(&q(n, d), 128);
            let back = x.exp().ln().unwrap();
            assert!(back.contains(&q(n, d)), "{n}/{d}: {back}");
            assert!(back.error_f64() < 1e-30);
        }
    }

    #[test]
    fn exp_one_matches_e() {
        let e = Real::from_integer(1, 128).exp();
        assert!(close(&e, std::f64::consts::E, 1e-15));
    }

    #[test]
    fn division_and_floor() {
        let a = Real::from_rational(&q(22, 7), 128);
        let b = Real::from_integer(2, 128);
        let c = a.div(&b).unwrap();
        assert!(c.contains(&q(11, 7)));
        assert_eq!(c.floor_guarded(64).unwrap(), BigInt::from(1));
        assert!(Real::from_integer(3, 128).floor_guarded(64).is_err());
        assert!(a.div(&Real::zero(128)).is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&q(1, 3), 4), "0.3333");
        assert_eq!(decimal_string(&q(-5, 2), 2), "-2.50");
        assert_eq!(decimal_string(&q(7, 1), 0), "7");
    }
}
