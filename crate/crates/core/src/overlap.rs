//! Pairwise overlap analysis of `E_m^(k)` and `E_n^(k)`, the sets built with
//! radius `ψ/ê_k`.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, One, Zero};
use rayon::prelude::*;

use crate::arith::{exp_rational, int, integral_s, Factorization, Rational};
use crate::circle::{build_e, CircleIntervalSet};
use crate::error::{Error, Result};
use crate::real::{log_floor, Real};
use crate::schedule::PsiFunction;

/// The split `m·n = r²·s·t` with `g = (m, n) = r·s`: `r` collects primes
/// with equal exponents in `m` and `n`, `s` and `t` the smaller and larger
/// exponents of the remaining primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDecomposition {
    pub m: u64,
    pub n: u64,
    pub fm: Factorization,
    pub fn_: Factorization,
    pub r: u64,
    pub s: u64,
    pub t: u64,
    pub g: u64,
    /// Primes whose exponents in `m` and `n` differ, i.e. the primes of `t/s`.
    pub unequal_primes: Vec<u64>,
    pub psi_m: Rational,
    pub psi_n: Rational,
    pub delta: Rational,
    pub big_delta: Rational,
}

impl PairDecomposition {
    pub fn new(m: u64, n: u64, psi_m: Rational, psi_n: Rational) -> Result<Self> {
        Self::from_factorizations(&Factorization::of(m)?, &Factorization::of(n)?, psi_m, psi_n)
    }

    pub fn from_factorizations(
        fm: &Factorization,
        fn_: &Factorization,
        psi_m: Rational,
        psi_n: Rational,
    ) -> Result<Self> {
        let (m, n) = (fm.value(), fn_.value());
        if m == n {
            return Err(Error::Domain(format!(
                "overlap pair needs m ≠ n, got m = n = {m}"
            )));
        }
        let (mut r, mut s, mut t) = (1u64, 1u64, 1u64);
        let mut unequal_primes = Vec::new();
        let (a, b) = (fm.factors(), fn_.factors());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (p, u, v) = match (a.get(i), b.get(j)) {
                (Some(&(p, u)), Some(&(q, v))) if p == q => {
                    i += 1;
                    j += 1;
                    (p, u, v)
                }
                (Some(&(p, u)), Some(&(q, _))) if p < q => {
                    i += 1;
                    (p, u, 0)
                }
                (Some(&(p, u)), None) => {
                    i += 1;
                    (p, u, 0)
                }
                (_, Some(&(q, v))) => {
                    j += 1;
                    (q, 0, v)
                }
                (None, None) => unreachable!(),
            };
            if u == v {
                r *= p.pow(u);
            } else {
                s *= p.pow(u.min(v));
                t *= p.pow(u.max(v));
                unequal_primes.push(p);
            }
        }
        let qm = &psi_m / int(m);
        let qn = &psi_n / int(n);
        let (delta, big_delta) = if qm <= qn { (qm, qn) } else { (qn, qm) };
        Ok(PairDecomposition {
            m,
            n,
            fm: fm.clone(),
            fn_: fn_.clone(),
            r,
            s,
            t,
            g: r * s,
            unequal_primes,
            psi_m,
            psi_n,
            delta,
            big_delta,
        })
    }

    /// `t/s = m·n/g²`.
    pub fn t_over_s(&self) -> u64 {
        self.t / self.s
    }

    /// Checks every structural identity of the decomposition, including
    /// `φ(s)·φ(r)²·φ(t) = φ(m)·φ(n)`.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::Domain(format!(
                "decomposition of ({}, {}) violates {what}",
                self.m, self.n
            )))
        };
        let (m, n, r, s, t) = (
            self.m as u128,
            self.n as u128,
            self.r as u128,
            self.s as u128,
            self.t as u128,
        );
        if m * n != r * r * s * t {
            return fail("m·n = r²·s·t");
        }
        if self.g != crate::arith::gcd(self.m, self.n) || self.g as u128 != r * s {
            return fail("gcd = r·s");
        }
        if t % s != 0 || (t / s) * (self.g as u128).pow(2) != m * n {
            return fail("t/s = m·n/g²");
        }
        for &p in &self.unequal_primes {
            if self.fm.exponent(p) == self.fn_.exponent(p) || t % p as u128 != 0 {
                return fail("unequal exponents on the primes of t");
            }
        }
        let phi = |x: u64| Factorization::of(x).map(|f| f.phi() as u128);
        if phi(self.s)? * phi(self.r)?.pow(2) * phi(self.t)?
            != self.fm.phi() as u128 * self.fn_.phi() as u128
        {
            return fail("φ(s)·φ(r)²·φ(t) = φ(m)·φ(n)");
        }
        if self.delta > self.big_delta {
            return fail("δ ≤ Δ");
        }
        Ok(())
    }
}

/// Decomposes `(m, n)` with the values of ψ at both points.
pub fn decompose_pair(m: u64, n: u64, psi: &PsiFunction) -> Result<PairDecomposition> {
    PairDecomposition::new(m, n, psi.value(m)?, psi.value(n)?)
}

/// `D_k = max(n·ψ(m), m·ψ(n)) / (ê_k · g)`; `k = 0` gives `D(m, n)`.
pub fn scaled_d(dec: &PairDecomposition, k: u64) -> Rational {
    let a = int(dec.n) * &dec.psi_m;
    let b = int(dec.m) * &dec.psi_n;
    a.max(b) / (exp_rational(k) * int(dec.g))
}

/// `Π_{p | t/s, p > D_k} (1 − 1/p)^{-1}`.
pub fn pv_bound(dec: &PairDecomposition, k: u64) -> Rational {
    let d = scaled_d(dec, k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for &p in &dec.unequal_primes {
        if int(p) > d {
            num *= p;
            den *= p - 1;
        }
    }
    Rational::new(num, den)
}

/// `4·Δ·r·t/ê_k`, the upper end of the overlap integral.
pub fn window(dec: &PairDecomposition, k: u64) -> Rational {
    int(4 * dec.r) * int(dec.t) * &dec.big_delta / exp_rational(k)
}

/// `2·Δ·r·t/ê_k ≤ 1`. When this holds the two scaled sets are disjoint,
/// since distinct centres `a/m`, `b/n` are at least `1/(r·t)` apart.
pub fn disjoint_predicted(dec: &PairDecomposition, k: u64) -> bool {
    int(2 * dec.r) * int(dec.t) * &dec.big_delta <= exp_rational(k)
}

/// `(t/φ(t)) · ∫_1^W S_t(θ) dθ / (Δ·r·t/ê_k)` with `W = 4Δrt/ê_k`; 0 when
/// `W ≤ 1`.
pub fn integral_bound(dec: &PairDecomposition, k: u64, precision: u32) -> Result<Real> {
    let w = window(dec, k);
    if w <= Rational::one() {
        return Ok(Real::zero(precision));
    }
    let ft = Factorization::of(dec.t)?;
    let integral = integral_s(dec.t, &w, precision)?;
    // t/φ(t) · 4/W
    let factor = int(dec.t) / int(ft.phi()) * int(4) / w;
    Ok(integral.mul_rational(&factor))
}

/// Position of `W = 4Δrt/ê_k` relative to the window `[1, ê_K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ThresholdClass {
    Below1,
    InWindow,
    AboveWindow,
}

impl ThresholdClass {
    pub fn of(dec: &PairDecomposition, k: u64, k_max: u64) -> Self {
        let w = window(dec, k);
        if w < Rational::one() {
            ThresholdClass::Below1
        } else if w < exp_rational(k_max) {
            ThresholdClass::InWindow
        } else {
            ThresholdClass::AboveWindow
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdClass::Below1 => "below-1",
            ThresholdClass::InWindow => "in-window",
            ThresholdClass::AboveWindow => "above-window",
        }
    }
}

impl fmt::Display for ThresholdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `λ(A ∩ B) / (λ(A)·λ(B))`.
pub fn overlap_ratio(a: &CircleIntervalSet, b: &CircleIntervalSet) -> Result<Rational> {
    let (ma, mb) = (a.measure(), b.measure());
    if ma.is_zero() || mb.is_zero() {
        return Err(Error::UndefinedRatio(
            "overlap ratio of a zero-measure set".into(),
        ));
    }
    Ok(a.intersection_measure(b) / (ma * mb))
}

/// `E_n^(k)`: radius `ψ(n)/ê_k`.
pub fn scaled_set(n: u64, psi_n: &Rational, k: u64) -> Result<CircleIntervalSet> {
    build_e(n, &(psi_n / exp_rational(k)))
}

/// Exact `P_k(m, n)`.
pub fn exact_p(m: u64, n: u64, psi: &PsiFunction, k: u64) -> Result<Rational> {
    let a = scaled_set(m, &psi.value(m)?, k)?;
    let b = scaled_set(n, &psi.value(n)?, k)?;
    overlap_ratio(&a, &b)
}

/// `E_n^(k)` for a fixed set of `n` and every `k` in `k_lo..=k_hi`.
#[derive(Clone, Debug)]
pub struct ScaledSets {
    k_lo: u64,
    k_hi: u64,
    index: HashMap<u64, usize>,
    sets: Vec<Vec<CircleIntervalSet>>,
}

impl ScaledSets {
    pub fn build(psi: &PsiFunction, ns: &[u64], k_lo: u64, k_hi: u64) -> Result<Self> {
        let sets = ns
            .par_iter()
            .map(|&n| {
                let v = psi.value(n)?;
                (k_lo..=k_hi).map(|k| scaled_set(n, &v, k)).collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        let index = ns.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        Ok(ScaledSets {
            k_lo,
            k_hi,
            index,
            sets,
        })
    }

    pub fn k_range(&self) -> (u64, u64) {
        (self.k_lo, self.k_hi)
    }

    pub fn try_get(&self, n: u64, k: u64) -> Option<&CircleIntervalSet> {
        if k < self.k_lo {
            return None;
        }
        self.sets
            .get(*self.index.get(&n)?)?
            .get((k - self.k_lo) as usize)
    }

    /// Panics if `n` or `k` was not built.
    pub fn get(&self, n: u64, k: u64) -> &CircleIntervalSet {
        self.try_get(n, k)
            .unwrap_or_else(|| panic!("E_{n}^({k}) not in cache"))
    }
}

/// One `(m, n, k)` row.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapRecord {
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub s: u64,
    pub t: u64,
    pub g: u64,
    pub delta: Rational,
    pub big_delta: Rational,
    pub d_k: Rational,
    pub pv_product: Rational,
    /// `P_k`, with 0 when either set has measure zero.
    pub p_exact: Rational,
    /// False when `P_k` was undefined and recorded as 0.
    pub p_defined: bool,
    pub integral_bound: Option<Real>,
    pub disjoint_predicted: bool,
    pub threshold_class: ThresholdClass,
}

impl OverlapRecord {
    /// Builds the row from the two scaled sets. The integral bound is only
    /// computed when `precision` is given.
    pub fn new(
        dec: &PairDecomposition,
        a: &CircleIntervalSet,
        b: &CircleIntervalSet,
        k: u64,
        k_max: u64,
        precision: Option<u32>,
    ) -> Result<Self> {
        let (p_exact, p_defined) = match overlap_ratio(a, b) {
            Ok(p) => (p, true),
            Err(Error::UndefinedRatio(_)) => (Rational::zero(), false),
            Err(e) => return Err(e),
        };
        let disjoint = disjoint_predicted(dec, k);
        if disjoint && !p_exact.is_zero() {
            return Err(Error::Domain(format!(
                "({}, {}, k = {k}) predicted disjoint but P_k = {p_exact}",
                dec.m, dec.n
            )));
        }
        Ok(OverlapRecord {
            m: dec.m,
            n: dec.n,
            k,
            r: dec.r,
            s: dec.s,
            t: dec.t,
            g: dec.g,
            delta: &dec.delta / exp_rational(k),
            big_delta: &dec.big_delta / exp_rational(k),
            d_k: scaled_d(dec, k),
            pv_product: pv_bound(dec, k),
            p_exact,
            p_defined,
            integral_bound: precision.map(|p| integral_bound(dec, k, p)).transpose()?,
            disjoint_predicted: disjoint,
            threshold_class: ThresholdClass::of(dec, k, k_max),
        })
    }

    /// Convenience constructor that builds the sets itself.
    pub fn compute(
        m: u64,
        n: u64,
        psi: &PsiFunction,
        k: u64,
        k_max: u64,
        precision: Option<u32>,
    ) -> Result<Self> {
        let dec = decompose_pair(m, n, psi)?;
        let a = scaled_set(m, &dec.psi_m, k)?;
        let b = scaled_set(n, &dec.psi_n, k)?;
        Self::new(&dec, &a, &b, k, k_max, precision)
    }
}

/// Result of [`averaged_sum`].
#[derive(Clone, Debug)]
pub struct AveragedSum {
    /// `Σ_{k=1}^K P_k(m, n)`.
    pub total: Rational,
    pub per_k: Vec<OverlapRecord>,
    /// `log K · log log n` with `log x = max(1, ln x)`.
    pub endup_bound: Real,
}

impl AveragedSum {
    pub fn mean(&self) -> Rational {
        &self.total / int(self.per_k.len() as u64)
    }
}

/// `Σ_{k=1}^K P_k(m, n)` with one record per `k`.
pub fn averaged_sum(
    m: u64,
    n: u64,
    psi: &PsiFunction,
    k_max: u64,
    precision: Option<u32>,
) -> Result<AveragedSum> {
    if k_max == 0 {
        return Err(Error::Domain("averaged sum needs K ≥ 1".into()));
    }
    let dec = decompose_pair(m, n, psi)?;
    let per_k = (1..=k_max)
        .map(|k| {
            let a = scaled_set(m, &dec.psi_m, k)?;
            let b = scaled_set(n, &dec.psi_n, k)?;
            OverlapRecord::new(&dec, &a, &b, k, k_max, precision)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = per_k.iter().map(|r| &r.p_exact).sum();
    Ok(AveragedSum {
        total,
        per_k,
        endup_bound: endup_bound(
            k_max,
            n,
            precision.unwrap_or(crate::real::DEFAULT_PRECISION),
        )?,
    })
}

/// `log K · log log n` with `log x = max(1, ln x)`.
pub fn endup_bound(k_max: u64, n: u64, precision: u32) -> Result<Real> {
    let lk = log_floor(&Real::from_rational(&int(k_max), precision))?;
    let ln = log_floor(&Real::from_rational(&int(n), precision))?;
    Ok(lk.mul(&log_floor(&ln)?))
}
