//! Finite unions of half-open intervals on the circle ℝ/ℤ ≅ [0, 1).
//!
//! A [`CircleIntervalSet`] stores its endpoints as integers over one common
//! denominator. Canonical form: intervals sorted, pairwise separated by a
//! gap (touching neighbours are merged), and the denominator is minimal.
//! With that, structural equality coincides with set equality.

use std::borrow::Cow;
use std::ops::{Add, Sub};

use num::{BigInt, BigUint, Integer, One, ToPrimitive, Zero};

use crate::arith::{Factorization, Rational};
use crate::error::{Error, Result};

/// Largest common denominator (in bits) handled on the `u128` fast path.
const FAST_BITS: u64 = 126;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircleIntervalSet {
    repr: Repr,
}

/// Endpoints are flattened `[l0, r0, l1, r1, …]`, numerators over `den`.
/// `Small` is used exactly when `den` has at most `FAST_BITS` bits, so the
/// representation stays unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Small { den: u128, ends: Vec<u128> },
    Big { den: BigUint, ends: Vec<BigUint> },
}

trait Endpoint: Ord + Clone + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl Endpoint for u128 {}
impl Endpoint for BigUint {}

/// Merges intervals sorted by left endpoint; drops empty ones, joins
/// overlapping and touching ones.
fn merge_sorted<T: Endpoint>(ivs: impl IntoIterator<Item = (T, T)>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for (l, r) in ivs {
        if l >= r {
            continue;
        }
        match out.last_mut() {
            Some(last) if *last >= l => {
                if r > *last {
                    *last = r;
                }
            }
            _ => {
                out.push(l);
                out.push(r);
            }
        }
    }
    out
}

fn intersect_ends<T: Endpoint>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let l = if a[i] > b[j] { &a[i] } else { &b[j] };
        let (r, adv_a) = if a[i + 1] <= b[j + 1] {
            (&a[i + 1], true)
        } else {
            (&b[j + 1], false)
        };
        if l < r {
            out.push(l.clone());
            out.push(r.clone());
        }
        if adv_a {
            i += 2;
        } else {
            j += 2;
        }
    }
    out
}

/// Total length of `a·fa ∩ b·fb` without allocating; all products fit.
fn intersect_length_u128(a: &[u128], fa: u128, b: &[u128], fb: u128) -> u128 {
    let (mut i, mut j) = (0, 0);
    let mut total = 0u128;
    while i < a.len() && j < b.len() {
        let (al, ar) = (a[i] * fa, a[i + 1] * fa);
        let (bl, br) = (b[j] * fb, b[j + 1] * fb);
        let l = al.max(bl);
        let r = ar.min(br);
        if l < r {
            total += r - l;
        }
        if ar <= br {
            i += 2;
        } else {
            j += 2;
        }
    }
    total
}

fn total_length<T: Endpoint>(ends: &[T]) -> T {
    ends.chunks_exact(2)
        .fold(T::zero(), |acc, c| acc + (c[1].clone() - c[0].clone()))
}

fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

/// `lcm(a, b)` if it fits the fast path.
fn lcm_small(a: u128, b: u128) -> Option<u128> {
    let l = (a / a.gcd(&b)).checked_mul(b)?;
    (128 - l.leading_zeros() as u64 <= FAST_BITS).then_some(l)
}

impl CircleIntervalSet {
    pub fn empty() -> Self {
        CircleIntervalSet {
            repr: Repr::Small {
                den: 1,
                ends: Vec::new(),
            },
        }
    }

    /// The whole circle `[0, 1)`.
    pub fn full() -> Self {
        CircleIntervalSet {
            repr: Repr::Small {
                den: 1,
                ends: vec![0, 1],
            },
        }
    }

    /// Builds a canonical set from arbitrary intervals `[l, r)` with
    /// `0 ≤ l ≤ r ≤ 1`, in any order; overlaps are merged.
    pub fn from_intervals(ivs: &[(Rational, Rational)]) -> Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut den = BigUint::one();
        for (l, r) in ivs {
            if l < &zero || r > &one || l > r {
                return Err(Error::Domain(format!(
                    "[{l}, {r}) is not a sub-interval of [0, 1)"
                )));
            }
            den = lcm(&den, l.denom().magnitude());
            den = lcm(&den, r.denom().magnitude());
        }
        let scale =
            |q: &Rational| -> BigUint { q.numer().magnitude() * (&den / q.denom().magnitude()) };
        let mut scaled: Vec<(BigUint, BigUint)> =
            ivs.iter().map(|(l, r)| (scale(l), scale(r))).collect();
        scaled.sort();
        Ok(Self::canonical(den, merge_sorted(scaled)))
    }

    fn canonical(den: BigUint, ends: Vec<BigUint>) -> Self {
        if ends.is_empty() {
            return Self::empty();
        }
        let mut g = den.clone();
        for e in &ends {
            if g.is_one() {
                break;
            }
            g = g.gcd(e);
        }
        let (den, ends) = if g.is_one() {
            (den, ends)
        } else {
            (&den / &g, ends.into_iter().map(|e| e / &g).collect())
        };
        if den.bits() <= FAST_BITS {
            let small = ends.iter().map(|e| e.to_u128().unwrap()).collect();
            CircleIntervalSet {
                repr: Repr::Small {
                    den: den.to_u128().unwrap(),
                    ends: small,
                },
            }
        } else {
            CircleIntervalSet {
                repr: Repr::Big { den, ends },
            }
        }
    }

    fn canonical_u128(den: u128, mut ends: Vec<u128>) -> Self {
        if ends.is_empty() {
            return Self::empty();
        }
        let mut g = den;
        for e in &ends {
            if g == 1 {
                break;
            }
            g = g.gcd(e);
        }
        if g != 1 {
            ends.iter_mut().for_each(|e| *e /= g);
        }
        CircleIntervalSet {
            repr: Repr::Small { den: den / g, ends },
        }
    }

    pub fn denominator(&self) -> BigUint {
        match &self.repr {
            Repr::Small { den, .. } => BigUint::from(*den),
            Repr::Big { den, .. } => den.clone(),
        }
    }

    /// Endpoints as big integers; borrowed on the slow path.
    fn big_ends(&self) -> Cow<'_, [BigUint]> {
        match &self.repr {
            Repr::Small { ends, .. } => {
                Cow::Owned(ends.iter().map(|&e| BigUint::from(e)).collect())
            }
            Repr::Big { ends, .. } => Cow::Borrowed(ends),
        }
    }

    fn ends_len(&self) -> usize {
        match &self.repr {
            Repr::Small { ends, .. } => ends.len(),
            Repr::Big { ends, .. } => ends.len(),
        }
    }

    /// Number of maximal intervals.
    pub fn len(&self) -> usize {
        self.ends_len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ends_len() == 0
    }

    pub fn intervals(&self) -> Vec<(Rational, Rational)> {
        let den = BigInt::from(self.denominator());
        self.big_ends()
            .chunks_exact(2)
            .map(|c| {
                (
                    Rational::new(BigInt::from(c[0].clone()), den.clone()),
                    Rational::new(BigInt::from(c[1].clone()), den.clone()),
                )
            })
            .collect()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rational {
        let len = match &self.repr {
            Repr::Small { ends, .. } => BigUint::from(total_length(ends)),
            Repr::Big { ends, .. } => total_length(ends),
        };
        Rational::new(BigInt::from(len), BigInt::from(self.denominator()))
    }

    /// Membership of a point of `[0, 1)`.
    pub fn contains(&self, x: &Rational) -> bool {
        if x.numer().sign() == num::bigint::Sign::Minus {
            return false;
        }
        // x = p/q ∈ [l/d, r/d)  ⇔  l·q ≤ p·d < r·q
        let ends = self.big_ends();
        let p = x.numer().magnitude() * self.denominator();
        let q = x.denom().magnitude();
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if &ends[2 * mid + 1] * q <= p {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo < self.len() && &ends[2 * lo] * q <= p
    }

    /// Checks every canonical-form invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("non-canonical interval set: {m}")));
        let den = self.denominator();
        let small = matches!(self.repr, Repr::Small { .. });
        if small != (den.bits() <= FAST_BITS) {
            return bad("storage does not match denominator width");
        }
        if den.is_zero() {
            return bad("zero denominator");
        }
        let ends = self.big_ends();
        if !ends.len().is_multiple_of(2) {
            return bad("odd number of endpoints");
        }
        if ends.is_empty() {
            return if den.is_one() {
                Ok(())
            } else {
                bad("empty set with denominator ≠ 1")
            };
        }
        for c in ends.chunks_exact(2) {
            if c[0] >= c[1] {
                return bad("empty or reversed interval");
            }
        }
        for w in ends.windows(2).skip(1).step_by(2) {
            if w[0] >= w[1] {
                return bad("intervals overlap or touch");
            }
        }
        if ends.last().unwrap() > &den {
            return bad("interval leaves [0, 1)");
        }
        let g = ends.iter().fold(den, |g, e| g.gcd(e));
        if !g.is_one() {
            return bad("denominator not reduced");
        }
        Ok(())
    }

    fn scaled_big(&self, factor: &BigUint) -> Vec<BigUint> {
        self.big_ends().iter().map(|e| e * factor).collect()
    }

    /// Pointwise intersection, by a linear merge of the endpoint lists.
    pub fn intersect(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::empty();
        }
        if let (Repr::Small { den: da, ends: a }, Repr::Small { den: db, ends: b }) =
            (&self.repr, &other.repr)
        {
            if let Some(d) = lcm_small(*da, *db) {
                let a: Vec<u128> = a.iter().map(|e| e * (d / da)).collect();
                let b: Vec<u128> = b.iter().map(|e| e * (d / db)).collect();
                return Self::canonical_u128(d, intersect_ends(&a, &b));
            }
        }
        let (da, db) = (self.denominator(), other.denominator());
        let d = lcm(&da, &db);
        let a = self.scaled_big(&(&d / &da));
        let b = other.scaled_big(&(&d / &db));
        Self::canonical(d, intersect_ends(&a, &b))
    }

    /// `measure(intersect(self, other))` without materialising the set.
    pub fn intersection_measure(&self, other: &Self) -> Rational {
        if self.is_empty() || other.is_empty() {
            return Rational::zero();
        }
        if let (Repr::Small { den: da, ends: a }, Repr::Small { den: db, ends: b }) =
            (&self.repr, &other.repr)
        {
            if let Some(d) = lcm_small(*da, *db) {
                let len = intersect_length_u128(a, d / da, b, d / db);
                return Rational::new(BigInt::from(len), BigInt::from(d));
            }
        }
        let (da, db) = (self.denominator(), other.denominator());
        let d = lcm(&da, &db);
        let a = self.scaled_big(&(&d / &da));
        let b = other.scaled_big(&(&d / &db));
        let len = total_length(&intersect_ends(&a, &b));
        Rational::new(BigInt::from(len), BigInt::from(d))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        &self.intersect(other) == self
    }
}

/// Canonical approximation set
/// `⋃_{1 ≤ a ≤ n, (a,n)=1} ((a − ρ)/n, (a + ρ)/n)` mod 1 for radius `ρ`.
///
/// Radii above 1/2 are rejected; normalising ψ is the caller's job.
pub fn build_e(n: u64, radius: &Rational) -> Result<CircleIntervalSet> {
    if n == 0 {
        return Err(Error::Domain("build_E needs n ≥ 1".into()));
    }
    if radius < &Rational::zero() {
        return Err(Error::Domain(format!("negative radius {radius}")));
    }
    if radius * Rational::from_integer(2.into()) > Rational::one() {
        return Err(Error::Domain(format!(
            "radius {radius} exceeds 1/2; normalise ψ first"
        )));
    }
    if radius.is_zero() {
        return Ok(CircleIntervalSet::empty());
    }
    let p = radius.numer().magnitude();
    let q = radius.denom().magnitude();
    let den = q * n;
    let mut is_coprime = vec![true; n as usize + 1];
    for p in Factorization::of(n)?.primes() {
        (p..=n)
            .step_by(p as usize)
            .for_each(|a| is_coprime[a as usize] = false);
    }
    let coprime = (1..=n).filter(|&a| is_coprime[a as usize]);
    if den.bits() <= FAST_BITS {
        let (p, q, den) = (
            p.to_u128().unwrap(),
            q.to_u128().unwrap(),
            den.to_u128().unwrap(),
        );
        let mut ivs: Vec<(u128, u128)> = Vec::new();
        let mut wrapped = None;
        for a in coprime {
            let c = a as u128 * q;
            let (l, r) = (c - p, c + p);
            if r > den {
                wrapped = Some((0, r - den));
                ivs.push((l, den));
            } else {
                ivs.push((l, r));
            }
        }
        if let Some(w) = wrapped {
            ivs.insert(0, w);
        }
        Ok(CircleIntervalSet::canonical_u128(den, merge_sorted(ivs)))
    } else {
        let mut ivs: Vec<(BigUint, BigUint)> = Vec::new();
        let mut wrapped = None;
        for a in coprime {
            let c = q * a;
            let (l, r) = (&c - p, &c + p);
            if r > den {
                wrapped = Some((BigUint::zero(), &r - &den));
                ivs.push((l, den.clone()));
            } else {
                ivs.push((l, r));
            }
        }
        if let Some(w) = wrapped {
            ivs.insert(0, w);
        }
        Ok(CircleIntervalSet::canonical(den, merge_sorted(ivs)))
    }
}

/// Exact measure of a union, by one sweep over all endpoints.
pub fn union_measure(sets: &[CircleIntervalSet]) -> Rational {
    let sets: Vec<&CircleIntervalSet> = sets.iter().filter(|s| !s.is_empty()).collect();
    if sets.is_empty() {
        return Rational::zero();
    }
    let small = sets.iter().try_fold(1u128, |d, s| match &s.repr {
        Repr::Small { den, .. } => lcm_small(d, *den),
        Repr::Big { .. } => None,
    });
    if let Some(d) = small {
        let mut ivs: Vec<(u128, u128)> = Vec::new();
        for s in &sets {
            if let Repr::Small { den, ends } = &s.repr {
                let f = d / den;
                ivs.extend(ends.chunks_exact(2).map(|c| (c[0] * f, c[1] * f)));
            }
        }
        ivs.sort_unstable();
        let len = total_length(&merge_sorted(ivs));
        return Rational::new(BigInt::from(len), BigInt::from(d));
    }
    let d = sets
        .iter()
        .fold(BigUint::one(), |d, s| lcm(&d, &s.denominator()));
    let mut ivs: Vec<(BigUint, BigUint)> = Vec::new();
    for s in &sets {
        let e = s.scaled_big(&(&d / s.denominator()));
        ivs.extend(e.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())));
    }
    ivs.sort_unstable();
    let len = total_length(&merge_sorted(ivs));
    Rational::new(BigInt::from(len), BigInt::from(d))
}

/// Grid indices `i ∈ [0, m)` whose midpoint `(2i + 1)/(2m)` falls in
/// `[l/d, r/d)`.
fn grid_range(l: &BigUint, r: &BigUint, d: &BigUint, m: u64) -> (u64, u64) {
    // (2i+1)·d ≥ 2m·l  ⇔  i ≥ ⌈(2m·l − d) / 2d⌉
    let two_d = BigInt::from(d * 2u32);
    let d = BigInt::from(d.clone());
    let first = |x: &BigUint| -> u64 {
        let num = BigInt::from(x * (2 * m)) - &d;
        let c = -((-num).div_floor(&two_d));
        c.max(BigInt::zero()).to_u64().unwrap_or(u64::MAX).min(m)
    };
    (first(l), first(r))
}

/// Brute-force estimate of `measure(A ∩ B)`: the fraction of the `m`
/// midpoints `(i + 1/2)/m` lying in both sets.
///
/// Differs from the exact value by at most `(|A| + |B| + 2)/m`.
pub fn grid_oracle(a: &CircleIntervalSet, b: &CircleIntervalSet, m: u64) -> Result<Rational> {
    if m == 0 {
        return Err(Error::Domain("grid oracle needs M ≥ 1".into()));
    }
    let mut in_a = vec![false; m as usize];
    let (da, db) = (a.denominator(), b.denominator());
    for c in a.big_ends().chunks_exact(2) {
        let (lo, hi) = grid_range(&c[0], &c[1], &da, m);
        in_a[lo as usize..hi as usize]
            .iter_mut()
            .for_each(|x| *x = true);
    }
    let mut count = 0u64;
    for c in b.big_ends().chunks_exact(2) {
        let (lo, hi) = grid_range(&c[0], &c[1], &db, m);
        count += in_a[lo as usize..hi as usize]
            .iter()
            .filter(|&&x| x)
            .count() as u64;
    }
    Ok(Rational::new(BigInt::from(count), BigInt::from(m)))
}
