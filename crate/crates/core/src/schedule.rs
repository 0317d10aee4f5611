//! ψ functions, the block decomposition `2^{B^h} ≤ n < 2^{B^{h+1}}`, the
//! averaging depth `K(h)`, the per-block choice of `k(h)`, and ψ*.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{exp_rational, int, parse_rational, Rational};
use crate::error::{Error, Result};
use crate::overlap::ScaledSets;
use crate::real::{log_floor, log_floor_rational, Real};

/// Default block base.
pub const DEFAULT_BASE: u32 = 4;

/// Guard used when flooring `ε·h·ln 4`.
pub const FLOOR_GUARD_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiSource {
    /// ψ ≡ 1/2.
    Half,
    /// ψ(n) = 1/n.
    Reciprocal,
    /// ψ(p) = R on primes, 0 elsewhere.
    PrimeSupport(Rational),
    /// Values loaded from an `n,num,den` file; index 0 is `n = 1`.
    File { path: String, values: Vec<Rational> },
    /// Explicit table, e.g. the output of [`build_psi_star`].
    Table {
        label: String,
        values: Vec<Rational>,
    },
}

/// A non-negative rational function on `1..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiFunction {
    source: PsiSource,
    n_max: u64,
    normalized: bool,
}

fn normalize_value(n: u64, v: Rational) -> Rational {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if v > half {
        half
    } else if n > 1 && v.is_positive() && v < Rational::new(BigInt::one(), BigInt::from(n)) {
        Rational::zero()
    } else {
        v
    }
}

impl PsiFunction {
    pub fn new(source: PsiSource, n_max: u64) -> Self {
        let n_max = match &source {
            PsiSource::File { values, .. } | PsiSource::Table { values, .. } => {
                n_max.min(values.len() as u64)
            }
            _ => n_max,
        };
        PsiFunction {
            source,
            n_max,
            normalized: false,
        }
    }

    pub fn half(n_max: u64) -> Self {
        Self::new(PsiSource::Half, n_max)
    }

    pub fn reciprocal(n_max: u64) -> Self {
        Self::new(PsiSource::Reciprocal, n_max)
    }

    pub fn from_values(label: &str, values: Vec<Rational>) -> Self {
        let n = values.len() as u64;
        Self::new(
            PsiSource::Table {
                label: label.to_string(),
                values,
            },
            n,
        )
    }

    /// Parses a generator spec: `half`, `recip`, `primes:R`, or `file:PATH`.
    pub fn parse(spec: &str, n_max: u64) -> Result<Self> {
        match spec.split_once(':') {
            None if spec == "half" => Ok(Self::half(n_max)),
            None if spec == "recip" || spec == "reciprocal" => Ok(Self::reciprocal(n_max)),
            Some(("primes", r)) => Ok(Self::new(
                PsiSource::PrimeSupport(parse_rational(r)?),
                n_max,
            )),
            Some(("file", path)) => Self::load(path, n_max),
            _ => Err(Error::Config(format!(
                "unknown ψ generator {spec:?} (expected half, recip, primes:R or file:PATH)"
            ))),
        }
    }

    /// Reads `n,num,den` lines; missing `n` are 0. Blank lines and `#`
    /// comments are skipped.
    pub fn load(path: impl AsRef<Path>, n_max: u64) -> Result<Self> {
        let path_str = path.as_ref().display().to_string();
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("cannot read {path_str}: {e}")))?;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Config(format!("{path_str}:{}: expected n,num,den", lineno + 1));
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let n: u64 = parts[0].parse().map_err(|_| bad())?;
            let num: BigInt = parts[1].parse().map_err(|_| bad())?;
            let den: BigInt = parts[2].parse().map_err(|_| bad())?;
            if n == 0 || den.is_zero() {
                return Err(bad());
            }
            entries.insert(n, Rational::new(num, den));
        }
        let top = entries.keys().next_back().copied().unwrap_or(0).max(n_max);
        let values = (1..=top)
            .map(|n| entries.get(&n).cloned().unwrap_or_else(Rational::zero))
            .collect();
        Ok(Self::new(
            PsiSource::File {
                path: path_str,
                values,
            },
            top,
        ))
    }

    pub fn source(&self) -> &PsiSource {
        &self.source
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Short generator tag used in reports.
    pub fn tag(&self) -> String {
        match &self.source {
            PsiSource::Half => "half".into(),
            PsiSource::Reciprocal => "recip".into(),
            PsiSource::PrimeSupport(r) => format!("primes:{r}"),
            PsiSource::File { path, .. } => format!("file:{path}"),
            PsiSource::Table { label, .. } => label.clone(),
        }
    }

    fn raw(&self, n: u64) -> Rational {
        match &self.source {
            PsiSource::Half => Rational::new(BigInt::one(), BigInt::from(2)),
            PsiSource::Reciprocal => Rational::new(BigInt::one(), BigInt::from(n)),
            PsiSource::PrimeSupport(r) => {
                if crate::arith::is_prime(n) {
                    r.clone()
                } else {
                    Rational::zero()
                }
            }
            PsiSource::File { values, .. } | PsiSource::Table { values, .. } => {
                values[(n - 1) as usize].clone()
            }
        }
    }

    /// `ψ(n)` for `1 ≤ n ≤ n_max`.
    pub fn value(&self, n: u64) -> Result<Rational> {
        if n == 0 || n > self.n_max {
            return Err(Error::Domain(format!(
                "ψ({n}) requested outside 1..={}",
                self.n_max
            )));
        }
        let v = self.raw(n);
        Ok(if self.normalized && self.is_lazy() {
            normalize_value(n, v)
        } else {
            v
        })
    }

    fn is_lazy(&self) -> bool {
        matches!(
            self.source,
            PsiSource::Half | PsiSource::Reciprocal | PsiSource::PrimeSupport(_)
        )
    }

    /// Same function on a larger or smaller domain (generators only).
    pub fn with_n_max(&self, n_max: u64) -> Result<Self> {
        if !self.is_lazy() && n_max > self.n_max {
            return Err(Error::Config(format!(
                "tabulated ψ only covers 1..={}",
                self.n_max
            )));
        }
        Ok(PsiFunction {
            n_max,
            ..self.clone()
        })
    }

    /// `Σ_{n ≤ N} ψ(n)` support check used by audits: the blocks `h` for
    /// which some `n` in the block has `ψ(n) > 0`.
    pub fn support_blocks(&self, base: u32) -> Result<BTreeSet<Option<u32>>> {
        let mut out = BTreeSet::new();
        for n in 1..=self.n_max {
            if self.value(n)?.is_positive() {
                out.insert(block_of(n as u128, base));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ψ[{}] on 1..={}{}",
            self.tag(),
            self.n_max,
            if self.normalized { " (normalized)" } else { "" }
        )
    }
}

/// Maps every value to `0` or `[1/n, 1/2]`: values above 1/2 are clamped,
/// positive values below `1/n` are dropped. At `n = 1` that range is empty,
/// so only the clamp applies there.
pub fn normalize_psi(psi: &PsiFunction) -> Result<PsiFunction> {
    let source = match &psi.source {
        PsiSource::PrimeSupport(r) if r.is_negative() => {
            return Err(Error::Domain(format!("negative ψ radius {r}")));
        }
        PsiSource::File { path, values } => PsiSource::File {
            path: path.clone(),
            values: normalize_table(values)?,
        },
        PsiSource::Table { label, values } => PsiSource::Table {
            label: label.clone(),
            values: normalize_table(values)?,
        },
        other => other.clone(),
    };
    Ok(PsiFunction {
        source,
        n_max: psi.n_max,
        normalized: true,
    })
}

fn normalize_table(values: &[Rational]) -> Result<Vec<Rational>> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.is_negative() {
                Err(Error::Domain(format!("ψ({}) = {v} is negative", i + 1)))
            } else {
                Ok(normalize_value(i as u64 + 1, v.clone()))
            }
        })
        .collect()
}

/// `(2^{base^h}, 2^{base^{h+1}})`.
pub fn block_bounds(h: u32, base: u32) -> Result<(u128, u128)> {
    if base < 2 {
        return Err(Error::Config(format!("block base must be ≥ 2, got {base}")));
    }
    let exp_of = |e: u32| -> Option<u128> {
        let x = (base as u128).checked_pow(e)?;
        if x >= 128 {
            None
        } else {
            Some(1u128 << x)
        }
    };
    match (exp_of(h), exp_of(h + 1)) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::Range(format!(
            "block h = {h} with base {base} exceeds 2^127; use a smaller h or base 2"
        ))),
    }
}

/// The block index `h` containing `n`, or `None` for `n < 2`.
pub fn block_of(n: u128, base: u32) -> Option<u32> {
    if n < 2 {
        return None;
    }
    let mut h = 0;
    loop {
        match block_bounds(h, base) {
            Ok((lo, hi)) if lo <= n && n < hi => return Some(h),
            Ok(_) => h += 1,
            Err(_) => return Some(h),
        }
    }
}

/// `K(h) = max(1, ⌊ε · h · ln 4⌋)`.
///
/// The product is enclosed at 128+ bits; if the enclosure comes within
/// `2^-64` of an integer the floor is refused with a precision error.
pub fn k_of_h(h: u32, epsilon: &Rational) -> Result<u64> {
    if !epsilon.is_positive() {
        return Err(Error::Domain(format!("ε must be positive, got {epsilon}")));
    }
    if h == 0 {
        return Ok(1);
    }
    let ln4 = Real::ln_rational(&int(4), 128)?;
    let v = ln4.mul_rational(&(epsilon * int(h as u64)));
    let f = v.floor_guarded(FLOOR_GUARD_BITS)?;
    Ok(f.to_u64().unwrap_or(u64::MAX).max(1))
}

/// Deterministic pair sampling: `count` distinct pairs `lo ≤ m < n < hi`,
/// sorted. Returns every pair when `count` covers the whole block.
pub fn sample_pairs(lo: u64, hi: u64, count: usize, seed: u64) -> Vec<(u64, u64)> {
    if hi <= lo + 1 {
        return Vec::new();
    }
    let width = (hi - lo) as u128;
    let total = width * (width - 1) / 2;
    if count as u128 >= total {
        return all_pairs(lo, hi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = BTreeSet::new();
    while picked.len() < count {
        let a = rng.random_range(lo..hi);
        let b = rng.random_range(lo..hi);
        if a != b {
            picked.insert((a.min(b), a.max(b)));
        }
    }
    picked.into_iter().collect()
}

/// All pairs `lo ≤ m < n < hi`.
pub fn all_pairs(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    (lo..hi)
        .flat_map(|m| (m + 1..hi).map(move |n| (m, n)))
        .collect()
}

/// Per-`k` sums recorded by [`select_k`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockKSums {
    pub k: u64,
    /// `Σ ê_k² · λ(E_m^(k) ∩ E_n^(k))`.
    pub scaled_overlap: Rational,
    /// `Σ λ(E_m) λ(E_n)`.
    pub product: Rational,
}

impl BlockKSums {
    /// `scaled_overlap / product`, `None` when the product vanishes.
    pub fn ratio(&self) -> Option<Rational> {
        if self.product.is_zero() {
            None
        } else {
            Some(&self.scaled_overlap / &self.product)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub h: u32,
    pub base: u32,
    pub lo: u128,
    pub hi: u128,
    pub epsilon: Rational,
    pub k_max: u64,
    pub pair_count: usize,
    pub seed: Option<u64>,
    pub per_k_sums: Vec<BlockKSums>,
    pub chosen_k: u64,
}

/// Picks `k(h) ∈ 1..=K(h)` minimising
/// `Σ ê_k² λ(E_m^(k) ∩ E_n^(k)) / Σ λ(E_m) λ(E_n)` over the given pairs;
/// ties go to the smallest `k`. All sums are exact.
pub fn select_k(
    h: u32,
    base: u32,
    psi: &PsiFunction,
    epsilon: &Rational,
    pairs: &[(u64, u64)],
    seed: Option<u64>,
) -> Result<BlockReport> {
    let (lo, hi) = block_bounds(h, base)?;
    let k_max = k_of_h(h, epsilon)?;
    for &(m, n) in pairs {
        if m == n || (m as u128) < lo || (n as u128) >= hi || (m as u128) >= hi || (n as u128) < lo
        {
            return Err(Error::Domain(format!(
                "pair ({m}, {n}) is not a pair of distinct integers in [{lo}, {hi})"
            )));
        }
    }
    let mut pairs = pairs.to_vec();
    pairs.sort_unstable();

    let ns: Vec<u64> = pairs
        .iter()
        .flat_map(|&(m, n)| [m, n])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let sets = ScaledSets::build(psi, &ns, 0, k_max)?;

    // per pair: (λ(E_m)λ(E_n), [λ(E_m^(k) ∩ E_n^(k)) for k = 1..=K])
    let rows: Vec<(Rational, Vec<Rational>)> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let prod = sets.get(m, 0).measure() * sets.get(n, 0).measure();
            let inter = (1..=k_max)
                .map(|k| sets.get(m, k).intersection_measure(sets.get(n, k)))
                .collect();
            (prod, inter)
        })
        .collect();

    let product: Rational = rows.iter().map(|(p, _)| p).sum();
    let per_k_sums: Vec<BlockKSums> = (1..=k_max)
        .map(|k| {
            let s: Rational = rows.iter().map(|(_, v)| &v[(k - 1) as usize]).sum();
            let e = exp_rational(k);
            BlockKSums {
                k,
                scaled_overlap: s * &e * &e,
                product: product.clone(),
            }
        })
        .collect();

    let mut chosen_k = 1;
    let mut best: Option<Rational> = None;
    for row in &per_k_sums {
        if let Some(r) = row.ratio() {
            if best.as_ref().is_none_or(|b| &r < b) {
                best = Some(r);
                chosen_k = row.k;
            }
        }
    }

    Ok(BlockReport {
        h,
        base,
        lo,
        hi,
        epsilon: epsilon.clone(),
        k_max,
        pair_count: pairs.len(),
        seed,
        per_k_sums,
        chosen_k,
    })
}

/// ψ*(n) = ψ(n)/ê_{k(h)} on blocks with even `h`, 0 elsewhere.
pub fn build_psi_star(
    psi: &PsiFunction,
    epsilon: &Rational,
    chosen: &BTreeMap<u32, u64>,
    base: u32,
) -> Result<PsiFunction> {
    if !psi.is_normalized() {
        return Err(Error::Config(
            "ψ must be normalized before building ψ*".into(),
        ));
    }
    let mut values = Vec::with_capacity(psi.n_max() as usize);
    for n in 1..=psi.n_max() {
        let v = match block_of(n as u128, base) {
            Some(h) if h % 2 == 0 => {
                let k = *chosen.get(&h).ok_or_else(|| {
                    Error::Config(format!("no k(h) chosen for even block h = {h}"))
                })?;
                let k_max = k_of_h(h, epsilon)?;
                if k == 0 || k > k_max {
                    return Err(Error::Config(format!("k({h}) = {k} outside 1..={k_max}")));
                }
                psi.value(n)? / exp_rational(k)
            }
            _ => Rational::zero(),
        };
        values.push(v);
    }
    let mut star = PsiFunction::from_values("psi*", values);
    star.normalized = true;
    Ok(star)
}

/// `ê_{K(h)} / (log n)^ε` with `log x = max(1, ln x)`.
pub fn scale_window_ratio(h: u32, epsilon: &Rational, n: u64, precision: u32) -> Result<Real> {
    let k = k_of_h(h, epsilon)?;
    let logn = log_floor_rational(&int(n), precision)?;
    Real::from_rational(&exp_rational(k), precision).div(&logn.powr(epsilon)?)
}

/// `ψ*(n) · (log n)^ε / ψ(n)` for `n` in the support of ψ*.
pub fn psi_star_ratio(
    psi: &PsiFunction,
    star: &PsiFunction,
    epsilon: &Rational,
    n: u64,
    precision: u32,
) -> Result<Option<Real>> {
    let s = star.value(n)?;
    if s.is_zero() {
        return Ok(None);
    }
    let q = s / psi.value(n)?;
    let logn = log_floor(&Real::from_rational(&int(n), precision))?;
    Ok(Some(logn.powr(epsilon)?.mul_rational(&q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn normalize_examples() {
        let mut values = vec![Rational::zero(); 10];
        values[9] = rat(7, 10);
        let p = normalize_psi(&PsiFunction::from_values("t", values.clone())).unwrap();
        assert_eq!(p.value(10).unwrap(), rat(1, 2));
        values[9] = rat(1, 20);
        let p = normalize_psi(&PsiFunction::from_values("t", values.clone())).unwrap();
        assert_eq!(p.value(10).unwrap(), rat(0, 1));
        values[9] = rat(1, 10);
        let p = normalize_psi(&PsiFunction::from_values("t", values.clone())).unwrap();
        assert_eq!(p.value(10).unwrap(), rat(1, 10));
        values[3] = rat(-1, 10);
        assert!(matches!(
            normalize_psi(&PsiFunction::from_values("t", values)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn normalize_generators_lazily() {
        let p = normalize_psi(&PsiFunction::parse("primes:3/4", 20).unwrap()).unwrap();
        assert_eq!(p.value(7).unwrap(), rat(1, 2));
        assert_eq!(p.value(8).unwrap(), rat(0, 1));
        let p = normalize_psi(&PsiFunction::parse("primes:1/6", 20).unwrap()).unwrap();
        assert_eq!(p.value(5).unwrap(), rat(0, 1));
        assert_eq!(p.value(7).unwrap(), rat(1, 6));
        let one = normalize_psi(&PsiFunction::from_values("t", vec![rat(1, 4)])).unwrap();
        assert_eq!(one.value(1).unwrap(), rat(1, 4));
        let r = normalize_psi(&PsiFunction::reciprocal(5)).unwrap();
        assert_eq!(r.value(1).unwrap(), rat(1, 2));
        assert_eq!(r.value(4).unwrap(), rat(1, 4));
        assert!(normalize_psi(&PsiFunction::parse("primes:-1", 5).unwrap()).is_err());
    }

    #[test]
    fn normalize_is_idempotent_and_never_increases() {
        let values: Vec<Rational> = (1..=50i64).map(|i| rat((i * 7) % 13, 11 + i % 5)).collect();
        let raw = PsiFunction::from_values("t", values);
        let once = normalize_psi(&raw).unwrap();
        let twice = normalize_psi(&once).unwrap();
        assert_eq!(once, twice);
        for n in 1..=50 {
            let (a, b) = (raw.value(n).unwrap(), once.value(n).unwrap());
            assert!(b <= a);
            assert!(b.is_zero() || b <= rat(1, 2));
            assert!(b.is_zero() || n == 1 || b >= rat(1, n as i64));
            if a.is_zero() {
                assert!(b.is_zero());
            }
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            PsiFunction::parse("bogus", 5),
            Err(Error::Config(_))
        ));
        assert!(PsiFunction::half(5).value(6).is_err());
        assert!(PsiFunction::half(5).value(0).is_err());
    }

    #[test]
    fn block_examples() {
        assert_eq!(block_bounds(1, 4).unwrap(), (16, 65536));
        assert_eq!(block_bounds(2, 4).unwrap(), (65536, 1u128 << 64));
        assert_eq!(block_bounds(2, 2).unwrap(), (16, 256));
        assert!(matches!(block_bounds(3, 4), Err(Error::Range(_))));
        assert!(block_bounds(0, 1).is_err());
    }

    #[test]
    fn blocks_partition() {
        for base in [2u32, 3, 4] {
            for h in 0..2 {
                let (_, hi) = block_bounds(h, base).unwrap();
                let (lo_next, _) = block_bounds(h + 1, base).unwrap();
                assert_eq!(hi, lo_next);
            }
            assert_eq!(block_of(1, base), None);
            for n in 2..5000u128 {
                let h = block_of(n, base).unwrap();
                let (lo, hi) = block_bounds(h, base).unwrap();
                assert!(lo <= n && n < hi);
            }
        }
    }

    #[test]
    fn k_of_h_examples() {
        assert_eq!(k_of_h(1, &int(1)).unwrap(), 1);
        assert_eq!(k_of_h(2, &int(1)).unwrap(), 2);
        assert_eq!(k_of_h(4, &rat(1, 2)).unwrap(), 2);
        assert_eq!(k_of_h(2, &int(3)).unwrap(), 8);
        assert_eq!(k_of_h(1, &rat(1, 100)).unwrap(), 1);
        assert!(k_of_h(1, &int(0)).is_err());
    }

    #[test]
    fn k_of_h_refuses_near_integer_floors() {
        // ε·ln 4 within 2^-80 of 1: ε = round(2^100 / ln 4) / 2^100
        let ln4 = Real::ln_rational(&int(4), 200).unwrap().value();
        let scale = Rational::from_integer(BigInt::one() << 100usize);
        let eps = (scale.clone() / ln4).round() / scale;
        assert!(matches!(k_of_h(1, &eps), Err(Error::Precision(_))));
    }

    #[test]
    fn select_k_degenerate_cases() {
        let zero = normalize_psi(&PsiFunction::from_values(
            "zero",
            vec![Rational::zero(); 300],
        ))
        .unwrap();
        let pairs = all_pairs(16, 40);
        let r = select_k(2, 2, &zero, &int(3), &pairs, None).unwrap();
        assert_eq!(r.chosen_k, 1);
        assert!(r
            .per_k_sums
            .iter()
            .all(|s| s.scaled_overlap.is_zero() && s.product.is_zero()));

        let r = select_k(2, 2, &zero, &int(3), &[], None).unwrap();
        assert_eq!(r.chosen_k, 1);
        assert_eq!(r.pair_count, 0);

        // radii so small that every scaled intersection is empty
        let tiny = normalize_psi(&PsiFunction::reciprocal(300)).unwrap();
        let r = select_k(2, 2, &tiny, &int(3), &[(16, 17)], None).unwrap();
        assert!(r.per_k_sums.iter().all(|s| s.scaled_overlap.is_zero()));
        assert_eq!(r.chosen_k, 1);

        assert!(select_k(2, 2, &tiny, &int(3), &[(3, 17)], None).is_err());
    }

    #[test]
    fn select_k_is_optimal() {
        let psi = normalize_psi(&PsiFunction::half(256)).unwrap();
        let pairs = sample_pairs(16, 256, 300, 7);
        let r = select_k(2, 2, &psi, &int(3), &pairs, Some(7)).unwrap();
        assert_eq!(r.k_max, 8);
        let best = r.per_k_sums[(r.chosen_k - 1) as usize].ratio().unwrap();
        for s in &r.per_k_sums {
            assert!(best <= s.ratio().unwrap());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_pairs(16, 65536, 50, 42);
        let b = sample_pairs(16, 65536, 50, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|&(m, n)| 16 <= m && m < n && n < 65536));
        assert_ne!(a, sample_pairs(16, 65536, 50, 43));
        assert_eq!(sample_pairs(16, 20, 1000, 1).len(), 6);
    }

    #[test]
    fn psi_star_examples() {
        let psi = normalize_psi(&PsiFunction::half(70_000)).unwrap();
        let chosen = BTreeMap::from([(0, 1), (2, 1)]);
        let star = build_psi_star(&psi, &int(1), &chosen, 4).unwrap();
        assert_eq!(star.value(20).unwrap(), int(0)); // h = 1 block, odd
        assert_eq!(star.value(70_000).unwrap(), rat(1, 2) / exp_rational(1));
        assert_eq!(star.value(1).unwrap(), int(0));
        assert_eq!(star.value(3).unwrap(), rat(1, 2) / exp_rational(1));

        let psi0 = normalize_psi(&PsiFunction::parse("primes:1/2", 100).unwrap()).unwrap();
        let star0 = build_psi_star(&psi0, &int(1), &BTreeMap::from([(0, 1)]), 4).unwrap();
        assert_eq!(star0.value(4).unwrap(), int(0));

        // missing even block
        let err = build_psi_star(&psi, &int(1), &BTreeMap::from([(0, 1)]), 4);
        assert!(matches!(err, Err(Error::Config(_))));
        // unnormalized input
        assert!(build_psi_star(&PsiFunction::half(10), &int(1), &chosen, 4).is_err());
        // k(h) beyond K(h)
        let bad = BTreeMap::from([(0, 1), (2, 9)]);
        assert!(build_psi_star(&psi, &int(1), &bad, 4).is_err());
    }

    #[test]
    fn psi_star_is_dominated_by_psi() {
        let psi = normalize_psi(&PsiFunction::half(256)).unwrap();
        let star = build_psi_star(&psi, &int(3), &BTreeMap::from([(0, 1), (2, 5)]), 2).unwrap();
        for n in 1..=256 {
            assert!(star.value(n).unwrap() <= psi.value(n).unwrap());
        }
        let support = star.support_blocks(2).unwrap();
        assert_eq!(support, BTreeSet::from([Some(0), Some(2)]));
    }

    /// For `εh ln 4 ≥ 1`, `K = ⌊εh ln 4⌋ ∈ (εh ln 4 − 1, εh ln 4]` and
    /// `ln n ∈ [4^h ln 2, 4^{h+1} ln 2)` give
    /// `ê_K/(ln n)^ε ∈ (e^{-1} (4 ln 2)^{-ε}, (ln 2)^{-ε}]` up to the `ê` error.
    #[test]
    fn scale_window_brackets_block() {
        let ln2 = std::f64::consts::LN_2;
        for (eps, h) in [
            (rat(1, 1), 1u32),
            (rat(1, 2), 2),
            (rat(3, 2), 1),
            (rat(1, 1), 2),
        ] {
            let (lo, hi) = block_bounds(h, 4).unwrap();
            let e = eps.to_f64().unwrap();
            let lower = (-1.0f64).exp() * (4.0 * ln2).powf(-e) * (1.0 - 1e-12);
            let upper = ln2.powf(-e) * (1.0 + 1e-12);
            for n in [
                lo as u64,
                lo as u64 + 1,
                (hi - 1).min(u64::MAX as u128) as u64,
            ] {
                let r = scale_window_ratio(h, &eps, n, 128).unwrap().to_f64();
                assert!(lower < r && r <= upper, "ε = {eps}, h = {h}, n = {n}: {r}");
            }
        }
    }
}
