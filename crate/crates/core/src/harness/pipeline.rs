use std::collections::BTreeMap;

use num::Zero;
use rayon::prelude::*;

use crate::arith::{exp_rational, Rational};
use crate::circle::build_e;
use crate::error::{Error, Result};
use crate::overlap::{OverlapRecord, PairDecomposition, ScaledSets};
use crate::real::Real;
use crate::schedule::{
    all_pairs, block_bounds, block_of, build_psi_star, psi_star_ratio, sample_pairs, select_k,
    BlockReport, PsiFunction,
};

/// Largest `n` in an exhaustive pair corpus.
pub const EXHAUSTIVE_CAP: u64 = 2000;
/// Largest `n` in a sampled or listed pair corpus.
pub const SAMPLE_CAP: u64 = 65535;

/// One [`OverlapRecord`] per pair and `k ∈ k_lo..=k_hi`, sorted by `(m, n, k)`.
/// Pairs are taken with `m < n`. Integral bounds are computed when
/// `precision` is given; the threshold window is `[1, ê_{k_hi})`.
pub fn sweep_pairs(
    psi: &PsiFunction,
    pairs: &[(u64, u64)],
    k_lo: u64,
    k_hi: u64,
    precision: Option<u32>,
) -> Result<Vec<OverlapRecord>> {
    let mut pairs: Vec<(u64, u64)> = pairs.iter().map(|&(m, n)| (m.min(n), m.max(n))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut ns: Vec<u64> = pairs.iter().flat_map(|&(m, n)| [m, n]).collect();
    ns.sort_unstable();
    ns.dedup();
    let sets = ScaledSets::build(psi, &ns, k_lo, k_hi)?;
    let rows = pairs
        .par_iter()
        .map(|&(m, n)| {
            let dec = PairDecomposition::new(m, n, psi.value(m)?, psi.value(n)?)?;
            (k_lo..=k_hi)
                .map(|k| {
                    OverlapRecord::new(&dec, sets.get(m, k), sets.get(n, k), k, k_hi, precision)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Pairs for one block clipped to `n ≤ n_max`: all of them, or a seeded
/// sample.
pub fn block_pairs(
    h: u32,
    base: u32,
    n_max: Option<u64>,
    sample: Option<(usize, u64)>,
) -> Result<Vec<(u64, u64)>> {
    let (lo, hi) = block_bounds(h, base)?;
    let mut hi = hi;
    if let Some(n) = n_max {
        hi = hi.min(n as u128 + 1);
    }
    if lo >= hi {
        return Ok(Vec::new());
    }
    match sample {
        None if hi - 1 > EXHAUSTIVE_CAP as u128 => Err(Error::Cap(format!(
            "block [{lo}, {hi}) exceeds the exhaustive cap n ≤ {EXHAUSTIVE_CAP}; give a sample size and seed"
        ))),
        None => Ok(all_pairs(lo as u64, hi as u64)),
        Some(_) if hi - 1 > SAMPLE_CAP as u128 => Err(Error::Cap(format!(
            "block [{lo}, {hi}) exceeds the sampling cap n ≤ {SAMPLE_CAP}"
        ))),
        Some((count, seed)) => Ok(sample_pairs(lo as u64, hi as u64, count, seed)),
    }
}

/// Result of the ψ* pipeline and its audit.
#[derive(Clone, Debug)]
pub struct PsiStarAudit {
    pub base: u32,
    pub epsilon: Rational,
    pub n_max: u64,
    pub reports: Vec<BlockReport>,
    pub chosen: BTreeMap<u32, u64>,
    pub psi_star: PsiFunction,
    /// ψ*(n) > 0 only for `n` in even blocks.
    pub support_even_only: bool,
    /// ψ*(n) = ψ(n)/ê_{k(h)} on even blocks and 0 elsewhere, for every `n`.
    pub matches_definition: bool,
    /// `E*_n ⊆ E_n` for every `n`.
    pub sets_nested: bool,
    /// Extremes of `ψ*(n)·L(n)^ε/ψ(n)` over the support of ψ*.
    pub ratio_min: Option<Real>,
    pub ratio_max: Option<Real>,
}

/// Chooses `k(h)` on every even block meeting `[2, n_max]`, builds ψ*, and
/// audits it.
pub fn psi_star_pipeline(
    psi: &PsiFunction,
    base: u32,
    epsilon: &Rational,
    n_max: u64,
    sample: Option<(usize, u64)>,
    precision: u32,
) -> Result<PsiStarAudit> {
    if !psi.is_normalized() {
        return Err(Error::Config(
            "ψ must be normalized before building ψ*".into(),
        ));
    }
    let psi = psi.with_n_max(n_max)?;
    let mut reports = Vec::new();
    let mut chosen = BTreeMap::new();
    if n_max >= 2 {
        let top = block_of(n_max as u128, base).unwrap_or(0);
        for h in (0..=top).step_by(2) {
            let pairs = block_pairs(h, base, Some(n_max), sample)?;
            let report = select_k(h, base, &psi, epsilon, &pairs, sample.map(|s| s.1))?;
            chosen.insert(h, report.chosen_k);
            reports.push(report);
        }
    }
    let star = build_psi_star(&psi, epsilon, &chosen, base)?;

    let mut support_even_only = true;
    let mut matches_definition = true;
    let mut sets_nested = true;
    let mut ratio_min: Option<Real> = None;
    let mut ratio_max: Option<Real> = None;
    for n in 1..=n_max {
        let (v, s) = (psi.value(n)?, star.value(n)?);
        let expected = match block_of(n as u128, base) {
            Some(h) if h % 2 == 0 => &v / exp_rational(chosen[&h]),
            _ => Rational::zero(),
        };
        if !s.is_zero() && !matches!(block_of(n as u128, base), Some(h) if h % 2 == 0) {
            support_even_only = false;
        }
        if s != expected {
            matches_definition = false;
        }
        if !build_e(n, &s)?.is_subset_of(&build_e(n, &v)?) {
            sets_nested = false;
        }
        if let Some(r) = psi_star_ratio(&psi, &star, epsilon, n, precision)? {
            if ratio_min.as_ref().is_none_or(|m| r.value() < m.value()) {
                ratio_min = Some(r.clone());
            }
            if ratio_max.as_ref().is_none_or(|m| r.value() > m.value()) {
                ratio_max = Some(r);
            }
        }
    }
    Ok(PsiStarAudit {
        base,
        epsilon: epsilon.clone(),
        n_max,
        reports,
        chosen,
        psi_star: star,
        support_even_only,
        matches_definition,
        sets_nested,
        ratio_min,
        ratio_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::schedule::normalize_psi;

    #[test]
    fn sweep_rows_are_sorted_and_complete() {
        let psi = normalize_psi(&PsiFunction::half(20)).unwrap();
        let rows = sweep_pairs(&psi, &[(6, 10), (3, 2)], 1, 1, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].m, rows[0].n), (2, 3));
        let rows = sweep_pairs(&psi, &[(6, 10), (2, 3)], 0, 2, Some(64)).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows
            .windows(2)
            .all(|w| (w[0].m, w[0].n, w[0].k) < (w[1].m, w[1].n, w[1].k)));
    }

    #[test]
    fn caps() {
        assert!(matches!(block_pairs(2, 4, None, None), Err(Error::Cap(_))));
        assert!(matches!(
            block_pairs(2, 4, None, Some((10, 1))),
            Err(Error::Cap(_))
        ));
        assert_eq!(block_pairs(1, 4, None, Some((10, 1))).unwrap().len(), 10);
        assert_eq!(block_pairs(2, 2, Some(20), None).unwrap().len(), 10);
    }

    #[test]
    fn small_pipeline() {
        let psi = normalize_psi(&PsiFunction::half(64)).unwrap();
        let audit = psi_star_pipeline(&psi, 2, &int(1), 64, None, 96).unwrap();
        assert_eq!(audit.chosen.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
        assert!(audit.support_even_only && audit.matches_definition && audit.sets_nested);
        assert!(audit.ratio_min.is_some());
    }
}
