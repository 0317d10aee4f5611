use num::Zero;
use rayon::prelude::*;

use crate::arith::Rational;
use crate::circle::build_e;
use crate::error::{Error, Result};
use crate::schedule::PsiFunction;

/// Largest `N` accepted by [`bc_ratio`].
pub const BC_CAP: u64 = 500;

/// Running sums after the first `n` events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcPartial {
    pub n: u64,
    /// `Σ_{j ≤ n} λ(E_j)`.
    pub sum_measure: Rational,
    /// `Σ_{i, j ≤ n} λ(E_i ∩ E_j)`, the diagonal contributing `λ(E_j)`.
    pub sum_intersections: Rational,
    /// `None` while every event so far is empty.
    pub ratio: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcResult {
    pub ratio: Rational,
    pub partials: Vec<BcPartial>,
}

/// `(Σ_{n ≤ N} λ(E_n))² / Σ_{m, n ≤ N} λ(E_m ∩ E_n)`, exactly.
pub fn bc_ratio(psi: &PsiFunction, n_max: u64) -> Result<BcResult> {
    if n_max == 0 {
        return Err(Error::Domain("bc_ratio needs N ≥ 1".into()));
    }
    if n_max > BC_CAP {
        return Err(Error::Cap(format!(
            "bc_ratio is exact only up to N = {BC_CAP}, got {n_max}"
        )));
    }
    if !psi.is_normalized() {
        return Err(Error::Config("bc_ratio needs a normalized ψ".into()));
    }
    let sets = (1..=n_max)
        .into_par_iter()
        .map(|n| build_e(n, &psi.value(n)?))
        .collect::<Result<Vec<_>>>()?;
    // row n: λ(E_n) + 2 Σ_{m < n} λ(E_m ∩ E_n)
    let rows: Vec<(Rational, Rational)> = (0..sets.len())
        .into_par_iter()
        .map(|j| {
            let lambda = sets[j].measure();
            let cross: Rational = sets[..j]
                .iter()
                .map(|a| a.intersection_measure(&sets[j]))
                .sum();
            let row = &lambda + cross * Rational::from_integer(2.into());
            (lambda, row)
        })
        .collect();

    let mut sum_measure = Rational::zero();
    let mut sum_intersections = Rational::zero();
    let mut partials = Vec::with_capacity(rows.len());
    for (j, (lambda, row)) in rows.into_iter().enumerate() {
        sum_measure += lambda;
        sum_intersections += row;
        let ratio = (!sum_intersections.is_zero())
            .then(|| &sum_measure * &sum_measure / &sum_intersections);
        partials.push(BcPartial {
            n: j as u64 + 1,
            sum_measure: sum_measure.clone(),
            sum_intersections: sum_intersections.clone(),
            ratio,
        });
    }
    let ratio = partials
        .last()
        .and_then(|p| p.ratio.clone())
        .ok_or_else(|| Error::UndefinedRatio("every E_n is empty".into()))?;
    Ok(BcResult { ratio, partials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::schedule::normalize_psi;

    #[test]
    fn examples() {
        let one = normalize_psi(&PsiFunction::from_values("t", vec![rat(1, 4)])).unwrap();
        assert_eq!(bc_ratio(&one, 1).unwrap().ratio, rat(1, 2));

        let half = normalize_psi(&PsiFunction::half(3)).unwrap();
        let r = bc_ratio(&half, 3).unwrap();
        assert_eq!(r.ratio, rat(169, 198));
        assert_eq!(r.partials[2].sum_measure, rat(13, 6));
        assert_eq!(r.partials[2].sum_intersections, rat(11, 2));

        let zero = normalize_psi(&PsiFunction::from_values("z", vec![rat(0, 1); 5])).unwrap();
        assert!(matches!(bc_ratio(&zero, 5), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn guards() {
        assert!(matches!(
            bc_ratio(&PsiFunction::half(3), 3),
            Err(Error::Config(_))
        ));
        let half = normalize_psi(&PsiFunction::half(600)).unwrap();
        assert!(matches!(bc_ratio(&half, 501), Err(Error::Cap(_))));
    }

    #[test]
    fn ratios_lie_in_unit_interval() {
        for psi in [
            PsiFunction::half(60),
            PsiFunction::reciprocal(60),
            PsiFunction::parse("primes:1/3", 60).unwrap(),
        ] {
            let r = bc_ratio(&normalize_psi(&psi).unwrap(), 60).unwrap();
            for p in r.partials.iter().filter_map(|p| p.ratio.as_ref()) {
                assert!(p > &int(0) && p <= &int(1));
            }
        }
    }
}
