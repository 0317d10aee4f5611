use num::Zero;

use crate::arith::{int, phi, Rational};
use crate::error::{Error, Result};
use crate::real::{log_floor, Real};
use crate::schedule::PsiFunction;

/// Largest `N` accepted by [`divergence_table`].
pub const TABLE_CAP: u64 = 100_000;

/// Partial sums of `Σ ψ(n)φ(n)/(n·F(n))` at one checkpoint, for the plain
/// series (`F = 1`) and three extra divergence factors, with
/// `L(x) = max(1, ln x)`:
///
/// - `theorem1`: `F = L(n)^ε`,
/// - `hpv`: `F = exp(c·L(n)/L(L(n)))`,
/// - `bhhv`: `F = L(n)^{ε·L(L(L(n)))}`.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub n: u64,
    pub plain: Rational,
    pub theorem1: Real,
    pub hpv: Real,
    pub bhhv: Real,
}

/// Checkpoints `1, 2, 4, …` up to `N`, plus `N` itself.
pub fn checkpoints(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |&x| x.checked_mul(2))
        .take_while(|&x| x <= n_max)
        .collect();
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

pub fn divergence_table(
    epsilon: &Rational,
    n_max: u64,
    psi: &PsiFunction,
    c: &Rational,
    precision: u32,
) -> Result<Vec<TableRow>> {
    if n_max < 2 {
        return Err(Error::Domain("divergence table needs N ≥ 2".into()));
    }
    if n_max > TABLE_CAP {
        return Err(Error::Cap(format!(
            "divergence table limited to N = {TABLE_CAP}, got {n_max}"
        )));
    }
    if epsilon <= &Rational::zero() {
        return Err(Error::Domain(format!("ε must be positive, got {epsilon}")));
    }
    let marks = checkpoints(n_max);
    let mut plain = Rational::zero();
    let mut theorem1 = Real::zero(precision);
    let mut hpv = Real::zero(precision);
    let mut bhhv = Real::zero(precision);
    let mut rows = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    for n in 1..=n_max {
        let term = psi.value(n)? * int(phi(n)?) / int(n);
        if !term.is_zero() {
            let l1 = log_floor(&Real::from_rational(&int(n), precision))?;
            let l2 = log_floor(&l1)?;
            let l3 = log_floor(&l2)?;
            let t = Real::from_rational(&term, precision);
            let ln_l1 = l1.ln()?;
            let f_thm = ln_l1.mul_rational(epsilon).exp();
            let f_hpv = l1.div(&l2)?.mul_rational(c).exp();
            let f_bhhv = ln_l1.mul(&l3).mul_rational(epsilon).exp();
            plain += &term;
            theorem1 = theorem1.add(&t.div(&f_thm)?);
            hpv = hpv.add(&t.div(&f_hpv)?);
            bhhv = bhhv.add(&t.div(&f_bhhv)?);
        }
        if next.peek() == Some(&&n) {
            next.next();
            rows.push(TableRow {
                n,
                plain: plain.clone(),
                theorem1: theorem1.clone(),
                hpv: hpv.clone(),
                bhhv: bhhv.clone(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn checkpoint_sets() {
        assert_eq!(checkpoints(4), vec![1, 2, 4]);
        assert_eq!(checkpoints(10), vec![1, 2, 4, 8, 10]);
    }

    #[test]
    fn examples() {
        let zero = PsiFunction::from_values("z", vec![rat(0, 1); 10]);
        for row in divergence_table(&int(1), 10, &zero, &int(1), 64).unwrap() {
            assert!(row.plain.is_zero());
            assert!(row.theorem1.contains(&int(0)));
            assert!(row.hpv.contains(&int(0)) && row.bhhv.contains(&int(0)));
        }
        let half = PsiFunction::half(4);
        let rows = divergence_table(&int(1), 4, &half, &int(1), 128).unwrap();
        assert_eq!(rows.last().unwrap().plain, rat(4, 3));
    }

    #[test]
    fn factors_only_shrink_terms() {
        let psi = PsiFunction::half(2000);
        let rows = divergence_table(&rat(1, 2), 2000, &psi, &int(1), 96).unwrap();
        for row in &rows {
            assert!(row.theorem1.lower() <= row.plain);
            assert!(row.hpv.lower() <= row.plain);
            assert!(row.bhhv.lower() <= row.plain);
            assert!(row.theorem1.error_f64() < 1e-20);
        }
        // below e every log floors to 1, so the L(n)^ε sum is the plain sum
        assert!(rows[1].theorem1.contains(&rows[1].plain));
        // direct f64 recomputation of the L(n)^ε sum
        let l = |x: f64| x.ln().max(1.0);
        let direct: f64 = (1..=2000u64)
            .map(|n| 0.5 * phi(n).unwrap() as f64 / n as f64 / l(n as f64).powf(0.5))
            .sum();
        let last = rows.last().unwrap();
        assert!((last.theorem1.to_f64() - direct).abs() < 1e-9 * direct);
        let direct_bhhv: f64 = (1..=2000u64)
            .map(|n| {
                let f = l(n as f64).powf(0.5 * l(l(l(n as f64))));
                0.5 * phi(n).unwrap() as f64 / n as f64 / f
            })
            .sum();
        assert!((last.bhhv.to_f64() - direct_bhhv).abs() < 1e-9 * direct_bhhv);
        let direct_hpv: f64 = (1..=2000u64)
            .map(|n| {
                let f = (l(n as f64) / l(l(n as f64))).exp();
                0.5 * phi(n).unwrap() as f64 / n as f64 / f
            })
            .sum();
        assert!((last.hpv.to_f64() - direct_hpv).abs() < 1e-9 * direct_hpv);
    }
}
