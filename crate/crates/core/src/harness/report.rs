//! CSV renderings. Exact rationals are written as `num/den` strings or as
//! separate numerator and denominator columns; enclosures as a midpoint and
//! an error radius.

use crate::arith::rational_string;
use crate::error::Result;
use crate::overlap::OverlapRecord;
use crate::real::Real;
use crate::schedule::BlockReport;

use super::bc::BcResult;
use super::table::TableRow;

pub const RECORD_COLUMNS: [&str; 17] = [
    "m",
    "n",
    "k",
    "r",
    "s",
    "t",
    "gcd",
    "delta",
    "Delta",
    "D_k",
    "pv_product",
    "P_exact_num",
    "P_exact_den",
    "integral_bound",
    "integral_err",
    "disjoint_pred",
    "threshold_class",
];

fn real_fields(x: &Real) -> [String; 2] {
    [
        format!("{:.17e}", x.to_f64()),
        format!("{:.3e}", x.error_f64()),
    ]
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()).into())
}

/// Rows in the given order; callers sort by `(m, n, k)` first.
pub fn records_csv(records: &[OverlapRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        let [ib, ie] = match &r.integral_bound {
            Some(x) => real_fields(x),
            None => [String::new(), String::new()],
        };
        // an undefined P_k is left blank rather than written as 0
        let [pn, pd] = if r.p_defined {
            [r.p_exact.numer().to_string(), r.p_exact.denom().to_string()]
        } else {
            [String::new(), String::new()]
        };
        w.write_record([
            r.m.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.r.to_string(),
            r.s.to_string(),
            r.t.to_string(),
            r.g.to_string(),
            rational_string(&r.delta),
            rational_string(&r.big_delta),
            rational_string(&r.d_k),
            rational_string(&r.pv_product),
            pn,
            pd,
            ib,
            ie,
            r.disjoint_predicted.to_string(),
            r.threshold_class.to_string(),
        ])?;
    }
    finish(w)
}

pub fn bc_csv(result: &BcResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "N",
        "sum_measure",
        "sum_intersections",
        "ratio",
        "ratio_f64",
    ])?;
    for p in &result.partials {
        let (ratio, approx) = match &p.ratio {
            Some(q) => (
                rational_string(q),
                format!("{:.17e}", num::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)),
            ),
            None => (String::new(), String::new()),
        };
        w.write_record([
            p.n.to_string(),
            rational_string(&p.sum_measure),
            rational_string(&p.sum_intersections),
            ratio,
            approx,
        ])?;
    }
    finish(w)
}

pub fn table_csv(rows: &[TableRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "N",
        "plain",
        "theorem1",
        "theorem1_err",
        "hpv",
        "hpv_err",
        "bhhv",
        "bhhv_err",
    ])?;
    for r in rows {
        let [a, ae] = real_fields(&r.theorem1);
        let [b, be] = real_fields(&r.hpv);
        let [c, ce] = real_fields(&r.bhhv);
        w.write_record([
            r.n.to_string(),
            rational_string(&r.plain),
            a,
            ae,
            b,
            be,
            c,
            ce,
        ])?;
    }
    finish(w)
}

pub fn block_csv(reports: &[BlockReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "h",
        "base",
        "lo",
        "hi",
        "K",
        "k",
        "scaled_overlap",
        "product",
        "ratio",
        "chosen",
    ])?;
    for rep in reports {
        for s in &rep.per_k_sums {
            w.write_record([
                rep.h.to_string(),
                rep.base.to_string(),
                rep.lo.to_string(),
                rep.hi.to_string(),
                rep.k_max.to_string(),
                s.k.to_string(),
                rational_string(&s.scaled_overlap),
                rational_string(&s.product),
                s.ratio().map(|q| rational_string(&q)).unwrap_or_default(),
                (s.k == rep.chosen_k).to_string(),
            ])?;
        }
    }
    finish(w)
}
