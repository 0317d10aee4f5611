use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, parse_rational, rational_string, Rational};
use crate::error::{Error, Result};
use crate::overlap::{OverlapRecord, ThresholdClass};
use crate::real::DEFAULT_PRECISION;
use crate::schedule::{
    block_bounds, block_of, normalize_psi, select_k, BlockReport, PsiFunction, DEFAULT_BASE,
};

use super::bc::{bc_ratio, BcResult, BC_CAP};
use super::pipeline::{
    block_pairs, psi_star_pipeline, sweep_pairs, PsiStarAudit, EXHAUSTIVE_CAP, SAMPLE_CAP,
};
use super::report::records_csv;
use super::table::{divergence_table, TableRow};

fn default_k() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

fn default_base() -> u32 {
    DEFAULT_BASE
}

/// Pair corpus of an overlap sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PairCorpus {
    /// Explicit `[m, n]` pairs.
    List(Vec<(u64, u64)>),
    /// Every pair `lo ≤ m < n ≤ hi`.
    Exhaustive { lo: u64, hi: u64 },
    /// `count` seeded pairs with `lo ≤ m < n ≤ hi`.
    Sample {
        lo: u64,
        hi: u64,
        count: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockTask {
    pub h: u32,
    #[serde(default = "default_base")]
    pub base: u32,
    pub epsilon: String,
    #[serde(default)]
    pub sample: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiStarTask {
    #[serde(default = "default_base")]
    pub base: u32,
    pub epsilon: String,
    pub n_max: u64,
    #[serde(default)]
    pub sample: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcTask {
    #[serde(rename = "N")]
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableTask {
    pub epsilon: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default)]
    pub c: Option<String>,
}

/// A batch experiment, read from one JSON document. Rationals (ε, c, radii
/// inside ψ generators) are strings so that they stay exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// ψ generator: `half`, `recip`, `primes:R` or `file:PATH`.
    pub psi: String,
    #[serde(default)]
    pub pairs: Option<PairCorpus>,
    /// Sweep rows cover `k_min ≤ k ≤ K`.
    #[serde(rename = "K", default = "default_k")]
    pub k_max: u64,
    #[serde(default = "default_k")]
    pub k_min: u64,
    /// Compute the integral bound column.
    #[serde(default = "default_true")]
    pub integral: bool,
    #[serde(default)]
    pub precision: Option<u32>,
    /// Report the largest `P_{k_min}` over pairs lying in different blocks.
    #[serde(default)]
    pub cross_block_base: Option<u32>,
    #[serde(default)]
    pub block: Option<BlockTask>,
    #[serde(default)]
    pub psi_star: Option<PsiStarTask>,
    #[serde(default)]
    pub bc: Option<BcTask>,
    #[serde(default)]
    pub table: Option<TableTask>,
    /// CSV destination for the sweep rows.
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks caps and parameter consistency; returns the largest `n` at
    /// which ψ is needed.
    pub fn validate(&self) -> Result<u64> {
        let mut need = 1u64;
        if self.k_min > self.k_max {
            return Err(Error::Config(format!(
                "k_min = {} exceeds K = {}",
                self.k_min, self.k_max
            )));
        }
        match &self.pairs {
            None => {}
            Some(PairCorpus::List(list)) => {
                for &(m, n) in list {
                    if m == 0 || n == 0 || m == n {
                        return Err(Error::Config(format!("invalid pair ({m}, {n})")));
                    }
                    if m.max(n) > SAMPLE_CAP {
                        return Err(Error::Cap(format!(
                            "pair ({m}, {n}) exceeds n ≤ {SAMPLE_CAP}"
                        )));
                    }
                    need = need.max(m.max(n));
                }
            }
            Some(PairCorpus::Exhaustive { lo, hi }) => {
                if *lo == 0 || lo >= hi {
                    return Err(Error::Config(format!(
                        "invalid exhaustive range [{lo}, {hi}]"
                    )));
                }
                if *hi > EXHAUSTIVE_CAP {
                    return Err(Error::Cap(format!(
                        "exhaustive corpora are capped at n ≤ {EXHAUSTIVE_CAP}; use a sample"
                    )));
                }
                need = need.max(*hi);
            }
            Some(PairCorpus::Sample { lo, hi, .. }) => {
                if *lo == 0 || lo >= hi {
                    return Err(Error::Config(format!("invalid sample range [{lo}, {hi}]")));
                }
                if *hi > SAMPLE_CAP {
                    return Err(Error::Cap(format!(
                        "sampled corpora are capped at n ≤ {SAMPLE_CAP}"
                    )));
                }
                need = need.max(*hi);
            }
        }
        if let Some(b) = &self.block {
            parse_rational(&b.epsilon)?;
            if b.sample.is_some() != b.seed.is_some() {
                return Err(Error::Config(
                    "block sampling needs both sample and seed".into(),
                ));
            }
            let (_, hi) = block_bounds(b.h, b.base)?;
            let cap = if b.sample.is_some() {
                SAMPLE_CAP
            } else {
                EXHAUSTIVE_CAP
            };
            if hi - 1 > cap as u128 {
                return Err(Error::Cap(format!(
                    "block h = {} (base {}) reaches n = {}, beyond the cap n ≤ {cap}",
                    b.h,
                    b.base,
                    hi - 1
                )));
            }
            need = need.max((hi - 1) as u64);
        }
        if let Some(p) = &self.psi_star {
            parse_rational(&p.epsilon)?;
            if p.sample.is_some() != p.seed.is_some() {
                return Err(Error::Config(
                    "ψ* sampling needs both sample and seed".into(),
                ));
            }
            let cap = if p.sample.is_some() {
                SAMPLE_CAP
            } else {
                EXHAUSTIVE_CAP
            };
            if p.n_max > cap {
                return Err(Error::Cap(format!("ψ* pipeline capped at n ≤ {cap}")));
            }
            need = need.max(p.n_max);
        }
        if let Some(b) = &self.bc {
            if b.n > BC_CAP {
                return Err(Error::Cap(format!("bc_ratio capped at N ≤ {BC_CAP}")));
            }
            need = need.max(b.n);
        }
        if let Some(t) = &self.table {
            parse_rational(&t.epsilon)?;
            if let Some(c) = &t.c {
                parse_rational(c)?;
            }
            need = need.max(t.n);
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be ≥ 1".into()));
        }
        Ok(need)
    }
}

/// Everything a run produced besides the CSV bytes.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub psi: String,
    pub pair_count: usize,
    pub row_count: usize,
    /// `max P_exact / pv_product` over all rows, with its `(m, n, k)`.
    pub max_p_over_pv: Option<(Rational, (u64, u64, u64))>,
    /// `max_{(m,n)} Σ_k P_k / #k`, with its pair.
    pub max_mean_p: Option<(Rational, (u64, u64))>,
    /// Largest PV product among above-window rows.
    pub max_pv_above_window: Option<Rational>,
    pub max_cross_block_p: Option<Rational>,
    pub block: Option<BlockReport>,
    pub psi_star: Option<PsiStarAudit>,
    pub bc: Option<BcResult>,
    pub table: Option<Vec<TableRow>>,
}

pub struct RunOutput {
    pub csv: Vec<u8>,
    pub records: Vec<OverlapRecord>,
    pub summary: RunSummary,
}

fn max_by_key<T: Clone + PartialOrd, K: Clone>(acc: &mut Option<(T, K)>, v: T, key: K) {
    if acc.as_ref().is_none_or(|(best, _)| v > *best) {
        *acc = Some((v, key));
    }
}

fn summarize_records(records: &[OverlapRecord], cross_base: Option<u32>, k_min: u64) -> RunSummary {
    let mut max_p_over_pv = None;
    let mut max_pv_above_window: Option<Rational> = None;
    let mut max_cross: Option<Rational> = None;
    let mut sums: BTreeMap<(u64, u64), (Rational, u64)> = BTreeMap::new();
    for r in records {
        max_by_key(
            &mut max_p_over_pv,
            &r.p_exact / &r.pv_product,
            (r.m, r.n, r.k),
        );
        if r.threshold_class == ThresholdClass::AboveWindow
            && max_pv_above_window
                .as_ref()
                .is_none_or(|b| &r.pv_product > b)
        {
            max_pv_above_window = Some(r.pv_product.clone());
        }
        if let Some(base) = cross_base {
            if r.k == k_min
                && block_of(r.m as u128, base) != block_of(r.n as u128, base)
                && max_cross.as_ref().is_none_or(|b| &r.p_exact > b)
            {
                max_cross = Some(r.p_exact.clone());
            }
        }
        let e = sums.entry((r.m, r.n)).or_insert((Rational::zero(), 0));
        e.0 += &r.p_exact;
        e.1 += 1;
    }
    let mut max_mean_p = None;
    for (pair, (total, count)) in &sums {
        max_by_key(&mut max_mean_p, total / int(*count), *pair);
    }
    RunSummary {
        psi: String::new(),
        pair_count: sums.len(),
        row_count: records.len(),
        max_p_over_pv,
        max_mean_p,
        max_pv_above_window,
        max_cross_block_p: max_cross,
        block: None,
        psi_star: None,
        bc: None,
        table: None,
    }
}

fn corpus_pairs(corpus: &PairCorpus) -> Vec<(u64, u64)> {
    match corpus {
        PairCorpus::List(list) => list.clone(),
        PairCorpus::Exhaustive { lo, hi } => crate::schedule::all_pairs(*lo, *hi + 1),
        PairCorpus::Sample {
            lo,
            hi,
            count,
            seed,
        } => crate::schedule::sample_pairs(*lo, *hi + 1, *count, *seed),
    }
}

fn run_inner(config: &ExperimentConfig, need: u64) -> Result<RunOutput> {
    let precision = config.precision.unwrap_or(DEFAULT_PRECISION);
    let psi = normalize_psi(&PsiFunction::parse(&config.psi, need)?)?;
    let psi = if psi.n_max() < need {
        return Err(Error::Config(format!(
            "ψ from {} covers only 1..={}, need {need}",
            config.psi,
            psi.n_max()
        )));
    } else {
        psi
    };

    let records = match &config.pairs {
        Some(corpus) => sweep_pairs(
            &psi,
            &corpus_pairs(corpus),
            config.k_min,
            config.k_max,
            config.integral.then_some(precision),
        )?,
        None => Vec::new(),
    };
    let mut summary = summarize_records(&records, config.cross_block_base, config.k_min);
    summary.psi = psi.tag();

    if let Some(b) = &config.block {
        let eps = parse_rational(&b.epsilon)?;
        let sample = b.sample.zip(b.seed);
        let pairs = block_pairs(b.h, b.base, None, sample)?;
        summary.block = Some(select_k(b.h, b.base, &psi, &eps, &pairs, b.seed)?);
    }
    if let Some(p) = &config.psi_star {
        let eps = parse_rational(&p.epsilon)?;
        summary.psi_star = Some(psi_star_pipeline(
            &psi,
            p.base,
            &eps,
            p.n_max,
            p.sample.zip(p.seed),
            precision,
        )?);
    }
    if let Some(b) = &config.bc {
        summary.bc = Some(bc_ratio(&psi, b.n)?);
    }
    if let Some(t) = &config.table {
        let eps = parse_rational(&t.epsilon)?;
        let c = match &t.c {
            Some(c) => parse_rational(c)?,
            None => int(1),
        };
        summary.table = Some(divergence_table(&eps, t.n, &psi, &c, precision)?);
    }

    let csv = records_csv(&records)?;
    Ok(RunOutput {
        csv,
        records,
        summary,
    })
}

/// Runs every task in the config. The CSV holds the sweep rows sorted by
/// `(m, n, k)`; it is written to `config.out` when set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let need = config.validate()?;
    let out = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?
            .install(|| run_inner(config, need))?,
        None => run_inner(config, need)?,
    };
    if let Some(path) = &config.out {
        std::fs::write(path, &out.csv)?;
    }
    Ok(out)
}

fn approx(q: &Rational) -> String {
    format!("{:.6}", q.to_f64().unwrap_or(f64::NAN))
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "psi: {}", self.psi)?;
        if self.row_count > 0 {
            writeln!(f, "pairs: {}  rows: {}", self.pair_count, self.row_count)?;
        }
        if let Some((q, (m, n, k))) = &self.max_p_over_pv {
            writeln!(
                f,
                "max P/pv_bound: {} ≈ {} at (m, n, k) = ({m}, {n}, {k})",
                rational_string(q),
                approx(q)
            )?;
        }
        if let Some((q, (m, n))) = &self.max_mean_p {
            writeln!(
                f,
                "max mean_k P_k: {} ≈ {} at (m, n) = ({m}, {n})",
                rational_string(q),
                approx(q)
            )?;
        }
        if let Some(q) = &self.max_pv_above_window {
            writeln!(
                f,
                "max pv_bound above window: {} ≈ {}",
                rational_string(q),
                approx(q)
            )?;
        }
        if let Some(q) = &self.max_cross_block_p {
            writeln!(
                f,
                "max cross-block P: {} ≈ {}",
                rational_string(q),
                approx(q)
            )?;
        }
        if let Some(b) = &self.block {
            writeln!(
                f,
                "block h = {} base {} [{}, {}): K = {}, pairs = {}, chosen k = {}",
                b.h, b.base, b.lo, b.hi, b.k_max, b.pair_count, b.chosen_k
            )?;
        }
        if let Some(a) = &self.psi_star {
            let list: Vec<String> = a.chosen.iter().map(|(h, k)| format!("{h}:{k}")).collect();
            writeln!(
                f,
                "psi* base {} eps {} N = {}: chosen k(h) = [{}]",
                a.base,
                a.epsilon,
                a.n_max,
                list.join(", ")
            )?;
            writeln!(
                f,
                "psi* audit: support on even blocks only = {}, matches definition = {}, E*_n ⊆ E_n = {}",
                a.support_even_only, a.matches_definition, a.sets_nested
            )?;
            if let (Some(lo), Some(hi)) = (&a.ratio_min, &a.ratio_max) {
                writeln!(
                    f,
                    "psi*·L^eps/psi window: [{:.12}, {:.12}]",
                    lo.to_f64(),
                    hi.to_f64()
                )?;
            }
        }
        if let Some(b) = &self.bc {
            let n = b.partials.len();
            writeln!(
                f,
                "bc_ratio(N = {n}) = {} ≈ {}",
                rational_string(&b.ratio),
                approx(&b.ratio)
            )?;
        }
        if let Some(rows) = &self.table {
            if let Some(r) = rows.last() {
                writeln!(
                    f,
                    "series at N = {}: plain ≈ {}, theorem1 ≈ {:.9}, hpv ≈ {:.9}, bhhv ≈ {:.9}",
                    r.n,
                    approx(&r.plain),
                    r.theorem1.to_f64(),
                    r.hpv.to_f64(),
                    r.bhhv.to_f64()
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_list_rows() {
        let cfg = ExperimentConfig::from_json(
            r#"{"psi": "half", "pairs": {"list": [[2, 3], [6, 10]]}, "K": 1}"#,
        )
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        let text = String::from_utf8(out.csv).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("m,n,k,r,s,t,gcd,delta,Delta,D_k,pv_product,P_exact_num"));
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            ExperimentConfig::from_json("{}"),
            Err(Error::Json(_))
        ));
        let cap = ExperimentConfig::from_json(
            r#"{"psi": "half", "pairs": {"exhaustive": {"lo": 2, "hi": 5000}}}"#,
        )
        .unwrap();
        assert!(matches!(run_experiment(&cap), Err(Error::Cap(_))));
        let bad = ExperimentConfig::from_json(r#"{"psi": "nope", "bc": {"N": 3}}"#).unwrap();
        assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));
        let missing_seed = ExperimentConfig::from_json(
            r#"{"psi": "half", "block": {"h": 1, "epsilon": "1", "sample": 10}}"#,
        )
        .unwrap();
        assert!(matches!(
            run_experiment(&missing_seed),
            Err(Error::Config(_))
        ));
        let bc = ExperimentConfig::from_json(r#"{"psi": "half", "bc": {"N": 501}}"#).unwrap();
        assert!(matches!(run_experiment(&bc), Err(Error::Cap(_))));
    }

    #[test]
    fn all_tasks() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "psi": "half",
                "pairs": {"sample": {"lo": 2, "hi": 200, "count": 50, "seed": 9}},
                "K": 3, "k_min": 0, "integral": true, "precision": 96,
                "cross_block_base": 2,
                "block": {"h": 1, "base": 4, "epsilon": "1", "sample": 40, "seed": 3},
                "psi_star": {"base": 2, "epsilon": "1", "n_max": 40},
                "bc": {"N": 20},
                "table": {"epsilon": "1/2", "N": 100, "c": "1"}
            }"#,
        )
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 200);
        let s = out.summary.to_string();
        for needle in [
            "max P/pv_bound",
            "chosen k(h)",
            "bc_ratio(N = 20)",
            "series at N = 100",
            "block h = 1",
        ] {
            assert!(s.contains(needle), "{s}");
        }
        assert!(out.summary.psi_star.as_ref().unwrap().support_even_only);
    }
}
