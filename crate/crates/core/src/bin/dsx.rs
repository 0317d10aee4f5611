use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dsx_core::arith::{factor_phi, parse_rational, rational_string};
use dsx_core::harness::{
    bc_csv, bc_ratio, block_csv, block_pairs, divergence_table, records_csv, run_experiment,
    ExperimentConfig,
};
use dsx_core::overlap::{averaged_sum, decompose_pair, exact_p, pv_bound, scaled_d, OverlapRecord};
use dsx_core::real::DEFAULT_PRECISION;
use dsx_core::schedule::{normalize_psi, select_k, PsiFunction};
use dsx_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dsx",
    version,
    about = "Exact overlap experiments for Duffin–Schaeffer sets"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the CSV output here.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Binary precision for logarithmic diagnostics.
    #[arg(long, global = true)]
    precision: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Factorization and Euler totient of N.
    Phi { n: u64 },
    /// r, s, t decomposition, D, the PV product and P(m, n).
    Pair {
        m: u64,
        n: u64,
        #[arg(long, default_value = "half")]
        psi: String,
    },
    /// One overlap record at scale k.
    Overlap {
        m: u64,
        n: u64,
        #[arg(long, default_value_t = 0)]
        k: u64,
        #[arg(long, default_value = "half")]
        psi: String,
    },
    /// Σ_{k ≤ K} P_k(m, n).
    Avgsum {
        m: u64,
        n: u64,
        #[arg(long = "K")]
        k_max: u64,
        #[arg(long, default_value = "half")]
        psi: String,
    },
    /// Choose k(h) on one block.
    Block {
        #[arg(long)]
        h: u32,
        #[arg(long, default_value_t = 4)]
        base: u32,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "half")]
        psi: String,
    },
    /// Borel–Cantelli ratio up to N.
    Bc {
        #[arg(long)]
        psi: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// Divergence-series partial sums.
    Table {
        #[arg(long)]
        eps: String,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value = "half")]
        psi: String,
        /// Constant in the exp(c·log n/log log n) factor.
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// Run a JSON experiment config.
    Run { config: String },
}

fn psi_for(spec: &str, n_max: u64) -> Result<PsiFunction> {
    let psi = normalize_psi(&PsiFunction::parse(spec, n_max)?)?;
    if psi.n_max() < n_max {
        return Err(Error::Config(format!(
            "ψ from {spec} covers only 1..={}, need {n_max}",
            psi.n_max()
        )));
    }
    Ok(psi)
}

fn emit(out: &Option<String>, csv: Vec<u8>) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let precision = cli.common.precision.unwrap_or(DEFAULT_PRECISION);
    let out = &cli.common.out;
    match cli.command {
        Command::Phi { n } => {
            let (f, phi) = factor_phi(n)?;
            println!("n = {n}");
            println!("factorization = {f}");
            println!("phi = {phi}");
        }
        Command::Pair { m, n, psi } => {
            let psi = psi_for(&psi, m.max(n))?;
            let d = decompose_pair(m, n, &psi)?;
            println!("m = {m}, n = {n}");
            println!("r = {}, s = {}, t = {}, gcd = {}", d.r, d.s, d.t, d.g);
            println!(
                "delta = {}, Delta = {}",
                rational_string(&d.delta),
                rational_string(&d.big_delta)
            );
            println!("D = {}", rational_string(&scaled_d(&d, 0)));
            println!("pv_product = {}", rational_string(&pv_bound(&d, 0)));
            match exact_p(m, n, &psi, 0) {
                Ok(p) => println!("P = {}", rational_string(&p)),
                Err(Error::UndefinedRatio(_)) => println!("P = undefined (empty set)"),
                Err(e) => return Err(e),
            }
        }
        Command::Overlap { m, n, k, psi } => {
            let psi = psi_for(&psi, m.max(n))?;
            let rec = OverlapRecord::compute(m, n, &psi, k, k.max(1), Some(precision))?;
            let csv = records_csv(std::slice::from_ref(&rec))?;
            print!("{}", String::from_utf8_lossy(&csv));
            emit(out, csv)?;
        }
        Command::Avgsum { m, n, k_max, psi } => {
            let psi = psi_for(&psi, m.max(n))?;
            let s = averaged_sum(m, n, &psi, k_max, Some(precision))?;
            println!("total = {}", rational_string(&s.total));
            println!("total/K = {}", rational_string(&s.mean()));
            println!("(log K)(log log n) = {}", s.endup_bound);
            for r in &s.per_k {
                println!(
                    "k = {}: P_k = {} [{}]",
                    r.k,
                    rational_string(&r.p_exact),
                    r.threshold_class
                );
            }
            emit(out, records_csv(&s.per_k)?)?;
        }
        Command::Block {
            h,
            base,
            eps,
            sample,
            seed,
            psi,
        } => {
            let eps = parse_rational(&eps)?;
            let sample = match (sample, seed) {
                (Some(s), Some(seed)) => Some((s, seed)),
                (None, None) => None,
                _ => return Err(Error::Config("--sample and --seed go together".into())),
            };
            let pairs = block_pairs(h, base, None, sample)?;
            let top = pairs.iter().map(|p| p.1).max().unwrap_or(1);
            let psi = psi_for(&psi, top)?;
            let rep = select_k(h, base, &psi, &eps, &pairs, seed)?;
            println!(
                "block h = {h}, base {base}: [{}, {}), K = {}, pairs = {}",
                rep.lo, rep.hi, rep.k_max, rep.pair_count
            );
            for s in &rep.per_k_sums {
                let ratio = s
                    .ratio()
                    .map(|q| format!("{:.9}", num::ToPrimitive::to_f64(&q).unwrap_or(f64::NAN)));
                println!(
                    "k = {}: ratio = {}",
                    s.k,
                    ratio.unwrap_or_else(|| "undefined".into())
                );
            }
            println!("chosen k = {}", rep.chosen_k);
            emit(out, block_csv(std::slice::from_ref(&rep))?)?;
        }
        Command::Bc { psi, n } => {
            let psi = psi_for(&psi, n)?;
            let r = bc_ratio(&psi, n)?;
            println!("bc_ratio = {}", rational_string(&r.ratio));
            println!(
                "approx = {:.12}",
                num::ToPrimitive::to_f64(&r.ratio).unwrap_or(f64::NAN)
            );
            emit(out, bc_csv(&r)?)?;
        }
        Command::Table { eps, n, psi, c } => {
            let psi = psi_for(&psi, n)?;
            let rows = divergence_table(
                &parse_rational(&eps)?,
                n,
                &psi,
                &parse_rational(&c)?,
                precision,
            )?;
            let csv = dsx_core::harness::table_csv(&rows)?;
            print!("{}", String::from_utf8_lossy(&csv));
            emit(out, csv)?;
        }
        Command::Run { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if out.is_some() {
                cfg.out = out.clone();
            }
            if cli.common.jobs.is_some() {
                cfg.jobs = cli.common.jobs;
            }
            if cli.common.precision.is_some() {
                cfg.precision = cli.common.precision;
            }
            let result = run_experiment(&cfg)?;
            print!("{}", result.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dsx: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
