//! Experiment harness: the Borel–Cantelli ratio, divergence tables, pair
//! sweeps, the ψ* pipeline, and CSV output.

mod bc;
mod pipeline;
mod report;
mod run;
mod table;

pub use bc::{bc_ratio, BcPartial, BcResult, BC_CAP};
pub use pipeline::{
    block_pairs, psi_star_pipeline, sweep_pairs, PsiStarAudit, EXHAUSTIVE_CAP, SAMPLE_CAP,
};
pub use report::{bc_csv, block_csv, records_csv, table_csv, RECORD_COLUMNS};
pub use run::{
    run_experiment, BcTask, BlockTask, ExperimentConfig, PairCorpus, PsiStarTask, RunOutput,
    RunSummary, TableTask,
};
pub use table::{checkpoints, divergence_table, TableRow, TABLE_CAP};
