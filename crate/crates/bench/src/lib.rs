//! Synthetic EMR-shaped workloads and the scaling benchmarks over them.

pub mod config;
pub mod error;
pub mod generate;
pub mod rules;
pub mod runner;
pub mod stats;

pub use config::{BenchConfig, BenchmarkTask, GenerationConfig, RuleSpec, TaskId};
pub use error::BenchError;
pub use generate::{generate_dataset, plan_counts, EntityCounts};
pub use rules::{classify_selectivity, generate_rules, predicate_pairs, RuleSet, Selectivity, SelectivityBands};
pub use runner::{
    locate_fixtures, prepare_fixtures, run_benchmark, BenchmarkReport, InProcess, StepExecutor, Subprocess,
};
pub use stats::{LinearFit, TrimmedStats};

pub type TimingStats = TrimmedStats<f64>;
pub type TimingFit = LinearFit<f64>;
