//! Quantum distributions and a bounded, normalized KL divergence.
//!
//! A quantum distribution spreads `M` indivisible dots over `n` cells with at
//! least one dot per cell, so every probability is a positive multiple of
//! `1/M`. Among all distributions over the same `M` and `n`, the one farthest
//! from `P` in KL terms is known in closed form ([`build_maximizer`]), which
//! gives a normalized divergence [`kn`] in `[0, 1]`.
//!
//! The crate also enumerates and counts these distributions, checks the
//! maximizer against brute force, and runs the comparison experiments that
//! the `qdiv` CLI exposes.

pub mod distribution;
pub mod divergence;
pub mod enumeration;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod stats;

pub use distribution::{make_comparable, OrderedQuantumDistribution, QuantumDistribution};
pub use divergence::{
    build_maximizer, compare_rescaled, hellinger, hellinger_squared, jaccard_distance, jsd, kl, kn,
    measure_row, KnNormalizer, MaximizerResult, Measure, MeasureRow, MeasureValue,
};
pub use enumeration::{
    count_ordered, count_unordered, enumerate_ordered, enumerate_unordered, EnumerationSpec,
};
pub use error::{Error, Result};
pub use experiment::{
    emit_tables, run_pairwise_experiment, run_rank_comparison, run_uniform_study, ExperimentRecord,
    SelfComparison, Statistic, Tables, UniformStudy, UniformStudyRow,
};
pub use oracle::{brute_force_max_kl, special_case_gap, verify_maximizer_sweep, MaximalityReport};
pub use stats::{
    distribution_properties, gap_stats, pearson, spearman, DistributionProperties, GapStats,
};
