//! Experiment sweeps over enumerated distributions and their CSV output.
//!
//! * [`run_pairwise_experiment`]: every ordered pair of unordered distributions.
//! * [`run_uniform_study`]: every ordered distribution against the uniform one.
//! * [`emit_tables`]: per-measure maxima and mean/max ratios across a grid of
//!   `(cells, dots)`.
//! * [`run_rank_comparison`]: rankings induced by each measure in a uniform
//!   study, compared with Spearman's coefficient.
//!
//! Rows are computed in parallel with rayon and assembled in enumeration
//! order, so the CSV bytes do not depend on the number of worker threads.
//!
//! In every experiment the `hellinger` column holds the squared Hellinger
//! distance `1 - sum sqrt(P_i Q_i)`.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::distribution::{OrderedQuantumDistribution, QuantumDistribution};
use crate::divergence::{measure_row_unchecked, KnNormalizer, Measure, MeasureRow};
use crate::enumeration::{count_to_u128, EnumerationSpec};
use crate::error::{Error, Result};
use crate::stats::{
    average_ranks, distribution_properties, gap_stats, pearson, spearman, DistributionProperties,
    GapStats,
};

/// Default cap on the number of pairs in a pairwise experiment.
pub const DEFAULT_PAIR_BUDGET: u128 = 2_000_000;

fn real(x: f64) -> String {
    format!("{x:.6}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn measure_header(prefix: &str) -> String {
    Measure::ALL
        .iter()
        .map(|m| format!("{prefix}{}", m.name()))
        .collect::<Vec<_>>()
        .join(",")
}

fn row_fields(row: &MeasureRow) -> String {
    Measure::ALL
        .iter()
        .map(|&m| real(row.get(m)))
        .collect::<Vec<_>>()
        .join(",")
}

fn quoted(d: &QuantumDistribution) -> String {
    format!("\"{d}\"")
}

// ---------------------------------------------------------------------------
// Pairwise experiment

/// All measures for every ordered pair `(P, Q)` of unordered distributions.
#[derive(Debug, Clone)]
pub struct PairwiseExperiment {
    pub spec: EnumerationSpec,
    pub distributions: Vec<QuantumDistribution>,
    /// Row-major: the pair `(i, j)` lives at `i * len + j`.
    pub rows: Vec<MeasureRow>,
}

/// Correlations and spread statistics of a pairwise experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseSummary {
    /// Pearson coefficient for every unordered pair of distinct measures.
    pub correlations: Vec<(Measure, Measure, f64)>,
    pub spreads: Vec<(Measure, GapStats)>,
}

impl PairwiseSummary {
    pub fn correlation(&self, a: Measure, b: Measure) -> Option<f64> {
        self.correlations
            .iter()
            .find(|(x, y, _)| (*x, *y) == (a, b) || (*x, *y) == (b, a))
            .map(|c| c.2)
    }

    pub fn spread(&self, m: Measure) -> Option<GapStats> {
        self.spreads.iter().find(|(x, _)| *x == m).map(|s| s.1)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "kind,measure_a,measure_b,value,distinct_count,mean_gap,sd_gap,mean_over_max"
        )?;
        for (a, b, r) in &self.correlations {
            writeln!(w, "pearson,{a},{b},{},,,,", real(*r))?;
        }
        for (m, g) in &self.spreads {
            writeln!(
                w,
                "spread,{m},,,{},{:.9},{:.9},{}",
                g.distinct_count,
                g.mean_gap,
                g.sd_gap,
                real(g.mean_over_max)
            )?;
        }
        Ok(())
    }
}

impl PairwiseExperiment {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, m: Measure) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(m)).collect()
    }

    pub fn summary(&self) -> Result<PairwiseSummary> {
        let columns: Vec<(Measure, Vec<f64>)> =
            Measure::ALL.iter().map(|&m| (m, self.column(m))).collect();
        let mut correlations = Vec::new();
        for (i, (a, xa)) in columns.iter().enumerate() {
            for (b, xb) in &columns[i + 1..] {
                correlations.push((*a, *b, pearson(xa, xb)?));
            }
        }
        let spreads = columns.iter().map(|(m, xs)| (*m, gap_stats(xs))).collect();
        Ok(PairwiseSummary {
            correlations,
            spreads,
        })
    }

    /// One line per pair: `index_p,index_q,kl,kn,jsd,hellinger,jaccard`.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(w);
        writeln!(w, "index_p,index_q,kl,kn,jsd,hellinger,jaccard")?;
        let n = self.distributions.len();
        for (k, r) in self.rows.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                k / n,
                k % n,
                real(r.kl),
                real(r.kn),
                real(r.jsd),
                real(r.hellinger),
                real(r.jaccard)
            )?;
        }
        w.flush()
    }

    /// Index of every distribution: `index,distribution`.
    pub fn write_index_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "index,distribution")?;
        for (i, d) in self.distributions.iter().enumerate() {
            writeln!(w, "{i},{}", quoted(d))?;
        }
        Ok(())
    }
}

/// Compares every unordered distribution over `total` dots and `cells` cells
/// with every other one, self-pairs included.
pub fn run_pairwise_experiment(
    total: u64,
    cells: usize,
    budget: u128,
) -> Result<PairwiseExperiment> {
    let spec = EnumerationSpec::new(total, cells)?;
    let count = count_to_u128(&spec.count_unordered()).unwrap_or(u128::MAX);
    let pairs = count.saturating_mul(count);
    if pairs > budget {
        return Err(Error::BudgetExceeded {
            what: "pairwise experiment",
            needed: pairs,
            budget,
        });
    }
    let distributions: Vec<QuantumDistribution> = spec.unordered().collect();
    let normalizers: Vec<f64> = distributions
        .par_iter()
        .map(|p| KnNormalizer::Maximizer.normalizer(p))
        .collect();
    let rows: Vec<MeasureRow> = distributions
        .par_iter()
        .zip(normalizers.par_iter())
        .flat_map_iter(|(p, &norm)| {
            distributions
                .iter()
                .map(move |q| measure_row_unchecked(p, q, norm))
        })
        .collect();
    Ok(PairwiseExperiment {
        spec,
        distributions,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Uniform study

/// One ordered distribution compared against the uniform distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformStudyRow {
    pub distribution: OrderedQuantumDistribution,
    /// `measure(P, uniform)` with `P` as the first argument.
    pub values: MeasureRow,
    pub properties: DistributionProperties,
    /// Average ranks, ascending by value, in the order of [`Measure::ALL`].
    pub ranks: [f64; 5],
}

impl UniformStudyRow {
    pub fn rank(&self, m: Measure) -> f64 {
        self.ranks[measure_slot(m)]
    }
}

fn measure_slot(m: Measure) -> usize {
    Measure::ALL.iter().position(|&x| x == m).expect("listed")
}

/// Whether the uniform distribution's comparison with itself counts towards means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfComparison {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformStudy {
    pub spec: EnumerationSpec,
    pub uniform: QuantumDistribution,
    pub rows: Vec<UniformStudyRow>,
}

impl UniformStudy {
    pub fn column(&self, m: Measure) -> Vec<f64> {
        self.rows.iter().map(|r| r.values.get(m)).collect()
    }

    pub fn max(&self, m: Measure) -> f64 {
        self.column(m).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean value divided by the maximum value of a measure.
    pub fn mean_over_max(&self, m: Measure, convention: SelfComparison) -> f64 {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| convention == SelfComparison::Include || *r.distribution != self.uniform)
            .map(|r| r.values.get(m))
            .collect();
        let max = self.max(m);
        if values.is_empty() || max == 0.0 {
            return 0.0;
        }
        values.iter().sum::<f64>() / values.len() as f64 / max
    }

    /// Row with the largest value of `m`; the first such row on ties.
    pub fn argmax(&self, m: Measure) -> &UniformStudyRow {
        let mut best = &self.rows[0];
        for r in &self.rows[1..] {
            if r.values.get(m) > best.values.get(m) {
                best = r;
            }
        }
        best
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(w);
        writeln!(
            w,
            "index,distribution,{},entropy,cv,skewness,excess_kurtosis,{}",
            measure_header(""),
            measure_header("rank_")
        )?;
        for (i, r) in self.rows.iter().enumerate() {
            let ranks = r
                .ranks
                .iter()
                .map(|&x| real(x))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                w,
                "{i},{},{},{},{},{},{},{ranks}",
                quoted(&r.distribution),
                row_fields(&r.values),
                real(r.properties.entropy),
                real(r.properties.cv),
                opt_real(r.properties.skewness),
                opt_real(r.properties.excess_kurtosis),
            )?;
        }
        w.flush()
    }
}

/// Compares every ordered distribution over `total` dots and `cells` cells
/// with the uniform distribution over the same dots and cells.
pub fn run_uniform_study(total: u64, cells: usize) -> Result<UniformStudy> {
    run_uniform_study_with(total, cells, KnNormalizer::Maximizer)
}

/// [`run_uniform_study`] with an explicit KN normalizer.
pub fn run_uniform_study_with(
    total: u64,
    cells: usize,
    normalizer: KnNormalizer,
) -> Result<UniformStudy> {
    let spec = EnumerationSpec::new(total, cells)?;
    if !total.is_multiple_of(cells as u64) {
        return Err(Error::NonUniformCapable { dots: total, cells });
    }
    let uniform = QuantumDistribution::uniform(cells, total / cells as u64)?;
    let dists: Vec<OrderedQuantumDistribution> = spec.ordered().collect();
    let values: Vec<(MeasureRow, DistributionProperties)> = dists
        .par_iter()
        .map(|p| {
            let norm = normalizer.normalizer(p);
            (
                measure_row_unchecked(p, &uniform, norm),
                distribution_properties(p),
            )
        })
        .collect();

    let rank_columns: Vec<Vec<f64>> = Measure::ALL
        .iter()
        .map(|&m| average_ranks(&values.iter().map(|(v, _)| v.get(m)).collect::<Vec<_>>()))
        .collect();
    let rows = dists
        .into_iter()
        .zip(values)
        .enumerate()
        .map(
            |(i, (distribution, (values, properties)))| UniformStudyRow {
                distribution,
                values,
                properties,
                ranks: std::array::from_fn(|k| rank_columns[k][i]),
            },
        )
        .collect();
    Ok(UniformStudy {
        spec,
        uniform,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Tables

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Max,
    MeanOverMax,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Max => "max",
            Statistic::MeanOverMax => "mean_over_max",
        }
    }
}

/// One value of one table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub cells: usize,
    pub dots: u64,
    pub measure: Measure,
    pub statistic: Statistic,
    pub value: f64,
}

/// Per-measure maxima and mean/max ratios over a grid of uniform studies.
#[derive(Debug, Clone, PartialEq)]
pub struct Tables {
    /// `(cells, dots)` in the order they were run.
    pub grid: Vec<(usize, u64)>,
    pub maxima: Vec<ExperimentRecord>,
    pub ratios: Vec<ExperimentRecord>,
    pub convention: SelfComparison,
}

impl Tables {
    pub fn value(&self, cells: usize, dots: u64, m: Measure, stat: Statistic) -> Option<f64> {
        let src = match stat {
            Statistic::Max => &self.maxima,
            Statistic::MeanOverMax => &self.ratios,
        };
        src.iter()
            .find(|r| r.cells == cells && r.dots == dots && r.measure == m)
            .map(|r| r.value)
    }

    /// Mean of the mean/max ratio of `m` across the whole grid.
    pub fn average_ratio(&self, m: Measure) -> f64 {
        let xs: Vec<f64> = self
            .ratios
            .iter()
            .filter(|r| r.measure == m)
            .map(|r| r.value)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn write_wide<W: Write>(&self, mut w: W, stat: Statistic, with_avg: bool) -> io::Result<()> {
        writeln!(w, "cells,dots,{}", measure_header(""))?;
        for &(cells, dots) in &self.grid {
            let vals = Measure::ALL
                .iter()
                .map(|&m| real(self.value(cells, dots, m, stat).unwrap_or(f64::NAN)))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(w, "{cells},{dots},{vals}")?;
        }
        if with_avg {
            let vals = Measure::ALL
                .iter()
                .map(|&m| real(self.average_ratio(m)))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(w, "avg,,{vals}")?;
        }
        Ok(())
    }

    /// Maxima, one row per `(cells, dots)`.
    pub fn write_maxima_csv<W: Write>(&self, w: W) -> io::Result<()> {
        self.write_wide(w, Statistic::Max, false)
    }

    /// Mean/max ratios, one row per `(cells, dots)`, then an `avg` row.
    pub fn write_ratios_csv<W: Write>(&self, w: W) -> io::Result<()> {
        self.write_wide(w, Statistic::MeanOverMax, true)
    }

    /// Long format: `cells,dots,measure,statistic,value`.
    pub fn write_records_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "cells,dots,measure,statistic,value")?;
        for r in self.maxima.iter().chain(&self.ratios) {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.cells,
                r.dots,
                r.measure,
                r.statistic.name(),
                real(r.value)
            )?;
        }
        Ok(())
    }
}

/// Runs a uniform study for every `cells` and every `dots = cells * multiplier`.
pub fn emit_tables(
    cells_range: &[usize],
    dots_multipliers: &[u64],
    convention: SelfComparison,
) -> Result<Tables> {
    emit_tables_with(
        cells_range,
        dots_multipliers,
        convention,
        KnNormalizer::Maximizer,
    )
}

pub fn emit_tables_with(
    cells_range: &[usize],
    dots_multipliers: &[u64],
    convention: SelfComparison,
    normalizer: KnNormalizer,
) -> Result<Tables> {
    let mut grid = Vec::new();
    let mut maxima = Vec::new();
    let mut ratios = Vec::new();
    for &cells in cells_range {
        for &mult in dots_multipliers {
            let dots = (cells as u64)
                .checked_mul(mult)
                .ok_or(Error::Overflow("computing dots"))?;
            let study = run_uniform_study_with(dots, cells, normalizer)?;
            grid.push((cells, dots));
            for m in Measure::ALL {
                let record = |statistic, value| ExperimentRecord {
                    cells,
                    dots,
                    measure: m,
                    statistic,
                    value,
                };
                maxima.push(record(Statistic::Max, study.max(m)));
                ratios.push(record(
                    Statistic::MeanOverMax,
                    study.mean_over_max(m, convention),
                ));
            }
        }
    }
    Ok(Tables {
        grid,
        maxima,
        ratios,
        convention,
    })
}

// ---------------------------------------------------------------------------
// Rank comparison

#[derive(Debug, Clone, PartialEq)]
pub struct RankComparison {
    pub study: UniformStudy,
    /// Spearman coefficient for every ordered pair of measures, diagonal included.
    pub spearman: Vec<(Measure, Measure, f64)>,
}

impl RankComparison {
    pub fn coefficient(&self, a: Measure, b: Measure) -> f64 {
        self.spearman
            .iter()
            .find(|(x, y, _)| *x == a && *y == b)
            .map(|c| c.2)
            .expect("all pairs are present")
    }

    /// `1 - rho`: how far two rankings are from agreeing.
    pub fn discordance(&self, a: Measure, b: Measure) -> f64 {
        1.0 - self.coefficient(a, b)
    }

    /// Rank columns, one row per ordered distribution.
    pub fn write_ranks_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(w);
        writeln!(w, "index,distribution,{}", measure_header("rank_"))?;
        for (i, r) in self.study.rows.iter().enumerate() {
            let ranks = r
                .ranks
                .iter()
                .map(|&x| real(x))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(w, "{i},{},{ranks}", quoted(&r.distribution))?;
        }
        w.flush()
    }

    /// Spearman matrix, long format.
    pub fn write_spearman_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "measure_a,measure_b,spearman,discordance")?;
        for &(a, b, rho) in &self.spearman {
            writeln!(w, "{a},{b},{},{}", real(rho), real(1.0 - rho))?;
        }
        Ok(())
    }
}

/// Ranks the ordered distributions by each measure's divergence from uniform
/// and compares the rankings.
pub fn run_rank_comparison(total: u64, cells: usize) -> Result<RankComparison> {
    let study = run_uniform_study(total, cells)?;
    let columns: Vec<Vec<f64>> = Measure::ALL.iter().map(|&m| study.column(m)).collect();
    let mut coefficients = Vec::new();
    for (i, &a) in Measure::ALL.iter().enumerate() {
        for (j, &b) in Measure::ALL.iter().enumerate() {
            coefficients.push((a, b, spearman(&columns[i], &columns[j])?));
        }
    }
    Ok(RankComparison {
        study,
        spearman: coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_small() {
        let e = run_pairwise_experiment(4, 3, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(e.len(), 9);
        for i in 0..3 {
            let r = e.rows[i * 3 + i];
            assert_eq!([r.kl, r.kn, r.jsd, r.hellinger, r.jaccard], [0.0; 5]);
        }
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.starts_with("index_p,index_q,kl,kn,jsd,hellinger,jaccard\n0,0,0.000000,"));
    }

    #[test]
    fn pairwise_budget() {
        let err = run_pairwise_experiment(15, 5, 1000).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn uniform_study_requires_divisibility() {
        assert_eq!(
            run_uniform_study(10, 3).unwrap_err(),
            Error::NonUniformCapable { dots: 10, cells: 3 }
        );
    }

    #[test]
    fn uniform_study_small() {
        let s = run_uniform_study(6, 3).unwrap();
        assert_eq!(s.rows.len(), 3);
        let last = s.rows.last().unwrap();
        assert_eq!(last.distribution.multiplicities(), &[2, 2, 2]);
        assert_eq!(last.values.kl, 0.0);
        assert_eq!(last.rank(Measure::Kl), 1.0);
        assert_eq!(
            s.argmax(Measure::Kl).distribution.multiplicities(),
            &[4, 1, 1]
        );
        let with_self = s.mean_over_max(Measure::Kl, SelfComparison::Include);
        let without = s.mean_over_max(Measure::Kl, SelfComparison::Exclude);
        assert!((without / with_self - 1.5).abs() < 1e-12);
    }

    #[test]
    fn tables_layout() {
        let t = emit_tables(&[3], &[2, 3], SelfComparison::Include).unwrap();
        assert_eq!(t.grid, vec![(3, 6), (3, 9)]);
        let mut buf = Vec::new();
        t.write_ratios_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "cells,dots,kn,kl,jsd,hellinger,jaccard");
        assert!(lines[1].starts_with("3,6,"));
        assert!(lines[3].starts_with("avg,,"));
    }

    #[test]
    fn rank_comparison_diagonal() {
        let r = run_rank_comparison(12, 4).unwrap();
        for m in Measure::ALL {
            assert!((r.coefficient(m, m) - 1.0).abs() < 1e-12);
        }
    }
}
