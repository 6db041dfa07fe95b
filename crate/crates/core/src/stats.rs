//! Descriptive statistics used by the experiments: distribution shape
//! properties, Pearson and Spearman correlation, and value-spread summaries.

use crate::distribution::QuantumDistribution;
use crate::error::{Error, Result};

/// Shape properties of a single distribution.
///
/// Moments are taken over the `n` multiplicities (population moments unless
/// [`distribution_properties_with`] asks otherwise).
/// Skewness and kurtosis are `None` when the multiplicities have zero
/// variance (the uniform case).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionProperties {
    /// Shannon entropy in bits.
    pub entropy: f64,
    /// Coefficient of variation of the multiplicities.
    pub cv: f64,
    pub skewness: Option<f64>,
    /// Kurtosis minus 3.
    pub excess_kurtosis: Option<f64>,
}

pub fn entropy(p: &QuantumDistribution) -> f64 {
    -p.probabilities().iter().map(|&x| x * x.log2()).sum::<f64>()
}

/// Denominator used for central moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentConvention {
    /// Divide by `n`: the cells are the whole population.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

pub fn distribution_properties(p: &QuantumDistribution) -> DistributionProperties {
    distribution_properties_with(p, MomentConvention::Population)
}

pub fn distribution_properties_with(
    p: &QuantumDistribution,
    convention: MomentConvention,
) -> DistributionProperties {
    let xs: Vec<f64> = p.multiplicities().iter().map(|&k| k as f64).collect();
    let n = xs.len() as f64;
    let mean = p.total() as f64 / n;
    let denom = match convention {
        MomentConvention::Population => n,
        MomentConvention::Sample => (n - 1.0).max(1.0),
    };
    let central = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / denom;
    let m2 = central(2);
    let (m3, m4) = (central(3), central(4));
    let defined = p
        .multiplicities()
        .iter()
        .any(|&k| k != p.multiplicities()[0]);
    DistributionProperties {
        entropy: entropy(p),
        cv: if defined { m2.sqrt() / mean } else { 0.0 },
        skewness: defined.then(|| m3 / m2.powf(1.5)),
        excess_kurtosis: defined.then(|| m4 / (m2 * m2) - 3.0),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DegenerateInput("vectors differ in length"));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput("need at least two observations"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based fractional ranks; tied values share the average of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let r = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DegenerateInput("vectors differ in length"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Spread of a value vector after collapsing repeated values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapStats {
    pub distinct_count: usize,
    /// Population mean of adjacent gaps between distinct values; 0 with one value.
    pub mean_gap: f64,
    /// Population standard deviation of those gaps.
    pub sd_gap: f64,
    /// `mean(values) / max(values)`, or 0 when the maximum is 0.
    pub mean_over_max: f64,
}

/// Values equal after rounding to this many decimals are merged.
pub const DEDUP_DECIMALS: i32 = 12;

fn round_to(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

/// Sorts, merges runs of equal values, then summarizes the gaps between
/// neighbouring distinct values.
///
/// # Panics
/// If `values` is empty.
pub fn gap_stats(values: &[f64]) -> GapStats {
    assert!(!values.is_empty(), "gap_stats needs at least one value");
    let mut sorted: Vec<f64> = values
        .iter()
        .map(|&v| round_to(v, DEDUP_DECIMALS))
        .collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let (mean_gap, sd_gap) = if gaps.is_empty() {
        (0.0, 0.0)
    } else {
        let m = mean(&gaps);
        let var = gaps.iter().map(|g| (g - m).powi(2)).sum::<f64>() / gaps.len() as f64;
        (m, var.sqrt())
    };
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    GapStats {
        distinct_count: sorted.len(),
        mean_gap,
        sd_gap,
        mean_over_max: if max == 0.0 { 0.0 } else { mean(values) / max },
    }
}
