//! Quantum distributions: `n` positive integer multiplicities summing to `M`.
//!
//! A distribution is stored as its multiplicity vector. The probability of
//! cell `i` is `k_i / M`, where `1/M` is the quantum. Probabilities are only
//! materialized as `f64` when a measure asks for them; equality and
//! comparability are decided on the integers.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A finite distribution whose probabilities are positive multiples of `1/total`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumDistribution {
    counts: Vec<u64>,
    total: u64,
}

impl QuantumDistribution {
    /// Builds a distribution from signed counts, rejecting empty input and
    /// any cell below 1.
    pub fn from_multiplicities<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        let counts = counts
            .into_iter()
            .enumerate()
            .map(|(index, value)| {
                if value < 1 {
                    Err(Error::ZeroCell { index, value })
                } else {
                    Ok(value as u64)
                }
            })
            .collect::<Result<Vec<u64>>>()?;
        Self::from_counts(counts)
    }

    /// Builds a distribution from unsigned counts.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if let Some(index) = counts.iter().position(|&k| k == 0) {
            return Err(Error::ZeroCell { index, value: 0 });
        }
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &k| acc.checked_add(k))
            .ok_or(Error::Overflow("summing multiplicities"))?;
        Ok(Self { counts, total })
    }

    /// The all-equal distribution with `per_cell` dots in each of `cells` cells.
    pub fn uniform(cells: usize, per_cell: u64) -> Result<Self> {
        Self::from_counts(vec![per_cell; cells])
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.counts
    }

    /// `M`, the number of quanta distributed.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `n`, the number of cells.
    pub fn cardinality(&self) -> usize {
        self.counts.len()
    }

    /// Probability of cell `i` (0-based).
    pub fn probability(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let m = self.total as f64;
        self.counts.iter().map(|&k| k as f64 / m).collect()
    }

    /// Free quantity `M - n` left after every cell receives its mandatory unit.
    pub fn free_quantity(&self) -> u64 {
        self.total - self.counts.len() as u64
    }

    /// Lowest index among the cells of minimal multiplicity.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &k) in self.counts.iter().enumerate().skip(1) {
            if k < self.counts[best] {
                best = i;
            }
        }
        best
    }

    pub fn is_non_increasing(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] >= w[1])
    }

    /// Canonical non-increasing representative of this distribution's class.
    pub fn ord(&self) -> OrderedQuantumDistribution {
        let mut counts = self.counts.clone();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        OrderedQuantumDistribution(Self {
            counts,
            total: self.total,
        })
    }

    /// Re-expresses this distribution over the quantum `1/new_total`.
    /// `new_total` must be a multiple of the current total.
    pub fn rescale_to(&self, new_total: u64) -> Result<Self> {
        if !new_total.is_multiple_of(self.total) {
            return Err(Error::Precondition(format!(
                "{new_total} is not a multiple of {}",
                self.total
            )));
        }
        let factor = new_total / self.total;
        let counts = self
            .counts
            .iter()
            .map(|&k| k.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("rescaling multiplicities"))?;
        Ok(Self {
            counts,
            total: new_total,
        })
    }

    /// Applies the same cell permutation used by `perm` (`out[i] = self[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.counts.len(), "permutation length");
        Self {
            counts: perm.iter().map(|&i| self.counts[i]).collect(),
            total: self.total,
        }
    }

    /// Equality of the probability views, i.e. equality after rescaling both
    /// to a common quantum.
    pub fn same_probabilities(&self, other: &Self) -> bool {
        self.counts.len() == other.counts.len()
            && self
                .counts
                .iter()
                .zip(&other.counts)
                .all(|(&a, &b)| a as u128 * other.total as u128 == b as u128 * self.total as u128)
    }
}

/// Rescales both distributions to the quantum `1/lcm(M_p, M_q)`.
///
/// Probability views are unchanged; only the multiplicities grow.
pub fn make_comparable(
    p: &QuantumDistribution,
    q: &QuantumDistribution,
) -> Result<(QuantumDistribution, QuantumDistribution)> {
    let l = (p.total as u128).lcm(&(q.total as u128));
    let l = u64::try_from(l).map_err(|_| Error::Overflow("computing the common quantum"))?;
    Ok((p.rescale_to(l)?, q.rescale_to(l)?))
}

impl fmt::Display for QuantumDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for QuantumDistribution {
    type Err = Error;

    /// Parses comma-separated positive integers, e.g. `"4,3,2,2,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let values = trimmed
            .split(',')
            .map(|tok| {
                tok.trim().parse::<i64>().map_err(|e| Error::Parse {
                    input: s.to_string(),
                    reason: format!("{:?}: {e}", tok.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_multiplicities(values)
    }
}

/// A quantum distribution with non-increasing multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedQuantumDistribution(QuantumDistribution);

impl OrderedQuantumDistribution {
    /// Wraps `dist` if it is already non-increasing.
    pub fn new(dist: QuantumDistribution) -> Result<Self> {
        if dist.is_non_increasing() {
            Ok(Self(dist))
        } else {
            Err(Error::Precondition(format!(
                "multiplicities {dist} are not non-increasing"
            )))
        }
    }

    pub(crate) fn new_unchecked(dist: QuantumDistribution) -> Self {
        debug_assert!(dist.is_non_increasing());
        Self(dist)
    }

    pub fn as_distribution(&self) -> &QuantumDistribution {
        &self.0
    }

    pub fn into_distribution(self) -> QuantumDistribution {
        self.0
    }
}

impl Deref for OrderedQuantumDistribution {
    type Target = QuantumDistribution;

    fn deref(&self) -> &QuantumDistribution {
        &self.0
    }
}

impl AsRef<QuantumDistribution> for OrderedQuantumDistribution {
    fn as_ref(&self) -> &QuantumDistribution {
        &self.0
    }
}

impl fmt::Display for OrderedQuantumDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
