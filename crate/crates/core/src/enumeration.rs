//! Counting and exhaustive generation of the distributions over `M` dots and `n` cells.
//!
//! Unordered distributions are the compositions of `M` into `n` positive parts,
//! of which there are `C(M-1, M-n)`. Ordered distributions are the partitions
//! of `M` into exactly `n` parts, counted by `p_n(M) = p_n(M-n) + p_{n-1}(M-1)`.
//! Both generators are lazy and yield items in lexicographically descending
//! order of the multiplicity vector.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::distribution::{OrderedQuantumDistribution, QuantumDistribution};
use crate::error::{Error, Result};

/// A pair `(M, n)` with `M >= n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnumerationSpec {
    total: u64,
    cells: usize,
}

impl EnumerationSpec {
    pub fn new(total: u64, cells: usize) -> Result<Self> {
        if cells == 0 || total < cells as u64 {
            return Err(Error::InvalidSpec { dots: total, cells });
        }
        Ok(Self { total, cells })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// `M - n`, the quantity left to arrange once each cell holds one dot.
    pub fn free_quantity(&self) -> u64 {
        self.total - self.cells as u64
    }

    pub fn count_unordered(&self) -> BigUint {
        binomial(self.total - 1, self.free_quantity())
    }

    pub fn count_ordered(&self) -> BigUint {
        PartitionCounter::new(self.total, self.cells).count(self.total, self.cells)
    }

    pub fn unordered(&self) -> Compositions {
        Compositions::start(self.total, self.cells)
    }

    pub fn ordered(&self) -> Partitions {
        Partitions::start(self.total, self.cells)
    }
}

/// Number of distinct distributions of `total` dots over `cells` distinct cells.
pub fn count_unordered(total: u64, cells: usize) -> Result<BigUint> {
    Ok(EnumerationSpec::new(total, cells)?.count_unordered())
}

/// Number of partitions of `total` into exactly `cells` positive parts.
pub fn count_ordered(total: u64, cells: usize) -> Result<BigUint> {
    Ok(EnumerationSpec::new(total, cells)?.count_ordered())
}

pub fn enumerate_unordered(total: u64, cells: usize) -> Result<Compositions> {
    Ok(EnumerationSpec::new(total, cells)?.unordered())
}

pub fn enumerate_ordered(total: u64, cells: usize) -> Result<Partitions> {
    Ok(EnumerationSpec::new(total, cells)?.ordered())
}

/// Converts a count to `u128`, or `None` when it does not fit.
pub fn count_to_u128(count: &BigUint) -> Option<u128> {
    count.to_u128()
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // acc stays integral: after step i it equals C(n - k + i, i)
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Memo table for `p_y(x)`, the number of partitions of `x` into exactly `y` parts.
struct PartitionCounter {
    table: Vec<Vec<Option<BigUint>>>,
}

impl PartitionCounter {
    fn new(max_x: u64, max_y: usize) -> Self {
        Self {
            table: vec![vec![None; max_y + 1]; max_x as usize + 1],
        }
    }

    fn count(&mut self, x: u64, y: usize) -> BigUint {
        // Iterative fill so large x does not recurse deeply.
        for xi in 0..=x {
            for yi in 0..=y {
                let v = self.cell(xi, yi);
                self.table[xi as usize][yi] = Some(v);
            }
        }
        self.table[x as usize][y].clone().expect("filled above")
    }

    fn get(&self, x: u64, y: usize) -> BigUint {
        self.table[x as usize][y]
            .clone()
            .expect("smaller entries are filled first")
    }

    fn cell(&self, x: u64, y: usize) -> BigUint {
        if y == 0 || x == 0 || y as u64 > x {
            BigUint::zero()
        } else if y == 1 {
            BigUint::one()
        } else {
            self.get(x - y as u64, y) + self.get(x - 1, y - 1)
        }
    }
}

/// Compositions of `total` into `cells` positive parts, lexicographically descending.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u64>>,
}

impl Compositions {
    fn start(total: u64, cells: usize) -> Self {
        let mut first = vec![1u64; cells];
        first[0] = total - cells as u64 + 1;
        Self {
            current: Some(first),
        }
    }
}

impl Iterator for Compositions {
    type Item = QuantumDistribution;

    fn next(&mut self) -> Option<QuantumDistribution> {
        let cur = self.current.take()?;
        let n = cur.len();
        // Successor: the rightmost non-final cell above 1 gives one dot to the
        // suffix, which is then reset to its lexicographically largest shape.
        if n >= 2 {
            if let Some(i) = (0..n - 1).rev().find(|&i| cur[i] > 1) {
                let mut next = cur.clone();
                next[i] -= 1;
                let suffix: u64 = cur[i + 1..].iter().sum::<u64>() + 1;
                let len = (n - i - 1) as u64;
                next[i + 1] = suffix - (len - 1);
                for v in &mut next[i + 2..] {
                    *v = 1;
                }
                self.current = Some(next);
            }
        }
        Some(QuantumDistribution::from_counts(cur).expect("compositions have positive parts"))
    }
}

/// Partitions of `total` into exactly `cells` parts, lexicographically descending.
#[derive(Debug, Clone)]
pub struct Partitions {
    current: Option<Vec<u64>>,
}

impl Partitions {
    fn start(total: u64, cells: usize) -> Self {
        let mut first = vec![1u64; cells];
        first[0] = total - cells as u64 + 1;
        Self {
            current: Some(first),
        }
    }
}

impl Iterator for Partitions {
    type Item = OrderedQuantumDistribution;

    fn next(&mut self) -> Option<OrderedQuantumDistribution> {
        let cur = self.current.take()?;
        let n = cur.len();
        // Successor: decrement the rightmost part whose suffix can absorb the
        // released dot without exceeding the new value, then refill greedily.
        let mut suffix_sum = 0u64;
        for i in (0..n).rev() {
            let t = cur[i] - 1;
            let rest = (n - i - 1) as u64;
            let need = suffix_sum + 1;
            if t >= 1 && rest >= 1 && rest * t >= need {
                let mut next = cur[..i].to_vec();
                next.push(t);
                let mut left = need;
                for slot in 0..rest {
                    let remaining_slots = rest - slot - 1;
                    let v = t.min(left - remaining_slots);
                    next.push(v);
                    left -= v;
                }
                self.current = Some(next);
                break;
            }
            suffix_sum += cur[i];
        }
        let dist = QuantumDistribution::from_counts(cur).expect("partitions have positive parts");
        Some(OrderedQuantumDistribution::new_unchecked(dist))
    }
}
