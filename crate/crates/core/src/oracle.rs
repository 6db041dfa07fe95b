//! Exhaustive checks of the KL maximizer.
//!
//! These routines scan every same-quantum distribution by brute force and
//! never call [`build_maximizer`] when computing their reference maximum, so
//! they can be used to check it.

use rayon::prelude::*;

use crate::distribution::QuantumDistribution;
use crate::divergence::{build_maximizer, kl};
use crate::enumeration::{count_to_u128, EnumerationSpec};
use crate::error::{Error, Result};

/// Default cap on the number of distributions a brute-force scan may visit.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// Absolute slack allowed before a brute-force maximum counts as beating the
/// constructed maximizer.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub p: QuantumDistribution,
    pub q: QuantumDistribution,
    pub kl_via_maximizer: f64,
    pub kl_via_q: f64,
}

/// Outcome of [`verify_maximizer_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalityReport {
    pub spec: EnumerationSpec,
    /// Number of distributions `P` checked.
    pub checked: u64,
    /// Sorted by `(P, Q)`.
    pub violations: Vec<Violation>,
    /// Largest `brute_force_max - KL(P || U)` over the sweep. Values at or
    /// below zero (up to rounding) mean the maximizer was never beaten.
    pub max_gap: f64,
}

impl MaximalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_budget(spec: &EnumerationSpec, budget: u128) -> Result<u128> {
    let needed = count_to_u128(&spec.count_unordered()).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "brute-force scan",
            needed,
            budget,
        });
    }
    Ok(needed)
}

fn scan(p: &QuantumDistribution, spec: &EnumerationSpec) -> (QuantumDistribution, f64) {
    let mut best: Option<(QuantumDistribution, f64)> = None;
    for q in spec.unordered() {
        let v = kl(p, &q).expect("same spec");
        match &best {
            Some((_, b)) if v <= *b => {}
            _ => best = Some((q, v)),
        }
    }
    best.expect("spec is never empty")
}

/// Maximizes `KL(P || Q)` over every `Q` with the same `M` and `n`; ties keep
/// the earliest `Q` in enumeration order.
pub fn brute_force_max_kl(
    p: &QuantumDistribution,
    budget: u128,
) -> Result<(QuantumDistribution, f64)> {
    let spec = EnumerationSpec::new(p.total(), p.cardinality())?;
    check_budget(&spec, budget)?;
    Ok(scan(p, &spec))
}

/// Compares the constructed maximizer against the brute-force maximum for
/// every `P` of the spec.
pub fn verify_maximizer_sweep(spec: EnumerationSpec, budget: u128) -> Result<MaximalityReport> {
    let needed = check_budget(&spec, budget)?;
    let ps: Vec<QuantumDistribution> = spec.unordered().collect();
    debug_assert_eq!(ps.len() as u128, needed);

    let per_p: Vec<(f64, Option<Violation>)> = ps
        .par_iter()
        .map(|p| {
            let constructed = build_maximizer(p).max_divergence;
            let (q, best) = scan(p, &spec);
            let gap = best - constructed;
            let violation = (gap > VIOLATION_TOLERANCE).then(|| Violation {
                p: p.clone(),
                q,
                kl_via_maximizer: constructed,
                kl_via_q: best,
            });
            (gap, violation)
        })
        .collect();

    let max_gap = per_p
        .iter()
        .map(|(g, _)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut violations: Vec<Violation> = per_p.into_iter().filter_map(|(_, v)| v).collect();
    violations.sort_by(|a, b| (&a.p, &a.q).cmp(&(&b.p, &b.q)));

    Ok(MaximalityReport {
        spec,
        checked: ps.len() as u64,
        violations,
        max_gap,
    })
}

/// `KL(P || U) - KL(P || Q')` where `U` puts the `M - n + 1` block on the last
/// cell and `Q' = (1, ..., 1, 2, M - n)` moves one of those dots to cell `n-1`.
///
/// Requires `P` non-increasing, `n >= 2` and `M >= n + 1`. The gap equals
/// `P_{n-1} + P_n * log2((M - n) / (M - n + 1))`, so it is strictly positive
/// once `M >= n + 2` and zero when `M == n + 1` and the last two cells tie.
pub fn special_case_gap(p: &QuantumDistribution) -> Result<f64> {
    let n = p.cardinality();
    if !p.is_non_increasing() {
        return Err(Error::Precondition(format!("{p} is not non-increasing")));
    }
    if n < 2 {
        return Err(Error::Precondition("need at least two cells".into()));
    }
    if p.total() < n as u64 + 1 {
        return Err(Error::Precondition(format!(
            "need at least {} dots for {n} cells, got {}",
            n + 1,
            p.total()
        )));
    }
    let free = p.free_quantity();
    let mut u = vec![1u64; n];
    u[n - 1] = free + 1;
    let mut q = vec![1u64; n];
    q[n - 2] = 2;
    q[n - 1] = free;
    let u = QuantumDistribution::from_counts(u)?;
    let q = QuantumDistribution::from_counts(q)?;
    Ok(kl(p, &u)? - kl(p, &q)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qd(v: &[i64]) -> QuantumDistribution {
        QuantumDistribution::from_multiplicities(v.iter().copied()).unwrap()
    }

    #[test]
    fn brute_force_small_cases() {
        let (q, v) = brute_force_max_kl(&qd(&[3, 2, 1]), DEFAULT_BUDGET).unwrap();
        assert_eq!(q, qd(&[1, 1, 4]));
        assert!((v - 0.792_481_250_360_578_1).abs() < 1e-12);

        let (q, v) = brute_force_max_kl(&qd(&[1, 1, 1, 1]), DEFAULT_BUDGET).unwrap();
        assert_eq!(q, qd(&[1, 1, 1, 1]));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn brute_force_tied_maxima() {
        let p = qd(&[2, 2, 1, 1]);
        let (_, v) = brute_force_max_kl(&p, DEFAULT_BUDGET).unwrap();
        // 0.402506249879807303... from a 30-digit evaluation
        assert!((v - 0.402_506_249_879_807_3).abs() < 1e-12);
        assert!((v - kl(&p, &qd(&[1, 1, 3, 1])).unwrap()).abs() < 1e-12);
        assert!((v - kl(&p, &qd(&[1, 1, 1, 3])).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let p = qd(&[4; 8]);
        let err = brute_force_max_kl(&p, 1000).unwrap_err();
        assert!(err.is_budget());
        let spec = EnumerationSpec::new(32, 8).unwrap();
        assert!(verify_maximizer_sweep(spec, DEFAULT_BUDGET)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn sweep_examples() {
        for (m, n, expected) in [(11, 5, 210), (4, 4, 1), (12, 4, 165)] {
            let r = verify_maximizer_sweep(EnumerationSpec::new(m, n).unwrap(), DEFAULT_BUDGET)
                .unwrap();
            assert_eq!(r.checked, expected);
            assert!(r.holds(), "violations at ({m},{n}): {:?}", r.violations);
            assert!(r.max_gap <= VIOLATION_TOLERANCE);
        }
    }

    #[test]
    fn special_case_values() {
        // 2/11 * log2(2) + 1/11 * log2(6/7) = 0.16160068896941382...
        let g = special_case_gap(&qd(&[3, 3, 2, 2, 1])).unwrap();
        assert!((g - 0.161_600_688_969_413_82).abs() < 1e-12);
        // M == n + 1 with tied last cells: Q' is itself a maximizer.
        assert!(special_case_gap(&qd(&[2, 1, 1])).unwrap().abs() < 1e-15);
        // M == n + 1 without the tie: 2/3 - 1/3 = 1/3.
        assert!((special_case_gap(&qd(&[2, 1])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn special_case_ignores_leading_cells() {
        let spec = EnumerationSpec::new(11, 5).unwrap();
        let tails: Vec<_> = spec
            .ordered()
            .filter(|p| p.multiplicities()[3..] == [2, 1])
            .collect();
        assert!(tails.len() > 1);
        let g = special_case_gap(&tails[0]).unwrap();
        for p in &tails {
            assert!((special_case_gap(p).unwrap() - g).abs() < 1e-15, "{p}");
        }
    }

    #[test]
    fn special_case_preconditions() {
        assert!(special_case_gap(&qd(&[1, 2])).is_err());
        assert!(special_case_gap(&qd(&[5])).is_err());
        assert!(special_case_gap(&qd(&[1, 1, 1])).is_err());
    }
}
