//! Divergences and distances between quantum distributions.
//!
//! All logarithms are base 2. Measures that compare probability views
//! (`kl`, `kn`, `jsd`, `hellinger`) require both arguments to share the same
//! cardinality and the same quantum; use [`compare_rescaled`] to bring two
//! distributions over different quanta onto their least common quantum first.
//! The generalized Jaccard distance works on the multiplicities themselves.
//!
//! For a distribution `P` over `M` dots and `n` cells, the same-quantum
//! distribution farthest from it in KL terms puts one dot in every cell and
//! the remaining `M - n` dots on a cell where `P` is smallest
//! ([`build_maximizer`]). Dividing by that maximum gives the normalized
//! divergence [`kn`], which lies in `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use crate::distribution::{make_comparable, QuantumDistribution};
use crate::error::{Error, Result};

/// Labels for the measures computed by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Kl,
    Kn,
    Jsd,
    Hellinger,
    JaccardDistance,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Kn,
        Measure::Kl,
        Measure::Jsd,
        Measure::Hellinger,
        Measure::JaccardDistance,
    ];

    /// Short lowercase name used in CLI flags and CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Kl => "kl",
            Measure::Kn => "kn",
            Measure::Jsd => "jsd",
            Measure::Hellinger => "hellinger",
            Measure::JaccardDistance => "jaccard",
        }
    }

    /// Whether the measure is bounded to `[0, 1]`.
    pub fn is_unit_bounded(self) -> bool {
        !matches!(self, Measure::Kl)
    }

    pub fn eval(self, p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
        match self {
            Measure::Kl => kl(p, q),
            Measure::Kn => kn(p, q),
            Measure::Jsd => jsd(p, q),
            Measure::Hellinger => hellinger(p, q),
            Measure::JaccardDistance => jaccard_distance(p, q),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Precondition(format!("unknown measure {s:?}")))
    }
}

/// One labeled result of a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub measure: Measure,
    pub value: f64,
}

/// The KL-maximizing distribution for a given `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizerResult {
    pub maximizer: QuantumDistribution,
    /// `KL(P || U)` in bits.
    pub max_divergence: f64,
    /// 0-based cell that received the `M - n + 1` block.
    pub argmin_cell: usize,
}

fn check_same_domain(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<()> {
    if p.cardinality() != q.cardinality() {
        return Err(Error::DomainMismatch {
            left: p.cardinality(),
            right: q.cardinality(),
        });
    }
    Ok(())
}

fn check_comparable(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<()> {
    check_same_domain(p, q)?;
    if p.total() != q.total() {
        return Err(Error::QuantumMismatch {
            left: p.total(),
            right: q.total(),
        });
    }
    Ok(())
}

/// `sum_i P_i log2(P_i / Q_i)` without domain checks. Both share `M`, so the
/// ratio of probabilities is the ratio of multiplicities.
fn kl_unchecked(p: &[u64], q: &[u64], total: u64) -> f64 {
    let m = total as f64;
    p.iter()
        .zip(q)
        .map(|(&a, &b)| {
            if a == b {
                0.0
            } else {
                (a as f64 / m) * (a as f64 / b as f64).log2()
            }
        })
        .sum()
}

/// Kullback-Leibler divergence `KL(P || Q)` in bits.
pub fn kl(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
    check_comparable(p, q)?;
    Ok(kl_unchecked(
        p.multiplicities(),
        q.multiplicities(),
        p.total(),
    ))
}

/// The maximizer with its block placed at `cell` instead of the first minimal cell.
pub fn maximizer_at(p: &QuantumDistribution, cell: usize) -> QuantumDistribution {
    let mut counts = vec![1u64; p.cardinality()];
    counts[cell] = p.free_quantity() + 1;
    QuantumDistribution::from_counts(counts).expect("all cells positive")
}

/// Builds `U`: one dot per cell and the `M - n` free dots added to the first
/// cell where `P` is minimal.
pub fn build_maximizer(p: &QuantumDistribution) -> MaximizerResult {
    let argmin_cell = p.argmin();
    let maximizer = maximizer_at(p, argmin_cell);
    let max_divergence = kl_unchecked(p.multiplicities(), maximizer.multiplicities(), p.total());
    MaximizerResult {
        maximizer,
        max_divergence,
        argmin_cell,
    }
}

/// Normalized divergence `KL(P || Q) / KL(P || U)`, in `[0, 1]`.
///
/// With `M == n` the only distribution is the all-ones one, so `P == Q` and
/// the result is 0.
pub fn kn(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
    check_comparable(p, q)?;
    let num = kl_unchecked(p.multiplicities(), q.multiplicities(), p.total());
    if p == q {
        return Ok(0.0);
    }
    let den = build_maximizer(p).max_divergence;
    if den <= 0.0 {
        return Err(Error::DegenerateNormalizer);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// `kn` with a precomputed normalizer, for sweeps that reuse one `P`.
pub(crate) fn kn_with_normalizer(numerator: f64, normalizer: f64) -> f64 {
    if numerator == 0.0 {
        0.0
    } else {
        (numerator / normalizer).clamp(0.0, 1.0)
    }
}

/// Jensen-Shannon divergence in bits, bounded by 1.
///
/// The mixture `A = (P + Q) / 2` is taken on the common quantum `1/(2M)`,
/// so `P_i / A_i = 2 k_i / (k_i + q_i)`.
pub fn jsd(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
    check_comparable(p, q)?;
    Ok(jsd_unchecked(
        p.multiplicities(),
        q.multiplicities(),
        p.total(),
    ))
}

fn jsd_unchecked(p: &[u64], q: &[u64], total: u64) -> f64 {
    let m = total as f64;
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == b {
            continue;
        }
        let (a, b) = (a as f64, b as f64);
        let mix = a + b;
        acc += a / m * (2.0 * a / mix).log2() + b / m * (2.0 * b / mix).log2();
    }
    (acc / 2.0).clamp(0.0, 1.0)
}

/// Hellinger distance `(1/sqrt 2) * sqrt(sum_i (sqrt P_i - sqrt Q_i)^2)`.
pub fn hellinger(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
    check_comparable(p, q)?;
    let m = p.total() as f64;
    let s: f64 = p
        .multiplicities()
        .iter()
        .zip(q.multiplicities())
        .map(|(&a, &b)| {
            let d = (a as f64 / m).sqrt() - (b as f64 / m).sqrt();
            d * d
        })
        .sum();
    Ok((s / 2.0).sqrt().min(1.0))
}

/// Squared Hellinger distance via the affinity form `1 - sum_i sqrt(P_i Q_i)`.
///
/// The experiment tables report this quantity in their Hellinger column.
pub fn hellinger_squared(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
    check_comparable(p, q)?;
    Ok(hellinger_squared_unchecked(
        p.multiplicities(),
        q.multiplicities(),
        p.total(),
    ))
}

fn hellinger_squared_unchecked(p: &[u64], q: &[u64], total: u64) -> f64 {
    if p == q {
        return 0.0;
    }
    let m = total as f64;
    let affinity: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a as f64 * b as f64).sqrt())
        .sum::<f64>()
        / m;
    (1.0 - affinity).clamp(0.0, 1.0)
}

/// `1 - sum min(k_i, q_i) / sum max(k_i, q_i)` on raw multiplicities.
pub fn jaccard_distance(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<f64> {
    check_same_domain(p, q)?;
    Ok(jaccard_unchecked(p.multiplicities(), q.multiplicities()))
}

fn jaccard_unchecked(p: &[u64], q: &[u64]) -> f64 {
    let (mut lo, mut hi) = (0u64, 0u64);
    for (&a, &b) in p.iter().zip(q) {
        lo += a.min(b);
        hi += a.max(b);
    }
    1.0 - lo as f64 / hi as f64
}

/// Rescales `p` and `q` to their least common quantum, then evaluates `measure`.
pub fn compare_rescaled(
    measure: Measure,
    p: &QuantumDistribution,
    q: &QuantumDistribution,
) -> Result<f64> {
    check_same_domain(p, q)?;
    let (p, q) = make_comparable(p, q)?;
    measure.eval(&p, &q)
}

/// The five experiment measures for one comparable pair, in the order of
/// [`Measure::ALL`]. The Hellinger slot holds the squared distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureRow {
    pub kn: f64,
    pub kl: f64,
    pub jsd: f64,
    pub hellinger: f64,
    pub jaccard: f64,
}

impl MeasureRow {
    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::Kn => self.kn,
            Measure::Kl => self.kl,
            Measure::Jsd => self.jsd,
            Measure::Hellinger => self.hellinger,
            Measure::JaccardDistance => self.jaccard,
        }
    }
}

/// Options for how the experiment battery normalizes KN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnNormalizer {
    /// `KL(P || U)` with `U` from [`build_maximizer`].
    #[default]
    Maximizer,
    /// A reference vector with a fixed `block` of dots on the minimal cell of
    /// `P` and one dot elsewhere, read on the quantum `1/M` even when the
    /// entries do not sum to `M`. Only useful for comparing against tables
    /// produced that way.
    FixedBlock(u64),
}

impl KnNormalizer {
    pub fn normalizer(self, p: &QuantumDistribution) -> f64 {
        match self {
            KnNormalizer::Maximizer => build_maximizer(p).max_divergence,
            KnNormalizer::FixedBlock(block) => {
                let m = p.total() as f64;
                let j = p.argmin();
                p.multiplicities()
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| {
                        let r = if i == j { block as f64 } else { 1.0 };
                        a as f64 / m * (a as f64 / r).log2()
                    })
                    .sum()
            }
        }
    }
}

/// Evaluates every measure for a comparable pair, given `P`'s KN normalizer.
pub(crate) fn measure_row_unchecked(
    p: &QuantumDistribution,
    q: &QuantumDistribution,
    normalizer: f64,
) -> MeasureRow {
    let (a, b, m) = (p.multiplicities(), q.multiplicities(), p.total());
    let kl = kl_unchecked(a, b, m);
    MeasureRow {
        kn: kn_with_normalizer(kl, normalizer),
        kl,
        jsd: jsd_unchecked(a, b, m),
        hellinger: hellinger_squared_unchecked(a, b, m),
        jaccard: jaccard_unchecked(a, b),
    }
}

/// All experiment measures for a comparable pair.
pub fn measure_row(p: &QuantumDistribution, q: &QuantumDistribution) -> Result<MeasureRow> {
    check_comparable(p, q)?;
    if p.total() == p.cardinality() as u64 {
        // single-element space: p == q
        return Ok(measure_row_unchecked(p, q, 0.0));
    }
    Ok(measure_row_unchecked(
        p,
        q,
        build_maximizer(p).max_divergence,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn qd(v: &[i64]) -> QuantumDistribution {
        QuantumDistribution::from_multiplicities(v.iter().copied()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Reference values below come from a 30-digit mpmath evaluation.
    const KL_321_222: f64 = 0.125_814_583_693_911_4;
    const KL_321_114: f64 = 0.792_481_250_360_578;
    const KN_321_222: f64 = 0.158_760_328_571_390_08;
    const JSD_211_112: f64 = 0.061_278_124_459_132_87;
    const HE_211_112: f64 = 0.207_106_781_186_547_52;

    #[test]
    fn kl_examples() {
        assert_eq!(kl(&qd(&[2, 1, 1]), &qd(&[2, 1, 1])).unwrap(), 0.0);
        assert!(close(
            kl(&qd(&[2, 1, 1]), &qd(&[1, 1, 2])).unwrap(),
            0.25,
            TOL
        ));
        assert!(close(
            kl(&qd(&[3, 2, 1]), &qd(&[2, 2, 2])).unwrap(),
            KL_321_222,
            1e-12
        ));
    }

    #[test]
    fn kl_rejects_mismatches() {
        assert_eq!(
            kl(&qd(&[2, 1]), &qd(&[1, 1, 1])),
            Err(Error::DomainMismatch { left: 2, right: 3 })
        );
        assert_eq!(
            kl(&qd(&[2, 1]), &qd(&[2, 2])),
            Err(Error::QuantumMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn maximizer_examples() {
        let r = build_maximizer(&qd(&[3, 2, 1]));
        assert_eq!(r.maximizer, qd(&[1, 1, 4]));
        assert_eq!(r.argmin_cell, 2);
        assert!(close(r.max_divergence, KL_321_114, 1e-12));

        let r = build_maximizer(&qd(&[1, 1, 1, 1]));
        assert_eq!(r.maximizer, qd(&[1, 1, 1, 1]));
        assert_eq!(r.max_divergence, 0.0);

        let p = qd(&[2, 2, 1, 1]);
        let r = build_maximizer(&p);
        assert_eq!(r.argmin_cell, 2);
        assert_eq!(r.maximizer, qd(&[1, 1, 3, 1]));
        let other = kl(&p, &qd(&[1, 1, 1, 3])).unwrap();
        assert!(close(r.max_divergence, other, 1e-12));
    }

    #[test]
    fn kn_examples() {
        let p = qd(&[3, 2, 1]);
        assert_eq!(kn(&p, &p).unwrap(), 0.0);
        assert_eq!(kn(&p, &qd(&[1, 1, 4])).unwrap(), 1.0);
        assert!(close(kn(&p, &qd(&[2, 2, 2])).unwrap(), KN_321_222, 1e-12));
        let ones = qd(&[1, 1, 1]);
        assert_eq!(kn(&ones, &ones).unwrap(), 0.0);
    }

    #[test]
    fn kn_is_base_invariant() {
        // Ratio of natural-log KLs equals the ratio of base-2 KLs.
        let (p, q, u) = (qd(&[5, 2, 1]), qd(&[2, 3, 3]), qd(&[1, 1, 6]));
        let ln_kl = |a: &QuantumDistribution, b: &QuantumDistribution| -> f64 {
            a.probabilities()
                .iter()
                .zip(b.probabilities())
                .map(|(x, y)| x * (x / y).ln())
                .sum()
        };
        let via_ln = ln_kl(&p, &q) / ln_kl(&p, &u);
        assert!(close(kn(&p, &q).unwrap(), via_ln, 1e-12));
    }

    #[test]
    fn jsd_examples() {
        let u = qd(&[4, 4, 4]);
        assert_eq!(jsd(&u, &u).unwrap(), 0.0);
        assert!(close(
            jsd(&qd(&[2, 1, 1]), &qd(&[1, 1, 2])).unwrap(),
            JSD_211_112,
            1e-12
        ));
    }

    #[test]
    fn hellinger_examples() {
        let p = qd(&[3, 2, 1, 1]);
        assert_eq!(hellinger(&p, &p).unwrap(), 0.0);
        let h = hellinger(&qd(&[2, 1, 1]), &qd(&[1, 1, 2])).unwrap();
        assert!(close(h, HE_211_112, 1e-12));
        let h2 = hellinger_squared(&qd(&[2, 1, 1]), &qd(&[1, 1, 2])).unwrap();
        assert!(close(h * h, h2, 1e-12));
    }

    #[test]
    fn jaccard_examples() {
        let p = qd(&[2, 1, 1]);
        assert_eq!(jaccard_distance(&p, &p).unwrap(), 0.0);
        assert!(close(
            jaccard_distance(&p, &qd(&[1, 1, 2])).unwrap(),
            0.4,
            1e-15
        ));
        assert!(matches!(
            jaccard_distance(&p, &qd(&[2, 2])),
            Err(Error::DomainMismatch { .. })
        ));
    }

    #[test]
    fn kl_is_asymmetric() {
        let (p, q) = (qd(&[3, 2, 1]), qd(&[2, 2, 2]));
        assert!((kl(&p, &q).unwrap() - kl(&q, &p).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn rescaled_comparison() {
        let (p, q) = (qd(&[1, 1]), qd(&[1, 2]));
        assert!(matches!(kl(&p, &q), Err(Error::QuantumMismatch { .. })));
        let v = compare_rescaled(Measure::Kl, &p, &q).unwrap();
        let direct = kl(&qd(&[3, 3]), &qd(&[2, 4])).unwrap();
        assert_eq!(v, direct);
    }

    #[test]
    fn fixed_block_normalizer_matches_maximizer_when_block_is_right() {
        let p = qd(&[5, 3, 2, 1]);
        let exact = KnNormalizer::Maximizer.normalizer(&p);
        let fixed = KnNormalizer::FixedBlock(p.free_quantity() + 1).normalizer(&p);
        assert!(close(exact, fixed, 1e-12));
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("tv".parse::<Measure>().is_err());
    }
}
