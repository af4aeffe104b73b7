//! Majorization order, transfers, and an empirical Schur-concavity check.
//!
//! `a` majorizes `b` when both have the same total and every prefix sum of
//! `a` sorted in descending order is at least the matching prefix sum of `b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, FamilySpec};

const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AMajorizesB,
    BMajorizesA,
    EqualUpToPermutation,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorizationVerdict {
    pub comparable: bool,
    pub direction: Direction,
}

impl MajorizationVerdict {
    fn from_flags(a_over_b: bool, b_over_a: bool) -> Self {
        let direction = match (a_over_b, b_over_a) {
            (true, true) => Direction::EqualUpToPermutation,
            (true, false) => Direction::AMajorizesB,
            (false, true) => Direction::BMajorizesA,
            (false, false) => Direction::Incomparable,
        };
        Self {
            comparable: a_over_b || b_over_a,
            direction,
        }
    }

    /// `a ⪰ b`, including the permutation case.
    pub fn a_majorizes_b(&self) -> bool {
        matches!(
            self.direction,
            Direction::AMajorizesB | Direction::EqualUpToPermutation
        )
    }

    /// `b ⪰ a`, including the permutation case.
    pub fn b_majorizes_a(&self) -> bool {
        matches!(
            self.direction,
            Direction::BMajorizesA | Direction::EqualUpToPermutation
        )
    }
}

/// Compares two vectors in the majorization order.
///
/// Integer-valued inputs are compared exactly; other inputs use a tolerance of
/// `1e-12` relative to the largest prefix sum.
pub fn majorizes(a: &[f64], b: &[f64]) -> Result<MajorizationVerdict> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("vectors must be finite".into()));
    }
    let exact = a
        .iter()
        .chain(b)
        .all(|v| v.fract() == 0.0 && v.abs() < 9.0e15);
    let (sa, sb) = (sorted_desc(a), sorted_desc(b));
    if exact {
        let pa = prefix_sums_exact(&sa);
        let pb = prefix_sums_exact(&sb);
        if pa.last() != pb.last() {
            return Ok(MajorizationVerdict::from_flags(false, false));
        }
        let a_over = pa.iter().zip(&pb).all(|(x, y)| x >= y);
        let b_over = pa.iter().zip(&pb).all(|(x, y)| y >= x);
        return Ok(MajorizationVerdict::from_flags(a_over, b_over));
    }
    let pa = prefix_sums(&sa);
    let pb = prefix_sums(&sb);
    let scale = pa
        .iter()
        .chain(&pb)
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tol = REAL_TOL * scale;
    if (pa[pa.len() - 1] - pb[pb.len() - 1]).abs() > tol {
        return Ok(MajorizationVerdict::from_flags(false, false));
    }
    let a_over = pa.iter().zip(&pb).all(|(x, y)| x >= &(y - tol));
    let b_over = pa.iter().zip(&pb).all(|(x, y)| y >= &(x - tol));
    Ok(MajorizationVerdict::from_flags(a_over, b_over))
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn prefix_sums_exact(v: &[f64]) -> Vec<i128> {
    v.iter()
        .scan(0i128, |acc, &x| {
            *acc += x as i128;
            Some(*acc)
        })
        .collect()
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// The two vectors produced by moving `t` onto the larger or the smaller coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferPair {
    /// `x` with `t` added at `i`.
    pub majorizing: Vec<f64>,
    /// `x` with `t` added at `j`.
    pub majorized: Vec<f64>,
}

/// Principle of transfer: if `x_i > x_j` then adding `t >= 0` to `x_i`
/// majorizes adding it to `x_j`.
pub fn transfer(x: &[f64], i: usize, j: usize, t: f64) -> Result<TransferPair> {
    if i >= x.len() || j >= x.len() || i == j {
        return Err(Error::InvalidArgument(format!(
            "invalid transfer indices ({i}, {j}) for length {}",
            x.len()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "transfer amount must be finite and nonnegative, got {t}"
        )));
    }
    if !(x[i] > x[j]) {
        return Err(Error::Precondition(format!(
            "transfer requires x_i > x_j, got {} and {}",
            x[i], x[j]
        )));
    }
    let mut majorizing = x.to_vec();
    majorizing[i] += t;
    let mut majorized = x.to_vec();
    majorized[j] += t;
    Ok(TransferPair {
        majorizing,
        majorized,
    })
}

/// How transfer-related pairs are drawn for [`check_schur_concave`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurProbe {
    pub pairs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurViolation {
    pub majorizing: Vec<f64>,
    pub majorized: Vec<f64>,
    pub log_g_majorizing: f64,
    pub log_g_majorized: f64,
}

/// Outcome of an empirical Schur-concavity check; empty `violations` is a pass.
///
/// Transfers generate the majorization order, so probing transfer pairs is a
/// sampled certificate, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub probed: usize,
    pub violations: Vec<SchurViolation>,
}

impl SchurReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `log g(more) <= log g(less) + tolerance` on sampled transfer pairs
/// drawn from the family's support.
pub fn check_schur_concave(family: &FamilySpec, probe: SchurProbe, tolerance: f64) -> SchurReport {
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let n = family.n;
    let mut report = SchurReport {
        probed: 0,
        violations: Vec::new(),
    };
    let max_attempts = probe.pairs.saturating_mul(50).max(1000);
    let mut attempts = 0;
    while report.probed < probe.pairs && attempts < max_attempts {
        attempts += 1;
        let more = sample_support(family, &mut rng);
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (hi, lo) = if more[i] >= more[j] { (i, j) } else { (j, i) };
        let gap = more[hi] - more[lo];
        let t = if family.is_lattice() {
            1.0
        } else {
            gap * rng.random::<f64>()
        };
        if gap < t || t <= 0.0 {
            continue;
        }
        let mut less = more.clone();
        less[hi] -= t;
        less[lo] += t;
        probe_pair(
            |v| family.carrier_log_unchecked(v),
            more,
            less,
            tolerance,
            &mut report,
        );
    }
    report
}

/// Probes every ordered transfer of `t` between coordinates of each base point
/// for an arbitrary carrier.
pub fn check_schur_concave_with<F>(carrier: F, bases: &[Vec<f64>], t: f64, tolerance: f64) -> SchurReport
where
    F: Fn(&[f64]) -> f64,
{
    let mut report = SchurReport {
        probed: 0,
        violations: Vec::new(),
    };
    for base in bases {
        for i in 0..base.len() {
            for j in 0..base.len() {
                if i == j || base[i] < base[j] {
                    continue;
                }
                let mut more = base.clone();
                more[i] += t;
                let mut less = base.clone();
                less[j] += t;
                probe_pair(&carrier, more, less, tolerance, &mut report);
            }
        }
    }
    report
}

fn probe_pair<F>(carrier: F, more: Vec<f64>, less: Vec<f64>, tolerance: f64, report: &mut SchurReport)
where
    F: Fn(&[f64]) -> f64,
{
    report.probed += 1;
    let g_more = carrier(&more);
    let g_less = carrier(&less);
    if g_more > g_less + tolerance {
        report.violations.push(SchurViolation {
            majorizing: more,
            majorized: less,
            log_g_majorizing: g_more,
            log_g_majorized: g_less,
        });
    }
}

fn sample_support(family: &FamilySpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = family.n;
    match family.kind {
        FamilyKind::Multinomial { total } => {
            let mut x = vec![0.0; n];
            for _ in 0..total {
                x[rng.random_range(0..n)] += 1.0;
            }
            x
        }
        FamilyKind::IndependentBinomial { trials } => {
            (0..n).map(|_| rng.random_range(0..=trials) as f64).collect()
        }
        FamilyKind::BradleyTerry => {
            let mut x = vec![0.0; n];
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.random::<bool>() {
                        x[a] += 1.0;
                    } else {
                        x[b] += 1.0;
                    }
                }
            }
            x
        }
        FamilyKind::NormalVariance { .. } => (0..n)
            .map(|_| (4.0 * rng.random::<f64>() - 2.0).exp())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(a: &[f64], b: &[f64]) -> Direction {
        majorizes(a, b).unwrap().direction
    }

    #[test]
    fn basic_verdicts() {
        assert_eq!(dir(&[2.0, 0.0], &[1.0, 1.0]), Direction::AMajorizesB);
        assert_eq!(dir(&[3.0, 1.0, 0.0], &[2.0, 2.0, 0.0]), Direction::AMajorizesB);
        assert_eq!(dir(&[2.0, 2.0, 0.0], &[3.0, 0.0, 1.0]), Direction::BMajorizesA);
        assert_eq!(
            dir(&[1.0, 0.0, 2.0], &[2.0, 0.0, 1.0]),
            Direction::EqualUpToPermutation
        );
        assert_eq!(dir(&[1.0, 1.0], &[1.0, 2.0]), Direction::Incomparable);
        assert!(!majorizes(&[1.0, 1.0], &[1.0, 2.0]).unwrap().comparable);
        assert!(majorizes(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn unequal_totals_are_incomparable() {
        assert_eq!(dir(&[2.0, 2.0, 0.0], &[3.0, 0.0, 0.0]), Direction::Incomparable);
    }

    #[test]
    fn incomparable_pair_exists() {
        assert_eq!(
            dir(&[4.0, 1.0, 1.0, 0.0], &[3.0, 3.0, 0.0, 0.0]),
            Direction::Incomparable
        );
    }

    #[test]
    fn real_vectors_use_tolerance() {
        let a = [0.1 + 0.2, 0.7];
        let b = [0.3, 0.7];
        assert_eq!(dir(&a, &b), Direction::EqualUpToPermutation);
    }

    #[test]
    fn transfer_examples() {
        let p = transfer(&[5.0, 2.0, 1.0], 0, 1, 1.0).unwrap();
        assert_eq!(p.majorizing, vec![6.0, 2.0, 1.0]);
        assert_eq!(p.majorized, vec![5.0, 3.0, 1.0]);
        assert!(majorizes(&p.majorizing, &p.majorized).unwrap().a_majorizes_b());
        let z = transfer(&[5.0, 2.0, 1.0], 0, 1, 0.0).unwrap();
        assert_eq!(z.majorizing, z.majorized);
        assert!(matches!(
            transfer(&[4.0, 4.0, 1.0], 0, 1, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn multinomial_carrier_passes() {
        let f = FamilySpec::multinomial(3, 20).unwrap();
        let r = check_schur_concave(&f, SchurProbe { pairs: 10_000, seed: 1 }, 1e-12);
        assert_eq!(r.probed, 10_000);
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    }

    #[test]
    fn bradley_terry_three_players() {
        let f = FamilySpec::bradley_terry(3).unwrap();
        let more = f.carrier_log(&[2.0, 1.0, 0.0]).unwrap();
        let less = f.carrier_log(&[1.0, 1.0, 1.0]).unwrap();
        assert!(majorizes(&[2.0, 1.0, 0.0], &[1.0, 1.0, 1.0]).unwrap().a_majorizes_b());
        assert!(more <= less);
    }

    #[test]
    fn constant_carrier_passes() {
        let bases = vec![vec![3.0, 1.0, 0.5], vec![0.0, 0.0, 0.0]];
        let r = check_schur_concave_with(|_| 1.0, &bases, 0.5, 0.0);
        assert!(r.passed());
        assert!(r.probed > 0);
    }

    #[test]
    fn convex_carrier_is_caught() {
        let bases = vec![vec![3.0, 1.0]];
        let r = check_schur_concave_with(|v| v.iter().map(|x| x * x).sum(), &bases, 1.0, 1e-12);
        assert!(!r.passed());
    }
}
