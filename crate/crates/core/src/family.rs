//! Exponential family instances with permutation-symmetric carriers.
//!
//! Every family here has density `exp(theta' T(x) - psi(theta)) g(x)` where
//! `T(x) = x` except for Bradley–Terry, whose sufficient statistic carries a
//! factor of two. The log-partition `psi` is never evaluated: all inference
//! works with ratios of carrier-weighted sums in which it cancels.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{Error, Result};
use crate::tournament::{self, MAX_PLAYERS};

/// Reference measure of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Lattice,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Multinomial counts with fixed total `total`.
    Multinomial { total: u64 },
    /// Independent binomial counts, `trials` per arm.
    IndependentBinomial { trials: u64 },
    /// Sample variances of normal groups with `obs_per_group` observations each.
    NormalVariance { obs_per_group: u64 },
    /// Win counts of a round-robin Bradley–Terry tournament.
    BradleyTerry,
}

/// A family instance together with the number of populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!(
                "need at least 2 populations, got {n}"
            )));
        }
        match kind {
            FamilyKind::Multinomial { total } | FamilyKind::IndependentBinomial { trials: total }
                if total < 1 =>
            {
                return Err(Error::InvalidFamily("count parameter m must be >= 1".into()));
            }
            FamilyKind::NormalVariance { obs_per_group } if obs_per_group < 2 => {
                return Err(Error::InvalidFamily(
                    "normal variance family needs at least 2 observations per group".into(),
                ));
            }
            FamilyKind::BradleyTerry if n > MAX_PLAYERS => {
                return Err(Error::InvalidFamily(format!(
                    "Bradley-Terry carrier is enumerated exhaustively and supports at most \
                     {MAX_PLAYERS} players, got {n}"
                )));
            }
            _ => {}
        }
        Ok(Self { kind, n })
    }

    pub fn multinomial(n: usize, total: u64) -> Result<Self> {
        Self::new(FamilyKind::Multinomial { total }, n)
    }

    pub fn independent_binomial(n: usize, trials: u64) -> Result<Self> {
        Self::new(FamilyKind::IndependentBinomial { trials }, n)
    }

    pub fn normal_variance(n: usize, obs_per_group: u64) -> Result<Self> {
        Self::new(FamilyKind::NormalVariance { obs_per_group }, n)
    }

    pub fn bradley_terry(n: usize) -> Result<Self> {
        Self::new(FamilyKind::BradleyTerry, n)
    }

    pub fn measure(&self) -> Measure {
        match self.kind {
            FamilyKind::NormalVariance { .. } => Measure::Continuous,
            _ => Measure::Lattice,
        }
    }

    pub fn is_lattice(&self) -> bool {
        self.measure() == Measure::Lattice
    }

    /// Factor between the natural parameter and the exponent of `x`.
    ///
    /// Bradley–Terry abilities enter the density as `exp(2 theta' x)`, so a
    /// single game between `j` and `k` is won by `j` with probability
    /// `1 / (1 + exp(-2 (theta_j - theta_k)))`.
    pub fn stat_scale(&self) -> f64 {
        match self.kind {
            FamilyKind::BradleyTerry => 2.0,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Multinomial { .. } => "multinomial",
            FamilyKind::IndependentBinomial { .. } => "independent_binomial",
            FamilyKind::NormalVariance { .. } => "normal_variance",
            FamilyKind::BradleyTerry => "bradley_terry",
        }
    }

    /// Sum that every support point must have, if the family fixes one.
    pub fn fixed_total(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::Multinomial { total } => Some(total as f64),
            FamilyKind::BradleyTerry => Some((self.n * (self.n - 1) / 2) as f64),
            _ => None,
        }
    }

    /// `ln g(x)`, or `-inf` when `x` is off the support.
    pub fn carrier_log(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.carrier_log_unchecked(x))
    }

    pub(crate) fn carrier_log_unchecked(&self, x: &[f64]) -> f64 {
        match self.kind {
            FamilyKind::Multinomial { total } => {
                let Some(counts) = as_counts(x) else {
                    return f64::NEG_INFINITY;
                };
                if counts.iter().sum::<u64>() != total {
                    return f64::NEG_INFINITY;
                }
                ln_factorial(total) - sorted_sum(counts.iter().map(|&c| ln_factorial(c)))
            }
            FamilyKind::IndependentBinomial { trials } => {
                let Some(counts) = as_counts(x) else {
                    return f64::NEG_INFINITY;
                };
                if counts.iter().any(|&c| c > trials) {
                    return f64::NEG_INFINITY;
                }
                sorted_sum(counts.iter().map(|&c| ln_binomial(trials, c)))
            }
            FamilyKind::NormalVariance { obs_per_group } => {
                if x.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
                    return f64::NEG_INFINITY;
                }
                let exponent = (obs_per_group as f64 - 3.0) / 2.0;
                if exponent == 0.0 {
                    return 0.0;
                }
                exponent * sorted_sum(x.iter().map(|r| r.ln()))
            }
            FamilyKind::BradleyTerry => {
                let Some(counts) = as_counts(x) else {
                    return f64::NEG_INFINITY;
                };
                let wins: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
                match tournament::score_table(self.n).count(&wins) {
                    0 => f64::NEG_INFINITY,
                    c => (c as f64).ln(),
                }
            }
        }
    }

    /// Checks that `x` is a point of the family's support.
    pub fn validate_values(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidObservation(format!(
                "value at position {} is not finite",
                i + 1
            )));
        }
        match self.kind {
            FamilyKind::NormalVariance { .. } => {
                if let Some(i) = x.iter().position(|&v| v <= 0.0) {
                    return Err(Error::InvalidObservation(format!(
                        "sample variance at position {} must be positive, got {}",
                        i + 1,
                        x[i]
                    )));
                }
            }
            _ => {
                if let Some(i) = x.iter().position(|&v| v < 0.0 || v.fract() != 0.0) {
                    return Err(Error::InvalidObservation(format!(
                        "value at position {} must be a nonnegative integer, got {}",
                        i + 1,
                        x[i]
                    )));
                }
                if let FamilyKind::IndependentBinomial { trials } = self.kind {
                    if let Some(i) = x.iter().position(|&v| v > trials as f64) {
                        return Err(Error::InvalidObservation(format!(
                            "count at position {} exceeds {} trials per arm",
                            i + 1,
                            trials
                        )));
                    }
                }
                if let Some(total) = self.fixed_total() {
                    let sum: f64 = x.iter().sum();
                    if sum != total {
                        return Err(Error::InvalidObservation(format!(
                            "values sum to {sum}, expected {total}"
                        )));
                    }
                }
                if self.carrier_log_unchecked(x) == f64::NEG_INFINITY {
                    return Err(Error::InvalidObservation(
                        "values are not a feasible outcome of the family".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Maps a natural-parameter gap to the family's user-facing scale.
    pub fn interpret_delta(&self, delta: f64) -> Interpretation {
        let (scale, value) = match self.kind {
            FamilyKind::Multinomial { .. } => (InterpretationScale::ProbabilityRatio, delta.exp()),
            FamilyKind::IndependentBinomial { .. } => (InterpretationScale::OddsRatio, delta.exp()),
            FamilyKind::NormalVariance { obs_per_group } => (
                InterpretationScale::PrecisionGap,
                2.0 * delta / (obs_per_group as f64 - 1.0),
            ),
            FamilyKind::BradleyTerry => (InterpretationScale::HeadToHeadOdds, (2.0 * delta).exp()),
        };
        Interpretation { scale, value }
    }
}

/// Sum in sorted order, so that permuting the terms cannot change the result.
fn sorted_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = terms.collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

fn as_counts(x: &[f64]) -> Option<Vec<u64>> {
    x.iter()
        .map(|&v| (v >= 0.0 && v.fract() == 0.0 && v.is_finite()).then_some(v as u64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpretationScale {
    /// `pi_j / pi_k = e^delta`.
    ProbabilityRatio,
    /// Odds ratio of success probabilities, `e^delta`.
    OddsRatio,
    /// `1/sigma_k^2 - 1/sigma_j^2 = 2 delta / (m - 1)`.
    PrecisionGap,
    /// Odds that the leader beats the other in a single game, `e^(2 delta)`.
    HeadToHeadOdds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    pub scale: InterpretationScale,
    #[serde(with = "crate::ext::serde_f64_ext")]
    pub value: f64,
}

/// Natural parameters, used only to generate data in simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalParams(Vec<f64>);

impl NaturalParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidArgument("theta must not be empty".into()));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("theta entries must be finite".into()));
        }
        Ok(Self(theta))
    }

    /// `theta_j = ln pi_j`; only differences are identified for the multinomial.
    pub fn from_probabilities(pi: &[f64]) -> Result<Self> {
        if pi.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidArgument("probabilities must be positive".into()));
        }
        Self::new(pi.iter().map(|p| p.ln()).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Softmax of `theta`: the multinomial cell probabilities.
    pub fn multinomial_probabilities(&self) -> Vec<f64> {
        let max = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.0.iter().map(|t| (t - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// Index of the best population, the lowest index among ties.
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (i, &t) in self.0.iter().enumerate() {
            if t > self.0[best] {
                best = i;
            }
        }
        best
    }
}
