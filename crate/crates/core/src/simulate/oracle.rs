//! Exhaustive enumeration of small lattice outcome spaces.
//!
//! Every outcome is listed with its exact probability `exp(c theta'x) g(x) / Z`,
//! so error rates, coverage and conditional laws are computed without Monte
//! Carlo error. Randomized tests are integrated over the uniform draw exactly.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::condlaw::{build_law, build_selective_law, Atom, SelectionEvent, Truncation};
use crate::error::{Error, Result};
use crate::family::{FamilyKind, FamilySpec, NaturalParams};
use crate::numeric::log_sum_exp;
use crate::procedures::winner_level;
use crate::tournament::{score_table, MAX_PLAYERS};

/// Largest outcome space the oracle enumerates.
pub const MAX_OUTCOMES: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinnerErrorRates {
    /// Rejection probability given that the best population did not win.
    pub conditional: f64,
    /// Probability of declaring a population other than the best.
    pub marginal: f64,
    /// Probability that the best population did not win.
    pub null_probability: f64,
}

/// A winner/runner-up assignment produced by uniform tie-breaking.
#[derive(Debug, Clone, Copy)]
struct Realization {
    winner: usize,
    runner_up: usize,
    weight: f64,
}

#[derive(Debug, Clone)]
pub struct ExhaustiveOracle {
    family: FamilySpec,
    theta: Vec<f64>,
    outcomes: Vec<(Vec<f64>, f64)>,
}

/// Number of outcomes the family's support holds, or an error for continuous families.
pub fn support_size(family: &FamilySpec) -> Result<f64> {
    let n = family.n as u64;
    match family.kind {
        FamilyKind::Multinomial { total } => Ok(ln_binomial(total + n - 1, n - 1).exp().round()),
        FamilyKind::IndependentBinomial { trials } => Ok((trials as f64 + 1.0).powi(n as i32)),
        FamilyKind::BradleyTerry => {
            let games = n * (n - 1) / 2;
            if family.n > MAX_PLAYERS {
                Ok(2f64.powi(games as i32))
            } else {
                Ok(score_table(family.n).entries().len() as f64)
            }
        }
        FamilyKind::NormalVariance { .. } => Err(Error::InvalidFamily(
            "exhaustive enumeration needs a lattice family".into(),
        )),
    }
}

fn compositions(total: u64, parts: usize, prefix: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
    if parts == 1 {
        prefix.push(total as f64);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first as f64);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn grid(trials: u64, n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                (0..=trials).map(move |v| {
                    let mut q = p.clone();
                    q.push(v as f64);
                    q
                })
            })
            .collect();
    }
    out
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Probability that `V = p0 + U (p1 - p0)` is below `level`, for `U` uniform.
fn randomized_rejection(p0: f64, p1: f64, level: f64) -> f64 {
    if p1 > p0 {
        clamp01((level - p0) / (p1 - p0))
    } else if p0 <= level {
        1.0
    } else {
        0.0
    }
}

impl ExhaustiveOracle {
    /// Enumerates the support; refuses spaces larger than [`MAX_OUTCOMES`].
    pub fn new(family: &FamilySpec, theta: &NaturalParams) -> Result<Self> {
        if theta.len() != family.n {
            return Err(Error::DimensionMismatch {
                expected: family.n,
                got: theta.len(),
            });
        }
        let size = support_size(family)?;
        if size > MAX_OUTCOMES {
            return Err(Error::TooLarge {
                estimate: size,
                limit: MAX_OUTCOMES,
            });
        }
        let points: Vec<Vec<f64>> = match family.kind {
            FamilyKind::Multinomial { total } => {
                let mut out = Vec::new();
                compositions(total, family.n, &mut Vec::new(), &mut out);
                out
            }
            FamilyKind::IndependentBinomial { trials } => grid(trials, family.n),
            FamilyKind::BradleyTerry => score_table(family.n)
                .entries()
                .into_iter()
                .map(|(w, _)| w.into_iter().map(f64::from).collect())
                .collect(),
            FamilyKind::NormalVariance { .. } => unreachable!("rejected by support_size"),
        };
        let c = family.stat_scale();
        let t = theta.as_slice();
        let logw = points
            .iter()
            .map(|x| {
                let tilt: f64 = x.iter().zip(t).map(|(a, b)| a * b).sum();
                family.carrier_log(x).map(|g| c * tilt + g)
            })
            .collect::<Result<Vec<f64>>>()?;
        let z = log_sum_exp(&logw);
        let outcomes = points
            .into_iter()
            .zip(logw)
            .map(|(x, lw)| (x, (lw - z).exp()))
            .collect();
        Ok(Self {
            family: *family,
            theta: t.to_vec(),
            outcomes,
        })
    }

    /// Every outcome with its probability.
    pub fn outcomes(&self) -> &[(Vec<f64>, f64)] {
        &self.outcomes
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.1).sum()
    }

    /// Exact law of `x_j` given `x_j + x_k` and the other coordinates of `x`,
    /// as `(value, probability)` pairs in increasing order of value.
    pub fn conditional_law(&self, x: &[f64], j: usize, k: usize) -> Vec<(f64, f64)> {
        let same_rest = |y: &[f64]| {
            (0..y.len()).all(|i| i == j || i == k || y[i] == x[i]) && y[j] + y[k] == x[j] + x[k]
        };
        let mut law: Vec<(f64, f64)> = self
            .outcomes
            .iter()
            .filter(|(y, _)| same_rest(y))
            .map(|(y, p)| (y[j], *p))
            .collect();
        law.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = law.iter().map(|l| l.1).sum();
        law.iter_mut().for_each(|l| l.1 /= total);
        law
    }

    /// Winner and runner-up assignments of `x` under uniform tie-breaking.
    fn realizations(x: &[f64]) -> Vec<Realization> {
        let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<usize> = (0..x.len()).filter(|&i| x[i] == max).collect();
        let mut out = Vec::new();
        for &w in &top {
            let pw = 1.0 / top.len() as f64;
            let second: Vec<usize> = if top.len() > 1 {
                top.iter().copied().filter(|&i| i != w).collect()
            } else {
                let rest_max = (0..x.len())
                    .filter(|&i| i != w)
                    .map(|i| x[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                (0..x.len()).filter(|&i| i != w && x[i] == rest_max).collect()
            };
            for &r in &second {
                out.push(Realization {
                    winner: w,
                    runner_up: r,
                    weight: pw / second.len() as f64,
                });
            }
        }
        out
    }

    /// Lowest index among the largest parameters.
    fn best(&self) -> usize {
        NaturalParams::new(self.theta.clone()).map(|t| t.best()).unwrap_or(0)
    }

    fn lead(&self, w: usize) -> f64 {
        let rest = (0..self.theta.len())
            .filter(|&j| j != w)
            .map(|j| self.theta[j])
            .fold(f64::NEG_INFINITY, f64::max);
        self.theta[w] - rest
    }

    /// Randomized upper tail of the selective law of the winner against `r` at
    /// the draws `u = 0` and `u = 1`.
    fn selective_tails(&self, x: &[f64], w: usize, r: usize, delta: f64) -> Result<(f64, f64)> {
        let event = SelectionEvent::winner(x.len(), w);
        let law = build_selective_law(&self.family, x, w, r, delta, &event)?;
        Ok((law.survival(x[w], Atom::Split(0.0))?, law.survival(x[w], Atom::Split(1.0))?))
    }

    /// Probability that the best population wins, with ties broken uniformly.
    /// The best is the lowest index among the largest parameters.
    pub fn p_best_wins(&self) -> f64 {
        let best = self.best();
        self.outcomes
            .iter()
            .map(|(x, p)| {
                let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if x[best] == max {
                    p / x.iter().filter(|&&v| v == max).count() as f64
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Exact error rates of randomized Procedure 1 with the selective p-value.
    /// Among tied largest parameters the lowest index counts as the best.
    pub fn winner_error_rates(&self, alpha: f64, adjusted: bool) -> Result<WinnerErrorRates> {
        let level = winner_level(alpha, self.family.n, adjusted);
        let best = self.best();
        let (mut null, mut rejected) = (0.0, 0.0);
        for (x, p) in &self.outcomes {
            for real in Self::realizations(x) {
                if real.winner == best {
                    continue;
                }
                let (p0, p1) = self.selective_tails(x, real.winner, real.runner_up, 0.0)?;
                let mass = p * real.weight;
                null += mass;
                rejected += mass * randomized_rejection(p0, p1, level);
            }
        }
        Ok(WinnerErrorRates {
            conditional: if null > 0.0 { rejected / null } else { 0.0 },
            marginal: rejected,
            null_probability: null,
        })
    }

    /// Exact probability that the randomized Procedure 2′ bound exceeds the winner's lead.
    pub fn randomized_bound_noncoverage(&self, alpha: f64) -> Result<f64> {
        let mut miss = 0.0;
        for (x, p) in &self.outcomes {
            for real in Self::realizations(x) {
                let target = self.lead(real.winner);
                let (p0, p1) = self.selective_tails(x, real.winner, real.runner_up, target)?;
                miss += p * real.weight * randomized_rejection(p0, p1, alpha);
            }
        }
        Ok(miss)
    }

    /// Exact probability that the Procedure 2 bound exceeds the winner's lead.
    pub fn procedure2_noncoverage(&self, alpha: f64) -> Result<f64> {
        let mut miss = 0.0;
        for (x, p) in &self.outcomes {
            for real in Self::realizations(x) {
                let (w, r) = (real.winner, real.runner_up);
                let tail = |delta: f64| -> Result<f64> {
                    build_law(&self.family, x, w, r, delta, Truncation::NONE)?
                        .survival(x[w], Atom::Include)
                };
                let target = self.lead(w);
                // The bound is finite only when the tail at zero is at most alpha / 2,
                // and then exceeds the target when the tail there is below alpha / 2.
                let exceeds = if target < 0.0 {
                    tail(0.0)? <= alpha / 2.0
                } else {
                    tail(target)? < alpha / 2.0
                };
                if exceeds {
                    miss += p * real.weight;
                }
            }
        }
        Ok(miss)
    }

    /// Counts outcomes and tilts at which the runner-up's selective p-value
    /// falls below that of some other challenger by more than `tol`.
    pub fn runner_up_maximality_violations(&self, deltas: &[f64], tol: f64) -> Result<usize> {
        let mut violations = 0;
        for (x, _) in &self.outcomes {
            for real in Self::realizations(x) {
                for &delta in deltas {
                    let (_, p12) = self.selective_tails(x, real.winner, real.runner_up, delta)?;
                    for j in (0..x.len()).filter(|&j| j != real.winner && j != real.runner_up) {
                        let (_, p1j) = self.selective_tails(x, real.winner, j, delta)?;
                        if p1j > p12 + tol {
                            violations += 1;
                        }
                    }
                }
            }
        }
        Ok(violations)
    }

    /// Kolmogorov distance from uniform of the randomized selective p-value
    /// of `j` against `k`, conditional on `j` winning.
    pub fn randomized_p_ks(&self, j: usize, k: usize) -> Result<f64> {
        let mut pieces = Vec::new();
        for (x, p) in &self.outcomes {
            let w: f64 = Self::realizations(x)
                .iter()
                .filter(|r| r.winner == j)
                .map(|r| r.weight)
                .sum();
            if w == 0.0 {
                continue;
            }
            let (p0, p1) = self.selective_tails(x, j, k, 0.0)?;
            pieces.push((p0, p1, p * w));
        }
        let total: f64 = pieces.iter().map(|q| q.2).sum();
        if total == 0.0 {
            return Err(Error::DegenerateLaw(format!("population {j} never wins")));
        }
        let cdf = |t: f64| {
            pieces
                .iter()
                .map(|&(p0, p1, w)| w * randomized_rejection(p0, p1, t))
                .sum::<f64>()
                / total
        };
        // The distribution function is piecewise linear, so its distance from
        // the identity peaks at a breakpoint.
        Ok(pieces
            .iter()
            .flat_map(|&(p0, p1, _)| [p0, p1])
            .map(|t| (cdf(t) - t).abs())
            .fold(0.0, f64::max))
    }
}
