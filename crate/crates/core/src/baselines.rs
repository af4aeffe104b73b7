//! Gupta–Nagel subset selection for multinomial counts and its winner test.
//!
//! The subset `J(x) = {j : x_j >= max_k x_k - d}` contains the most probable
//! cell with probability at least `1 - alpha`. The threshold `d` is computed
//! from the two-cell worst case `pi = (1/2, 1/2, 0, ..., 0)`, where the gap
//! between the two cells is `m - 2 Bin(m, 1/2)`.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::condlaw::{Randomization, Truncation};
use crate::error::{Error, Result};
use crate::observation::{order_observation, Observation, TieMode};
use crate::procedures::{Conditioning, SeedTrace, TestOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetRule {
    pub d: u64,
    pub m: u64,
    pub n: usize,
    pub alpha: f64,
}

impl SubsetRule {
    pub fn new(m: u64, n: usize, alpha: f64) -> Result<Self> {
        Ok(Self {
            d: gupta_nagel_d(m, n, alpha)?,
            m,
            n,
            alpha,
        })
    }

    /// Worst-case probability that the gap between the two cells is at least `gap`.
    pub fn p_value(&self, gap: f64) -> f64 {
        if gap <= 0.0 {
            return 1.0;
        }
        gap_tail(self.m, |diff| diff as f64 >= gap)
    }
}

/// `P(m - 2B` satisfies `keep)` for `B ~ Bin(m, 1/2)`.
fn gap_tail(m: u64, keep: impl Fn(i64) -> bool) -> f64 {
    let ln_half_m = m as f64 * std::f64::consts::LN_2;
    (0..=m)
        .filter(|&b| keep(m as i64 - 2 * b as i64))
        .map(|b| (ln_binomial(m, b) - ln_half_m).exp())
        .sum::<f64>()
        .min(1.0)
}

/// Smallest integer `d` with `P(m - 2 Bin(m, 1/2) > d) <= alpha`.
pub fn gupta_nagel_d(m: u64, n: usize, alpha: f64) -> Result<u64> {
    if m < 1 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "subset selection needs m >= 1 and n >= 2, got m={m}, n={n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    // The tail is a step function of d; bisect over 0..=m.
    let tail = |d: u64| gap_tail(m, |diff| diff > d as i64);
    let (mut lo, mut hi) = (0u64, m);
    if tail(0) <= alpha {
        return Ok(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) <= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Indices of the selected subset, in population order.
pub fn subset_indices(values: &[f64], d: u64) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len())
        .filter(|&i| values[i] >= max - d as f64)
        .collect()
}

/// Labels of the Gupta–Nagel subset.
pub fn gupta_nagel_subset(x: &Observation, rule: &SubsetRule) -> Vec<String> {
    subset_indices(x.values(), rule.d)
        .into_iter()
        .map(|i| x.label(i).to_string())
        .collect()
}

/// Declares the winner best when the subset is a singleton.
///
/// The reported p-value is the worst-case probability of a gap at least as
/// large as the observed winner/runner-up gap. For a rule built by
/// [`SubsetRule::new`], `reject` holds exactly when it is at most `alpha`.
pub fn gn_winner_test(x: &Observation, rule: &SubsetRule, tie_mode: TieMode) -> Result<TestOutcome> {
    if x.len() != rule.n {
        return Err(Error::DimensionMismatch {
            expected: rule.n,
            got: x.len(),
        });
    }
    let view = order_observation(x, tie_mode);
    let (w, r) = (view.winner(), view.runner_up());
    let v = x.values();
    let singleton = subset_indices(v, rule.d).len() == 1;
    let p = rule.p_value(v[w] - v[r]);
    let rest = (0..v.len())
        .filter(|&i| i != w && i != r)
        .map(|i| (x.label(i).to_string(), v[i]))
        .collect();
    Ok(TestOutcome {
        reject: singleton,
        p_value: p,
        alpha: rule.alpha,
        level_used: rule.alpha,
        adjusted: false,
        winner_label: x.label(w).to_string(),
        runner_up_label: x.label(r).to_string(),
        conditioning: Conditioning {
            pair: [x.label(w).to_string(), x.label(r).to_string()],
            pair_values: [v[w], v[r]],
            pair_sum: v[w] + v[r],
            rest,
            truncation: Truncation::NONE,
            selected_prefix: None,
        },
        seed_trace: SeedTrace {
            tie_mode,
            tie_groups: view
                .tie_groups
                .iter()
                .map(|g| g.indices.iter().map(|&i| x.label(i).to_string()).collect())
                .collect(),
            randomization: Randomization::Off,
            uniform_draw: None,
        },
    })
}
