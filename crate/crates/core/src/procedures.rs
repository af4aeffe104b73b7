//! Winner verification, lower confidence bounds on the winner's lead, and
//! stepwise verification of leading ranks.
//!
//! * Procedure 1 tests whether the winner is the best population with the
//!   unadjusted pairwise test of winner against runner-up.
//! * Procedure 2 inverts that pairwise test into a lower bound on
//!   `theta_winner - theta_runner_up`, reported only when nonnegative.
//! * Procedure 2′ inverts the selective (winner-truncated, tilted) p-value
//!   into an exact lower bound on `theta_winner - max_{j != winner} theta_j`.
//! * Procedure 3 tests adjacent ranks with unadjusted pairwise tests and stops
//!   at the first non-rejection; Procedure 3′ uses one-sided selective tests
//!   that also condition on the ranks already verified.

use serde::{Deserialize, Serialize};

use crate::condlaw::{
    build_law, build_selective_law, Atom, Randomization, SelectionEvent, Truncation,
};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, Interpretation};
use crate::numeric::{invert_nondecreasing, InversionConfig};
use crate::observation::{order_observation, Observation, OrderedView, TieMode};
use crate::ExtReal;

/// Largest of a list of p-values, a valid p-value for the union of their nulls.
pub fn max_p_combine(ps: &[f64]) -> Result<f64> {
    if ps.is_empty() {
        return Err(Error::InvalidArgument("no p-values to combine".into()));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("p-value {p} is outside [0, 1]")));
    }
    Ok(ps.iter().copied().fold(0.0, f64::max))
}

/// Whether the selective p-value also conditions on the ranks above `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperTruncation {
    /// Rank `j` is the largest among the populations not ranked above it.
    None,
    /// The first `j` ranks are held in their observed order.
    AtPrevious,
}

/// The selection event behind the selective p-value of ranks `j` and `k` (zero-based).
pub fn selection_event(view: &OrderedView, j: usize, upper: UpperTruncation) -> SelectionEvent {
    let n = view.order.len();
    match upper {
        UpperTruncation::None => SelectionEvent {
            pool: view.order[j..].to_vec(),
            prefix: vec![view.order[j]],
        },
        UpperTruncation::AtPrevious => SelectionEvent {
            pool: (0..n).collect(),
            prefix: view.order[..=j].to_vec(),
        },
    }
}

/// Selective p-value of rank `j` against rank `k` (zero-based ranks, `j < k`)
/// under the tilt `theta_[j] - theta_[k] = delta`.
#[allow(clippy::too_many_arguments)]
pub fn selective_p(
    family: &FamilySpec,
    values: &[f64],
    view: &OrderedView,
    j: usize,
    k: usize,
    delta: f64,
    upper: UpperTruncation,
    atom: Atom,
) -> Result<f64> {
    if j >= k || k >= view.order.len() {
        return Err(Error::InvalidArgument(format!(
            "selective p needs ranks j < k < n, got j={j}, k={k}"
        )));
    }
    let a = view.order[j];
    let b = view.order[k];
    let event = selection_event(view, j, upper);
    let law = build_selective_law(family, values, a, b, delta, &event)?;
    law.survival(values[a], atom)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Conditioning information recorded with every test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conditioning {
    pub pair: [String; 2],
    pub pair_values: [f64; 2],
    /// `x_j + x_k`.
    pub pair_sum: f64,
    /// Coordinates held fixed, as `(label, value)`.
    pub rest: Vec<(String, f64)>,
    /// Truncation of `D = (x_j - x_k) / 2`.
    pub truncation: Truncation,
    /// Labels of the rank prefix the law conditions on, if selective.
    pub selected_prefix: Option<Vec<String>>,
}

impl Conditioning {
    fn new(
        x: &Observation,
        a: usize,
        b: usize,
        truncation: Truncation,
        prefix: Option<&[usize]>,
    ) -> Self {
        let v = x.values();
        Self {
            pair: [x.label(a).to_string(), x.label(b).to_string()],
            pair_values: [v[a], v[b]],
            pair_sum: v[a] + v[b],
            rest: (0..v.len())
                .filter(|&i| i != a && i != b)
                .map(|i| (x.label(i).to_string(), v[i]))
                .collect(),
            truncation,
            selected_prefix: prefix.map(|p| p.iter().map(|&i| x.label(i).to_string()).collect()),
        }
    }
}

/// Record of every source of randomness a result depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTrace {
    pub tie_mode: TieMode,
    /// Tied groups as labels, in the order tie-breaking produced.
    pub tie_groups: Vec<Vec<String>>,
    pub randomization: Randomization,
    /// The uniform draw used to split the observed atom, if randomized.
    pub uniform_draw: Option<f64>,
}

impl SeedTrace {
    fn new(x: &Observation, view: &OrderedView, randomization: Randomization) -> Self {
        Self {
            tie_mode: view.tie_mode,
            tie_groups: view
                .tie_groups
                .iter()
                .map(|g| g.indices.iter().map(|&i| x.label(i).to_string()).collect())
                .collect(),
            randomization,
            uniform_draw: randomization.draw(),
        }
    }
}

/// Options for Procedure 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Test at `n alpha / (n - 1)` instead of `alpha`.
    pub adjusted: bool,
    pub tie_mode: TieMode,
    pub randomization: Randomization,
}

impl VerifyOptions {
    pub fn new(tie_mode: TieMode) -> Self {
        Self {
            adjusted: false,
            tie_mode,
            randomization: Randomization::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub reject: bool,
    pub p_value: f64,
    pub alpha: f64,
    pub level_used: f64,
    pub adjusted: bool,
    pub winner_label: String,
    pub runner_up_label: String,
    pub conditioning: Conditioning,
    pub seed_trace: SeedTrace,
}

/// Level at which Procedure 1 rejects.
pub fn winner_level(alpha: f64, n: usize, adjusted: bool) -> f64 {
    if adjusted {
        (alpha * n as f64 / (n as f64 - 1.0)).min(1.0)
    } else {
        alpha
    }
}

/// Procedure 1 p-value for an already ordered value vector.
///
/// Without a uniform draw this is the two-tailed unadjusted pairwise p-value.
/// With a draw `u` it is the randomized selective p-value, which is exactly
/// uniform under the null conditional on the selection event.
pub fn winner_p_value(
    family: &FamilySpec,
    values: &[f64],
    view: &OrderedView,
    uniform: Option<f64>,
) -> Result<f64> {
    let (w, r) = (view.winner(), view.runner_up());
    match uniform {
        None => build_law(family, values, w, r, 0.0, Truncation::NONE)?
            .two_tailed_p(values[w], Atom::Include),
        Some(u) => selective_p(
            family,
            values,
            view,
            0,
            1,
            0.0,
            UpperTruncation::None,
            Atom::Split(u),
        ),
    }
}

/// Procedure 1: declares the winner best when the pairwise test rejects.
pub fn procedure1(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    options: &VerifyOptions,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    check_dimension(family, x)?;
    let view = order_observation(x, options.tie_mode);
    let seed_trace = SeedTrace::new(x, &view, options.randomization);
    let p = winner_p_value(family, x.values(), &view, seed_trace.uniform_draw)?;
    let (w, r) = (view.winner(), view.runner_up());
    let conditioning = if seed_trace.uniform_draw.is_some() {
        let event = selection_event(&view, 0, UpperTruncation::None);
        let trunc = event.truncation(x.values(), w, r)?;
        Conditioning::new(x, w, r, trunc, Some(&event.prefix))
    } else {
        Conditioning::new(x, w, r, Truncation::NONE, None)
    };
    let level_used = winner_level(alpha, family.n, options.adjusted);
    Ok(TestOutcome {
        reject: p <= level_used,
        p_value: p,
        alpha,
        level_used,
        adjusted: options.adjusted,
        winner_label: x.label(w).to_string(),
        runner_up_label: x.label(r).to_string(),
        conditioning,
        seed_trace,
    })
}

fn check_dimension(family: &FamilySpec, x: &Observation) -> Result<()> {
    if x.len() != family.n {
        return Err(Error::DimensionMismatch {
            expected: family.n,
            got: x.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Procedure2,
    Procedure2Prime,
}

/// Options for Procedures 2 and 2′.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    pub tie_mode: TieMode,
    /// Atom rule for the inverted p-value; `Include` gives a conservative bound.
    pub atom: Atom,
}

impl BoundOptions {
    pub fn new(tie_mode: TieMode) -> Self {
        Self {
            tie_mode,
            atom: Atom::Include,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOutcome {
    pub method: BoundMethod,
    pub alpha: f64,
    pub delta_lower: ExtReal,
    pub interpretation: Interpretation,
    pub atom: Atom,
    pub winner_label: String,
    pub runner_up_label: String,
    pub conditioning: Conditioning,
    pub seed_trace: SeedTrace,
}

/// Lower bound on the winner's lead for an already ordered value vector.
pub fn bound_value(
    family: &FamilySpec,
    values: &[f64],
    view: &OrderedView,
    alpha: f64,
    method: BoundMethod,
    atom: Atom,
) -> Result<ExtReal> {
    check_alpha(alpha)?;
    let (w, r) = (view.winner(), view.runner_up());
    let config = InversionConfig::default();
    match method {
        BoundMethod::Procedure2 => {
            let tail = |delta: f64| {
                build_law(family, values, w, r, delta, Truncation::NONE)?.survival(values[w], atom)
            };
            let root = invert_nondecreasing(tail, alpha / 2.0, config)?;
            Ok(match root {
                ExtReal::Finite(v) if v >= 0.0 => root,
                ExtReal::PosInfinity => root,
                _ => ExtReal::NegInfinity,
            })
        }
        BoundMethod::Procedure2Prime => {
            let p = |delta: f64| {
                selective_p(family, values, view, 0, 1, delta, UpperTruncation::None, atom)
            };
            invert_nondecreasing(p, alpha, config)
        }
    }
}

/// Procedure 2: inverts the unadjusted pairwise test; `-inf` when the bound is negative.
pub fn procedure2(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    options: &BoundOptions,
) -> Result<BoundOutcome> {
    bound(family, x, alpha, options, BoundMethod::Procedure2)
}

/// Procedure 2′: the crossing `sup{delta : selective p at delta <= alpha}`.
pub fn procedure2prime(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    options: &BoundOptions,
) -> Result<BoundOutcome> {
    bound(family, x, alpha, options, BoundMethod::Procedure2Prime)
}

fn bound(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    options: &BoundOptions,
    method: BoundMethod,
) -> Result<BoundOutcome> {
    check_dimension(family, x)?;
    let view = order_observation(x, options.tie_mode);
    let delta_lower = bound_value(family, x.values(), &view, alpha, method, options.atom)?;
    let (w, r) = (view.winner(), view.runner_up());
    let conditioning = match method {
        BoundMethod::Procedure2 => Conditioning::new(x, w, r, Truncation::NONE, None),
        BoundMethod::Procedure2Prime => {
            let event = selection_event(&view, 0, UpperTruncation::None);
            let trunc = event.truncation(x.values(), w, r)?;
            Conditioning::new(x, w, r, trunc, Some(&event.prefix))
        }
    };
    Ok(BoundOutcome {
        method,
        alpha,
        delta_lower,
        interpretation: family.interpret_delta(delta_lower.value()),
        atom: options.atom,
        winner_label: x.label(w).to_string(),
        runner_up_label: x.label(r).to_string(),
        conditioning,
        seed_trace: SeedTrace::new(x, &view, Randomization::Off),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    Procedure3,
    Procedure3Prime,
}

/// One adjacent-pair test of a stepwise procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStep {
    /// One-based rank of the upper population of the pair.
    pub rank: usize,
    pub upper_label: String,
    pub lower_label: String,
    pub upper_value: f64,
    pub lower_value: f64,
    pub p_value: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub method: RankMethod,
    pub alpha: f64,
    /// Number of leading ranks verified.
    pub j_hat: usize,
    /// Labels whose ranks are verified, best first.
    pub verified: Vec<String>,
    /// Steps performed; the last one is the first non-rejection, if any.
    pub per_step: Vec<RankStep>,
    pub seed_trace: SeedTrace,
}

/// Stepwise p-values for an already ordered value vector, stopping after the
/// first non-rejection. Returns `(j_hat, p-values of the steps performed)`.
pub fn rank_steps(
    family: &FamilySpec,
    values: &[f64],
    view: &OrderedView,
    alpha: f64,
    method: RankMethod,
) -> Result<(usize, Vec<f64>)> {
    check_alpha(alpha)?;
    let n = view.order.len();
    let mut ps = Vec::new();
    for r in 0..n - 1 {
        let (a, b) = (view.order[r], view.order[r + 1]);
        let p = match method {
            RankMethod::Procedure3 => build_law(family, values, a, b, 0.0, Truncation::NONE)?
                .two_tailed_p(values[a], Atom::Include)?,
            RankMethod::Procedure3Prime => selective_p(
                family,
                values,
                view,
                r,
                r + 1,
                0.0,
                UpperTruncation::AtPrevious,
                Atom::Include,
            )?,
        };
        ps.push(p);
        if p > alpha {
            return Ok((r, ps));
        }
    }
    Ok((n - 1, ps))
}

/// Procedure 3: unadjusted adjacent-pair tests until the first non-rejection.
pub fn procedure3(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    tie_mode: TieMode,
) -> Result<RankReport> {
    ranks(family, x, alpha, tie_mode, RankMethod::Procedure3)
}

/// Procedure 3′: one-sided selective tests conditioning on the verified prefix.
pub fn procedure3prime(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    tie_mode: TieMode,
) -> Result<RankReport> {
    ranks(family, x, alpha, tie_mode, RankMethod::Procedure3Prime)
}

fn ranks(
    family: &FamilySpec,
    x: &Observation,
    alpha: f64,
    tie_mode: TieMode,
    method: RankMethod,
) -> Result<RankReport> {
    check_dimension(family, x)?;
    let view = order_observation(x, tie_mode);
    let v = x.values();
    let (j_hat, ps) = rank_steps(family, v, &view, alpha, method)?;
    let per_step = ps
        .iter()
        .enumerate()
        .map(|(r, &p)| {
            let (a, b) = (view.order[r], view.order[r + 1]);
            RankStep {
                rank: r + 1,
                upper_label: x.label(a).to_string(),
                lower_label: x.label(b).to_string(),
                upper_value: v[a],
                lower_value: v[b],
                p_value: p,
                rejected: p <= alpha,
            }
        })
        .collect();
    let verified = view.order[..j_hat]
        .iter()
        .map(|&i| x.label(i).to_string())
        .collect();
    Ok(RankReport {
        method,
        alpha,
        j_hat,
        verified,
        per_step,
        seed_trace: SeedTrace::new(x, &view, Randomization::Off),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observation::order_values;

    #[test]
    fn max_p_examples() {
        assert_eq!(max_p_combine(&[0.2, 0.04, 0.6]).unwrap(), 0.6);
        assert_eq!(max_p_combine(&[0.3]).unwrap(), 0.3);
        assert!(max_p_combine(&[]).is_err());
        assert!(max_p_combine(&[1.2]).is_err());
    }

    #[test]
    fn two_population_extreme_split() {
        let f = FamilySpec::multinomial(2, 5).unwrap();
        let x = Observation::from_counts(&f, &[5, 0]).unwrap();
        let out = procedure1(&f, &x, 0.05, &VerifyOptions::new(TieMode::LowestIndex)).unwrap();
        assert!((out.p_value - 0.0625).abs() < 1e-15);
        assert!(!out.reject);
    }

    #[test]
    fn tied_winner_is_not_verified() {
        let f = FamilySpec::multinomial(3, 30).unwrap();
        let x = Observation::from_counts(&f, &[12, 12, 6]).unwrap();
        let out = procedure1(&f, &x, 0.05, &VerifyOptions::new(TieMode::Random { seed: 3 })).unwrap();
        assert_eq!(out.p_value, 1.0);
        assert!(!out.reject);
        assert_eq!(out.seed_trace.tie_groups.len(), 1);
        let b = procedure2(&f, &x, 0.05, &BoundOptions::new(TieMode::Random { seed: 3 })).unwrap();
        assert_eq!(b.delta_lower, ExtReal::NegInfinity);
        let b = procedure2prime(&f, &x, 0.05, &BoundOptions::new(TieMode::Random { seed: 3 })).unwrap();
        assert_eq!(b.delta_lower, ExtReal::NegInfinity);
    }

    #[test]
    fn adjusted_level() {
        assert_eq!(winner_level(0.05, 10, false), 0.05);
        assert!((winner_level(0.05, 10, true) - 0.05 * 10.0 / 9.0).abs() < 1e-15);
        let f = FamilySpec::multinomial(3, 30).unwrap();
        let x = Observation::from_counts(&f, &[12, 10, 8]).unwrap();
        assert!(procedure1(&f, &x, 1.5, &VerifyOptions::new(TieMode::LowestIndex)).is_err());
    }

    #[test]
    fn randomized_and_plain_agree_without_atom() {
        // With the draw at u = 1 the selective p equals the conservative two-tailed p.
        let f = FamilySpec::multinomial(4, 40).unwrap();
        let values = [17.0, 11.0, 8.0, 4.0];
        let view = order_values(&values, TieMode::LowestIndex);
        let plain = winner_p_value(&f, &values, &view, None).unwrap();
        let sel = winner_p_value(&f, &values, &view, Some(1.0)).unwrap();
        assert!((plain - sel).abs() < 1e-14);
    }

    #[test]
    fn all_equal_values_verify_nothing() {
        let f = FamilySpec::multinomial(4, 20).unwrap();
        let x = Observation::from_counts(&f, &[5, 5, 5, 5]).unwrap();
        for r in [
            procedure3(&f, &x, 0.05, TieMode::Random { seed: 1 }).unwrap(),
            procedure3prime(&f, &x, 0.05, TieMode::Random { seed: 1 }).unwrap(),
        ] {
            assert_eq!(r.j_hat, 0);
            assert_eq!(r.per_step.len(), 1);
            assert!(r.verified.is_empty());
        }
    }

    #[test]
    fn first_step_of_prime_matches_winner_selective_p() {
        let f = FamilySpec::multinomial(4, 60).unwrap();
        let values = [30.0, 15.0, 10.0, 5.0];
        let view = order_values(&values, TieMode::LowestIndex);
        let (_, ps) = rank_steps(&f, &values, &view, 0.05, RankMethod::Procedure3Prime).unwrap();
        let p1 = selective_p(&f, &values, &view, 0, 1, 0.0, UpperTruncation::None, Atom::Include)
            .unwrap();
        assert!((ps[0] - p1).abs() < 1e-15);
    }
}
