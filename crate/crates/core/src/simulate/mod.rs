//! Monte Carlo experiments and exhaustive-enumeration oracles.
//!
//! Every trial draws its data, tie-breaks and randomization from its own
//! counter-based stream (see [`rng`]), so a result is a pure function of the
//! configuration and the master seed, whatever the number of worker threads.

pub mod oracle;
pub mod rng;
pub mod sample;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{subset_indices, SubsetRule};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, NaturalParams};
use crate::observation::{order_values, OrderedView, TieMode};
use crate::procedures::{
    bound_value, rank_steps, winner_level, winner_p_value, BoundMethod, RankMethod,
};
use crate::Atom;

pub use oracle::{ExhaustiveOracle, WinnerErrorRates};
pub use rng::{trial_rng, Purpose};
pub use sample::sample;

/// Conditions with fewer events than this are flagged as low precision.
pub const MIN_CONDITION_EVENTS: u64 = 100;

/// Natural parameters `(delta, 0, ..., 0)`, i.e. multinomial probabilities
/// proportional to `(e^delta, 1, ..., 1)`.
pub fn leader_theta(n: usize, delta: f64) -> Result<NaturalParams> {
    let mut t = vec![0.0; n];
    if let Some(first) = t.first_mut() {
        *first = delta;
    }
    NaturalParams::new(t)
}

/// The default power-curve grid: 0 to 3 in steps of 0.25.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=12).map(|i| i as f64 * 0.25).collect()
}

/// Which quantity a simulation estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    /// Procedure 1 false declarations: a population other than the best is
    /// declared best. Among tied largest parameters the lowest index is the best.
    WinnerError { randomized: bool, adjusted: bool },
    /// Coverage of the lower bound on `theta_winner - max_{j != winner} theta_j`.
    Coverage { method: BoundMethod },
    /// Probability that a stepwise procedure verifies an out-of-place rank.
    Fwer { method: RankMethod },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub family: FamilySpec,
    pub theta: NaturalParams,
    pub experiment: Experiment,
    pub alpha: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub jobs: Option<usize>,
}

/// A proportion estimated over the trials where a condition held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    pub condition: String,
    pub events: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub low_precision: bool,
}

impl ConditionEstimate {
    fn new(condition: &str, hits: u64, events: u64) -> Self {
        let (estimate, std_error) = proportion(hits, events);
        Self {
            condition: condition.to_string(),
            events,
            estimate,
            std_error,
            low_precision: events < MIN_CONDITION_EVENTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub experiment: Experiment,
    /// The headline proportion; for winner errors it is conditional on the best not winning.
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Trials in which the headline condition held.
    pub events: u64,
    pub low_precision: bool,
    pub breakdown: Vec<ConditionEstimate>,
}

impl SimResult {
    fn from_headline(experiment: Experiment, trials: u64, head: ConditionEstimate, rest: Vec<ConditionEstimate>) -> Self {
        let mut breakdown = vec![head.clone()];
        breakdown.extend(rest);
        Self {
            experiment,
            estimate: head.estimate,
            std_error: head.std_error,
            trials,
            events: head.events,
            low_precision: head.low_precision,
            breakdown,
        }
    }
}

/// `(p_hat, sqrt(p_hat (1 - p_hat) / n))`, or zeros when `n = 0`.
pub fn proportion(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

fn check_common(family: &FamilySpec, theta: &NaturalParams, alpha: f64, trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("a simulation needs at least one trial".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if theta.len() != family.n {
        return Err(Error::DimensionMismatch {
            expected: family.n,
            got: theta.len(),
        });
    }
    Ok(())
}

/// Runs `trial` for every index, in parallel, returning results in index order.
fn run_trials<T, F>(trials: u64, jobs: Option<usize>, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let go = || (0..trials).into_par_iter().map(&trial).collect::<Result<Vec<T>>>();
    match jobs {
        None => go(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?
            .install(go),
    }
}

/// Observation, ordered view and uniform draw for one trial.
fn draw_trial(
    family: &FamilySpec,
    theta: &NaturalParams,
    seed: u64,
    block: u64,
    trial: u64,
) -> Result<(Vec<f64>, OrderedView, f64)> {
    let x = sample(family, theta, &mut trial_rng(seed, Purpose::Data, block, trial))?;
    let tie_seed: u64 = trial_rng(seed, Purpose::TieBreak, block, trial).random();
    let u: f64 = trial_rng(seed, Purpose::Randomize, block, trial).random();
    let view = order_values(&x, TieMode::Random { seed: tie_seed });
    Ok((x, view, u))
}

/// `theta_w - max_{j != w} theta_j`.
fn lead(theta: &[f64], w: usize) -> f64 {
    let rest = theta
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != w)
        .map(|(_, &t)| t)
        .fold(f64::NEG_INFINITY, f64::max);
    theta[w] - rest
}

/// Number of leading observed ranks that are in the correct order, at most `n - 1`.
pub fn true_rank_depth(theta: &[f64], view: &OrderedView) -> usize {
    let n = view.order.len();
    let mut depth = 0;
    for i in 0..n.saturating_sub(1) {
        let below = view.order[i + 1..]
            .iter()
            .map(|&k| theta[k])
            .fold(f64::NEG_INFINITY, f64::max);
        if theta[view.order[i]] > below {
            depth += 1;
        } else {
            break;
        }
    }
    depth
}

/// Error rates of Procedure 1 or of a stepwise procedure.
pub fn error_rate_sim(config: &SimConfig) -> Result<SimResult> {
    let SimConfig { family, theta, alpha, trials, master_seed: seed, .. } = config;
    check_common(family, theta, *alpha, *trials)?;
    let t = theta.as_slice();
    match config.experiment {
        Experiment::WinnerError { randomized, adjusted } => {
            let level = winner_level(*alpha, family.n, adjusted);
            let best = theta.best();
            let per = run_trials(*trials, config.jobs, |i| {
                let (x, view, u) = draw_trial(family, theta, *seed, 0, i)?;
                let p = winner_p_value(family, &x, &view, randomized.then_some(u))?;
                let w = view.winner();
                Ok((w != best, p <= level, w == best))
            })?;
            let null = per.iter().filter(|r| r.0).count() as u64;
            let null_rejects = per.iter().filter(|r| r.0 && r.1).count() as u64;
            let best_wins = per.iter().filter(|r| r.2).count() as u64;
            Ok(SimResult::from_headline(
                config.experiment,
                *trials,
                ConditionEstimate::new("given_best_not_winning", null_rejects, null),
                vec![
                    ConditionEstimate::new("marginal_false_declaration", null_rejects, *trials),
                    ConditionEstimate::new("best_wins", best_wins, *trials),
                ],
            ))
        }
        Experiment::Fwer { method } => {
            let per = run_trials(*trials, config.jobs, |i| {
                let (x, view, _) = draw_trial(family, theta, *seed, 0, i)?;
                let (j_hat, _) = rank_steps(family, &x, &view, *alpha, method)?;
                Ok((j_hat > true_rank_depth(t, &view), j_hat > 0))
            })?;
            let errors = per.iter().filter(|r| r.0).count() as u64;
            let any = per.iter().filter(|r| r.1).count() as u64;
            Ok(SimResult::from_headline(
                config.experiment,
                *trials,
                ConditionEstimate::new("familywise_error", errors, *trials),
                vec![ConditionEstimate::new("any_rank_verified", any, *trials)],
            ))
        }
        Experiment::Coverage { .. } => coverage_sim(config),
    }
}

/// Coverage of Procedure 2 or 2′ lower bounds.
pub fn coverage_sim(config: &SimConfig) -> Result<SimResult> {
    let SimConfig { family, theta, alpha, trials, master_seed: seed, .. } = config;
    check_common(family, theta, *alpha, *trials)?;
    let Experiment::Coverage { method } = config.experiment else {
        return error_rate_sim(config);
    };
    let t = theta.as_slice();
    let per = run_trials(*trials, config.jobs, |i| {
        let (x, view, _) = draw_trial(family, theta, *seed, 0, i)?;
        let b = bound_value(family, &x, &view, *alpha, method, Atom::Include)?;
        Ok((b.value() <= lead(t, view.winner()), b.value() == f64::NEG_INFINITY))
    })?;
    let covered = per.iter().filter(|r| r.0).count() as u64;
    let minus_inf = per.iter().filter(|r| r.1).count() as u64;
    Ok(SimResult::from_headline(
        config.experiment,
        *trials,
        ConditionEstimate::new("covered", covered, *trials),
        vec![ConditionEstimate::new("bound_is_minus_infinity", minus_inf, *trials)],
    ))
}

/// Runs whichever experiment the configuration names.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    match config.experiment {
        Experiment::Coverage { .. } => coverage_sim(config),
        _ => error_rate_sim(config),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub m: u64,
    pub n: usize,
    pub deltas: Vec<f64>,
    pub alpha: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub jobs: Option<usize>,
    /// Randomize Procedure 1 at the observed atom.
    pub randomized: bool,
}

impl PowerConfig {
    pub fn new(m: u64, n: usize, alpha: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            m,
            n,
            deltas: default_delta_grid(),
            alpha,
            trials,
            master_seed,
            jobs: None,
            randomized: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub delta: f64,
    pub power_selective: f64,
    pub power_gn: f64,
    pub se_selective: f64,
    pub se_gn: f64,
}

/// Probability of correctly declaring population 1 best under multinomial
/// probabilities proportional to `(e^delta, 1, ..., 1)`, for Procedure 1 at
/// level `n alpha / (n - 1)` and for the Gupta–Nagel singleton rule at `alpha`.
pub fn power_curve(config: &PowerConfig) -> Result<Vec<PowerRow>> {
    if config.deltas.is_empty() {
        return Err(Error::InvalidArgument("the delta grid is empty".into()));
    }
    let family = FamilySpec::multinomial(config.n, config.m)?;
    let rule = SubsetRule::new(config.m, config.n, config.alpha)?;
    let level = winner_level(config.alpha, config.n, true);
    config
        .deltas
        .iter()
        .enumerate()
        .map(|(block, &delta)| {
            let theta = leader_theta(config.n, delta)?;
            check_common(&family, &theta, config.alpha, config.trials)?;
            let per = run_trials(config.trials, config.jobs, |i| {
                let (x, view, u) =
                    draw_trial(&family, &theta, config.master_seed, block as u64, i)?;
                let correct = view.winner() == 0;
                let p = winner_p_value(&family, &x, &view, config.randomized.then_some(u))?;
                let gn = subset_indices(&x, rule.d) == [0];
                Ok((correct && p <= level, gn))
            })?;
            let sel = per.iter().filter(|r| r.0).count() as u64;
            let gn = per.iter().filter(|r| r.1).count() as u64;
            let (power_selective, se_selective) = proportion(sel, config.trials);
            let (power_gn, se_gn) = proportion(gn, config.trials);
            Ok(PowerRow {
                delta,
                power_selective,
                power_gn,
                se_selective,
                se_gn,
            })
        })
        .collect()
}
