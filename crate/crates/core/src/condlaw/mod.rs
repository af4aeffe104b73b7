//! One-dimensional conditional laws of pairwise half-differences.
//!
//! For populations `j` and `k`, write `M = (x_j + x_k) / 2` and
//! `D = (x_j - x_k) / 2`. Conditional on `M` and every other coordinate, the
//! law of `D` depends on the parameter only through `delta = theta_j - theta_k`
//! and has weight `exp(c delta d) g(M + d, M - d, x_rest)` at `d`, where `c` is
//! the family's statistic scale. Laws may be truncated to an interval or
//! restricted to a rank-selection event.
//!
//! Observed and reported values are in units of `x_j`, never half-integers.

mod continuous;
mod selection;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, FamilySpec};
use crate::numeric::log_sum_exp;

use continuous::ContinuousLaw;
pub use selection::{SelectionEvent, Truncation};

/// Treatment of the probability atom at the observed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "u", rename_all = "snake_case")]
pub enum Atom {
    /// Count the whole atom (conservative).
    Include,
    /// Drop the atom (liberal).
    Exclude,
    /// Count the fraction `u` of the atom; with `u` uniform this is exact.
    Split(f64),
}

/// Whether a p-value is randomized at the observed atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Randomization {
    Off,
    Uniform { seed: u64 },
}

impl Randomization {
    /// The uniform draw this randomization uses, if any.
    ///
    /// The draw comes from stream 1 of the seed, so it is independent of the
    /// tie-breaking shuffle, which uses stream 0 of the same seed.
    pub fn draw(&self) -> Option<f64> {
        match *self {
            Randomization::Off => None,
            Randomization::Uniform { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1);
                Some(rng.random())
            }
        }
    }

    pub fn atom(&self) -> Atom {
        self.draw().map_or(Atom::Include, Atom::Split)
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// Support points in `x_j` units, ascending, with normalized probabilities.
    Lattice { points: Vec<f64>, probs: Vec<f64> },
    Continuous(ContinuousLaw),
}

/// Law of `x_j` given `x_j + x_k` and the remaining coordinates.
#[derive(Debug, Clone)]
pub struct ConditionalLaw {
    j: usize,
    k: usize,
    center: f64,
    delta: f64,
    truncation: Truncation,
    repr: Repr,
}

impl ConditionalLaw {
    pub fn pair(&self) -> (usize, usize) {
        (self.j, self.k)
    }

    /// `M = (x_j + x_k) / 2`.
    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.repr, Repr::Lattice { .. })
    }

    /// Support points (values of `x_j`) of a lattice law.
    pub fn support(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Lattice { points, .. } => Some(points),
            Repr::Continuous(_) => None,
        }
    }

    /// Probabilities matching [`support`](Self::support).
    pub fn probabilities(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Lattice { probs, .. } => Some(probs),
            Repr::Continuous(_) => None,
        }
    }

    /// Range of `x_j` covered by the law.
    pub fn range(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Lattice { points, .. } => (points[0], points[points.len() - 1]),
            Repr::Continuous(c) => (self.center + c.lo, self.center + c.hi),
        }
    }

    /// True when the law is a single point. Deterministic p-values are then 1;
    /// a randomized one is the uniform draw itself.
    pub fn is_point_mass(&self) -> bool {
        match &self.repr {
            Repr::Lattice { points, .. } => points.len() == 1,
            Repr::Continuous(_) => false,
        }
    }

    /// `(P(X < x), P(X = x), P(X > x))` at an observed value.
    pub fn tails(&self, x_obs: f64) -> Result<(f64, f64, f64)> {
        match &self.repr {
            Repr::Lattice { points, probs } => {
                let idx = points
                    .binary_search_by(|p| p.total_cmp(&x_obs))
                    .map_err(|_| Error::OutsideSupport { value: x_obs })?;
                let below: f64 = probs[..idx].iter().sum();
                let above: f64 = probs[idx + 1..].iter().rev().sum();
                Ok((below, probs[idx], above))
            }
            Repr::Continuous(c) => {
                let d = x_obs - self.center;
                let slack = 1e-12 * self.center.abs().max(1.0);
                if d < c.lo - slack || d > c.hi + slack {
                    return Err(Error::OutsideSupport { value: x_obs });
                }
                let (below, above) = c.split(d.clamp(c.lo, c.hi));
                let total = below + above;
                Ok((below / total, 0.0, above / total))
            }
        }
    }

    /// Upper-tail probability `P(X > x) + u P(X = x)` per the atom rule.
    pub fn survival(&self, x_obs: f64, atom: Atom) -> Result<f64> {
        let (_, at, above) = self.tails(x_obs)?;
        if self.is_point_mass() && !matches!(atom, Atom::Split(_)) {
            return Ok(1.0);
        }
        let u = match atom {
            Atom::Include => 1.0,
            Atom::Exclude => 0.0,
            Atom::Split(u) => u,
        };
        Ok((above + u * at).clamp(0.0, 1.0))
    }

    /// Two-tailed p-value `2 min(upper, lower)` capped at one.
    ///
    /// With `Atom::Split(u)` the randomized upper tail `V` gives `2 min(V, 1 - V)`,
    /// which is exactly uniform under the law.
    pub fn two_tailed_p(&self, x_obs: f64, atom: Atom) -> Result<f64> {
        let (below, at, above) = self.tails(x_obs)?;
        if self.is_point_mass() && !matches!(atom, Atom::Split(_)) {
            return Ok(1.0);
        }
        let p = match atom {
            Atom::Include => 2.0 * (above + at).min(below + at),
            Atom::Exclude => 2.0 * above.min(below),
            Atom::Split(u) => {
                let v = above + u * at;
                2.0 * v.min(below + (1.0 - u) * at)
            }
        };
        Ok(p.clamp(0.0, 1.0))
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Lattice { points, probs } => points
                .iter()
                .zip(probs)
                .take_while(|(p, _)| **p <= x)
                .map(|(_, q)| q)
                .sum::<f64>()
                .min(1.0),
            Repr::Continuous(c) => c.cdf(x - self.center),
        }
    }

    /// Smallest support value whose CDF reaches `q`.
    pub fn quantile(&self, q: f64) -> f64 {
        match &self.repr {
            Repr::Lattice { points, probs } => {
                if q >= 1.0 {
                    return points[points.len() - 1];
                }
                let mut acc = 0.0;
                for (p, w) in points.iter().zip(probs) {
                    acc += w;
                    if acc >= q {
                        return *p;
                    }
                }
                points[points.len() - 1]
            }
            Repr::Continuous(c) => self.center + c.quantile(q),
        }
    }
}

/// Builds the law of `x_j` given `x_j + x_k` and `x_rest`, tilted by `delta`
/// and truncated to `trunc` (in `D` units).
pub fn build_law(
    family: &FamilySpec,
    x: &[f64],
    j: usize,
    k: usize,
    delta: f64,
    trunc: Truncation,
) -> Result<ConditionalLaw> {
    build(family, x, j, k, delta, trunc, None, false)
}

/// As [`build_law`], but every weight is computed from the family's carrier.
///
/// Slower than the closed forms; used to cross-check them.
pub fn build_law_generic(
    family: &FamilySpec,
    x: &[f64],
    j: usize,
    k: usize,
    delta: f64,
    trunc: Truncation,
) -> Result<ConditionalLaw> {
    build(family, x, j, k, delta, trunc, None, true)
}

/// Builds the law restricted to a rank-selection event.
///
/// On lattice families each point is weighted by the probability that
/// tie-breaking realizes the event there; on continuous families the event
/// reduces to an interval truncation.
pub fn build_selective_law(
    family: &FamilySpec,
    x: &[f64],
    j: usize,
    k: usize,
    delta: f64,
    event: &SelectionEvent,
) -> Result<ConditionalLaw> {
    check_pair(family, x, j, k)?;
    let trunc = event.truncation(x, j, k)?;
    build(family, x, j, k, delta, trunc, Some(event), false)
}

fn check_pair(family: &FamilySpec, x: &[f64], j: usize, k: usize) -> Result<()> {
    if x.len() != family.n {
        return Err(Error::DimensionMismatch {
            expected: family.n,
            got: x.len(),
        });
    }
    if j == k || j >= x.len() || k >= x.len() {
        return Err(Error::InvalidArgument(format!(
            "invalid index pair ({j}, {k}) for {} populations",
            x.len()
        )));
    }
    if !x[j].is_finite() || !x[k].is_finite() {
        return Err(Error::InvalidObservation("pair values must be finite".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build(
    family: &FamilySpec,
    x: &[f64],
    j: usize,
    k: usize,
    delta: f64,
    trunc: Truncation,
    event: Option<&SelectionEvent>,
    generic: bool,
) -> Result<ConditionalLaw> {
    check_pair(family, x, j, k)?;
    if delta.is_nan() {
        return Err(Error::InvalidArgument("tilt must not be NaN".into()));
    }
    let center = 0.5 * (x[j] + x[k]);
    let tilt = delta * family.stat_scale();
    let repr = match family.kind {
        FamilyKind::NormalVariance { obs_per_group } => {
            let exponent = (obs_per_group as f64 - 3.0) / 2.0;
            let lo = trunc.lower.value().max(-center);
            let hi = trunc.upper.value().min(center);
            if !(hi > lo) {
                return Err(Error::DegenerateLaw(format!(
                    "truncated support [{lo}, {hi}] holds no mass"
                )));
            }
            Repr::Continuous(ContinuousLaw::new(center, exponent, tilt, lo, hi))
        }
        _ => lattice(family, x, j, k, tilt, trunc, event, generic)?,
    };
    Ok(ConditionalLaw {
        j,
        k,
        center,
        delta,
        truncation: trunc,
        repr,
    })
}

#[allow(clippy::too_many_arguments)]
fn lattice(
    family: &FamilySpec,
    x: &[f64],
    j: usize,
    k: usize,
    tilt: f64,
    trunc: Truncation,
    event: Option<&SelectionEvent>,
    generic: bool,
) -> Result<Repr> {
    if x[j] < 0.0 || x[k] < 0.0 || x[j].fract() != 0.0 || x[k].fract() != 0.0 {
        return Err(Error::InvalidObservation(
            "lattice pair values must be nonnegative integers".into(),
        ));
    }
    let s = (x[j] + x[k]) as u64;
    let half = s as f64 / 2.0;
    let (t_min, t_max) = match family.kind {
        FamilyKind::IndependentBinomial { trials } => (s.saturating_sub(trials), s.min(trials)),
        _ => (0, s),
    };
    let mut y = x.to_vec();
    let mut points = Vec::new();
    let mut log_w = Vec::new();
    for t in t_min..=t_max {
        let d = t as f64 - half;
        if !trunc.contains(d) {
            continue;
        }
        y[j] = t as f64;
        y[k] = (s - t) as f64;
        let mut lw = if generic {
            family.carrier_log_unchecked(&y)
        } else {
            pair_carrier_log(family, &y, t, s - t)
        };
        if let Some(e) = event {
            let w = e.prefix_probability(&y);
            lw += if w > 0.0 { w.ln() } else { f64::NEG_INFINITY };
        }
        if lw == f64::NEG_INFINITY {
            continue;
        }
        if tilt != 0.0 {
            lw += tilt * d;
        }
        points.push(t as f64);
        log_w.push(lw);
    }
    if points.is_empty() {
        return Err(Error::DegenerateLaw(
            "no support points satisfy the truncation".into(),
        ));
    }
    let lz = log_sum_exp(&log_w);
    let probs = log_w.iter().map(|lw| (lw - lz).exp()).collect();
    Ok(Repr::Lattice { points, probs })
}

/// Log carrier up to factors that do not depend on the split of `x_j + x_k`.
fn pair_carrier_log(family: &FamilySpec, y: &[f64], tj: u64, tk: u64) -> f64 {
    match family.kind {
        FamilyKind::Multinomial { .. } => -ln_factorial(tj) - ln_factorial(tk),
        FamilyKind::IndependentBinomial { trials } => {
            ln_binomial(trials, tj) + ln_binomial(trials, tk)
        }
        _ => family.carrier_log_unchecked(y),
    }
}

#[cfg(test)]
mod tests;
