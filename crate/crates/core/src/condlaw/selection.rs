//! Selection events: which rank prefix the observed order realized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ExtReal;

/// Interval restriction on the half-difference `D = (x_j - x_k) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub lower: ExtReal,
    pub upper: ExtReal,
}

impl Truncation {
    pub const NONE: Truncation = Truncation {
        lower: ExtReal::NegInfinity,
        upper: ExtReal::PosInfinity,
    };

    pub fn new(lower: ExtReal, upper: ExtReal) -> Result<Self> {
        if lower > upper {
            return Err(Error::InvalidArgument(format!(
                "truncation lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, d: f64) -> bool {
        self.lower.value() <= d && d <= self.upper.value()
    }

    pub fn is_none(&self) -> bool {
        *self == Self::NONE
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::NONE
    }
}

/// The event that the tie-broken descending order of `pool` begins with `prefix`.
///
/// Procedure 1 conditions on `prefix = [winner]` with the full pool. The
/// stepwise procedure conditions on the first `j` ranks. On lattice families an
/// outcome with ties on the boundary satisfies the event only for some
/// tie-break realizations; its weight is the probability of those.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionEvent {
    pub pool: Vec<usize>,
    pub prefix: Vec<usize>,
}

impl SelectionEvent {
    pub fn new(pool: Vec<usize>, prefix: Vec<usize>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidArgument("selection prefix must not be empty".into()));
        }
        if let Some(p) = prefix.iter().find(|p| !pool.contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "prefix index {p} is not in the selection pool"
            )));
        }
        Ok(Self { pool, prefix })
    }

    /// Winner selection among `n` populations.
    pub fn winner(n: usize, winner: usize) -> Self {
        Self {
            pool: (0..n).collect(),
            prefix: vec![winner],
        }
    }

    /// Probability that uniform tie-breaking of `x` over the pool yields the prefix.
    pub fn prefix_probability(&self, x: &[f64]) -> f64 {
        let vals: Vec<f64> = self.prefix.iter().map(|&i| x[i]).collect();
        if vals.windows(2).any(|w| w[0] < w[1]) {
            return 0.0;
        }
        let last = vals[vals.len() - 1];
        let rest_exceeds = self
            .pool
            .iter()
            .filter(|i| !self.prefix.contains(i))
            .any(|&i| x[i] > last);
        if rest_exceeds {
            return 0.0;
        }
        let mut p = 1.0;
        let mut start = 0;
        while start < vals.len() {
            let v = vals[start];
            let mut end = start;
            while end < vals.len() && vals[end] == v {
                end += 1;
            }
            let in_prefix = end - start;
            let in_pool = self.pool.iter().filter(|&&i| x[i] == v).count();
            // The tied block must appear in exactly this order; at the last value
            // only the first `in_prefix` positions of the block are constrained.
            p /= falling_factorial(in_pool, in_prefix);
            start = end;
        }
        p
    }

    /// Interval of `D_jk` on which the event holds, ignoring ties.
    pub fn truncation(&self, x: &[f64], j: usize, k: usize) -> Result<Truncation> {
        let m = 0.5 * (x[j] + x[k]);
        let coef = |i: usize| -> (f64, f64) {
            if i == j {
                (1.0, m)
            } else if i == k {
                (-1.0, m)
            } else {
                (0.0, x[i])
            }
        };
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        let mut constrain = |hi: usize, lo: usize| -> Result<()> {
            let (ch, bh) = coef(hi);
            let (cl, bl) = coef(lo);
            let c = ch - cl;
            let b = bh - bl;
            if c > 0.0 {
                lower = lower.max(-b / c);
            } else if c < 0.0 {
                upper = upper.min(b / -c);
            } else if b < 0.0 {
                return Err(Error::DegenerateLaw(
                    "selection event is impossible for the conditioned values".into(),
                ));
            }
            Ok(())
        };
        for w in self.prefix.windows(2) {
            constrain(w[0], w[1])?;
        }
        let last = self.prefix[self.prefix.len() - 1];
        for &i in self.pool.iter().filter(|i| !self.prefix.contains(i)) {
            constrain(last, i)?;
        }
        if lower > upper {
            return Err(Error::DegenerateLaw("selection event has empty support".into()));
        }
        // Adding zero turns a computed -0.0 into 0.0 for reporting.
        Ok(Truncation {
            lower: ExtReal::from(lower + 0.0),
            upper: ExtReal::from(upper + 0.0),
        })
    }
}

fn falling_factorial(n: usize, k: usize) -> f64 {
    ((n - k + 1)..=n).map(|v| v as f64).product()
}
