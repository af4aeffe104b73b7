//! Conditional law of `D = (r_j - r_k) / 2` for normal sample variances.
//!
//! Given `M = (r_j + r_k) / 2` the density of `D` on `(-M, M)` is proportional
//! to `exp(beta D) (M + D)^a (M - D)^a` with `a = (m - 3) / 2`. Untilted, the
//! share `r_j / (r_j + r_k)` is `Beta(a + 1, a + 1)`, evaluated in closed form;
//! tilted laws are integrated with tanh-sinh quadrature.

use statrs::function::beta::beta_reg;

use crate::numeric::tanh_sinh;

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct ContinuousLaw {
    pub(crate) half_sum: f64,
    pub(crate) exponent: f64,
    pub(crate) beta: f64,
    pub(crate) lo: f64,
    pub(crate) hi: f64,
    shift: f64,
}

impl ContinuousLaw {
    pub(crate) fn new(half_sum: f64, exponent: f64, beta: f64, lo: f64, hi: f64) -> Self {
        let mut law = Self {
            half_sum,
            exponent,
            beta,
            lo,
            hi,
            shift: 0.0,
        };
        if beta != 0.0 {
            law.shift = law.max_log_density();
        }
        law
    }

    fn log_density(&self, d: f64) -> f64 {
        self.beta * d
            + self.exponent * ((self.half_sum + d).ln() + (self.half_sum - d).ln())
    }

    /// Upper envelope of the log density on the support, used as a common shift.
    fn max_log_density(&self) -> f64 {
        let a = self.exponent;
        let m = self.half_sum;
        let mut best = f64::NEG_INFINITY;
        let grid = 256;
        for i in 1..grid {
            let d = self.lo + (self.hi - self.lo) * i as f64 / grid as f64;
            best = best.max(self.log_density(d));
        }
        // Stationary point of beta d + a ln(M^2 - d^2): beta (M^2 - d^2) = 2 a d.
        if a > 0.0 {
            let b = self.beta;
            let d = if b == 0.0 {
                0.0
            } else {
                (-a + (a * a + b * b * m * m).sqrt()) / b
            };
            if d > self.lo && d < self.hi {
                best = best.max(self.log_density(d));
            }
        }
        if !best.is_finite() {
            best = 0.0;
        }
        best
    }

    /// Unnormalized mass of `[d1, d2]`, comparable across calls.
    pub(crate) fn mass(&self, d1: f64, d2: f64) -> f64 {
        if !(d2 > d1) {
            return 0.0;
        }
        let m = self.half_sum;
        if self.beta == 0.0 {
            let p = self.exponent + 1.0;
            let u1 = ((m + d1) / (2.0 * m)).clamp(0.0, 1.0);
            let u2 = ((m + d2) / (2.0 * m)).clamp(0.0, 1.0);
            if u1 >= 0.5 {
                // Upper tail via the mirror image keeps small tails accurate.
                return beta_reg(p, p, 1.0 - u1) - beta_reg(p, p, 1.0 - u2);
            }
            return beta_reg(p, p, u2) - beta_reg(p, p, u1);
        }
        let base_a = m + d1;
        let base_b = m - d2;
        let (a, beta, shift) = (self.exponent, self.beta, self.shift);
        tanh_sinh(
            |d, da, db| {
                let lp = base_a + da;
                let lm = base_b + db;
                (beta * d + a * (lp.ln() + lm.ln()) - shift).exp()
            },
            d1,
            d2,
            QUAD_TOL,
        )
    }

    /// `(P(D < d), P(D > d))` as unnormalized masses.
    pub(crate) fn split(&self, d: f64) -> (f64, f64) {
        (self.mass(self.lo, d), self.mass(d, self.hi))
    }

    pub(crate) fn cdf(&self, d: f64) -> f64 {
        let (below, above) = self.split(d.clamp(self.lo, self.hi));
        below / (below + above)
    }

    pub(crate) fn quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return self.lo;
        }
        if q >= 1.0 {
            return self.hi;
        }
        let (mut a, mut b) = (self.lo, self.hi);
        let width = 1e-12 * (self.hi - self.lo);
        while b - a > width {
            let mid = 0.5 * (a + b);
            if self.cdf(mid) >= q {
                b = mid;
            } else {
                a = mid;
            }
        }
        b
    }
}
