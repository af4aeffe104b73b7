//! Small numerical kernels: log-space accumulation, monotone inversion and
//! double-exponential quadrature.

use crate::error::Result;
use crate::ExtReal;

/// `ln(sum(exp(v)))`, max-shifted. Returns `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Bracketing parameters for [`invert_nondecreasing`].
#[derive(Debug, Clone, Copy)]
pub struct InversionConfig {
    pub initial_half_width: f64,
    pub cap: f64,
    pub tolerance: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            initial_half_width: 1.0,
            cap: 64.0,
            tolerance: 1e-8,
        }
    }
}

/// Finds `sup{t : f(t) <= target}` for a nondecreasing `f`.
///
/// The bracket starts at `[-w, w]` and doubles until the crossing is enclosed.
/// If `f(-cap) > target` the answer is `-inf`; if `f(cap) <= target` it is `+inf`.
pub fn invert_nondecreasing<F>(f: F, target: f64, config: InversionConfig) -> Result<ExtReal>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut width = config.initial_half_width;
    let (mut lo, mut hi);
    loop {
        lo = -width;
        hi = width;
        let below = f(lo)? <= target;
        let above = f(hi)? > target;
        if below && above {
            break;
        }
        if width >= config.cap {
            if !below {
                return Ok(ExtReal::NegInfinity);
            }
            return Ok(ExtReal::PosInfinity);
        }
        width = (width * 2.0).min(config.cap);
    }
    while hi - lo > config.tolerance {
        let mid = 0.5 * (lo + hi);
        if f(mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ExtReal::Finite(0.5 * (lo + hi)))
}

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// `f` receives the abscissa together with its distances to both endpoints,
/// so integrands with endpoint singularities can be evaluated without
/// cancellation. Levels are refined until the relative change drops below
/// `rel_tol` (or the level cap is hit).
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(b > a) {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let h_max = 3.5_f64;
    let eval = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let weight = std::f64::consts::FRAC_PI_2 * t.cosh() / (cu * cu);
        // x = mid + half * tanh(u); the short side uses 1 - tanh|u| = e^-|u| / cosh u.
        let near = half * (-u.abs()).exp() / cu;
        let far = 2.0 * half - near;
        let (dist_a, dist_b) = if u >= 0.0 { (far, near) } else { (near, far) };
        if dist_a <= 0.0 || dist_b <= 0.0 || weight == 0.0 {
            return 0.0;
        }
        let x = if u >= 0.0 { b - dist_b } else { a + dist_a };
        let v = f(x, dist_a, dist_b);
        if v.is_finite() {
            v * weight
        } else {
            0.0
        }
    };

    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > h_max {
            break;
        }
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _level in 0..10 {
        h *= 0.5;
        let mut added = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > h_max {
                break;
            }
            added += eval(t) + eval(-t);
            k += 2;
        }
        sum += added;
        let next = sum * h * half;
        let converged = (next - estimate).abs() <= rel_tol * next.abs();
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let v = [0.1_f64.ln(), 0.2_f64.ln(), 0.7_f64.ln()];
        assert!(log_sum_exp(&v).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn inversion_finds_crossing_and_saturates() {
        let root = invert_nondecreasing(Ok, 0.3, InversionConfig::default()).unwrap();
        assert!((root.value() - 0.3).abs() < 1e-8);
        let root = invert_nondecreasing(Ok, 10.0, InversionConfig::default()).unwrap();
        assert!((root.value() - 10.0).abs() < 1e-8);
        let none = invert_nondecreasing(|_| Ok(1.0), 0.05, InversionConfig::default()).unwrap();
        assert_eq!(none, ExtReal::NegInfinity);
        let all = invert_nondecreasing(|_| Ok(0.0), 0.05, InversionConfig::default()).unwrap();
        assert_eq!(all, ExtReal::PosInfinity);
    }

    #[test]
    fn tanh_sinh_handles_smooth_and_singular_integrands() {
        let v = tanh_sinh(|x, _, _| x.exp(), 0.0, 1.0, 1e-14);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        // int_0^1 1/sqrt(x(1-x)) dx = pi
        let v = tanh_sinh(|_, da, db| 1.0 / (da * db).sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - std::f64::consts::PI).abs() < 1e-9, "{v}");
        let v = tanh_sinh(|x, _, _| (-(x - 0.3).powi(2) * 2000.0).exp(), 0.0, 1.0, 1e-13);
        let exact = (std::f64::consts::PI / 2000.0).sqrt();
        assert!((v - exact).abs() < 1e-10 * exact, "{v} {exact}");
    }
}
