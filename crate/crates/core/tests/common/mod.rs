#![allow(dead_code)]

use rankver_core::{FamilySpec, Observation};
use statrs::distribution::{Binomial, DiscreteCDF};

pub const IOWA_LABELS: [&str; 13] = [
    "Trump", "Cruz", "Rubio", "Carson", "Paul", "Bush", "Huckabee", "Fiorina", "Kasich",
    "Christie", "Santorum", "Gilmore", "Don't know",
];
pub const IOWA_COUNTS: [u64; 13] = [276, 214, 151, 71, 36, 36, 27, 20, 18, 15, 12, 9, 5];

/// The Iowa Republican poll of 890 respondents.
pub fn iowa() -> (FamilySpec, Observation) {
    let family = FamilySpec::multinomial(13, 890).unwrap();
    let x = Observation::new(
        &family,
        IOWA_LABELS.iter().map(|s| s.to_string()).collect(),
        IOWA_COUNTS.iter().map(|&c| c as f64).collect(),
    )
    .unwrap();
    (family, x)
}

/// `P(Bin(n, 1/2) >= k)` from the regularized incomplete beta function.
pub fn half_binomial_upper(n: u64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    Binomial::new(0.5, n).unwrap().sf(k - 1)
}

/// Exact two-tailed binomial(n, 1/2) p-value for `k` successes.
pub fn half_binomial_two_tailed(n: u64, k: u64) -> f64 {
    let hi = k.max(n - k);
    (2.0 * half_binomial_upper(n, hi)).min(1.0)
}
