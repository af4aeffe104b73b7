//! Benchmark fixtures.

use rankver_core::{FamilySpec, Observation};

pub struct Fixture {
    pub family: FamilySpec,
    pub x: Observation,
}

const IOWA: [(&str, u64); 13] = [
    ("Trump", 276),
    ("Cruz", 214),
    ("Rubio", 151),
    ("Carson", 71),
    ("Paul", 36),
    ("Bush", 36),
    ("Huckabee", 27),
    ("Fiorina", 20),
    ("Kasich", 18),
    ("Christie", 15),
    ("Santorum", 12),
    ("Gilmore", 9),
    ("Don't know", 5),
];

/// The Iowa caucus poll: 13 options, 890 respondents.
pub fn iowa() -> Fixture {
    let total = IOWA.iter().map(|&(_, c)| c).sum();
    let family = FamilySpec::multinomial(IOWA.len(), total).expect("valid family");
    let labels = IOWA.iter().map(|&(l, _)| l.to_string()).collect();
    let values = IOWA.iter().map(|&(_, c)| c as f64).collect();
    let x = Observation::new(&family, labels, values).expect("valid counts");
    Fixture { family, x }
}

/// Independent binomials with `n` arms of `trials` each and a well-separated leader.
pub fn binomial(n: usize, trials: u64) -> Fixture {
    let family = FamilySpec::independent_binomial(n, trials).expect("valid family");
    let values = (0..n).map(|i| (trials * (n - i) as u64 / (n as u64 + 1)) as f64).collect();
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let x = Observation::new(&family, labels, values).expect("valid counts");
    Fixture { family, x }
}

/// Sums of squares for `n` groups of `obs` observations.
pub fn normal_variance(n: usize, obs: u64) -> Fixture {
    let family = FamilySpec::normal_variance(n, obs).expect("valid family");
    let values = (0..n).map(|i| obs as f64 * (3.0 - 0.4 * i as f64)).collect();
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let x = Observation::new(&family, labels, values).expect("valid statistics");
    Fixture { family, x }
}
