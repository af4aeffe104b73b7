mod common;

use common::{half_binomial_two_tailed, iowa};
use rankver_core::{
    procedure1, procedure2, procedure2prime, procedure3, procedure3prime, Atom, BoundOptions,
    ExtReal, FamilySpec, InterpretationScale, Observation, TieMode, VerifyOptions,
};
use statrs::distribution::{Beta, ContinuousCDF};

#[test]
fn winner_test_matches_exact_binomial() {
    let (f, x) = iowa();
    let out = procedure1(&f, &x, 0.05, &VerifyOptions::new(TieMode::LowestIndex)).unwrap();
    assert!(out.reject);
    assert_eq!(out.winner_label, "Trump");
    assert_eq!(out.runner_up_label, "Cruz");
    assert_eq!(out.conditioning.pair_sum, 490.0);
    assert!((0.0055..=0.0065).contains(&out.p_value), "{}", out.p_value);
    assert!((out.p_value - half_binomial_two_tailed(490, 276)).abs() < 1e-12);
    assert!((out.p_value - 0.0058013).abs() < 1e-7);
}

#[test]
fn lower_bound_matches_clopper_pearson() {
    let (f, x) = iowa();
    let out = procedure2(&f, &x, 0.05, &BoundOptions::new(TieMode::LowestIndex)).unwrap();
    assert_eq!(out.interpretation.scale, InterpretationScale::ProbabilityRatio);
    let ratio = out.interpretation.value;
    assert!((ratio - 1.075).abs() <= 0.005, "{ratio}");
    // Lower Clopper-Pearson limit for Trump's share of the 490 votes.
    let share = Beta::new(276.0, 215.0).unwrap().inverse_cdf(0.025);
    assert!((ratio - share / (1.0 - share)).abs() < 1e-6);
    assert!((ratio - 1.074943).abs() < 1e-5);
}

#[test]
fn selective_lower_bound_values() {
    let (f, x) = iowa();
    let conservative = procedure2prime(&f, &x, 0.05, &BoundOptions::new(TieMode::LowestIndex)).unwrap();
    let exclusive = procedure2prime(
        &f,
        &x,
        0.05,
        &BoundOptions {
            tie_mode: TieMode::LowestIndex,
            atom: Atom::Exclude,
        },
    )
    .unwrap();
    let plain = procedure2(&f, &x, 0.05, &BoundOptions::new(TieMode::LowestIndex)).unwrap();
    assert!((conservative.interpretation.value - 1.098327).abs() < 5e-4);
    assert!((exclusive.interpretation.value - 1.1086).abs() < 5e-4);
    assert!(conservative.delta_lower.value() >= plain.delta_lower.value());
    assert!(exclusive.delta_lower.value() >= conservative.delta_lower.value());
}

#[test]
fn stepwise_ranks_stop_at_paul_bush_tie() {
    let (f, x) = iowa();
    let report = procedure3(&f, &x, 0.05, TieMode::LowestIndex).unwrap();
    assert_eq!(report.j_hat, 4);
    assert_eq!(report.verified, ["Trump", "Cruz", "Rubio", "Carson"]);
    assert_eq!(report.per_step.len(), 5);
    let last = report.per_step.last().unwrap();
    assert_eq!([last.upper_label.as_str(), last.lower_label.as_str()], ["Paul", "Bush"]);
    assert_eq!(last.p_value, 1.0);
    let counts = [276u64, 214, 151, 71, 36, 36];
    for (step, w) in report.per_step.iter().zip(counts.windows(2)) {
        let oracle = half_binomial_two_tailed(w[0] + w[1], w[0]);
        assert!((step.p_value - oracle).abs() < 1e-12, "rank {}", step.rank);
    }
    assert!((report.per_step[1].p_value - 0.0011445).abs() < 1e-7);
}

#[test]
fn selective_stepwise_verifies_at_least_as_many_ranks() {
    let (f, x) = iowa();
    let plain = procedure3(&f, &x, 0.05, TieMode::LowestIndex).unwrap();
    let selective = procedure3prime(&f, &x, 0.05, TieMode::LowestIndex).unwrap();
    assert!(selective.j_hat >= plain.j_hat);
}

#[test]
fn fame_against_benevolence() {
    let f = FamilySpec::multinomial(2, 13).unwrap();
    let x = Observation::new(&f, vec!["Fame".into(), "Benevolence".into()], vec![8.0, 5.0]).unwrap();
    let out = procedure1(&f, &x, 0.05, &VerifyOptions::new(TieMode::LowestIndex)).unwrap();
    assert!(!out.reject);
    assert!((0.575..=0.585).contains(&out.p_value));
    assert!((out.p_value - half_binomial_two_tailed(13, 8)).abs() < 1e-12);
}

#[test]
fn tied_leaders_give_no_declaration() {
    let f = FamilySpec::multinomial(2, 20).unwrap();
    let x = Observation::from_counts(&f, &[10, 10]).unwrap();
    let out = procedure1(&f, &x, 0.05, &VerifyOptions::new(TieMode::Random { seed: 3 })).unwrap();
    assert!(!out.reject);
    assert_eq!(out.p_value, 1.0);
    let b = procedure2(&f, &x, 0.05, &BoundOptions::new(TieMode::Random { seed: 3 })).unwrap();
    assert_eq!(b.delta_lower, ExtReal::NegInfinity);
}
