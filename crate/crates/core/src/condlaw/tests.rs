use proptest::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF, DiscreteCDF, Hypergeometric};

use super::*;
use crate::ExtReal;

fn choose(n: u64, k: u64) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 - i) / (i + 1);
    }
    c
}

fn binomial_upper_tail(s: u64, from: u64) -> f64 {
    let num: u128 = (from..=s).map(|t| choose(s, t)).sum();
    num as f64 / 2f64.powi(s as i32)
}

fn multinomial(n: usize, m: u64) -> FamilySpec {
    FamilySpec::multinomial(n, m).unwrap()
}

#[test]
fn untilted_multinomial_pair_is_binomial() {
    let f = multinomial(3, 12);
    let law = build_law(&f, &[6.0, 4.0, 2.0], 0, 1, 0.0, Truncation::NONE).unwrap();
    let p = law.survival(6.0, Atom::Include).unwrap();
    assert_eq!(binomial_upper_tail(10, 6), 386.0 / 1024.0);
    assert!((p - 386.0 / 1024.0).abs() < 1e-14, "{p}");
    assert_eq!(law.support().unwrap().len(), 11);
}

#[test]
fn zero_tilt_reweighting_identity() {
    let f = multinomial(3, 12);
    let x = [6.0, 4.0, 2.0];
    let base = build_law(&f, &x, 0, 1, 0.0, Truncation::NONE).unwrap();
    let delta = 0.4;
    let tilted = build_law(&f, &x, 0, 1, delta, Truncation::NONE).unwrap();
    let w: Vec<f64> = base
        .support()
        .unwrap()
        .iter()
        .zip(base.probabilities().unwrap())
        .map(|(t, p)| p * (delta * (t - 5.0)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    for (a, b) in w.iter().zip(tilted.probabilities().unwrap()) {
        assert!((a / z - b).abs() < 1e-14);
    }
}

#[test]
fn iowa_winner_truncation_support() {
    let f = multinomial(3, 641);
    let event = SelectionEvent::winner(3, 0);
    let law = build_selective_law(&f, &[276.0, 214.0, 151.0], 0, 1, 0.0, &event).unwrap();
    assert_eq!(law.truncation().lower, ExtReal::Finite(0.0));
    let (lo, hi) = law.range();
    assert_eq!((lo, hi), (245.0, 490.0));
}

#[test]
fn survival_at_truncation_floor_is_one() {
    let f = multinomial(3, 30);
    let trunc = Truncation::new(ExtReal::Finite(1.0), ExtReal::PosInfinity).unwrap();
    let law = build_law(&f, &[12.0, 8.0, 10.0], 0, 1, 0.0, trunc).unwrap();
    assert_eq!(law.range().0, 11.0);
    assert!((law.survival(11.0, Atom::Include).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn symmetric_law_half_mass_above_center() {
    let f = multinomial(3, 20);
    let law = build_law(&f, &[7.0, 6.0, 7.0], 0, 1, 0.0, Truncation::NONE).unwrap();
    // s = 13 is odd: 7 is the smallest point above the center.
    assert!((law.survival(7.0, Atom::Include).unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn tied_pair_two_tailed_is_one() {
    let f = multinomial(3, 100);
    let law = build_law(&f, &[36.0, 36.0, 28.0], 0, 1, 0.0, Truncation::NONE).unwrap();
    assert_eq!(law.two_tailed_p(36.0, Atom::Include).unwrap(), 1.0);
}

#[test]
fn point_mass_gives_unit_or_uniform_p_values() {
    let f = multinomial(3, 5);
    let law = build_law(&f, &[0.0, 0.0, 5.0], 0, 1, 0.0, Truncation::NONE).unwrap();
    assert!(law.is_point_mass());
    assert_eq!(law.survival(0.0, Atom::Exclude).unwrap(), 1.0);
    assert_eq!(law.two_tailed_p(0.0, Atom::Include).unwrap(), 1.0);
    assert_eq!(law.survival(0.0, Atom::Split(0.1)).unwrap(), 0.1);
    assert!((law.two_tailed_p(0.0, Atom::Split(0.1)).unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn outside_support_is_an_error() {
    let f = multinomial(3, 12);
    let law = build_law(&f, &[6.0, 4.0, 2.0], 0, 1, 0.0, Truncation::NONE).unwrap();
    assert_eq!(
        law.survival(11.0, Atom::Include),
        Err(Error::OutsideSupport { value: 11.0 })
    );
}

#[test]
fn empty_truncation_is_degenerate() {
    let f = multinomial(3, 12);
    let trunc = Truncation::new(ExtReal::Finite(20.0), ExtReal::PosInfinity).unwrap();
    let r = build_law(&f, &[6.0, 4.0, 2.0], 0, 1, 0.0, trunc);
    assert!(matches!(r, Err(Error::DegenerateLaw(_))));
    let r = build_law(&f, &[6.0, 4.0, 2.0], 1, 1, 0.0, Truncation::NONE);
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
}

#[test]
fn quantile_matches_exact_binomial_inversion() {
    let f = multinomial(2, 100);
    let law = build_law(&f, &[50.0, 50.0], 0, 1, 0.0, Truncation::NONE).unwrap();
    // Exact oracle: smallest t with P(Bin(100, 1/2) <= t) >= 0.975.
    let total = 2f64.powi(100);
    let mut acc: u128 = 0;
    let mut oracle = 0;
    for t in 0..=100 {
        acc += choose(100, t);
        if acc as f64 / total >= 0.975 {
            oracle = t;
            break;
        }
    }
    assert_eq!(oracle, 60);
    assert_eq!(law.quantile(0.975), 60.0);
    assert_eq!(law.quantile(1.0), 100.0);
    let mid = law.quantile(0.5);
    assert!((mid - 50.0).abs() <= 1.0);
}

#[test]
fn binomial_pair_is_hypergeometric() {
    let f = FamilySpec::independent_binomial(3, 9).unwrap();
    let x = [7.0, 3.0, 4.0];
    let law = build_law(&f, &x, 0, 1, 0.0, Truncation::NONE).unwrap();
    // x_j | x_j + x_k = 10 is Hypergeometric(population 18, successes 9, draws 10).
    let h = Hypergeometric::new(18, 9, 10).unwrap();
    let p = law.survival(7.0, Atom::Include).unwrap();
    assert!((p - h.sf(6)).abs() < 1e-13, "{p} vs {}", h.sf(6));
    assert_eq!(law.range(), (1.0, 9.0));
}

#[test]
fn bradley_terry_pair_law_uses_doubled_tilt() {
    let f = FamilySpec::bradley_terry(3).unwrap();
    let x = [2.0, 1.0, 0.0];
    for delta in [0.0, 0.7, -1.3] {
        let law = build_law(&f, &x, 0, 1, delta, Truncation::NONE).unwrap();
        assert_eq!(law.support().unwrap(), &[1.0, 2.0]);
        let expected = delta.exp() / (delta.exp() + (-delta).exp());
        assert!((law.survival(2.0, Atom::Include).unwrap() - expected).abs() < 1e-14);
    }
}

#[test]
fn lattice_laws_are_normalized() {
    for (f, x) in [
        (multinomial(4, 40), vec![12.0, 9.0, 11.0, 8.0]),
        (FamilySpec::independent_binomial(3, 20).unwrap(), vec![17.0, 15.0, 2.0]),
        (FamilySpec::bradley_terry(5).unwrap(), vec![4.0, 2.0, 2.0, 1.0, 1.0]),
    ] {
        for delta in [-3.0, 0.0, 2.5] {
            let law = build_law(&f, &x, 0, 1, delta, Truncation::NONE).unwrap();
            let total: f64 = law.probabilities().unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn normal_variance_untilted_matches_beta_cdf() {
    let f = FamilySpec::normal_variance(3, 11).unwrap();
    let x = [2.7, 1.1, 0.9];
    let law = build_law(&f, &x, 0, 1, 0.0, Truncation::NONE).unwrap();
    let beta = Beta::new(5.0, 5.0).unwrap();
    let u = 2.7 / 3.8;
    let p = law.survival(2.7, Atom::Include).unwrap();
    assert!((p - beta.sf(u)).abs() < 1e-12, "{p} vs {}", beta.sf(u));
    assert!((law.cdf(law.range().1) - 1.0).abs() < 1e-8);
}

#[test]
fn normal_variance_quadrature_agrees_with_closed_form() {
    for m in [3u64, 4, 7, 30] {
        let f = FamilySpec::normal_variance(2, m).unwrap();
        let x = [1.7, 0.6];
        let closed = build_law(&f, &x, 0, 1, 0.0, Truncation::NONE).unwrap();
        // A subnormal tilt forces the quadrature path without changing the law.
        let quad = build_law(&f, &x, 0, 1, f64::MIN_POSITIVE, Truncation::NONE).unwrap();
        for obs in [0.2, 1.15, 1.7, 2.2] {
            let a = closed.survival(obs, Atom::Include).unwrap();
            let b = quad.survival(obs, Atom::Include).unwrap();
            assert!((a - b).abs() < 1e-10 * a.max(1e-300) + 1e-14, "m={m} {obs}: {a} {b}");
        }
    }
}

#[test]
fn normal_variance_tilted_law_matches_midpoint_oracle() {
    let f = FamilySpec::normal_variance(2, 9).unwrap();
    let x = [3.0, 1.0];
    let delta = 0.8;
    let law = build_law(&f, &x, 0, 1, delta, Truncation::NONE).unwrap();
    let (m, a) = (2.0, 3.0);
    let dens = |d: f64| (delta * d).exp() * ((m + d) * (m - d)).powf(a);
    let steps = 200_000;
    let h = 2.0 * m / steps as f64;
    let (mut below, mut above) = (0.0, 0.0);
    for i in 0..steps {
        let d = -m + (i as f64 + 0.5) * h;
        if d < 1.0 {
            below += dens(d);
        } else {
            above += dens(d);
        }
    }
    let oracle = above / (above + below);
    let p = law.survival(3.0, Atom::Include).unwrap();
    assert!((p - oracle).abs() < 1e-8, "{p} {oracle}");
}

#[test]
fn normal_variance_truncated_tail() {
    let f = FamilySpec::normal_variance(3, 8).unwrap();
    let x = [2.0, 1.5, 1.2];
    let event = SelectionEvent::winner(3, 0);
    let law = build_selective_law(&f, &x, 0, 1, 0.0, &event).unwrap();
    let beta = Beta::new(3.5, 3.5).unwrap();
    // Winner event: r_j >= r_k, so the share is at least 1/2.
    let expected = beta.sf(2.0 / 3.5) / 0.5;
    let p = law.survival(2.0, Atom::Include).unwrap();
    assert!((p - expected).abs() < 1e-12, "{p} {expected}");
    assert!(law.survival(1.0, Atom::Include).is_err());
}

#[test]
fn selective_and_unadjusted_agree_at_zero_tilt() {
    // The winner-truncated law keeps exactly half of a symmetric law, so the
    // selective p equals the doubled one-sided tail.
    let f = multinomial(3, 60);
    let x = [29.0, 20.0, 11.0];
    let event = SelectionEvent::winner(3, 0);
    let sel = build_selective_law(&f, &x, 0, 1, 0.0, &event).unwrap();
    let full = build_law(&f, &x, 0, 1, 0.0, Truncation::NONE).unwrap();
    let ps = sel.survival(29.0, Atom::Include).unwrap();
    let pu = full.survival(29.0, Atom::Include).unwrap();
    assert!((ps - 2.0 * pu).abs() < 1e-14);
    assert!((ps - full.two_tailed_p(29.0, Atom::Include).unwrap()).abs() < 1e-14);
}

#[test]
fn survival_is_nondecreasing_in_tilt() {
    let grid: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.1).collect();
    let cases: Vec<(FamilySpec, Vec<f64>)> = vec![
        (multinomial(3, 641), vec![276.0, 214.0, 151.0]),
        (FamilySpec::independent_binomial(3, 20).unwrap(), vec![15.0, 11.0, 2.0]),
        (FamilySpec::bradley_terry(4).unwrap(), vec![3.0, 2.0, 1.0, 0.0]),
        (FamilySpec::normal_variance(3, 6).unwrap(), vec![2.5, 1.4, 0.3]),
    ];
    for (f, x) in cases {
        let event = SelectionEvent::winner(x.len(), 0);
        let mut prev = 0.0;
        for &delta in &grid {
            let law = build_selective_law(&f, &x, 0, 1, delta, &event).unwrap();
            let p = law.survival(x[0], Atom::Include).unwrap();
            assert!(p >= prev - 1e-12, "{:?} at {delta}: {p} < {prev}", f.kind);
            prev = p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_generic_multinomial(
        m in 2u64..=30,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
        delta in -3.0f64..3.0,
        lower in -8.0f64..8.0,
    ) {
        let x0 = (a * m as f64).floor();
        let x1 = ((m as f64 - x0) * b).floor();
        let x = vec![x0, x1, m as f64 - x0 - x1];
        let f = multinomial(3, m);
        let trunc = Truncation::new(ExtReal::Finite(lower.min((x0 - x1) / 2.0)), ExtReal::PosInfinity).unwrap();
        let fast = build_law(&f, &x, 0, 1, delta, trunc).unwrap();
        let slow = build_law_generic(&f, &x, 0, 1, delta, trunc).unwrap();
        prop_assert_eq!(fast.support(), slow.support());
        for (p, q) in fast.probabilities().unwrap().iter().zip(slow.probabilities().unwrap()) {
            prop_assert!((p - q).abs() <= 1e-10 * q.abs().max(1e-300));
        }
    }

    #[test]
    fn closed_form_matches_generic_binomial(
        m in 1u64..=30,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        c in 0.0f64..=1.0,
        delta in -3.0f64..3.0,
    ) {
        let x = vec![(a * m as f64).round(), (b * m as f64).round(), (c * m as f64).round()];
        let f = FamilySpec::independent_binomial(3, m).unwrap();
        let fast = build_law(&f, &x, 1, 2, delta, Truncation::NONE).unwrap();
        let slow = build_law_generic(&f, &x, 1, 2, delta, Truncation::NONE).unwrap();
        prop_assert_eq!(fast.support(), slow.support());
        for (p, q) in fast.probabilities().unwrap().iter().zip(slow.probabilities().unwrap()) {
            prop_assert!((p - q).abs() <= 1e-10 * q.abs().max(1e-300));
        }
    }
}
