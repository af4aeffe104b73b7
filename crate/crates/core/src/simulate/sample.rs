//! Direct samplers for each family given natural parameters.

use rand::Rng;
use rand_distr::{Binomial, ChiSquared, Distribution};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, FamilySpec, NaturalParams};

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Draws one observation vector from the family at `theta`.
pub fn sample<R: Rng + ?Sized>(family: &FamilySpec, theta: &NaturalParams, rng: &mut R) -> Result<Vec<f64>> {
    let t = theta.as_slice();
    if t.len() != family.n {
        return Err(Error::DimensionMismatch {
            expected: family.n,
            got: t.len(),
        });
    }
    let bad = |e: rand_distr::BinomialError| Error::InvalidArgument(e.to_string());
    match family.kind {
        FamilyKind::Multinomial { total } => {
            let pi = theta.multinomial_probabilities();
            let mut x = vec![0.0; family.n];
            let mut remaining = total;
            let mut mass = 1.0;
            for j in 0..family.n - 1 {
                if remaining == 0 {
                    break;
                }
                let p = if mass > 0.0 { (pi[j] / mass).clamp(0.0, 1.0) } else { 1.0 };
                let draw = Binomial::new(remaining, p).map_err(bad)?.sample(rng);
                x[j] = draw as f64;
                remaining -= draw;
                mass -= pi[j];
            }
            x[family.n - 1] += remaining as f64;
            Ok(x)
        }
        FamilyKind::IndependentBinomial { trials } => t
            .iter()
            .map(|&th| {
                Binomial::new(trials, logistic(th))
                    .map_err(bad)
                    .map(|b| b.sample(rng) as f64)
            })
            .collect(),
        FamilyKind::NormalVariance { obs_per_group } => {
            if t.iter().any(|&th| th >= 0.0) {
                return Err(Error::InvalidArgument(
                    "normal variance parameters must be negative (theta = -(m-1) / (2 sigma^2))"
                        .into(),
                ));
            }
            let chi = ChiSquared::new(obs_per_group as f64 - 1.0)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(t.iter().map(|&th| chi.sample(rng) / (-2.0 * th)).collect())
        }
        FamilyKind::BradleyTerry => {
            let mut x = vec![0.0; family.n];
            for a in 0..family.n {
                for b in (a + 1)..family.n {
                    if rng.random::<f64>() < logistic(2.0 * (t[a] - t[b])) {
                        x[a] += 1.0;
                    } else {
                        x[b] += 1.0;
                    }
                }
            }
            Ok(x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn multinomial_frequencies_match_probabilities() {
        let f = FamilySpec::multinomial(3, 1000).unwrap();
        let theta = NaturalParams::from_probabilities(&[0.5, 0.3, 0.2]).unwrap();
        let shifted = NaturalParams::new(theta.as_slice().iter().map(|t| t + 4.0).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for th in [&theta, &shifted] {
            let mut totals = [0.0; 3];
            let reps = 400;
            for _ in 0..reps {
                let x = sample(&f, th, &mut rng).unwrap();
                assert_eq!(x.iter().sum::<f64>(), 1000.0);
                for j in 0..3 {
                    totals[j] += x[j];
                }
            }
            for (j, p) in [0.5, 0.3, 0.2].iter().enumerate() {
                let freq = totals[j] / (1000.0 * reps as f64);
                let se = (p * (1.0 - p) / (1000.0 * reps as f64)).sqrt();
                assert!((freq - p).abs() < 4.0 * se, "{j}: {freq}");
            }
        }
    }

    #[test]
    fn bradley_terry_samples_are_score_sequences() {
        let f = FamilySpec::bradley_terry(5).unwrap();
        let theta = NaturalParams::new(vec![1.0, 0.5, 0.0, -0.5, -1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = sample(&f, &theta, &mut rng).unwrap();
            assert!(f.validate_values(&x).is_ok());
        }
    }

    #[test]
    fn normal_variance_requires_negative_theta() {
        let f = FamilySpec::normal_variance(2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(sample(&f, &NaturalParams::new(vec![0.5, -1.0]).unwrap(), &mut rng).is_err());
        let x = sample(&f, &NaturalParams::new(vec![-2.0, -1.0]).unwrap(), &mut rng).unwrap();
        assert!(x.iter().all(|&r| r > 0.0));
    }
}
