//! Labeled observations and their tie-broken descending order.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilySpec, Measure};

/// One response vector with population labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    labels: Vec<String>,
    values: Vec<f64>,
    measure: Measure,
}

impl Observation {
    /// Builds an observation after checking it against the family's support.
    pub fn new(family: &FamilySpec, labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                got: labels.len(),
            });
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidObservation(format!("duplicate label {label:?}")));
            }
        }
        family.validate_values(&values)?;
        Ok(Self {
            labels,
            values,
            measure: family.measure(),
        })
    }

    /// Builds an observation labeled `1..=n`.
    pub fn unlabeled(family: &FamilySpec, values: Vec<f64>) -> Result<Self> {
        let labels = (1..=values.len()).map(|i| i.to_string()).collect();
        Self::new(family, labels, values)
    }

    /// Integer convenience constructor for lattice families.
    pub fn from_counts(family: &FamilySpec, counts: &[u64]) -> Result<Self> {
        Self::unlabeled(family, counts.iter().map(|&c| c as f64).collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
}

/// How ties between equal observed values are broken.
///
/// The validity guarantees of the procedures assume random tie-breaking;
/// `LowestIndex` exists for reproducible demonstrations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TieMode {
    Random { seed: u64 },
    LowestIndex,
}

/// A set of populations sharing one observed value, in tie-broken order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieGroup {
    pub value: f64,
    pub indices: Vec<usize>,
}

/// A strict descending order of the populations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedView {
    /// `order[r]` is the population holding rank `r` (zero-based).
    pub order: Vec<usize>,
    /// Groups of two or more tied populations, each listed in the order chosen.
    pub tie_groups: Vec<TieGroup>,
    pub tie_mode: TieMode,
}

impl OrderedView {
    pub fn winner(&self) -> usize {
        self.order[0]
    }

    pub fn runner_up(&self) -> usize {
        self.order[1]
    }

    pub fn has_ties(&self) -> bool {
        !self.tie_groups.is_empty()
    }
}

/// Orders populations by descending value, breaking ties per `tie_mode`.
pub fn order_observation(x: &Observation, tie_mode: TieMode) -> OrderedView {
    order_values(&x.values, tie_mode)
}

/// [`order_observation`] on a bare value slice.
pub fn order_values(values: &[f64], tie_mode: TieMode) -> OrderedView {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut rng = match tie_mode {
        TieMode::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieMode::LowestIndex => None,
    };
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            if let Some(rng) = rng.as_mut() {
                order[start..end].shuffle(rng);
            }
            tie_groups.push(TieGroup {
                value: values[order[start]],
                indices: order[start..end].to_vec(),
            });
        }
        start = end;
    }
    OrderedView {
        order,
        tie_groups,
        tie_mode,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_order_has_no_tie_record() {
        let v = order_values(&[276.0, 214.0, 151.0], TieMode::LowestIndex);
        assert_eq!(v.order, vec![0, 1, 2]);
        assert!(v.tie_groups.is_empty());
    }

    #[test]
    fn lowest_index_mode_records_tie_group() {
        let v = order_values(&[36.0, 36.0, 10.0], TieMode::LowestIndex);
        assert_eq!(v.order, vec![0, 1, 2]);
        assert_eq!(v.tie_groups.len(), 1);
        assert_eq!(v.tie_groups[0].indices, vec![0, 1]);
    }

    #[test]
    fn random_mode_is_reproducible_per_seed() {
        let a = order_values(&[5.0, 5.0, 5.0], TieMode::Random { seed: 7 });
        let b = order_values(&[5.0, 5.0, 5.0], TieMode::Random { seed: 7 });
        assert_eq!(a, b);
        let mut seen = HashSet::new();
        for seed in 0..200 {
            seen.insert(order_values(&[5.0, 5.0, 5.0], TieMode::Random { seed }).order);
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn order_is_descending() {
        let values = [3.0, 9.0, 1.0, 9.0, 4.0];
        let v = order_values(&values, TieMode::Random { seed: 1 });
        for w in v.order.windows(2) {
            assert!(values[w[0]] >= values[w[1]]);
        }
    }

    #[test]
    fn observation_rejects_duplicate_labels() {
        let f = FamilySpec::multinomial(2, 3).unwrap();
        let r = Observation::new(&f, vec!["a".into(), "a".into()], vec![1.0, 2.0]);
        assert!(matches!(r, Err(Error::InvalidObservation(_))));
    }
}
