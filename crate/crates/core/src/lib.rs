//! Rank verification for exponential families with Schur-concave carriers.
//!
//! Given one observation per population, the procedures here test whether the
//! observed winner is the best population, bound its lead over the rest, and
//! verify how many leading ranks are in the correct order. Every p-value is
//! computed from an exact one-dimensional conditional law.
//!
//! ```
//! use rankver_core::{procedure1, procedure3, FamilySpec, Observation, TieMode, VerifyOptions};
//!
//! let family = FamilySpec::multinomial(4, 200)?;
//! let x = Observation::from_counts(&family, &[90, 60, 30, 20])?;
//! let test = procedure1(&family, &x, 0.05, &VerifyOptions::new(TieMode::LowestIndex))?;
//! assert!(test.reject);
//! let ranks = procedure3(&family, &x, 0.05, TieMode::LowestIndex)?;
//! assert!(ranks.j_hat >= 1);
//! # Ok::<(), rankver_core::Error>(())
//! ```

// `!(a > b)` also rejects NaN; the comparisons are written that way on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod condlaw;
pub mod error;
pub mod ext;
pub mod family;
pub mod majorization;
pub mod observation;
pub mod procedures;
pub mod simulate;

mod numeric;
mod tournament;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use family::{FamilyKind, FamilySpec, Interpretation, InterpretationScale, Measure, NaturalParams};
pub use observation::{order_observation, order_values, Observation, OrderedView, TieGroup, TieMode};
pub use condlaw::{build_law, build_law_generic, build_selective_law, Atom, ConditionalLaw, Randomization, SelectionEvent, Truncation};
pub use majorization::{majorizes, transfer, Direction, MajorizationVerdict};
pub use procedures::{
    max_p_combine, procedure1, procedure2, procedure2prime, procedure3, procedure3prime,
    selective_p, BoundMethod, BoundOptions, BoundOutcome, RankMethod, RankReport, TestOutcome,
    UpperTruncation, VerifyOptions,
};
pub use baselines::{gn_winner_test, gupta_nagel_d, gupta_nagel_subset, SubsetRule};
pub use simulate::{
    coverage_sim, error_rate_sim, power_curve, ExhaustiveOracle, Experiment, PowerConfig, PowerRow,
    SimConfig, SimResult,
};
