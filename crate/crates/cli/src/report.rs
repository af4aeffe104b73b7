use rankver_core::simulate::{PowerRow, SimResult};
use rankver_core::{BoundOutcome, FamilySpec, RankReport, TestOutcome};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1.0";

/// The single JSON document every command emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    /// Command line that produced the report.
    pub command: Vec<String>,
    pub family: Option<FamilySpec>,
    pub alpha: f64,
    pub seed: Option<u64>,
    pub outcome: Outcome,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "result", rename_all = "snake_case")]
pub enum Outcome {
    Test(TestOutcome),
    Bound(BoundOutcome),
    Ranks(RankReport),
    PowerCurve(Vec<PowerRow>),
    Simulation(SimResult),
}

impl ReportDocument {
    pub fn new(command: &[String], family: Option<FamilySpec>, alpha: f64, seed: Option<u64>, outcome: Outcome) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_vec(),
            family,
            alpha,
            seed,
            outcome,
            warnings: Vec::new(),
        }
    }
}
