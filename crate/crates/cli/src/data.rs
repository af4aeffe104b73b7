use std::path::Path;

use anyhow::{Context, Result};
use rankver_core::{FamilySpec, Observation};
use serde::Deserialize;

use crate::args::{FamilyArg, FamilyArgs, Format};
use crate::failure::{DataError, UsageError};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    label: String,
    value: f64,
}

/// Labeled values read from a dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl Dataset {
    fn from_rows(rows: Vec<Row>) -> Result<Self> {
        if rows.is_empty() {
            return Err(DataError("the dataset has no rows".into()).into());
        }
        if let Some(r) = rows.iter().find(|r| !r.value.is_finite()) {
            return Err(DataError(format!("value for {:?} is not finite", r.label)).into());
        }
        Ok(Self {
            labels: rows.iter().map(|r| r.label.clone()).collect(),
            values: rows.iter().map(|r| r.value).collect(),
        })
    }

    pub fn has_ties(&self) -> bool {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.windows(2).any(|w| w[0] == w[1])
    }

    /// Whether the winner or the runner-up shares its value with another population.
    pub fn has_leading_ties(&self) -> bool {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        let count = |x: f64| v.iter().filter(|&&y| y == x).count();
        v.len() >= 2 && (count(v[0]) > 1 || count(v[1]) > 1)
    }
}

pub fn load(path: &Path, format: Format) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DataError(format!("cannot read {}: {e}", path.display())))?;
    let json = match format {
        Format::Json => true,
        Format::Csv => false,
        Format::Auto => path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json")),
    };
    if json {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
    .with_context(|| format!("in {}", path.display()))
}

pub fn parse_json(text: &str) -> Result<Dataset> {
    let rows: Vec<Row> =
        serde_json::from_str(text).map_err(|e| DataError(format!("invalid JSON dataset: {e}")))?;
    Dataset::from_rows(rows)
}

pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError(format!("invalid CSV: {e}")))?;
        if record.len() != 2 {
            return Err(DataError(format!(
                "line {}: expected `label,value`, found {} fields",
                i + 1,
                record.len()
            ))
            .into());
        }
        let (label, value) = (&record[0], &record[1]);
        if i == 0 && label.eq_ignore_ascii_case("label") && value.eq_ignore_ascii_case("value") {
            continue;
        }
        let value: f64 = value
            .parse()
            .map_err(|_| DataError(format!("line {}: {value:?} is not a number", i + 1)))?;
        rows.push(Row {
            label: label.to_string(),
            value,
        });
    }
    Dataset::from_rows(rows)
}

/// The family implied by the arguments and the data.
pub fn family_for(args: &FamilyArgs, data: &Dataset) -> Result<FamilySpec> {
    let n = data.values.len();
    let spec = match args.family {
        FamilyArg::Multinomial => {
            if data.values.iter().any(|&v| v < 0.0 || v.fract() != 0.0) {
                return Err(DataError("multinomial counts must be nonnegative integers".into()).into());
            }
            FamilySpec::multinomial(n, data.values.iter().sum::<f64>() as u64)
        }
        FamilyArg::Binomial => {
            let m = args
                .trials_per_arm
                .ok_or_else(|| UsageError("--family binomial needs --trials-per-arm".into()))?;
            FamilySpec::independent_binomial(n, m)
        }
        FamilyArg::NormalVariance => {
            let m = args
                .obs_per_group
                .ok_or_else(|| UsageError("--family normal-variance needs --obs-per-group".into()))?;
            FamilySpec::normal_variance(n, m)
        }
        FamilyArg::BradleyTerry => FamilySpec::bradley_terry(n),
    };
    Ok(spec?)
}

pub fn observation(family: &FamilySpec, data: &Dataset) -> Result<Observation> {
    Ok(Observation::new(family, data.labels.clone(), data.values.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_is_optional() {
        let a = parse_csv("label,value\nA,3\nB,1\n").unwrap();
        let b = parse_csv("A,3\nB,1\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels, ["A", "B"]);
    }

    #[test]
    fn json_matches_csv() {
        let j = parse_json(r#"[{"label":"A","value":3},{"label":"B","value":1}]"#).unwrap();
        assert_eq!(j, parse_csv("A,3\nB,1").unwrap());
    }

    #[test]
    fn leading_ties() {
        let d = |v: &str| parse_csv(v).unwrap();
        assert!(!d("A,5\nB,3\nC,1\nD,1").has_leading_ties());
        assert!(d("A,5\nB,3\nC,1\nD,1").has_ties());
        assert!(d("A,5\nB,5\nC,1").has_leading_ties());
        assert!(d("A,5\nB,3\nC,3").has_leading_ties());
    }

    #[test]
    fn malformed_rows_are_data_errors() {
        for bad in ["A,3,4\n", "A,x\n", ""] {
            let err = parse_csv(bad).unwrap_err();
            assert!(err.is::<DataError>(), "{bad:?}");
        }
        assert!(parse_json(r#"[{"label":"A"}]"#).unwrap_err().is::<DataError>());
    }
}
