use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use rankver_core::simulate::{power_curve, run, Experiment, PowerConfig, SimConfig};
use rankver_core::{
    procedure1, procedure2, procedure2prime, procedure3, procedure3prime, Atom, BoundMethod,
    BoundOptions, FamilySpec, NaturalParams, RankMethod, Randomization, TieMode, VerifyOptions,
};

use crate::args::{
    AtomArg, BoundArgs, BoundMethodArg, Command, CurveArgs, DataArgs, ExperimentArg, FamilyArg,
    FamilyArgs, RankMethodArg, RanksArgs, RunArgs, SimArgs, SimMethodArg, TieModeArg,
    VerifyArgs,
};
use crate::data::{self, Dataset};
use crate::failure::UsageError;
use crate::report::{Outcome, ReportDocument};

pub fn run_command(command: Command, argv: &[String]) -> Result<()> {
    match command {
        Command::Verify(a) => verify(a, argv),
        Command::Bound(a) => bound(a, argv),
        Command::Ranks(a) => ranks(a, argv),
        Command::Power(a) => power(&a.curve, &a.run, argv),
        Command::Sim(a) => sim(a, argv),
    }
}

const TIE_WARNING: &str =
    "ties were broken by lowest index; the error guarantees assume random tie-breaking";

/// Tie mode honoring the seed rule: random tie-breaking needs an explicit seed
/// whenever it can change the report. `relevant` says whether the data hold
/// such ties for the command at hand.
fn tie_mode(args: &DataArgs, relevant: bool, warnings: &mut Vec<String>) -> Result<TieMode> {
    match (args.tie_mode, args.seed) {
        (TieModeArg::LowestIndex, _) => {
            if relevant {
                warnings.push(TIE_WARNING.to_string());
            }
            Ok(TieMode::LowestIndex)
        }
        (TieModeArg::Random, Some(seed)) => Ok(TieMode::Random { seed }),
        (TieModeArg::Random, None) if relevant => Err(UsageError(
            "tied values decide which labels are reported: pass --seed to break the ties at random, or --tie-mode lowest-index"
                .into(),
        )
        .into()),
        // The remaining ties cannot change any reported value or label.
        (TieModeArg::Random, None) => Ok(TieMode::LowestIndex),
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(UsageError(format!("--alpha must lie in (0, 1), got {alpha}")).into());
    }
    Ok(())
}

fn prepare(args: &DataArgs) -> Result<(Dataset, FamilySpec)> {
    check_alpha(args.alpha)?;
    let data = data::load(&args.data, args.format)?;
    let family = data::family_for(&args.family, &data)?;
    Ok((data, family))
}

fn family_warnings(family: &FamilySpec, warnings: &mut Vec<String>) {
    if let rankver_core::FamilyKind::NormalVariance { obs_per_group: 2 } = family.kind {
        warnings.push(
            "with 2 observations per group the carrier is not Schur-concave; validity needs at least 3"
                .into(),
        );
    }
}

fn emit_report(report: &ReportDocument, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).context("serializing the report")?;
    text.push('\n');
    write_output(&text, out)
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to standard output"),
    }
}

fn verify(a: VerifyArgs, argv: &[String]) -> Result<()> {
    let (data, family) = prepare(&a.data)?;
    let mut warnings = Vec::new();
    family_warnings(&family, &mut warnings);
    let randomization = match (a.randomized, a.data.seed) {
        (false, _) => Randomization::Off,
        (true, Some(seed)) => Randomization::Uniform { seed },
        (true, None) => return Err(UsageError("--randomized needs --seed".into()).into()),
    };
    let tie_mode = tie_mode(&a.data, data.has_leading_ties(), &mut warnings)?;
    let x = data::observation(&family, &data)?;
    let options = VerifyOptions {
        adjusted: a.adjusted,
        tie_mode,
        randomization,
    };
    let outcome = procedure1(&family, &x, a.data.alpha, &options)?;
    let mut report = ReportDocument::new(argv, Some(family), a.data.alpha, a.data.seed, Outcome::Test(outcome));
    report.warnings = warnings;
    emit_report(&report, a.data.out.as_deref())
}

fn bound(a: BoundArgs, argv: &[String]) -> Result<()> {
    let (data, family) = prepare(&a.data)?;
    let mut warnings = Vec::new();
    family_warnings(&family, &mut warnings);
    let tie_mode = tie_mode(&a.data, data.has_leading_ties(), &mut warnings)?;
    let x = data::observation(&family, &data)?;
    let atom = match a.atom {
        AtomArg::Include => Atom::Include,
        AtomArg::Exclude => {
            warnings.push("excluding the observed atom gives a liberal bound".into());
            Atom::Exclude
        }
    };
    let options = BoundOptions { tie_mode, atom };
    let outcome = match a.method {
        BoundMethodArg::Two => procedure2(&family, &x, a.data.alpha, &options)?,
        BoundMethodArg::TwoPrime => procedure2prime(&family, &x, a.data.alpha, &options)?,
    };
    let mut report = ReportDocument::new(argv, Some(family), a.data.alpha, a.data.seed, Outcome::Bound(outcome));
    report.warnings = warnings;
    emit_report(&report, a.data.out.as_deref())
}

fn ranks(a: RanksArgs, argv: &[String]) -> Result<()> {
    let (data, family) = prepare(&a.data)?;
    let mut warnings = Vec::new();
    family_warnings(&family, &mut warnings);
    let tie_mode = tie_mode(&a.data, data.has_ties(), &mut warnings)?;
    let x = data::observation(&family, &data)?;
    let outcome = match a.method {
        RankMethodArg::Three => procedure3(&family, &x, a.data.alpha, tie_mode)?,
        RankMethodArg::ThreePrime => procedure3prime(&family, &x, a.data.alpha, tie_mode)?,
    };
    let mut report = ReportDocument::new(argv, Some(family), a.data.alpha, a.data.seed, Outcome::Ranks(outcome));
    report.warnings = warnings;
    emit_report(&report, a.data.out.as_deref())
}

fn delta_grid(c: &CurveArgs) -> Result<Vec<f64>> {
    if c.delta_steps == 0 {
        return Err(UsageError("--delta-steps must be at least 1".into()).into());
    }
    if !(c.delta_min.is_finite() && c.delta_max.is_finite()) || c.delta_max < c.delta_min {
        return Err(UsageError("--delta-min must not exceed --delta-max".into()).into());
    }
    if c.delta_steps == 1 {
        return Ok(vec![c.delta_min]);
    }
    let width = (c.delta_max - c.delta_min) / (c.delta_steps - 1) as f64;
    Ok((0..c.delta_steps).map(|i| c.delta_min + i as f64 * width).collect())
}

fn csv_text(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
}

/// Writes the CSV table; with `--out` the JSON report also goes to standard output.
fn emit_table(csv: &str, report: &ReportDocument, out: Option<&Path>) -> Result<()> {
    write_output(csv, out)?;
    if out.is_some() {
        emit_report(report, None)?;
    }
    Ok(())
}

fn power(c: &CurveArgs, r: &RunArgs, argv: &[String]) -> Result<()> {
    check_alpha(r.alpha)?;
    let m = c.m.ok_or_else(|| UsageError("power curves need --m".into()))?;
    let n = c.n.ok_or_else(|| UsageError("power curves need --n".into()))?;
    let config = PowerConfig {
        m,
        n,
        deltas: delta_grid(c)?,
        alpha: r.alpha,
        trials: r.trials,
        master_seed: r.seed,
        jobs: r.jobs,
        randomized: c.randomized,
    };
    let rows = power_curve(&config)?;
    let csv = csv_text(
        &["delta", "power_selective", "power_gn", "se_selective", "se_gn"],
        rows.iter().map(|row| {
            [row.delta, row.power_selective, row.power_gn, row.se_selective, row.se_gn]
                .iter()
                .map(|v| v.to_string())
                .collect()
        }),
    )?;
    let family = FamilySpec::multinomial(n, m)?;
    let report = ReportDocument::new(argv, Some(family), r.alpha, Some(r.seed), Outcome::PowerCurve(rows));
    emit_table(&csv, &report, r.out.as_deref())
}

fn sim_family(args: &FamilyArgs, m: Option<u64>, n: usize) -> Result<FamilySpec> {
    let spec = match args.family {
        FamilyArg::Multinomial => FamilySpec::multinomial(
            n,
            m.ok_or_else(|| UsageError("--family multinomial needs --m".into()))?,
        ),
        FamilyArg::Binomial => FamilySpec::independent_binomial(
            n,
            args.trials_per_arm
                .ok_or_else(|| UsageError("--family binomial needs --trials-per-arm".into()))?,
        ),
        FamilyArg::NormalVariance => FamilySpec::normal_variance(
            n,
            args.obs_per_group
                .ok_or_else(|| UsageError("--family normal-variance needs --obs-per-group".into()))?,
        ),
        FamilyArg::BradleyTerry => FamilySpec::bradley_terry(n),
    };
    spec.map_err(|e| UsageError(e.to_string()).into())
}

fn sim(a: SimArgs, argv: &[String]) -> Result<()> {
    let experiment = match (a.experiment, a.method) {
        (ExperimentArg::Power, _) => return power(&a.curve, &a.run, argv),
        (ExperimentArg::ErrorRate, None) => Experiment::WinnerError {
            randomized: a.curve.randomized,
            adjusted: a.adjusted,
        },
        (ExperimentArg::Coverage, None | Some(SimMethodArg::TwoPrime)) => Experiment::Coverage {
            method: BoundMethod::Procedure2Prime,
        },
        (ExperimentArg::Coverage, Some(SimMethodArg::Two)) => Experiment::Coverage {
            method: BoundMethod::Procedure2,
        },
        (ExperimentArg::Fwer, None | Some(SimMethodArg::Three)) => Experiment::Fwer {
            method: RankMethod::Procedure3,
        },
        (ExperimentArg::Fwer, Some(SimMethodArg::ThreePrime)) => Experiment::Fwer {
            method: RankMethod::Procedure3Prime,
        },
        (e, Some(m)) => {
            return Err(UsageError(format!("--method {m:?} does not apply to --experiment {e:?}")).into())
        }
    };
    check_alpha(a.run.alpha)?;
    if a.theta.len() < 2 {
        return Err(UsageError("--theta needs at least two comma-separated values".into()).into());
    }
    let family = sim_family(&a.family, a.curve.m, a.theta.len())?;
    let theta = NaturalParams::new(a.theta.clone()).map_err(|e| UsageError(e.to_string()))?;
    let config = SimConfig {
        family,
        theta,
        experiment,
        alpha: a.run.alpha,
        trials: a.run.trials,
        master_seed: a.run.seed,
        jobs: a.run.jobs,
    };
    let result = run(&config)?;
    let csv = csv_text(
        &["condition", "events", "estimate", "std_error", "low_precision"],
        result.breakdown.iter().map(|c| {
            vec![
                c.condition.clone(),
                c.events.to_string(),
                c.estimate.to_string(),
                c.std_error.to_string(),
                c.low_precision.to_string(),
            ]
        }),
    )?;
    let mut report = ReportDocument::new(argv, Some(family), a.run.alpha, Some(a.run.seed), Outcome::Simulation(result.clone()));
    for c in result.breakdown.iter().filter(|c| c.low_precision) {
        report.warnings.push(format!(
            "low precision: only {} conditioning events for {}",
            c.events, c.condition
        ));
    }
    emit_table(&csv, &report, a.run.out.as_deref())
}
