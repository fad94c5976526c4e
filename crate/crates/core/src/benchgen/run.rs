use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::{BenchError, ScenarioSpec};
use crate::chase::{ChaseConfig, ChaseStatus, ChaseVariant};
use crate::query::answer_with_variant;

/// One row of benchmark output: the median of the repetitions for one variant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchResult {
    pub scenario: String,
    pub scale: usize,
    pub variant: String,
    pub ms: u64,
    pub facts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<ChaseStatus>,
    /// Answer tuples of the scenario's first query.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn median(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

/// Chases the scenario once per variant and repetition and times chase plus query
/// evaluation. Errors are recorded in their row and the remaining variants still run.
/// For the parsimonious chase with resumption the given resumption count is used
/// as is.
pub fn run_bench(
    spec: &ScenarioSpec,
    variants: &[ChaseVariant],
    repetitions: usize,
    max_steps: Option<u64>,
) -> Result<Vec<BenchResult>, BenchError> {
    if repetitions == 0 {
        return Err(BenchError::InvalidSpec("repetitions must be at least 1".into()));
    }
    if variants.is_empty() {
        return Ok(Vec::new());
    }
    let scenario = spec.generate()?;
    let program = scenario.program();
    let (_, query) = &scenario.queries[0];
    let mut rows = Vec::with_capacity(variants.len());
    for &variant in variants {
        let mut config = ChaseConfig::new(variant);
        config.max_steps = max_steps;
        let mut times = Vec::with_capacity(repetitions);
        let mut row = BenchResult {
            scenario: spec.name().to_string(),
            scale: spec.scale(),
            variant: variant.to_string(),
            ms: 0,
            facts: 0,
            status: None,
            answers: None,
            error: None,
        };
        for _ in 0..repetitions {
            let start = Instant::now();
            let outcome = answer_with_variant(&program, query, &config);
            times.push(start.elapsed().as_millis());
            match outcome {
                Ok(a) => {
                    row.facts = a.run.instance.len();
                    row.status = Some(a.run.status);
                    row.answers = a.answer.tuples.as_ref().map(Vec::len);
                }
                Err(e) => {
                    row.error = Some(e.to_string());
                    break;
                }
            }
        }
        row.ms = median(times) as u64;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_results_csv(rows: &[BenchResult], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "scale", "variant", "ms", "facts"])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.scale.to_string(),
            r.variant.clone(),
            r.ms.to_string(),
            r.facts.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_json(rows: &[BenchResult], mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}
