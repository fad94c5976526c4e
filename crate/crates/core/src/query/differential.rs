//! Cross-chase differential testing of Boolean query answers.
//!
//! The parsimonious chase with resumption and the isomorphic chase must agree on
//! protected programs. A bounded oblivious chase serves as the oracle for the two
//! one-variant equivalences: with the parsimonious chase (with resumption) on shy
//! programs and with the isomorphic chase on warded programs. A truncated oblivious
//! run only proves truth, since a true query stays true on larger instances.

use std::fmt::Write as _;

use serde::Serialize;

use super::{answer_with_variant, AnswerError, Query, VariantAnswer};
use crate::analysis::{classify, AnalysisError, FragmentVerdicts};
use crate::chase::{ChaseConfig, ChaseStatus, ChaseVariant};
use crate::model::{Program, Substitution};
use crate::parser::print_program;

/// Deliberate engine faults for exercising the harness itself.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negates the isomorphic chase answer.
    FlipIsomorphic,
}

#[derive(Clone, Debug)]
pub struct DiffConfig {
    /// Step limit for each chase.
    pub budget: u64,
    /// Resumptions for the parsimonious chase; defaults to the number of query atoms.
    pub resumptions: Option<u32>,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl DiffConfig {
    pub fn new(budget: u64) -> Self {
        DiffConfig { budget, resumptions: None, fault: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckOutcome {
    Agree,
    Disagree,
    Inconclusive,
    PreconditionNotMet,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub outcome: CheckOutcome,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VariantOutcome {
    pub variant: String,
    pub verdict: bool,
    /// `Some` when the verdict is known to hold for the full chase: the run reached
    /// its fixpoint, or it was truncated with the query already true.
    pub definitive: Option<bool>,
    pub status: ChaseStatus,
    pub steps: u64,
    pub resumptions_used: u32,
    pub facts: usize,
    pub witness: Option<Substitution>,
    #[serde(skip)]
    pub dump: String,
}

impl VariantOutcome {
    fn from_answer(answer: &VariantAnswer, flip: bool) -> Self {
        let verdict = answer.answer.verdict != flip;
        let definitive = match answer.run.status {
            ChaseStatus::Fixpoint => Some(verdict),
            ChaseStatus::StepLimitReached => verdict.then_some(true),
        };
        VariantOutcome {
            variant: answer.run.variant.to_string(),
            verdict,
            definitive,
            status: answer.run.status,
            steps: answer.run.steps,
            resumptions_used: answer.run.resumptions_used,
            facts: answer.run.instance.len(),
            witness: answer.answer.witness.clone(),
            dump: answer.run.instance.dump(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub program: String,
    pub query: String,
    pub instances: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffReport {
    pub verdicts: FragmentVerdicts,
    pub query: String,
    pub pchase_r: VariantOutcome,
    pub ichase: VariantOutcome,
    pub oblivious: VariantOutcome,
    pub checks: Vec<Check>,
    pub outcome: CheckOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl DiffReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn disagrees(&self) -> bool {
        self.outcome == CheckOutcome::Disagree
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "query: {}", self.query);
        let _ = writeln!(out, "fragment: {}", self.verdicts.class_name());
        for v in [&self.pchase_r, &self.ichase, &self.oblivious] {
            let _ = writeln!(out, "{}: {} ({}, {} steps, {} facts)", v.variant, v.verdict, v.status, v.steps, v.facts);
        }
        for c in &self.checks {
            let _ = writeln!(out, "{}: {} - {}", c.name, outcome_text(c.outcome), c.detail);
        }
        let _ = writeln!(out, "outcome: {}", outcome_text(self.outcome));
        if let Some(cx) = &self.counterexample {
            let _ = writeln!(out, "program:\n{}", cx.program);
            for (name, dump) in &cx.instances {
                let _ = writeln!(out, "{name} instance:\n{dump}");
            }
        }
        out
    }
}

fn outcome_text(o: CheckOutcome) -> &'static str {
    match o {
        CheckOutcome::Agree => "agree",
        CheckOutcome::Disagree => "DISAGREE",
        CheckOutcome::Inconclusive => "inconclusive",
        CheckOutcome::PreconditionNotMet => "precondition not met",
    }
}

/// Two-sided comparison of answers that may each be unknown.
fn compare(a: &VariantOutcome, b: &VariantOutcome) -> (CheckOutcome, String) {
    let text = format!("{} says {}, {} says {}", a.variant, fmt_def(a), b.variant, fmt_def(b));
    let outcome = match (a.definitive, b.definitive) {
        (Some(x), Some(y)) if x == y => CheckOutcome::Agree,
        (Some(_), Some(_)) => CheckOutcome::Disagree,
        _ => CheckOutcome::Inconclusive,
    };
    (outcome, text)
}

fn fmt_def(v: &VariantOutcome) -> String {
    match v.definitive {
        Some(b) => b.to_string(),
        None => format!("{} (truncated)", v.verdict),
    }
}

fn lemma(name: &'static str, applies: bool, fragment: &str, oracle: &VariantOutcome, other: &VariantOutcome) -> Check {
    if !applies {
        return Check {
            name,
            outcome: CheckOutcome::PreconditionNotMet,
            detail: format!("{name} precondition not met: program is not {fragment}"),
        };
    }
    let (outcome, detail) = compare(oracle, other);
    Check { name, outcome, detail }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Answer(#[from] AnswerError),
}

/// Answers the Boolean query `q` under the parsimonious chase with resumption, the
/// isomorphic chase and a bounded oblivious chase, and checks every equivalence whose
/// fragment precondition `program` meets.
pub fn differential_bcqa(program: &Program, q: &Query, config: &DiffConfig) -> Result<DiffReport, DiffError> {
    let verdicts = classify(program)?;
    let resumptions = config.resumptions.unwrap_or_else(|| q.default_resumptions());
    let run = |variant| answer_with_variant(program, q, &ChaseConfig::new(variant).max_steps(config.budget));
    let pr = run(ChaseVariant::ParsimoniousResumption { resumptions })?;
    let ic = run(ChaseVariant::Isomorphic)?;
    let ob = run(ChaseVariant::Oblivious)?;
    let pchase_r = VariantOutcome::from_answer(&pr, false);
    let ichase = VariantOutcome::from_answer(&ic, config.fault == Some(Fault::FlipIsomorphic));
    let oblivious = VariantOutcome::from_answer(&ob, false);

    let theorem2 = if verdicts.protected {
        let (outcome, detail) = compare(&pchase_r, &ichase);
        Check { name: "theorem2", outcome, detail }
    } else {
        Check {
            name: "theorem2",
            outcome: CheckOutcome::PreconditionNotMet,
            detail: "Theorem 2 precondition not met: program is not protected".to_string(),
        }
    };
    let checks = vec![
        theorem2,
        lemma("lemma1", verdicts.shy, "shy", &oblivious, &pchase_r),
        lemma("lemma2", verdicts.warded, "warded", &oblivious, &ichase),
    ];
    let has = |o| checks.iter().any(|c| c.outcome == o);
    let outcome = if has(CheckOutcome::Disagree) {
        CheckOutcome::Disagree
    } else if has(CheckOutcome::Agree) {
        CheckOutcome::Agree
    } else if has(CheckOutcome::Inconclusive) {
        CheckOutcome::Inconclusive
    } else {
        CheckOutcome::PreconditionNotMet
    };
    let counterexample = (outcome == CheckOutcome::Disagree).then(|| Counterexample {
        program: print_program(program),
        query: q.to_string(),
        instances: [&pchase_r, &ichase, &oblivious].iter().map(|v| (v.variant.clone(), v.dump.clone())).collect(),
    });
    Ok(DiffReport { verdicts, query: q.to_string(), pchase_r, ichase, oblivious, checks, outcome, counterexample })
}
