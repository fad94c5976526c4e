//! Trigger enumeration, firing conditions and the four chase procedures.
//!
//! All variants run level by level: every trigger over the instance of level `n` is
//! evaluated (in rule-id, then substitution order) before triggers enabled by facts
//! of level `n + 1`. A trigger's firing condition is checked against the instance as
//! it is at evaluation time.
//!
//! | variant | a trigger is blocked when |
//! |---|---|
//! | oblivious | it already fired |
//! | parsimonious | the instantiated head maps homomorphically into the instance |
//! | parsimonious with resumption | as above; after a fixpoint all nulls are frozen and the chase resumes, `k` times |
//! | isomorphic | the instantiated head has an isomorphic embedding into the instance |

mod containment;
mod engine;
mod homomorphism;
mod termination;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::model::{Instance, RuleId, Substitution};

pub use containment::{compare_chase_containment, embed_instance, ContainmentOutcome, ContainmentReport};
pub use engine::{enumerate_triggers, fire_trigger, run_chase, run_chase_observed};
pub use homomorphism::{exists_isomorphic_embedding, find_homomorphisms, first_homomorphism, MatchMode};
pub use termination::recursive_existential_rules;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChaseError {
    #[error("the oblivious chase may not terminate: existential rules {} are recursive; pass a step limit", fmt_rules(.rules))]
    NonTerminationRisk { rules: Vec<RuleId> },
    #[error("trigger for rule {0} is not applicable to the instance")]
    NotApplicable(RuleId),
}

fn fmt_rules(rules: &[RuleId]) -> String {
    rules.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// A rule together with a body homomorphism into the current instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trigger {
    pub rule: RuleId,
    pub subst: Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChaseVariant {
    Oblivious,
    Parsimonious,
    ParsimoniousResumption { resumptions: u32 },
    Isomorphic,
}

impl ChaseVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ChaseVariant::Oblivious => "oblivious",
            ChaseVariant::Parsimonious => "pchase",
            ChaseVariant::ParsimoniousResumption { .. } => "pchase-r",
            ChaseVariant::Isomorphic => "ichase",
        }
    }
}

impl fmt::Display for ChaseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChaseVariant::ParsimoniousResumption { resumptions } => {
                write!(f, "pchase-r({resumptions})")
            }
            other => f.write_str(other.name()),
        }
    }
}

impl Serialize for ChaseVariant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Parses the command-line names. `pchase-r` gets one resumption; use
/// [`ChaseVariant::ParsimoniousResumption`] directly to choose another count.
impl FromStr for ChaseVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oblivious" | "ochase" => Ok(ChaseVariant::Oblivious),
            "pchase" => Ok(ChaseVariant::Parsimonious),
            "pchase-r" | "pchase_r" => Ok(ChaseVariant::ParsimoniousResumption { resumptions: 1 }),
            "ichase" => Ok(ChaseVariant::Isomorphic),
            other => Err(format!("unknown chase variant `{other}` (expected oblivious, pchase, pchase-r or ichase)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChaseConfig {
    pub variant: ChaseVariant,
    pub max_steps: Option<u64>,
    pub record_trace: bool,
}

impl ChaseConfig {
    pub fn new(variant: ChaseVariant) -> Self {
        ChaseConfig { variant, max_steps: None, record_trace: false }
    }

    pub fn max_steps(mut self, steps: u64) -> Self {
        self.max_steps = Some(steps);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChaseStatus {
    #[serde(rename = "fixpoint")]
    Fixpoint,
    #[serde(rename = "step-limit-reached")]
    StepLimitReached,
}

impl fmt::Display for ChaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChaseStatus::Fixpoint => "fixpoint",
            ChaseStatus::StepLimitReached => "step-limit-reached",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockReason {
    Homomorphism,
    Isomorphism,
    DuplicateTrigger,
}

/// One evaluated trigger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceRecord {
    pub rule: RuleId,
    pub subst: Substitution,
    pub fired: bool,
    pub block_reason: Option<BlockReason>,
    pub level: u32,
}

#[derive(Clone, Debug)]
pub struct ChaseRun {
    pub variant: ChaseVariant,
    pub max_steps: Option<u64>,
    pub instance: Instance,
    pub status: ChaseStatus,
    /// Fired chase steps.
    pub steps: u64,
    pub levels: u32,
    pub resumptions_used: u32,
    pub trace: Option<Vec<TraceRecord>>,
}

impl ChaseRun {
    pub fn reached_fixpoint(&self) -> bool {
        self.status == ChaseStatus::Fixpoint
    }

    /// The JSON-lines trace, one record per evaluated trigger.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for record in self.trace.iter().flatten() {
            out.push_str(&serde_json::to_string(record).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChaseSummary {
    pub steps: u64,
    pub status: ChaseStatus,
    pub resumptions_used: u32,
}

impl From<&ChaseRun> for ChaseSummary {
    fn from(run: &ChaseRun) -> Self {
        ChaseSummary { steps: run.steps, status: run.status, resumptions_used: run.resumptions_used }
    }
}
