//! Conjunctive query evaluation over chase results.
//!
//! A Boolean query is true on an instance when its atoms map homomorphically into it;
//! query variables may bind to nulls. Queries with answer variables return the
//! projected images, deduplicated and sorted.

mod differential;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::Serialize;

pub use differential::{differential_bcqa, Check, CheckOutcome, DiffConfig, DiffReport, Fault, VariantOutcome};

use crate::chase::{
    find_homomorphisms, first_homomorphism, run_chase_observed, ChaseConfig, ChaseError, ChaseRun, ChaseSummary,
    ChaseVariant, MatchMode,
};
use crate::model::{Atom, Instance, Program, Substitution, Symbol, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("a query needs at least one atom")]
    Empty,
    #[error("answer variable {0} does not occur in the query")]
    UnknownOutputVar(Symbol),
    #[error("query atom {atom} has arity {found}, but {predicate} has arity {expected}")]
    ArityMismatch { atom: String, predicate: Symbol, expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    atoms: Vec<Atom>,
    output: Vec<Symbol>,
}

impl Query {
    pub fn new(atoms: Vec<Atom>, output: Vec<Symbol>) -> Result<Self, QueryError> {
        if atoms.is_empty() {
            return Err(QueryError::Empty);
        }
        for v in &output {
            if !atoms.iter().any(|a| a.variables().any(|x| x == *v)) {
                return Err(QueryError::UnknownOutputVar(*v));
            }
        }
        Ok(Query { atoms, output })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn output(&self) -> &[Symbol] {
        &self.output
    }

    pub fn is_boolean(&self) -> bool {
        self.output.is_empty()
    }

    /// Resumption count used for the parsimonious chase when none is given.
    pub fn default_resumptions(&self) -> u32 {
        self.atoms.len() as u32
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.output.is_empty() {
            f.write_str("?- ")?;
        } else {
            let out: Vec<&str> = self.output.iter().map(|v| v.as_str()).collect();
            write!(f, "?({}) :- ", out.join(","))?;
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Answer {
    pub verdict: bool,
    pub witness: Option<Substitution>,
    /// Projected answer tuples; `None` for Boolean queries.
    pub tuples: Option<Vec<Vec<Value>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Answer {
    fn negative(warnings: Vec<String>, boolean: bool) -> Self {
        Answer { verdict: false, witness: None, tuples: (!boolean).then(Vec::new), warnings }
    }

    /// Drops tuples that contain nulls; the verdict follows the remaining tuples.
    pub fn certain(mut self) -> Self {
        if let Some(tuples) = &mut self.tuples {
            tuples.retain(|t| t.iter().all(|v| !v.is_null()));
            self.verdict = !tuples.is_empty();
            if !self.verdict {
                self.witness = None;
            }
        }
        self
    }
}

fn check_schema(q: &Query, arity_of: impl Fn(Symbol) -> Option<usize>) -> Result<Vec<String>, QueryError> {
    let mut warnings = Vec::new();
    let mut unknown = BTreeSet::new();
    for atom in q.atoms() {
        match arity_of(atom.predicate) {
            None => {
                if unknown.insert(atom.predicate) {
                    warnings.push(format!("unknown predicate `{}`", atom.predicate));
                }
            }
            Some(expected) if expected != atom.arity() => {
                return Err(QueryError::ArityMismatch {
                    atom: atom.to_string(),
                    predicate: atom.predicate,
                    expected,
                    found: atom.arity(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(warnings)
}

fn evaluate_checked(q: &Query, instance: &Instance, warnings: Vec<String>) -> Answer {
    if q.atoms().iter().any(|a| instance.relation(a.predicate).is_none()) {
        return Answer::negative(warnings, q.is_boolean());
    }
    if q.is_boolean() {
        let witness = first_homomorphism(q.atoms(), instance, MatchMode::VariablesFree);
        return Answer { verdict: witness.is_some(), witness, tuples: None, warnings };
    }
    let all = find_homomorphisms(q.atoms(), instance, MatchMode::VariablesFree);
    let tuples: BTreeSet<Vec<Value>> = all
        .iter()
        .map(|h| q.output().iter().map(|v| h.get_var(*v).expect("answer variables are bound")).collect())
        .collect();
    Answer {
        verdict: !tuples.is_empty(),
        witness: all.into_iter().next(),
        tuples: Some(tuples.into_iter().collect()),
        warnings,
    }
}

/// Evaluates `q` on `instance`. A predicate with no relation in the instance makes
/// the answer false and adds a warning.
pub fn evaluate_query(q: &Query, instance: &Instance) -> Result<Answer, QueryError> {
    let warnings = check_schema(q, |p| instance.relation(p).map(|r| r.arity()))?;
    Ok(evaluate_checked(q, instance, warnings))
}

/// Answer of a query under one chase variant, with the run that produced it.
#[derive(Clone, Debug)]
pub struct VariantAnswer {
    pub answer: Answer,
    pub run: ChaseRun,
}

#[derive(Serialize)]
struct AnswerJson<'a> {
    verdict: bool,
    witness: &'a Option<Substitution>,
    tuples: &'a Option<Vec<Vec<Value>>>,
    variant: String,
    chase: ChaseSummary,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    warnings: &'a [String],
}

impl VariantAnswer {
    pub fn to_json(&self) -> String {
        let json = AnswerJson {
            verdict: self.answer.verdict,
            witness: &self.answer.witness,
            tuples: &self.answer.tuples,
            variant: self.run.variant.name().to_string(),
            chase: ChaseSummary::from(&self.run),
            warnings: &self.answer.warnings,
        };
        let mut s = serde_json::to_string_pretty(&json).expect("answers serialize");
        s.push('\n');
        s
    }
}

/// Chases `program` under `config` and evaluates `q` on the result. Boolean queries
/// are checked after every resumption epoch and the run stops at the first epoch where
/// the query holds. Predicates unknown to the program yield a warning and false.
pub fn answer_with_variant(program: &Program, q: &Query, config: &ChaseConfig) -> Result<VariantAnswer, AnswerError> {
    let warnings = check_schema(q, |p| program.arity(p))?;
    let boolean = q.is_boolean();
    let resumable = matches!(config.variant, ChaseVariant::ParsimoniousResumption { .. });
    let run = run_chase_observed(program, config, |instance| {
        if boolean && resumable && first_homomorphism(q.atoms(), instance, MatchMode::VariablesFree).is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let answer = evaluate_checked(q, &run.instance, warnings);
    Ok(VariantAnswer { answer, run })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnswerError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Chase(#[from] ChaseError),
}
