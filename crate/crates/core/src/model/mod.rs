//! Terms, atoms, rules, programs, fact instances and substitutions.

mod atom;
mod instance;
mod rule;
mod substitution;
mod term;

pub use atom::{Atom, Fact, Position};
pub use instance::{Instance, Relation};
pub use rule::{ExistentialVarId, Program, Rule, RuleId};
pub use substitution::Substitution;
pub use term::{NullId, Symbol, Term, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unbound variable {0}")]
    UnboundVariable(Symbol),
    #[error("predicate {predicate} used with arity {found}, previously {expected}")]
    ArityMismatch { predicate: Symbol, expected: usize, found: usize },
    #[error("predicate {0} has arity 0")]
    ZeroArity(Symbol),
    #[error("rule {0} contains a labelled null")]
    NullInRule(RuleId),
    #[error("rule {0} has an empty body")]
    EmptyBody(RuleId),
    #[error("rule {0} has an empty head")]
    EmptyHead(RuleId),
    #[error("fact {0} is not ground over constants")]
    NonGroundFact(String),
    #[error("rule at index {} carries id {found}", expected.0)]
    RuleIdMismatch { expected: RuleId, found: RuleId },
}

/// Replaces the variables of `atom` by their images under `subst`.
pub fn apply_substitution(subst: &Substitution, atom: &Atom) -> Result<Atom, ModelError> {
    subst.apply(atom)
}

/// Returns a copy of `instance` in which every current null is frozen.
pub fn freeze_nulls(instance: &Instance) -> Instance {
    instance.freeze_nulls()
}
