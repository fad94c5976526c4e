use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::atom::{Atom, Fact};
use super::term::{Symbol, Term};
use super::ModelError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct RuleId(pub usize);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Rule-scoped identity of an existential variable: the same letter in two rules
/// names two different invaders.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExistentialVarId {
    pub rule: RuleId,
    pub var: Symbol,
}

impl fmt::Display for ExistentialVarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.var, self.rule)
    }
}

impl Serialize for ExistentialVarId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An existential rule `body -> exists z. head`. Head variables that do not occur in
/// the body are the existential ones.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    pub id: RuleId,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    body_vars: BTreeSet<Symbol>,
    frontier: BTreeSet<Symbol>,
    existentials: BTreeSet<Symbol>,
}

impl Rule {
    pub fn new(id: RuleId, body: Vec<Atom>, head: Vec<Atom>) -> Result<Self, ModelError> {
        if body.is_empty() {
            return Err(ModelError::EmptyBody(id));
        }
        if head.is_empty() {
            return Err(ModelError::EmptyHead(id));
        }
        for atom in body.iter().chain(&head) {
            if atom.arity() == 0 {
                return Err(ModelError::ZeroArity(atom.predicate));
            }
            if atom.has_nulls() {
                return Err(ModelError::NullInRule(id));
            }
        }
        let body_vars: BTreeSet<Symbol> = body.iter().flat_map(Atom::variables).collect();
        let head_vars: BTreeSet<Symbol> = head.iter().flat_map(Atom::variables).collect();
        let frontier = body_vars.intersection(&head_vars).copied().collect();
        let existentials = head_vars.difference(&body_vars).copied().collect();
        Ok(Rule { id, body, head, body_vars, frontier, existentials })
    }

    /// Universally quantified variables, sorted by name.
    pub fn body_vars(&self) -> &BTreeSet<Symbol> {
        &self.body_vars
    }

    pub fn frontier(&self) -> &BTreeSet<Symbol> {
        &self.frontier
    }

    pub fn existentials(&self) -> &BTreeSet<Symbol> {
        &self.existentials
    }

    pub fn is_existential(&self) -> bool {
        !self.existentials.is_empty()
    }

    pub fn existential_ids(&self) -> impl Iterator<Item = ExistentialVarId> + '_ {
        self.existentials.iter().map(move |&var| ExistentialVarId { rule: self.id, var })
    }

    pub fn head_contains(&self, var: Symbol) -> bool {
        self.head.iter().any(|a| a.terms.contains(&Term::Var(var)))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_conjunction(f, &self.head)?;
        f.write_str(" :- ")?;
        write_conjunction(f, &self.body)?;
        f.write_str(".")
    }
}

fn write_conjunction(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// Facts plus rules. Rule ids are their index in `rules`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Program {
    rules: Vec<Rule>,
    facts: Vec<Fact>,
    schema: BTreeMap<Symbol, usize>,
}

impl Program {
    pub fn new(rules: Vec<Rule>, facts: Vec<Fact>) -> Result<Self, ModelError> {
        let mut program = Program::default();
        for (i, rule) in rules.into_iter().enumerate() {
            if rule.id != RuleId(i) {
                return Err(ModelError::RuleIdMismatch { expected: RuleId(i), found: rule.id });
            }
            for atom in rule.body.iter().chain(&rule.head) {
                program.register(atom.predicate, atom.arity())?;
            }
            program.rules.push(rule);
        }
        program.add_facts(facts)?;
        Ok(program)
    }

    /// Builds a program from rule bodies/heads, assigning ids in order.
    pub fn from_parts(rules: Vec<(Vec<Atom>, Vec<Atom>)>, facts: Vec<Fact>) -> Result<Self, ModelError> {
        let rules = rules
            .into_iter()
            .enumerate()
            .map(|(i, (body, head))| Rule::new(RuleId(i), body, head))
            .collect::<Result<Vec<_>, _>>()?;
        Program::new(rules, facts)
    }

    fn register(&mut self, predicate: Symbol, arity: usize) -> Result<(), ModelError> {
        if arity == 0 {
            return Err(ModelError::ZeroArity(predicate));
        }
        match self.schema.get(&predicate) {
            Some(&known) if known != arity => {
                Err(ModelError::ArityMismatch { predicate, expected: known, found: arity })
            }
            Some(_) => Ok(()),
            None => {
                self.schema.insert(predicate, arity);
                Ok(())
            }
        }
    }

    /// Appends ground facts, checking arities against the schema. Facts may only
    /// carry constants.
    pub fn add_facts(&mut self, facts: impl IntoIterator<Item = Fact>) -> Result<(), ModelError> {
        for fact in facts {
            if fact.nulls().next().is_some() {
                return Err(ModelError::NonGroundFact(fact.to_string()));
            }
            self.register(fact.predicate, fact.arity())?;
            self.facts.push(fact);
        }
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id.0]
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn schema(&self) -> &BTreeMap<Symbol, usize> {
        &self.schema
    }

    pub fn arity(&self, predicate: Symbol) -> Option<usize> {
        self.schema.get(&predicate).copied()
    }

    /// The same rules without any facts.
    pub fn without_facts(&self) -> Program {
        let mut p = self.clone();
        p.facts.clear();
        p
    }

    pub fn has_existentials(&self) -> bool {
        self.rules.iter().any(Rule::is_existential)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{}.", fact.to_atom())?;
        }
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(p: &str, vars: &[&str]) -> Atom {
        Atom::new(p, vars.iter().map(|v| Term::var(v)).collect())
    }

    #[test]
    fn frontier_and_existentials() {
        let rule = Rule::new(RuleId(0), vec![atom("e1", &["X"])], vec![atom("i1", &["X", "Y"])]).unwrap();
        assert_eq!(rule.frontier().iter().map(|s| s.as_str()).collect::<Vec<_>>(), ["X"]);
        assert_eq!(rule.existentials().iter().map(|s| s.as_str()).collect::<Vec<_>>(), ["Y"]);
        assert!(rule.existentials().is_disjoint(rule.body_vars()));
    }

    #[test]
    fn arity_conflict_rejected() {
        let err =
            Program::from_parts(vec![(vec![atom("p", &["X"])], vec![atom("p", &["X", "X"])])], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::ArityMismatch { .. }));
    }

    #[test]
    fn nulls_rejected_in_rules() {
        let body = vec![Atom::new("p", vec![Term::Null(super::super::NullId::new(0, 1))])];
        let err = Rule::new(RuleId(0), body, vec![atom("q", &["X"])]).unwrap_err();
        assert!(matches!(err, ModelError::NullInRule(_)));
    }

    #[test]
    fn empty_body_rejected() {
        assert!(matches!(Rule::new(RuleId(0), vec![], vec![atom("q", &["X"])]), Err(ModelError::EmptyBody(_))));
    }
}
