use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;

use super::homomorphism::{Matcher, Pattern};
use super::{run_chase, ChaseConfig, ChaseError, ChaseStatus, ChaseVariant};
use crate::model::{Atom, Fact, Instance, NullId, Program, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainmentOutcome {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub outcome: ContainmentOutcome,
    pub pchase_facts: usize,
    pub ichase_facts: usize,
    /// The embedding of the parsimonious result into the isomorphic one, when it exists.
    pub witness: Option<Substitution>,
    /// Facts of a null-connected group that could not be embedded.
    pub unmatched: Vec<Fact>,
}

/// Searches one homomorphism from `from` into `into` that fixes constants and frozen
/// nulls. Facts are split into groups connected through shared nulls and each group is
/// embedded independently. On failure returns the first group without an embedding.
pub fn embed_instance(from: &Instance, into: &Instance) -> Result<Substitution, Vec<Fact>> {
    let facts = from.facts();
    let mut groups: Vec<Vec<Fact>> = Vec::new();
    let mut owner: HashMap<NullId, usize> = HashMap::new();
    for fact in facts {
        let free: Vec<NullId> = fact.nulls().filter(|n| !from.is_frozen(*n)).collect();
        if free.is_empty() {
            if !into.contains(&fact) {
                return Err(vec![fact]);
            }
            continue;
        }
        let mut targets: Vec<usize> = free.iter().filter_map(|n| owner.get(n).copied()).collect();
        targets.sort_unstable();
        targets.dedup();
        let group = match targets.first() {
            Some(&g) => {
                for &other in targets[1..].iter().rev() {
                    let moved = std::mem::take(&mut groups[other]);
                    for f in &moved {
                        for n in f.nulls() {
                            owner.insert(n, g);
                        }
                    }
                    groups[g].extend(moved);
                }
                g
            }
            None => {
                groups.push(Vec::new());
                groups.len() - 1
            }
        };
        for n in &free {
            owner.insert(*n, group);
        }
        groups[group].push(fact);
    }
    let mut witness = Substitution::new();
    for group in groups.into_iter().filter(|g| !g.is_empty()) {
        let atoms: Vec<Atom> = group.iter().map(Fact::to_atom).collect();
        // Freezing status is taken from the source instance.
        let pattern = Pattern::compile(&atoms, from, true, false, &[]);
        let mut found = None;
        let _ = Matcher::new(&pattern, into).for_each(&mut |b| {
            found = Some(pattern.to_substitution(b));
            ControlFlow::Break(())
        });
        match found {
            Some(s) => {
                for (k, v) in s.iter() {
                    witness.bind(*k, *v);
                }
            }
            None => return Err(group),
        }
    }
    Ok(witness)
}

/// Runs the parsimonious and isomorphism-based chases and checks that the first result
/// maps homomorphically into the second.
pub fn compare_chase_containment(program: &Program, max_steps: u64) -> Result<ContainmentReport, ChaseError> {
    let run = |variant| run_chase(program, &ChaseConfig { variant, max_steps: Some(max_steps), record_trace: false });
    let p = run(ChaseVariant::Parsimonious)?;
    let i = run(ChaseVariant::Isomorphic)?;
    let mut report = ContainmentReport {
        outcome: ContainmentOutcome::Inconclusive,
        pchase_facts: p.instance.len(),
        ichase_facts: i.instance.len(),
        witness: None,
        unmatched: Vec::new(),
    };
    if p.status != ChaseStatus::Fixpoint || i.status != ChaseStatus::Fixpoint {
        return Ok(report);
    }
    match embed_instance(&p.instance, &i.instance) {
        Ok(w) => {
            report.outcome = ContainmentOutcome::Holds;
            report.witness = Some(w);
        }
        Err(group) => {
            report.outcome = ContainmentOutcome::Violated;
            report.unmatched = group;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;

    fn nu(i: u32) -> Value {
        Value::Null(NullId::new(0, i))
    }

    #[test]
    fn groups_are_embedded_jointly() {
        let from =
            Instance::from_facts([Fact::new("e", vec![Value::constant("a"), nu(1)]), Fact::new("f", vec![nu(1)])]);
        let split =
            Instance::from_facts([Fact::new("e", vec![Value::constant("a"), nu(5)]), Fact::new("f", vec![nu(6)])]);
        assert!(embed_instance(&from, &split).is_err());
        let joined = Instance::from_facts([
            Fact::new("e", vec![Value::constant("a"), Value::constant("b")]),
            Fact::new("f", vec![Value::constant("b")]),
        ]);
        let w = embed_instance(&from, &joined).unwrap();
        assert_eq!(w.apply_value(nu(1)), Value::constant("b"));
    }

    #[test]
    fn constant_facts_must_be_present() {
        let from = Instance::from_facts([Fact::constants("p", &["a"])]);
        assert_eq!(embed_instance(&from, &Instance::new()).unwrap_err().len(), 1);
    }

    #[test]
    fn merges_groups_bridged_by_a_later_fact() {
        let from = Instance::from_facts([
            Fact::new("p", vec![nu(1)]),
            Fact::new("p", vec![nu(2)]),
            Fact::new("r", vec![nu(1), nu(2)]),
        ]);
        let into = Instance::from_facts([
            Fact::new("p", vec![Value::constant("a")]),
            Fact::new("p", vec![Value::constant("b")]),
            Fact::new("r", vec![Value::constant("b"), Value::constant("a")]),
        ]);
        assert!(embed_instance(&from, &into).is_ok());
        let bad = Instance::from_facts([
            Fact::new("p", vec![Value::constant("a")]),
            Fact::new("r", vec![Value::constant("b"), Value::constant("a")]),
        ]);
        assert!(embed_instance(&from, &bad).is_err());
    }
}
