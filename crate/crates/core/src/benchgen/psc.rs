use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ensure_protected, BenchError, GeneratedScenario, Scenario, ScenarioSpec};
use crate::model::{Fact, Program, Symbol};
use crate::parser::{parse_program, parse_query};
use crate::query::Query;

const RULES: &str = "\
% direct control
psc(P,C) :- person(P), controls(P,C).
% control through a chain of companies
psc(P,C) :- psc(P,D), controls(D,C), company(D).
% every company has some registered agent
agent(C,A) :- company(C).
represented(P,A) :- psc(P,C), agent(C,A).
";

pub fn psc_rules() -> Program {
    parse_program(RULES).expect("psc rules parse")
}

pub fn psc_query() -> Query {
    parse_query("?(P,C) :- psc(P,C).").expect("psc query parses")
}

/// Companies form a forest: company `j` is controlled by a random earlier company with
/// probability `density`. Every person controls one random company, and a second one
/// with probability `density`.
pub fn generate_psc(spec: &ScenarioSpec) -> Result<GeneratedScenario, BenchError> {
    spec.validate()?;
    let Scenario::Psc { persons, companies } = spec.scenario else {
        return Err(BenchError::InvalidSpec("not a psc scenario".into()));
    };
    let rules = psc_rules();
    ensure_protected(spec, &rules)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let person = |i: usize| format!("p{i}");
    let company = |i: usize| format!("c{i}");
    let mut controls = Vec::new();
    for j in 1..companies {
        if rng.gen_bool(spec.density) {
            let parent = rng.gen_range(0..j);
            controls.push(Fact::constants("controls", &[&company(parent), &company(j)]));
        }
    }
    for i in 0..persons {
        let first = rng.gen_range(0..companies);
        controls.push(Fact::constants("controls", &[&person(i), &company(first)]));
        if companies > 1 && rng.gen_bool(spec.density) {
            let mut second = rng.gen_range(0..companies - 1);
            if second >= first {
                second += 1;
            }
            controls.push(Fact::constants("controls", &[&person(i), &company(second)]));
        }
    }
    let mut facts = BTreeMap::new();
    facts.insert(Symbol::new("person"), (0..persons).map(|i| Fact::constants("person", &[&person(i)])).collect());
    facts.insert(Symbol::new("company"), (0..companies).map(|i| Fact::constants("company", &[&company(i)])).collect());
    facts.insert(Symbol::new("controls"), controls);
    Ok(GeneratedScenario { rules, facts, queries: vec![("psc".to_string(), psc_query())] })
}
