//! Seeded random programs, databases and queries for property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Atom, Fact, Program, Symbol, Term, Value};
use crate::query::Query;

#[derive(Clone, Debug, PartialEq)]
pub struct ProgramProfile {
    pub max_predicates: usize,
    /// At most 4.
    pub max_arity: usize,
    pub max_rules: usize,
    pub max_body_atoms: usize,
    /// Chance that a head term is a fresh existential variable.
    pub existential_prob: f64,
    /// Chance that a body atom shares a variable with an earlier one.
    pub join_prob: f64,
    /// Chance that a body term is a constant.
    pub constant_prob: f64,
}

impl Default for ProgramProfile {
    fn default() -> Self {
        ProgramProfile {
            max_predicates: 4,
            max_arity: 3,
            max_rules: 4,
            max_body_atoms: 2,
            existential_prob: 0.5,
            join_prob: 0.9,
            constant_prob: 0.05,
        }
    }
}

const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];

fn var_name(i: usize) -> String {
    const LETTERS: [&str; 8] = ["X", "Y", "Z", "W", "U", "V", "S", "T"];
    match LETTERS.get(i) {
        Some(l) => (*l).to_string(),
        None => format!("X{i}"),
    }
}

fn schema(rng: &mut ChaCha8Rng, profile: &ProgramProfile) -> Vec<(Symbol, usize)> {
    let n = rng.gen_range(2..=profile.max_predicates.max(2));
    let max_arity = profile.max_arity.clamp(1, 4);
    (0..n).map(|i| (Symbol::new(&format!("p{i}")), rng.gen_range(1..=max_arity))).collect()
}

fn gen_rule(rng: &mut ChaCha8Rng, profile: &ProgramProfile, preds: &[(Symbol, usize)]) -> (Vec<Atom>, Vec<Atom>) {
    let body_len = if profile.max_body_atoms > 1 && rng.gen_bool(profile.join_prob) {
        rng.gen_range(2..=profile.max_body_atoms)
    } else {
        1
    };
    let mut vars: Vec<String> = Vec::new();
    let mut body = Vec::with_capacity(body_len);
    for i in 0..body_len {
        let &(pred, arity) = preds.choose(rng).expect("nonempty schema");
        let join_slot = (i > 0 && !vars.is_empty()).then(|| rng.gen_range(0..arity));
        let terms = (0..arity)
            .map(|slot| {
                if Some(slot) == join_slot {
                    return Term::var(vars.choose(rng).expect("nonempty"));
                }
                if rng.gen_bool(profile.constant_prob) {
                    return Term::constant(CONSTANTS.choose(rng).expect("nonempty"));
                }
                if !vars.is_empty() && rng.gen_bool(0.2) {
                    return Term::var(vars.choose(rng).expect("nonempty"));
                }
                let v = var_name(vars.len());
                vars.push(v.clone());
                Term::var(&v)
            })
            .collect();
        body.push(Atom::new(pred, terms));
    }
    if vars.is_empty() {
        vars.push(var_name(0));
        let &(pred, _) = preds.iter().find(|(_, a)| *a == 1).unwrap_or(&preds[0]);
        let arity = preds.iter().find(|(p, _)| *p == pred).map(|(_, a)| *a).unwrap_or(1);
        body.push(Atom::new(pred, (0..arity).map(|_| Term::var(&vars[0])).collect()));
    }
    let &(hpred, harity) = preds.choose(rng).expect("nonempty schema");
    let mut existentials = 0;
    let head_terms = (0..harity)
        .map(|_| {
            if rng.gen_bool(profile.existential_prob) {
                existentials += 1;
                Term::var(&format!("N{existentials}"))
            } else {
                Term::var(vars.choose(rng).expect("nonempty"))
            }
        })
        .collect();
    (body, vec![Atom::new(hpred, head_terms)])
}

/// A random program without facts. Deterministic in `seed`.
pub fn generate_random_program(seed: u64, profile: &ProgramProfile) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let preds = schema(&mut rng, profile);
    let n_rules = rng.gen_range(1..=profile.max_rules.max(1));
    let parts = (0..n_rules).map(|_| gen_rule(&mut rng, profile, &preds)).collect();
    Program::from_parts(parts, Vec::new()).expect("generated rules are well formed")
}

/// Up to `max_facts` random ground facts over the predicates of `program`.
pub fn generate_database(seed: u64, program: &Program, max_facts: usize) -> Vec<Fact> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let preds: Vec<(Symbol, usize)> = program.schema().iter().map(|(p, a)| (*p, *a)).collect();
    if preds.is_empty() || max_facts == 0 {
        return Vec::new();
    }
    let n = rng.gen_range(1..=max_facts);
    let mut facts: Vec<Fact> = (0..n)
        .map(|_| {
            let &(pred, arity) = preds.choose(&mut rng).expect("nonempty");
            let args = (0..arity).map(|_| Value::constant(CONSTANTS.choose(&mut rng).expect("nonempty"))).collect();
            Fact::new(pred, args)
        })
        .collect();
    facts.sort();
    facts.dedup();
    facts
}

/// A random program together with a database of at most `max_facts` facts.
pub fn generate_random_instance(seed: u64, profile: &ProgramProfile, max_facts: usize) -> Program {
    let mut program = generate_random_program(seed, profile);
    let facts = generate_database(seed, &program, max_facts);
    program.add_facts(facts).expect("facts follow the program schema");
    program
}

/// A random Boolean query of 1 to `max_atoms` atoms whose atoms are chained by shared
/// variables.
pub fn generate_query(seed: u64, program: &Program, max_atoms: usize) -> Query {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51_7cc1_b727_220a);
    let preds: Vec<(Symbol, usize)> = program.schema().iter().map(|(p, a)| (*p, *a)).collect();
    let n = rng.gen_range(1..=max_atoms.max(1));
    let mut vars: Vec<String> = Vec::new();
    let mut atoms = Vec::with_capacity(n);
    for i in 0..n {
        let &(pred, arity) = preds.choose(&mut rng).expect("program has predicates");
        let link = (i > 0).then(|| rng.gen_range(0..arity));
        let terms = (0..arity)
            .map(|slot| {
                if Some(slot) == link {
                    return Term::var(vars.choose(&mut rng).expect("earlier atoms bind variables"));
                }
                if rng.gen_bool(0.1) {
                    return Term::constant(CONSTANTS.choose(&mut rng).expect("nonempty"));
                }
                if !vars.is_empty() && rng.gen_bool(0.25) {
                    return Term::var(vars.choose(&mut rng).expect("nonempty"));
                }
                let v = format!("Q{}", vars.len());
                vars.push(v.clone());
                Term::var(&v)
            })
            .collect();
        atoms.push(Atom::new(pred, terms));
        if vars.is_empty() {
            vars.push("Q0".to_string());
        }
    }
    Query::new(atoms, Vec::new()).expect("nonempty boolean query")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, print_program};

    #[test]
    fn same_seed_same_program() {
        let p = ProgramProfile::default();
        assert_eq!(print_program(&generate_random_program(7, &p)), print_program(&generate_random_program(7, &p)));
    }

    #[test]
    fn generated_programs_round_trip() {
        let p = ProgramProfile::default();
        for seed in 0..50 {
            let prog = generate_random_instance(seed, &p, 20);
            let text = print_program(&prog);
            let back = parse_program(&text).unwrap();
            assert_eq!(print_program(&back), text);
            assert!(prog.facts().len() <= 20);
        }
    }
}
