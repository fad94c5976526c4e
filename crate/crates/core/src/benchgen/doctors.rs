use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ensure_protected, BenchError, GeneratedScenario, Scenario, ScenarioSpec};
use crate::model::{Fact, Program, Symbol};
use crate::parser::{parse_program, parse_query};

const RULES: &str = "\
% source-to-target mapping; hospitals and record ids are unknown
prescription(Pat,Drug,Doc) :- treatment(Pat,Doc,Drug).
doctor_at(Doc,H) :- doctor(Doc,Name,Spec).
doctor_at(Doc,H) :- physician(Doc,H).
target_doctor(Doc,Name,Spec,H) :- doctor(Doc,Name,Spec), doctor_at(Doc,H).
patient_of(Pat,H) :- treatment(Pat,Doc,Drug), doctor_at(Doc,H).
record(Pat,Name,R) :- patient(Pat,Name).
";

const QUERIES: [(&str, &str); 7] = [
    ("q1", "?(P,D) :- prescription(P,D,X)."),
    ("q2", "?(N) :- target_doctor(D,N,S,H)."),
    ("q3", "?(P,H) :- patient_of(P,H)."),
    ("q4", "?(P,N) :- patient(P,N), prescription(P,D,X), target_doctor(X,M,S,H)."),
    ("q5", "?(P) :- record(P,N,R), patient_of(P,H)."),
    ("q6", "?(P,Q) :- patient_of(P,H), patient_of(Q,H), record(Q,N,R)."),
    ("q7", "?(D) :- doctor_at(D,H), physician(D,H)."),
];

pub fn doctors_rules() -> Program {
    parse_program(RULES).expect("doctors rules parse")
}

const SPECIALTIES: [&str; 5] = ["cardiology", "oncology", "pediatrics", "neurology", "surgery"];
const DRUGS: [&str; 8] = ["d0", "d1", "d2", "d3", "d4", "d5", "d6", "d7"];

/// Patients are treated by `1 + density * 2` doctors on average; a `density` share of
/// doctors also has a known hospital.
pub fn generate_doctors_like(spec: &ScenarioSpec) -> Result<GeneratedScenario, BenchError> {
    spec.validate()?;
    let Scenario::DoctorsLike { patients, doctors } = spec.scenario else {
        return Err(BenchError::InvalidSpec("not a doctors-like scenario".into()));
    };
    let rules = doctors_rules();
    ensure_protected(spec, &rules)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let hospitals = (doctors / 20).max(1);
    let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| -> String { xs.choose(rng).expect("nonempty").to_string() };

    let mut patient = Vec::with_capacity(patients);
    let mut treatment = Vec::new();
    for i in 0..patients {
        let id = format!("pat{i}");
        patient.push(Fact::constants("patient", &[&id, &format!("name{i}")]));
        let n = 1 + (0..2).filter(|_| rng.gen_bool(spec.density)).count();
        for _ in 0..n {
            let doc = format!("doc{}", rng.gen_range(0..doctors));
            let drug = pick(&mut rng, &DRUGS);
            treatment.push(Fact::constants("treatment", &[&id, &doc, &drug]));
        }
    }
    treatment.sort();
    treatment.dedup();
    let mut doctor = Vec::with_capacity(doctors);
    let mut physician = Vec::new();
    for j in 0..doctors {
        let id = format!("doc{j}");
        let spec_name = pick(&mut rng, &SPECIALTIES);
        doctor.push(Fact::constants("doctor", &[&id, &format!("dr{j}"), &spec_name]));
        if rng.gen_bool(spec.density) {
            let h = format!("h{}", rng.gen_range(0..hospitals));
            physician.push(Fact::constants("physician", &[&id, &h]));
        }
    }
    let mut facts = BTreeMap::new();
    facts.insert(Symbol::new("patient"), patient);
    facts.insert(Symbol::new("treatment"), treatment);
    facts.insert(Symbol::new("doctor"), doctor);
    facts.insert(Symbol::new("physician"), physician);
    let queries =
        QUERIES.iter().map(|(name, text)| (name.to_string(), parse_query(text).expect("stock query parses"))).collect();
    Ok(GeneratedScenario { rules, facts, queries })
}
