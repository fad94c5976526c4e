//! Acceptance criteria. Runs without the libtest harness so that every criterion
//! prints one PASS or FAIL line; the process exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use shyward::analysis::generate::{generate_query, generate_random_instance, generate_random_program, ProgramProfile};
use shyward::analysis::{
    check_protected, check_shy, check_warded, classify, classify_variables, compute_affected, compute_invaded,
    Condition,
};
use shyward::benchgen::{psc_query, ScenarioSpec};
use shyward::chase::{
    compare_chase_containment, run_chase, ChaseConfig, ChaseStatus, ChaseVariant, ContainmentOutcome,
};
use shyward::model::{Fact, RuleId, Symbol, Value};
use shyward::parser::{parse_program, parse_query};
use shyward::query::{answer_with_variant, differential_bcqa, CheckOutcome, DiffConfig};

const PROP1: &str = "i1(X,Y) :- e1(X).\ni2(Z,X) :- e2(X).\ni3(X,Y,Z) :- i1(X,Y), i2(Z,X).";
const PROP2: &str = "i1(X,Y) :- e1(X).\ni2(X,Z) :- i1(X,Y), i1(Z,Y).";
const DIVERGENCE: &str = "p(a).\nq(a,b).\nq(X,Z) :- p(X).";
const RESUMPTION: &str = "n(a).\ne(X,Y) :- n(X).\nn(Y) :- e(X,Y).";

/// Generated (program, query) pairs and programs per suite.
const THEOREM1_SEEDS: u64 = 1000;
const CLASS_QUOTA: f64 = 0.05;
const SUITE_SIZE: usize = 500;
const SUITE_MAX_FACTS: usize = 20;
const SUITE_BUDGET: u64 = 10_000;
const MAX_INCONCLUSIVE_RATE: f64 = 0.10;
const PSC_LARGE: usize = 10_000;
const PSC_SMALL: usize = 1_000;
const PSC_TIME_LIMIT: Duration = Duration::from_secs(60);
const PSC_MAX_SCALING: f64 = 20.0;
const TIMING_REPETITIONS: usize = 3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Criterion = (&'static str, fn() -> Outcome);

fn criterion_1() -> Outcome {
    let mut problems = Vec::new();
    let p1 = parse_program(PROP1).unwrap();
    let c1 = classify_variables(&p1, &compute_affected(&p1), &compute_invaded(&p1));
    let (s, w, p) = (check_shy(&p1, &c1), check_warded(&p1, &c1), check_protected(&p1, &c1));
    if (s.holds, w.holds, p.holds) != (true, false, false) {
        problems.push(format!("prop1 verdicts shy={} warded={} protected={}", s.holds, w.holds, p.holds));
    }
    let w1: Vec<_> = w.violations.iter().filter(|v| v.condition == Condition::W1).collect();
    let yz = vec![Symbol::new("Y"), Symbol::new("Z")];
    if w1.len() != 1 || w1[0].rule != RuleId(2) || w1[0].variables != yz {
        problems.push(format!("prop1 W1 violations {w1:?}"));
    }

    let p2 = parse_program(PROP2).unwrap();
    let c2 = classify_variables(&p2, &compute_affected(&p2), &compute_invaded(&p2));
    let (s, w, p) = (check_shy(&p2, &c2), check_warded(&p2, &c2), check_protected(&p2, &c2));
    if (s.holds, w.holds, p.holds) != (false, true, false) {
        problems.push(format!("prop2 verdicts shy={} warded={} protected={}", s.holds, w.holds, p.holds));
    }
    let s1: Vec<_> = s.violations.iter().filter(|v| v.condition == Condition::S1).collect();
    if s1.len() != 1 || s1[0].rule != RuleId(1) || s1[0].variables != [Symbol::new("Y")] {
        problems.push(format!("prop2 S1 violations {s1:?}"));
    }
    if problems.is_empty() {
        outcome(true, "prop1 shy-only with W1{Y,Z} on r2; prop2 warded-only with S1{Y} on r1")
    } else {
        outcome(false, problems.join("; "))
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let profile = ProgramProfile::default();
    let mut mismatches = 0;
    let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
    for seed in 0..THEOREM1_SEEDS {
        let program = generate_random_program(seed, &profile);
        let c = classify_variables(&program, &compute_affected(&program), &compute_invaded(&program));
        let shy = check_shy(&program, &c).holds;
        let warded = check_warded(&program, &c).holds;
        let protected = check_protected(&program, &c).holds;
        if protected != (shy && warded) {
            mismatches += 1;
        }
        let class = match (shy, warded) {
            (true, true) => "protected",
            (true, false) => "shy-only",
            (false, true) => "warded-only",
            (false, false) => "neither",
        };
        *classes.entry(class).or_default() += 1;
    }
    let quota = (CLASS_QUOTA * THEOREM1_SEEDS as f64).ceil() as usize;
    let coverage_ok = ["protected", "shy-only", "warded-only", "neither"]
        .iter()
        .all(|c| classes.get(c).copied().unwrap_or(0) >= quota);
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && coverage_ok && elapsed < Duration::from_secs(60),
        format!(
            "{THEOREM1_SEEDS} programs, {mismatches} mismatches, classes {classes:?} (quota {quota} each), {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let profile = ProgramProfile::default();
    let (mut conclusive, mut violated, mut inconclusive, mut seed) = (0, 0, 0, 0u64);
    let mut first_violation = None;
    while conclusive < SUITE_SIZE {
        let program = generate_random_instance(seed, &profile, SUITE_MAX_FACTS);
        let report = compare_chase_containment(&program, SUITE_BUDGET).unwrap();
        match report.outcome {
            ContainmentOutcome::Holds => conclusive += 1,
            ContainmentOutcome::Violated => {
                conclusive += 1;
                violated += 1;
                first_violation.get_or_insert(seed);
            }
            ContainmentOutcome::Inconclusive => inconclusive += 1,
        }
        seed += 1;
    }
    let rate = inconclusive as f64 / seed as f64;
    let elapsed = start.elapsed();
    outcome(
        violated == 0 && rate < MAX_INCONCLUSIVE_RATE && elapsed < Duration::from_secs(300),
        format!(
            "{conclusive} conclusive programs, {violated} violations{}, inconclusive {inconclusive}/{seed} ({:.1}%), {:.1}s",
            first_violation.map(|s| format!(" (first at seed {s})")).unwrap_or_default(),
            rate * 100.0,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let profile = ProgramProfile::default();
    let (mut pairs, mut agree, mut disagree, mut inconclusive, mut via_nulls) = (0, 0, 0, 0, 0);
    let mut seed = 0u64;
    let mut first_disagreement = None;
    while agree + disagree < SUITE_SIZE {
        seed += 1;
        let program = generate_random_instance(seed, &profile, SUITE_MAX_FACTS);
        if !classify(&program).unwrap().protected {
            continue;
        }
        pairs += 1;
        let query = generate_query(seed, &program, 3);
        let report = differential_bcqa(&program, &query, &DiffConfig::new(SUITE_BUDGET)).unwrap();
        assert_eq!(report.pchase_r.variant, format!("pchase-r({})", query.atoms().len()));
        match report.check("theorem2").unwrap().outcome {
            CheckOutcome::Agree => agree += 1,
            CheckOutcome::Disagree => {
                disagree += 1;
                first_disagreement.get_or_insert(seed);
            }
            _ => inconclusive += 1,
        }
        let binds_null =
            |w: &Option<shyward::model::Substitution>| w.as_ref().is_some_and(|w| w.iter().any(|(_, v)| v.is_null()));
        if binds_null(&report.ichase.witness) || binds_null(&report.pchase_r.witness) {
            via_nulls += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagree == 0 && elapsed < Duration::from_secs(300),
        format!(
            "{pairs} protected pairs: {agree} agree, {disagree} disagree{}, {inconclusive} inconclusive; \
             {via_nulls} witnesses bind a query variable to a null; {:.1}s",
            first_disagreement.map(|s| format!(" (first at seed {s})")).unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let program = parse_program(DIVERGENCE).unwrap();
    let p = run_chase(&program, &ChaseConfig::new(ChaseVariant::Parsimonious)).unwrap();
    let i = run_chase(&program, &ChaseConfig::new(ChaseVariant::Isomorphic)).unwrap();
    let extra: Vec<Fact> = i.instance.fact_set().difference(&p.instance.fact_set()).cloned().collect();
    let extra_ok = extra.len() == 1
        && extra[0].predicate == Symbol::new("q")
        && extra[0].args[0] == Value::constant("a")
        && extra[0].args[1].is_null();
    outcome(
        p.reached_fixpoint() && i.reached_fixpoint() && p.instance.len() == 2 && i.instance.len() == 3 && extra_ok,
        format!(
            "pchase {} facts, ichase {} facts, extra {}",
            p.instance.len(),
            i.instance.len(),
            extra.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let program = parse_program(RESUMPTION).unwrap();
    let q = parse_query("?- e(X,Y), e(Y,Z).").unwrap();
    let ask = |config: ChaseConfig| answer_with_variant(&program, &q, &config).unwrap().answer.verdict;
    let pchase = ask(ChaseConfig::new(ChaseVariant::Parsimonious));
    let pchase_r = ask(ChaseConfig::new(ChaseVariant::ParsimoniousResumption { resumptions: 1 }));
    let ichase = ask(ChaseConfig::new(ChaseVariant::Isomorphic));
    let oblivious = ask(ChaseConfig::new(ChaseVariant::Oblivious).max_steps(4));
    outcome(
        !pchase && pchase_r && ichase && oblivious,
        format!("pchase={pchase} pchase-r(1)={pchase_r} ichase={ichase} oblivious(4 steps)={oblivious}"),
    )
}

fn psc_timing(scale: usize, variant: ChaseVariant) -> (Duration, BTreeSet<Vec<Value>>, ChaseStatus) {
    let program = ScenarioSpec::psc(scale, scale).generate().unwrap().program();
    let query = psc_query();
    let mut times = Vec::new();
    let mut last = None;
    for _ in 0..TIMING_REPETITIONS {
        let start = Instant::now();
        let a = answer_with_variant(&program, &query, &ChaseConfig::new(variant)).unwrap();
        times.push(start.elapsed());
        last = Some(a);
    }
    times.sort();
    let a = last.unwrap();
    let tuples = a.answer.tuples.unwrap().into_iter().collect();
    (times[times.len() / 2], tuples, a.run.status)
}

fn criterion_7() -> Outcome {
    let pchase_r = ChaseVariant::ParsimoniousResumption { resumptions: psc_query().default_resumptions() };
    let (ti, ai, si) = psc_timing(PSC_LARGE, ChaseVariant::Isomorphic);
    let (tp, ap, sp) = psc_timing(PSC_LARGE, pchase_r);
    let (ts, _, _) = psc_timing(PSC_SMALL, ChaseVariant::Isomorphic);
    let fixpoints = si == ChaseStatus::Fixpoint && sp == ChaseStatus::Fixpoint;
    let same = ai == ap;
    let ratio = ti.as_secs_f64() / ts.as_secs_f64().max(1e-3);
    outcome(
        fixpoints && same && ti < PSC_TIME_LIMIT && tp < PSC_TIME_LIMIT && ratio <= PSC_MAX_SCALING,
        format!(
            "10K: ichase {:.2}s, pchase-r {:.2}s, {} psc answers, sets equal={same}; 1K ichase {:.3}s, ratio {ratio:.1}",
            ti.as_secs_f64(),
            tp.as_secs_f64(),
            ai.len(),
            ts.as_secs_f64()
        ),
    )
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["shyward"];
    full.extend_from_slice(args);
    let code = shyward::cli::run(full, &mut out, &mut err);
    (code, out)
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn strip_timings(json: &[u8]) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(json).unwrap();
    for row in v.as_array_mut().unwrap() {
        row.as_object_mut().unwrap().remove("ms");
    }
    v
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let f = |name: &str| fixtures.join(name).display().to_string();
    let trace_a = tmp.path().join("a.jsonl").display().to_string();
    let trace_b = tmp.path().join("b.jsonl").display().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["classify".into(), "--program".into(), f("prop1.dlgx")],
        vec!["classify".into(), "--program".into(), f("prop2.dlgx"), "--format".into(), "text".into()],
        vec!["chase".into(), "--program".into(), f("resumption.dlgx"), "--variant".into(), "pchase-r".into()],
        vec!["chase".into(), "--program".into(), f("divergence.dlgx"), "--format".into(), "json".into()],
        vec!["query".into(), "--program".into(), f("resumption.dlgx"), "--query".into(), f("two_path.dlgq")],
        vec![
            "diff".into(),
            "--program".into(),
            f("resumption.dlgx"),
            "--query".into(),
            f("two_path.dlgq"),
            "--format".into(),
            "json".into(),
        ],
    ];
    let mut checked = 0;
    let mut differing = Vec::new();
    for cmd in &commands {
        let args: Vec<&str> = cmd.iter().map(String::as_str).collect();
        if cli(&args) != cli(&args) {
            differing.push(cmd.join(" "));
        }
        checked += 1;
    }
    let trace_cmd = |path: &str| {
        cli(&["chase", "--program", &f("resumption.dlgx"), "--variant", "ichase", "--trace", path]);
        std::fs::read(path).unwrap()
    };
    if trace_cmd(&trace_a) != trace_cmd(&trace_b) {
        differing.push("chase --trace".into());
    }
    checked += 1;
    let bench = || {
        let (_, out) = cli(&["bench", "--scale", "200", "--repetitions", "1", "--format", "json", "--seed", "3"]);
        strip_timings(&out)
    };
    if bench() != bench() {
        differing.push("bench".into());
    }
    checked += 1;
    for scenario in ["psc", "doctors-like", "random"] {
        let a = tmp.path().join(format!("{scenario}-a"));
        let b = tmp.path().join(format!("{scenario}-b"));
        for d in [&a, &b] {
            cli(&[
                "generate",
                "--scenario",
                scenario,
                "--scale",
                "300",
                "--seed",
                "5",
                "--out",
                &d.display().to_string(),
            ]);
        }
        if read_dir_bytes(&a) != read_dir_bytes(&b) {
            differing.push(format!("generate {scenario}"));
        }
        checked += 1;
    }
    outcome(differing.is_empty(), format!("{checked} commands repeated, differing: {differing:?}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fixture classification", criterion_1),
        ("Theorem 1 property suite", criterion_2),
        ("Observation suite (pchase embeds into ichase)", criterion_3),
        ("Theorem 2 suite (pchase-r and ichase agree on protected)", criterion_4),
        ("firing-condition divergence fixture", criterion_5),
        ("resumption fixture", criterion_6),
        ("desk-scale PSC benchmark", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name} - {}", i + 1, result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
