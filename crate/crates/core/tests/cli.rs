use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn shyward(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shyward")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"))
}

fn assert_valid(schema: &str, instance: &Value) {
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&raw).unwrap();
    let msgs: Vec<String> = match compiled.validate(instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{schema}: {msgs:?}\n{instance:#}");
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn classify_exit_codes() {
    let shy = shyward(&["classify", "--program", &fixture("prop1.dlgx"), "--require", "shy"]);
    assert_eq!(code(&shy), 0);
    let warded = shyward(&["classify", "--program", &fixture("prop1.dlgx"), "--require", "warded"]);
    assert_eq!(code(&warded), 3);
    assert!(!stderr(&warded).is_empty());
    let bad = shyward(&["classify", "--program", &fixture("malformed.dlgx")]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("malformed.dlgx:1:"), "{}", stderr(&bad));
    assert!(stdout(&bad).is_empty());
    let missing = shyward(&["classify", "--program", "/nonexistent/x.dlgx"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn classify_json_matches_schema() {
    for name in ["prop1.dlgx", "prop2.dlgx", "alpha.dlgx", "resumption.dlgx"] {
        let o = shyward(&["classify", "--program", &fixture(name)]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        assert_valid("analysis-report", &v);
        let again = shyward(&["classify", "--program", &fixture(name)]);
        assert_eq!(o.stdout, again.stdout, "{name}");
    }
    let v = json(&shyward(&["classify", "--program", &fixture("prop2.dlgx")]));
    assert_eq!(v["verdicts"]["warded"], true);
    assert_eq!(v["verdicts"]["shy"], false);
}

#[test]
fn chase_dumps() {
    let alpha = shyward(&["chase", "--program", &fixture("alpha.dlgx"), "--variant", "pchase"]);
    assert_eq!(code(&alpha), 0);
    assert_eq!(stdout(&alpha).lines().count(), 2, "{}", stdout(&alpha));

    let p = shyward(&["chase", "--program", &fixture("divergence.dlgx"), "--variant", "pchase"]);
    let i = shyward(&["chase", "--program", &fixture("divergence.dlgx"), "--variant", "ichase"]);
    let p_lines: Vec<String> = stdout(&p).lines().map(str::to_owned).collect();
    let i_lines: Vec<String> = stdout(&i).lines().map(str::to_owned).collect();
    let extra: Vec<&String> = i_lines.iter().filter(|l| !p_lines.contains(l)).collect();
    assert_eq!(extra.len(), 1);
    assert!(extra[0].starts_with("q(a,_:"), "{extra:?}");
    assert!(p_lines.iter().all(|l| i_lines.contains(l)));
}

#[test]
fn oblivious_chase_refuses_recursive_existentials() {
    let o = shyward(&["chase", "--program", &fixture("resumption.dlgx"), "--variant", "oblivious"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).starts_with("error: "));
    let limited =
        shyward(&["chase", "--program", &fixture("resumption.dlgx"), "--variant", "oblivious", "--max-steps", "5"]);
    assert_eq!(code(&limited), 0);
    assert!(stderr(&limited).contains("step limit"));
}

#[test]
fn chase_json_and_trace_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let o = shyward(&[
        "chase",
        "--program",
        &fixture("resumption.dlgx"),
        "--variant",
        "pchase-r",
        "--resumptions",
        "3",
        "--format",
        "json",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_valid("chase-result", &v);
    assert_eq!(v["variant"], "pchase-r(3)");
    assert_eq!(v["resumptionsUsed"], 3);
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().count() > 0);
    for line in lines.lines() {
        assert_valid("trace-record", &serde_json::from_str(line).unwrap());
    }
}

#[test]
fn query_exit_codes() {
    let base = ["query", "--program", &fixture("resumption.dlgx"), "--query", &fixture("two_path.dlgq")];
    let pchase = shyward(&[&base[..], &["--variant", "pchase"]].concat());
    assert_eq!(code(&pchase), 1);
    let v = json(&pchase);
    assert_valid("answer", &v);
    assert_eq!(v["verdict"], false);

    let resumed = shyward(&[&base[..], &["--variant", "pchase-r"]].concat());
    assert_eq!(code(&resumed), 0);
    let v = json(&resumed);
    assert_valid("answer", &v);
    // a Boolean query stops resuming once it holds
    assert_eq!(v["chase"]["resumptionsUsed"], 1);
    assert!(v["witness"].is_object());

    let unknown = shyward(&["query", "--program", &fixture("alpha.dlgx"), "--query", &fixture("unknown.dlgq")]);
    assert_eq!(code(&unknown), 1);
    let v = json(&unknown);
    assert_valid("answer", &v);
    assert!(v["warnings"][0].as_str().unwrap().contains("nope"));
}

#[test]
fn facts_from_csv_and_certain_answers() {
    let dir = tempfile::tempdir().unwrap();
    let program = dir.path().join("p.dlgx");
    std::fs::write(&program, "r(X,Y) :- e(X).\nr(X,Y) :- s(X,Y).\n").unwrap();
    let e = dir.path().join("e.csv");
    std::fs::write(&e, "name\na\nb\n").unwrap();
    let s = dir.path().join("s.csv");
    std::fs::write(&s, "x,y\na,c\n").unwrap();
    let query = dir.path().join("q.dlgq");
    std::fs::write(&query, "?(X,Y) :- r(X,Y).\n").unwrap();
    let e_arg = format!("e={}", e.display());
    let s_arg = format!("s={}", s.display());
    let args = [
        "query",
        "--program",
        program.to_str().unwrap(),
        "--facts",
        &e_arg,
        "--facts",
        &s_arg,
        "--header",
        "--query",
        query.to_str().unwrap(),
    ];
    let all = json(&shyward(&args));
    assert_valid("answer", &all);
    let certain = json(&shyward(&[&args[..], &["--certain"]].concat()));
    assert_valid("answer", &certain);
    assert!(all["tuples"].as_array().unwrap().len() > 1);
    assert_eq!(certain["tuples"], serde_json::json!([["a", "c"]]));

    let unknown_pred = format!("zz={}", e.display());
    let bad = shyward(&[
        "query",
        "--program",
        program.to_str().unwrap(),
        "--facts",
        &unknown_pred,
        "--query",
        query.to_str().unwrap(),
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn diff_exit_codes() {
    let base = ["diff", "--program", &fixture("resumption.dlgx"), "--query", &fixture("two_path.dlgq")];
    let ok = shyward(&base);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let fault = shyward(&[&base[..], &["--inject-fault"]].concat());
    assert_eq!(code(&fault), 5);
    let v = json(&shyward(&[&base[..], &["--inject-fault", "--format", "json"]].concat()));
    assert_valid("diff-report", &v);
    assert!(v["counterexample"].is_object());

    let shy_only = shyward(&["diff", "--program", &fixture("prop1.dlgx"), "--query", &fixture("i3.dlgq")]);
    assert_eq!(code(&shy_only), 0);
    assert!(stdout(&shy_only).contains("Theorem 2 precondition not met"), "{}", stdout(&shy_only));
    let v = json(&shyward(&[
        "diff",
        "--program",
        &fixture("prop1.dlgx"),
        "--query",
        &fixture("i3.dlgq"),
        "--format",
        "json",
    ]));
    assert_valid("diff-report", &v);
}

#[test]
fn bench_and_generate() {
    let o = shyward(&["bench", "--scenario", "psc", "--scale", "50", "--repetitions", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("scenario,scale,variant,ms,facts\n"));
    assert_eq!(text.lines().count(), 3);
    let v = json(&shyward(&[
        "bench",
        "--scenario",
        "doctors-like",
        "--scale",
        "20",
        "--repetitions",
        "1",
        "--format",
        "json",
    ]));
    assert_valid("bench-results", &v);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("psc");
    let g = shyward(&["generate", "--scenario", "psc", "--scale", "30", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&g), 0);
    let facts = format!("controls={}", out.join("controls.csv").display());
    let person = format!("person={}", out.join("person.csv").display());
    let company = format!("company={}", out.join("company.csv").display());
    let q = shyward(&[
        "query",
        "--program",
        out.join("program.dlgx").to_str().unwrap(),
        "--facts",
        &facts,
        "--facts",
        &person,
        "--facts",
        &company,
        "--query",
        out.join("queries/psc.dlgq").to_str().unwrap(),
    ]);
    assert_eq!(code(&q), 0, "{}", stderr(&q));
    assert!(!json(&q)["tuples"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&shyward(&[])), 2);
    assert_eq!(code(&shyward(&["chase", "--program", &fixture("alpha.dlgx"), "--variant", "bogus"])), 2);
    assert_eq!(code(&shyward(&["--help"])), 0);
}
