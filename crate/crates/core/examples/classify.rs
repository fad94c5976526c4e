//! Classify two small rule sets and print the analysis report.
//!
//! ```bash
//! cargo run --example classify
//! ```

use shyward::analysis::analyze;
use shyward::parser::parse_program;

const SHY_ONLY: &str = "i1(X,Y) :- e1(X).\ni2(Z,X) :- e2(X).\ni3(X,Y,Z) :- i1(X,Y), i2(Z,X).";
const WARDED_ONLY: &str = "i1(X,Y) :- e1(X).\ni2(X,Z) :- i1(X,Y), i1(Z,Y).";

fn main() {
    for (name, text) in [("shy-only", SHY_ONLY), ("warded-only", WARDED_ONLY)] {
        let program = parse_program(text).expect("valid program");
        let report = analyze(&program).expect("consistent verdicts");
        println!("== {name}: {}", report.verdicts.class_name());
        print!("{}", report.to_text());
    }
}
