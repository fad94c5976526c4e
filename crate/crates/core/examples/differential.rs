//! Compare answers across chase variants, with and without an injected fault.
//!
//! ```bash
//! cargo run --example differential
//! ```

use shyward::parser::{parse_program, parse_query};
use shyward::query::{differential_bcqa, DiffConfig, Fault};

fn main() {
    let program = parse_program("n(a).\ne(X,Y) :- n(X).\nn(Y) :- e(X,Y).").expect("valid program");
    let query = parse_query("?- e(X,Y), e(Y,Z).").expect("valid query");

    let report = differential_bcqa(&program, &query, &DiffConfig::new(1000)).expect("runs");
    print!("{}", report.to_text());

    let mut faulty = DiffConfig::new(1000);
    faulty.fault = Some(Fault::FlipIsomorphic);
    let report = differential_bcqa(&program, &query, &faulty).expect("runs");
    println!("\n== with the isomorphism check flipped");
    print!("{}", report.to_text());
}
