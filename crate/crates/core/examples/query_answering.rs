//! Answer a Boolean query and a conjunctive query with output variables.
//!
//! ```bash
//! cargo run --example query_answering
//! ```

use shyward::chase::{ChaseConfig, ChaseVariant};
use shyward::parser::{parse_program, parse_query};
use shyward::query::answer_with_variant;

fn main() {
    let program = parse_program("emp(ann). emp(bob). works(bob,sales).\nworks(X,D) :- emp(X).\ndept(D) :- works(X,D).")
        .expect("valid program");
    let config = ChaseConfig::new(ChaseVariant::Isomorphic);

    let boolean = parse_query("?- works(ann,D), dept(D).").expect("valid query");
    let answer = answer_with_variant(&program, &boolean, &config).expect("answers");
    println!("{boolean}  {}", answer.answer.verdict);

    let open = parse_query("?(X,D) :- works(X,D).").expect("valid query");
    let answer = answer_with_variant(&program, &open, &config).expect("answers");
    print!("{}", answer.to_json());
    println!("certain: {:?}", answer.answer.certain().tuples);
}
