//! Run every chase variant on the same rule set and compare the results.
//!
//! ```bash
//! cargo run --example chase_variants
//! ```

use shyward::chase::{run_chase, ChaseConfig, ChaseVariant};
use shyward::parser::parse_program;

fn main() {
    let program = parse_program("n(a).\ne(X,Y) :- n(X).\nn(Y) :- e(X,Y).").expect("valid program");
    let variants = [
        ChaseVariant::Oblivious,
        ChaseVariant::Parsimonious,
        ChaseVariant::ParsimoniousResumption { resumptions: 2 },
        ChaseVariant::Isomorphic,
    ];
    for variant in variants {
        // The oblivious chase never stops on this program, so give it a step limit.
        let run = run_chase(&program, &ChaseConfig::new(variant).max_steps(6)).expect("chase runs");
        println!("== {} ({:?}, {} steps)", run.variant, run.status, run.steps);
        print!("{}", run.instance.dump());
    }
}
