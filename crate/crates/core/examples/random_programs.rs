//! Tally fragment classes over randomly generated rule sets.
//!
//! ```bash
//! cargo run --example random_programs -- 500
//! ```

use std::collections::BTreeMap;

use shyward::analysis::classify;
use shyward::analysis::generate::{generate_random_program, ProgramProfile};
use shyward::parser::print_program;

fn main() {
    let n: u64 = std::env::args().nth(1).map_or(200, |a| a.parse().expect("a number"));
    let profile = ProgramProfile::default();
    let mut counts = BTreeMap::new();
    for seed in 0..n {
        let verdicts = classify(&generate_random_program(seed, &profile)).expect("consistent verdicts");
        *counts.entry(verdicts.class_name()).or_insert(0) += 1;
    }
    println!("{counts:?}");
    println!("seed 0:\n{}", print_program(&generate_random_program(0, &profile)));
}
