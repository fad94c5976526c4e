//! Generate the company-control scenario and time two chase variants on it.
//!
//! ```bash
//! cargo run --release --example benchmark -- 10000 1000
//! ```

use shyward::benchgen::{run_bench, write_results_csv, ScenarioSpec};
use shyward::chase::ChaseVariant;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("a number"));
    let persons = args.next().unwrap_or(2000);
    let companies = args.next().unwrap_or(persons / 10);
    let spec = ScenarioSpec::psc(persons, companies).seed(1);
    let variants = [ChaseVariant::Isomorphic, ChaseVariant::ParsimoniousResumption { resumptions: 1 }];
    let rows = run_bench(&spec, &variants, 3, None).expect("valid scenario");
    write_results_csv(&rows, &mut std::io::stdout()).expect("stdout");
}
