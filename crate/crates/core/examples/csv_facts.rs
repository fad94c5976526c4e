//! Write a generated scenario to disk, load it back from CSV and answer its queries.
//!
//! ```bash
//! cargo run --example csv_facts
//! ```

use shyward::benchgen::ScenarioSpec;
use shyward::chase::{ChaseConfig, ChaseVariant};
use shyward::parser::{add_csv_facts, parse_program_file, parse_query_file};
use shyward::query::answer_with_variant;

fn main() {
    let dir = std::env::temp_dir().join("shyward-csv-example");
    let scenario = ScenarioSpec::doctors_like(200, 20).seed(5).generate().expect("valid scenario");
    scenario.write_to(&dir).expect("writable directory");

    let mut program = parse_program_file(&dir.join("program.dlgx")).expect("valid program");
    for pred in scenario.facts.keys() {
        let n = add_csv_facts(&mut program, *pred, &dir.join(format!("{pred}.csv")), false).expect("loads");
        println!("{pred}: {n} facts");
    }
    let config = ChaseConfig::new(ChaseVariant::Isomorphic);
    for (name, _) in &scenario.queries {
        let query = parse_query_file(&dir.join("queries").join(format!("{name}.dlgq"))).expect("valid query");
        let answer = answer_with_variant(&program, &query, &config).expect("answers");
        let rows = answer.answer.tuples.as_ref().map_or(0, Vec::len);
        println!("{name}: {} ({rows} tuples)", answer.answer.verdict);
    }
}
