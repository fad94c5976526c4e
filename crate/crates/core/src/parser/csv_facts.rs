use std::io::{Read, Write};
use std::path::Path;

use crate::model::{Fact, Program, Symbol, Value};

#[derive(Debug, thiserror::Error)]
pub enum FactsError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: row {row} has {found} columns, expected {expected}")]
    RaggedRow { path: String, row: u64, expected: usize, found: usize },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: predicate {predicate} has arity {expected} in the program, file has {found} columns")]
    ArityConflict { path: String, predicate: Symbol, expected: usize, found: usize },
}

/// Reads one predicate's facts from CSV. Every cell is a constant.
pub fn read_facts_csv(
    predicate: Symbol,
    reader: impl Read,
    header: bool,
    origin: &str,
) -> Result<Vec<Fact>, FactsError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(header).flexible(true).from_reader(reader);
    let mut facts = Vec::new();
    let mut width = None;
    for record in rdr.records() {
        let record = record.map_err(|source| FactsError::Csv { path: origin.to_string(), source })?;
        let row = record.position().map_or(0, |p| p.line());
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected || expected == 0 {
            return Err(FactsError::RaggedRow { path: origin.to_string(), row, expected, found: record.len() });
        }
        facts.push(Fact::new(predicate, record.iter().map(Value::constant).collect()));
    }
    Ok(facts)
}

pub fn load_facts_csv(predicate: Symbol, path: &Path, header: bool) -> Result<Vec<Fact>, FactsError> {
    let origin = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| FactsError::Io { path: origin.clone(), source })?;
    read_facts_csv(predicate, std::io::BufReader::new(file), header, &origin)
}

/// Loads `path` as facts of `predicate` into `program`, checking the file's width
/// against the predicate's arity in the program.
pub fn add_csv_facts(program: &mut Program, predicate: Symbol, path: &Path, header: bool) -> Result<usize, FactsError> {
    let facts = load_facts_csv(predicate, path, header)?;
    if let (Some(expected), Some(first)) = (program.arity(predicate), facts.first()) {
        if first.arity() != expected {
            return Err(FactsError::ArityConflict {
                path: path.display().to_string(),
                predicate,
                expected,
                found: first.arity(),
            });
        }
    }
    let n = facts.len();
    program.add_facts(facts).expect("arity checked above");
    Ok(n)
}

/// Writes fact arguments as CSV rows (no header). Nulls are written in their printed form.
pub fn write_facts_csv<'a>(facts: impl IntoIterator<Item = &'a Fact>, writer: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for fact in facts {
        w.write_record(fact.args.iter().map(|v| match v {
            Value::Const(c) => c.as_str().to_string(),
            Value::Null(n) => n.to_string(),
        }))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, header: bool) -> Result<Vec<Fact>, FactsError> {
        read_facts_csv(Symbol::new("owns"), text.as_bytes(), header, "mem")
    }

    #[test]
    fn row_to_fact() {
        assert_eq!(read("alice,acme\n", false).unwrap(), vec![Fact::constants("owns", &["alice", "acme"])]);
    }

    #[test]
    fn empty_input() {
        assert!(read("", false).unwrap().is_empty());
    }

    #[test]
    fn header_skipped() {
        assert_eq!(read("who,what\nbob,x\n", true).unwrap().len(), 1);
    }

    #[test]
    fn quoted_cells() {
        let facts = read("\"Smith, J\",acme\n", false).unwrap();
        assert_eq!(facts[0].args[0], Value::constant("Smith, J"));
    }

    #[test]
    fn ragged_row_reports_line() {
        match read("a,b\nc,d\ne\n", false) {
            Err(FactsError::RaggedRow { row, expected, found, .. }) => {
                assert_eq!((row, expected, found), (3, 2, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn write_then_read() {
        let facts = vec![Fact::constants("owns", &["a, b", "\"q\""]), Fact::constants("owns", &["c", "d"])];
        let mut buf = Vec::new();
        write_facts_csv(&facts, &mut buf).unwrap();
        assert_eq!(read(std::str::from_utf8(&buf).unwrap(), false).unwrap(), facts);
    }
}
