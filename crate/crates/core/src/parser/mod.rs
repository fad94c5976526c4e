//! Text frontend: `.dlgx` programs, `?-` queries and CSV fact files.
//!
//! ```text
//! % facts
//! e1(c).
//! % rules, head on the left; head variables missing from the body are existential
//! i1(X, Y) :- e1(X).
//! % the same rule written body-first
//! e1(X) -> i1(X, Y).
//! ```

mod csv_facts;
mod grammar;
mod lexer;

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::model::{Fact, Program};
use crate::query::Query;

pub use csv_facts::{add_csv_facts, load_facts_csv, read_facts_csv, write_facts_csv, FactsError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(file: &str, line: usize, column: usize) -> Self {
        SourceSpan { file: file.to_string(), line, column }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic { severity: Severity::Error, message: message.into(), span }
    }

    pub fn warning(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseDiagnostic { severity: Severity::Warning, message: message.into(), span }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {level}: {}", self.span, self.message)
    }
}

/// Failure to read or parse a source file.
#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{}", render(.0))]
    Syntax(Vec<ParseDiagnostic>),
}

fn render(diags: &[ParseDiagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

pub fn parse_program(text: &str) -> Result<Program, Vec<ParseDiagnostic>> {
    grammar::parse_program_in(text, "<input>")
}

pub fn parse_query(text: &str) -> Result<Query, Vec<ParseDiagnostic>> {
    grammar::parse_query_in(text, "<input>")
}

/// Parses a facts-only text such as `p(a). q(a, b).`.
pub fn parse_facts(text: &str) -> Result<Vec<Fact>, Vec<ParseDiagnostic>> {
    grammar::parse_facts_in(text, "<input>")
}

fn read(path: &Path) -> Result<String, SourceError> {
    std::fs::read_to_string(path).map_err(|source| SourceError::Io { path: path.display().to_string(), source })
}

pub fn parse_program_file(path: &Path) -> Result<Program, SourceError> {
    let text = read(path)?;
    grammar::parse_program_in(&text, &path.display().to_string()).map_err(SourceError::Syntax)
}

pub fn parse_query_file(path: &Path) -> Result<Query, SourceError> {
    let text = read(path)?;
    grammar::parse_query_in(&text, &path.display().to_string()).map_err(SourceError::Syntax)
}

/// Renders a program in the concrete syntax accepted by [`parse_program`].
pub fn print_program(program: &Program) -> String {
    program.to_string()
}
