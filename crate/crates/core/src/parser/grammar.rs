use std::collections::HashMap;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseDiagnostic, SourceSpan};
use crate::model::{Atom, Fact, Program, Rule, RuleId, Symbol, Term};
use crate::query::Query;

struct SpannedAtom {
    atom: Atom,
    span: SourceSpan,
}

enum Clause {
    Facts(Vec<SpannedAtom>),
    Rule { body: Vec<SpannedAtom>, head: Vec<SpannedAtom>, span: SourceSpan },
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    file: &'a str,
    anon: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, file: &'a str) -> Result<Self, Vec<ParseDiagnostic>> {
        Ok(Parser { tokens: tokenize(text, file)?, pos: 0, file, anon: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        match self.tokens.get(self.pos).or(self.tokens.last()) {
            Some(t) => t.span.clone(),
            None => SourceSpan::new(self.file, 1, 1),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseDiagnostic> {
        let span = self.span();
        match self.next() {
            Some(t) if t.tok == want => Ok(t.span),
            Some(t) => {
                Err(ParseDiagnostic::error(format!("expected {}, found {}", want.describe(), t.tok.describe()), t.span))
            }
            None => Err(ParseDiagnostic::error(format!("expected {}, found end of input", want.describe()), span)),
        }
    }

    /// Skips past the next `.` so parsing can resume at the following clause.
    fn recover(&mut self) {
        while let Some(t) = self.next() {
            if t.tok == Tok::Dot {
                break;
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseDiagnostic> {
        let span = self.span();
        match self.next().map(|t| t.tok) {
            Some(Tok::Ident(s)) if s == "_" => {
                self.anon += 1;
                Ok(Term::var(&format!("_{}", self.anon)))
            }
            Some(Tok::Ident(s)) => {
                let first = s.chars().next().unwrap_or('a');
                if first.is_ascii_uppercase() || first == '_' {
                    Ok(Term::var(&s))
                } else {
                    Ok(Term::constant(&s))
                }
            }
            Some(Tok::Quoted(s)) | Some(Tok::Number(s)) => Ok(Term::constant(&s)),
            Some(other) => Err(ParseDiagnostic::error(format!("expected a term, found {}", other.describe()), span)),
            None => Err(ParseDiagnostic::error("expected a term, found end of input", span)),
        }
    }

    fn atom(&mut self) -> Result<SpannedAtom, ParseDiagnostic> {
        let span = self.span();
        let predicate = match self.next().map(|t| t.tok) {
            Some(Tok::Ident(s)) => s,
            Some(other) => {
                return Err(ParseDiagnostic::error(
                    format!("expected a predicate name, found {}", other.describe()),
                    span,
                ))
            }
            None => return Err(ParseDiagnostic::error("expected a predicate name, found end of input", span)),
        };
        if self.peek() != Some(&Tok::LParen) {
            return Err(ParseDiagnostic::error(format!("predicate `{predicate}` needs at least one argument"), span));
        }
        self.expect(Tok::LParen)?;
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            terms.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(SpannedAtom { atom: Atom::new(Symbol::new(&predicate), terms), span })
    }

    fn atom_list(&mut self) -> Result<Vec<SpannedAtom>, ParseDiagnostic> {
        let mut atoms = vec![self.atom()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn clause(&mut self) -> Result<Clause, ParseDiagnostic> {
        let span = self.span();
        if matches!(self.peek(), Some(Tok::QueryStart | Tok::Question)) {
            return Err(ParseDiagnostic::error("queries belong in a separate query file", span));
        }
        self.anon = 0;
        let first = self.atom_list()?;
        let after = self.span();
        match self.next().map(|t| t.tok) {
            Some(Tok::Dot) => Ok(Clause::Facts(first)),
            Some(Tok::ColonDash) => {
                let body = self.atom_list()?;
                self.expect(Tok::Dot)?;
                Ok(Clause::Rule { body, head: first, span })
            }
            Some(Tok::Arrow) => {
                let head = self.atom_list()?;
                self.expect(Tok::Dot)?;
                Ok(Clause::Rule { body: first, head, span })
            }
            Some(other) => {
                Err(ParseDiagnostic::error(format!("expected `.`, `:-` or `->`, found {}", other.describe()), after))
            }
            None => Err(ParseDiagnostic::error("expected `.` at end of clause", after)),
        }
    }
}

/// Tracks predicate arities with the span of the first use.
#[derive(Default)]
struct Arities(HashMap<Symbol, (usize, SourceSpan)>);

impl Arities {
    fn check(&mut self, a: &SpannedAtom) -> Result<(), ParseDiagnostic> {
        let arity = a.atom.arity();
        match self.0.get(&a.atom.predicate) {
            Some((known, first)) if *known != arity => Err(ParseDiagnostic::error(
                format!("predicate `{}` used with arity {arity}, but with arity {known} at {first}", a.atom.predicate),
                a.span.clone(),
            )),
            Some(_) => Ok(()),
            None => {
                self.0.insert(a.atom.predicate, (arity, a.span.clone()));
                Ok(())
            }
        }
    }
}

pub(crate) fn parse_program_in(text: &str, file: &str) -> Result<Program, Vec<ParseDiagnostic>> {
    let mut parser = Parser::new(text, file)?;
    let mut errors = Vec::new();
    let mut arities = Arities::default();
    let mut rules = Vec::new();
    let mut facts = Vec::new();
    while !parser.at_end() {
        let clause = match parser.clause() {
            Ok(c) => c,
            Err(e) => {
                errors.push(e);
                parser.recover();
                continue;
            }
        };
        match clause {
            Clause::Facts(atoms) => {
                for a in atoms {
                    if let Err(e) = arities.check(&a) {
                        errors.push(e);
                        continue;
                    }
                    match a.atom.to_fact() {
                        Some(f) => facts.push(f),
                        None => {
                            errors.push(ParseDiagnostic::error(format!("fact `{}` contains variables", a.atom), a.span))
                        }
                    }
                }
            }
            Clause::Rule { body, head, span } => {
                let mut ok = true;
                for a in body.iter().chain(&head) {
                    if let Err(e) = arities.check(a) {
                        errors.push(e);
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
                let id = RuleId(rules.len());
                let body = body.into_iter().map(|a| a.atom).collect();
                let head = head.into_iter().map(|a| a.atom).collect();
                match Rule::new(id, body, head) {
                    Ok(rule) => rules.push(rule),
                    Err(e) => errors.push(ParseDiagnostic::error(e.to_string(), span)),
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Program::new(rules, facts).map_err(|e| vec![ParseDiagnostic::error(e.to_string(), SourceSpan::new(file, 1, 1))])
}

pub(crate) fn parse_query_in(text: &str, file: &str) -> Result<Query, Vec<ParseDiagnostic>> {
    let mut parser = Parser::new(text, file)?;
    let result = (|| {
        let span = parser.span();
        let mut output = Vec::new();
        match parser.next().map(|t| t.tok) {
            Some(Tok::QueryStart) => {}
            Some(Tok::Question) => {
                parser.expect(Tok::LParen)?;
                if parser.peek() != Some(&Tok::RParen) {
                    loop {
                        let span = parser.span();
                        match parser.term()? {
                            Term::Var(v) => output.push(v),
                            other => {
                                return Err(ParseDiagnostic::error(
                                    format!("answer variable expected, found `{other}`"),
                                    span,
                                ))
                            }
                        }
                        if parser.peek() == Some(&Tok::Comma) {
                            parser.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                parser.expect(Tok::RParen)?;
                parser.expect(Tok::ColonDash)?;
            }
            _ => return Err(ParseDiagnostic::error("a query starts with `?-` or `?(Vars) :-`", span)),
        }
        let atoms = parser.atom_list()?;
        parser.expect(Tok::Dot)?;
        if !parser.at_end() {
            return Err(ParseDiagnostic::error("unexpected input after the query", parser.span()));
        }
        let mut arities = Arities::default();
        for a in &atoms {
            arities.check(a)?;
        }
        Query::new(atoms.into_iter().map(|a| a.atom).collect(), output)
            .map_err(|e| ParseDiagnostic::error(e.to_string(), span))
    })();
    result.map_err(|e| vec![e])
}

/// Parses `p(a).`-style fact text; used for small inline databases.
pub(crate) fn parse_facts_in(text: &str, file: &str) -> Result<Vec<Fact>, Vec<ParseDiagnostic>> {
    let program = parse_program_in(text, file)?;
    if !program.rules().is_empty() {
        return Err(vec![ParseDiagnostic::error("expected facts only", SourceSpan::new(file, 1, 1))]);
    }
    Ok(program.facts().to_vec())
}
