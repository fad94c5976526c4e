use std::fmt;

use serde::{Serialize, Serializer};

use super::term::{Symbol, Term, Value};

/// Atom/fact positions are 1-based: `p[1]` is the first argument of `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Position {
    pub predicate: Symbol,
    pub index: usize,
}

impl Position {
    pub fn new(predicate: Symbol, index: usize) -> Self {
        debug_assert!(index >= 1);
        Position { predicate, index }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.predicate, self.index)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub predicate: Symbol,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Symbol>, terms: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), terms }
    }

    pub fn arity(&self) -> usize {
        self.terms.len()
    }

    /// Variables in order of first occurrence (may repeat across calls, not within).
    pub fn variables(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.terms.iter().filter_map(Term::as_var)
    }

    /// `(position, term)` pairs, positions 1-based.
    pub fn positions(&self) -> impl Iterator<Item = (Position, &Term)> + '_ {
        self.terms.iter().enumerate().map(move |(i, t)| (Position::new(self.predicate, i + 1), t))
    }

    pub fn has_nulls(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::Null(_)))
    }

    pub fn is_ground(&self) -> bool {
        !self.terms.iter().any(Term::is_var)
    }

    /// Converts a variable-free atom into a fact.
    pub fn to_fact(&self) -> Option<Fact> {
        let args = self.terms.iter().map(Term::as_value).collect::<Option<Vec<_>>>()?;
        Some(Fact::new(self.predicate, args))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A ground atom over constants and nulls.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Fact {
    pub predicate: Symbol,
    pub args: Vec<Value>,
}

impl Fact {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Value>) -> Self {
        Fact { predicate: predicate.into(), args }
    }

    /// Shorthand for constant-only facts, mostly for tests.
    pub fn constants(predicate: &str, args: &[&str]) -> Self {
        Fact::new(predicate, args.iter().map(|a| Value::constant(a)).collect())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn nulls(&self) -> impl Iterator<Item = super::NullId> + '_ {
        self.args.iter().filter_map(Value::as_null)
    }

    pub fn to_atom(&self) -> Atom {
        Atom::new(self.predicate, self.args.iter().map(|v| Term::from(*v)).collect())
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, v) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Fact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
