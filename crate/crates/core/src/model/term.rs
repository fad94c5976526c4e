use std::fmt;

use serde::{Serialize, Serializer};
use ustr::Ustr;

/// An interned identifier. Equality and hashing are by pointer, ordering is lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Ustr);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Ustr::from(s))
    }

    pub fn as_str(&self) -> &'static str {
        self.0.as_str()
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A labelled null. `epoch` is the resumption round that created it, `ordinal` is a
/// per-run counter, so the pair is unique within one chase run.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NullId {
    pub epoch: u32,
    pub ordinal: u32,
}

impl NullId {
    pub fn new(epoch: u32, ordinal: u32) -> Self {
        NullId { epoch, ordinal }
    }
}

impl fmt::Display for NullId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:e{}n{}", self.epoch, self.ordinal)
    }
}

/// A ground value stored in an instance: a constant or a labelled null.
///
/// Constants order before nulls; constants compare lexicographically, nulls by
/// `(epoch, ordinal)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Const(Symbol),
    Null(NullId),
}

impl Value {
    pub fn constant(s: &str) -> Self {
        Value::Const(Symbol::new(s))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null(_))
    }

    pub fn as_null(&self) -> Option<NullId> {
        match self {
            Value::Null(n) => Some(*n),
            Value::Const(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(c) => write_constant(f, c.as_str()),
            Value::Null(n) => n.fmt(f),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A term of the rule language. The three kinds are disjoint namespaces.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Const(Symbol),
    Var(Symbol),
    Null(NullId),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Symbol::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(Symbol::new(name))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Symbol> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    /// The value of a ground term, `None` for variables.
    pub fn as_value(&self) -> Option<Value> {
        match self {
            Term::Const(c) => Some(Value::Const(*c)),
            Term::Null(n) => Some(Value::Null(*n)),
            Term::Var(_) => None,
        }
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        match v {
            Value::Const(c) => Term::Const(c),
            Value::Null(n) => Term::Null(n),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write_constant(f, c.as_str()),
            Term::Var(v) => f.write_str(v.as_str()),
            Term::Null(n) => n.fmt(f),
        }
    }
}

/// Constants are printed bare when they would lex back as constants, quoted otherwise.
pub(crate) fn write_constant(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    if is_bare_constant(s) {
        f.write_str(s)
    } else {
        f.write_char('"')?;
        for ch in s.chars() {
            match ch {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                _ => f.write_char(ch)?,
            }
        }
        f.write_char('"')
    }
}

fn is_bare_constant(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => {
            let mut seen_dot = false;
            let mut prev_digit = true;
            for c in chars {
                if c == '.' && !seen_dot {
                    seen_dot = true;
                    prev_digit = false;
                } else if c.is_ascii_digit() {
                    prev_digit = true;
                } else {
                    return false;
                }
            }
            prev_digit
        }
        _ => false,
    }
}
