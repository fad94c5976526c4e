use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::atom::{Atom, Fact};
use super::term::{Symbol, Term, Value};
use super::ModelError;

/// A mapping from variables and nulls to values, identity on everything else.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Substitution {
    map: BTreeMap<Term, Value>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds a variable or null. Constants cannot be rebound.
    pub fn bind(&mut self, from: Term, to: Value) -> &mut Self {
        assert!(!matches!(from, Term::Const(_)), "constants are fixed by every substitution");
        self.map.insert(from, to);
        self
    }

    pub fn bind_var(&mut self, var: Symbol, to: Value) -> &mut Self {
        self.bind(Term::Var(var), to)
    }

    pub fn with(mut self, var: &str, to: Value) -> Self {
        self.bind_var(Symbol::new(var), to);
        self
    }

    pub fn get(&self, term: &Term) -> Option<Value> {
        match term {
            Term::Const(c) => Some(Value::Const(*c)),
            other => self.map.get(other).copied(),
        }
    }

    pub fn get_var(&self, var: Symbol) -> Option<Value> {
        self.map.get(&Term::Var(var)).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Value)> {
        self.map.iter()
    }

    /// Image of a ground value: nulls follow the mapping when bound.
    pub fn apply_value(&self, value: Value) -> Value {
        match value {
            Value::Const(_) => value,
            Value::Null(n) => self.map.get(&Term::Null(n)).copied().unwrap_or(value),
        }
    }

    fn apply_term(&self, term: &Term) -> Result<Term, ModelError> {
        Ok(match term {
            Term::Const(_) => *term,
            Term::Var(v) => match self.map.get(term) {
                Some(value) => Term::from(*value),
                None => return Err(ModelError::UnboundVariable(*v)),
            },
            Term::Null(n) => Term::from(self.apply_value(Value::Null(*n))),
        })
    }

    pub fn apply(&self, atom: &Atom) -> Result<Atom, ModelError> {
        let terms = atom.terms.iter().map(|t| self.apply_term(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(Atom::new(atom.predicate, terms))
    }

    pub fn apply_fact(&self, atom: &Atom) -> Result<Fact, ModelError> {
        let applied = self.apply(atom)?;
        Ok(applied.to_fact().expect("every variable was bound"))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Substitution) -> Substitution {
        let mut map: BTreeMap<Term, Value> = first.map.iter().map(|(k, v)| (*k, self.apply_value(*v))).collect();
        for (k, v) in &self.map {
            map.entry(*k).or_insert(*v);
        }
        Substitution { map }
    }
}

impl FromIterator<(Term, Value)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Term, Value)>>(iter: I) -> Self {
        Substitution { map: iter.into_iter().collect() }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.map.len()))?;
        for (k, v) in &self.map {
            m.serialize_entry(&k.to_string(), &v.to_string())?;
        }
        m.end()
    }
}
