//! Backtracking join used for trigger search, firing-condition checks and query answering.
//!
//! A pattern is a conjunction of atoms. Its *free* terms (slots) are the variables and,
//! depending on the mode, the unfrozen nulls. At every step the search picks the
//! remaining atom with the fewest candidate tuples, using the per-column indexes of the
//! target instance for positions that are already bound.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::model::{Atom, Fact, Instance, NullId, Substitution, Symbol, Term, Value};

/// Which pattern terms may be mapped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    /// Only variables are mapped; nulls in the pattern are rigid.
    VariablesFree,
    /// Variables and unfrozen nulls map to any value; frozen nulls are rigid.
    NullsAlsoFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Arg {
    Fixed(Value),
    Slot(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct PatternAtom {
    pub predicate: Symbol,
    pub args: Vec<Arg>,
}

#[derive(Clone, Debug)]
pub(crate) struct Pattern {
    pub atoms: Vec<PatternAtom>,
    /// The term each slot stands for.
    pub slots: Vec<Term>,
    /// Isomorphic-embedding mode: slots bind injectively to nulls outside `rigid_nulls`.
    pub injective: bool,
    pub rigid_nulls: Vec<NullId>,
}

impl Pattern {
    /// Compiles `atoms`, numbering slots by first occurrence unless `slot_order` is given,
    /// in which case those terms occupy the first slots in that order.
    pub fn compile(
        atoms: &[Atom],
        target: &Instance,
        free_nulls: bool,
        injective: bool,
        slot_order: &[Term],
    ) -> Pattern {
        let mut slots: Vec<Term> = slot_order.to_vec();
        let mut rigid_nulls = Vec::new();
        let compiled = atoms
            .iter()
            .map(|atom| PatternAtom {
                predicate: atom.predicate,
                args: atom
                    .terms
                    .iter()
                    .map(|t| {
                        let free = match t {
                            Term::Var(_) => true,
                            Term::Null(n) => free_nulls && !target.is_frozen(*n),
                            Term::Const(_) => false,
                        };
                        if free {
                            let idx = slots.iter().position(|s| s == t).unwrap_or_else(|| {
                                slots.push(*t);
                                slots.len() - 1
                            });
                            Arg::Slot(idx)
                        } else {
                            let v = t.as_value().expect("non-free terms are ground");
                            if let Value::Null(n) = v {
                                rigid_nulls.push(n);
                            }
                            Arg::Fixed(v)
                        }
                    })
                    .collect(),
            })
            .collect();
        Pattern { atoms: compiled, slots, injective, rigid_nulls }
    }

    pub fn to_substitution(&self, bindings: &[Option<Value>]) -> Substitution {
        self.slots.iter().zip(bindings).filter_map(|(t, v)| v.map(|v| (*t, v))).collect()
    }
}

enum Candidates<'a> {
    Ids(&'a [u32]),
    All(usize),
}

impl Candidates<'_> {
    fn len(&self) -> usize {
        match self {
            Candidates::Ids(ids) => ids.len(),
            Candidates::All(n) => *n,
        }
    }
}

pub(crate) struct Matcher<'a> {
    pattern: &'a Pattern,
    target: &'a Instance,
    bindings: Vec<Option<Value>>,
    used: HashSet<NullId>,
}

impl<'a> Matcher<'a> {
    pub fn new(pattern: &'a Pattern, target: &'a Instance) -> Self {
        Matcher {
            pattern,
            target,
            bindings: vec![None; pattern.slots.len()],
            used: pattern.rigid_nulls.iter().copied().collect(),
        }
    }

    /// Enumerates every match, calling `f` with the full binding vector.
    pub fn for_each(&mut self, f: &mut dyn FnMut(&[Option<Value>]) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut remaining: Vec<usize> = (0..self.pattern.atoms.len()).collect();
        self.search(&mut remaining, f)
    }

    /// Like [`Matcher::for_each`] with atom `seed_atom` pinned to `tuple`.
    pub fn for_each_seeded(
        &mut self,
        seed_atom: usize,
        tuple: &[Value],
        f: &mut dyn FnMut(&[Option<Value>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut newly = Vec::new();
        if !self.unify(seed_atom, tuple, &mut newly) {
            self.undo(&newly);
            return ControlFlow::Continue(());
        }
        let mut remaining: Vec<usize> = (0..self.pattern.atoms.len()).filter(|&i| i != seed_atom).collect();
        let r = self.search(&mut remaining, f);
        self.undo(&newly);
        r
    }

    pub fn exists(&mut self) -> bool {
        self.for_each(&mut |_| ControlFlow::Break(())).is_break()
    }

    fn bound_value(&self, arg: Arg) -> Option<Value> {
        match arg {
            Arg::Fixed(v) => Some(v),
            Arg::Slot(s) => self.bindings[s],
        }
    }

    fn candidates(&self, atom: &PatternAtom) -> Option<Candidates<'a>> {
        let rel = self.target.relation(atom.predicate)?;
        if rel.arity() != atom.args.len() {
            return None;
        }
        let mut best: Option<&'a [u32]> = None;
        for (col, arg) in atom.args.iter().enumerate() {
            if let Some(v) = self.bound_value(*arg) {
                let ids = rel.lookup(col, &v);
                if best.is_none_or(|b| ids.len() < b.len()) {
                    best = Some(ids);
                }
            }
        }
        Some(match best {
            Some(ids) => Candidates::Ids(ids),
            None => Candidates::All(rel.len()),
        })
    }

    /// Binds the slots of atom `idx` against `tuple`; pushes newly bound slots to `newly`.
    fn unify(&mut self, idx: usize, tuple: &[Value], newly: &mut Vec<usize>) -> bool {
        let pattern = self.pattern;
        let atom = &pattern.atoms[idx];
        if atom.args.len() != tuple.len() {
            return false;
        }
        for (arg, value) in atom.args.iter().zip(tuple) {
            match *arg {
                Arg::Fixed(v) => {
                    if v != *value {
                        return false;
                    }
                }
                Arg::Slot(s) => match self.bindings[s] {
                    Some(bound) => {
                        if bound != *value {
                            return false;
                        }
                    }
                    None => {
                        if pattern.injective {
                            match value {
                                Value::Null(n) if !self.used.contains(n) => {
                                    self.used.insert(*n);
                                }
                                _ => return false,
                            }
                        }
                        self.bindings[s] = Some(*value);
                        newly.push(s);
                    }
                },
            }
        }
        true
    }

    fn undo(&mut self, newly: &[usize]) {
        for &s in newly {
            if self.pattern.injective {
                if let Some(Value::Null(n)) = self.bindings[s] {
                    self.used.remove(&n);
                }
            }
            self.bindings[s] = None;
        }
    }

    fn search(
        &mut self,
        remaining: &mut Vec<usize>,
        f: &mut dyn FnMut(&[Option<Value>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if remaining.is_empty() {
            return f(&self.bindings);
        }
        let mut choice: Option<(usize, Candidates<'a>)> = None;
        for (pos, &idx) in remaining.iter().enumerate() {
            let Some(c) = self.candidates(&self.pattern.atoms[idx]) else {
                return ControlFlow::Continue(());
            };
            if c.len() == 0 {
                return ControlFlow::Continue(());
            }
            if choice.as_ref().is_none_or(|(_, best)| c.len() < best.len()) {
                choice = Some((pos, c));
            }
        }
        let (pos, cands) = choice.expect("remaining is nonempty");
        let idx = remaining.swap_remove(pos);
        let rel = self.target.relation(self.pattern.atoms[idx].predicate).expect("checked by candidates");
        let mut newly = Vec::new();
        let n = cands.len();
        let mut result = ControlFlow::Continue(());
        for k in 0..n {
            let id = match &cands {
                Candidates::Ids(ids) => ids[k],
                Candidates::All(_) => k as u32,
            };
            newly.clear();
            if self.unify(idx, rel.tuple(id), &mut newly) {
                let r = self.search(remaining, f);
                self.undo(&newly);
                if r.is_break() {
                    result = r;
                    break;
                }
            } else {
                self.undo(&newly);
            }
        }
        remaining.push(idx);
        let last = remaining.len() - 1;
        remaining.swap(pos, last);
        result
    }
}

/// All homomorphisms from `pattern` into `target`, in deterministic order.
pub fn find_homomorphisms(pattern: &[Atom], target: &Instance, mode: MatchMode) -> Vec<Substitution> {
    let compiled = Pattern::compile(pattern, target, mode == MatchMode::NullsAlsoFree, false, &[]);
    let mut out = Vec::new();
    let _ = Matcher::new(&compiled, target).for_each(&mut |b| {
        out.push(compiled.to_substitution(b));
        ControlFlow::Continue(())
    });
    out
}

pub fn first_homomorphism(pattern: &[Atom], target: &Instance, mode: MatchMode) -> Option<Substitution> {
    let compiled = Pattern::compile(pattern, target, mode == MatchMode::NullsAlsoFree, false, &[]);
    let mut out = None;
    let _ = Matcher::new(&compiled, target).for_each(&mut |b| {
        out = Some(compiled.to_substitution(b));
        ControlFlow::Break(())
    });
    out
}

/// True iff some subset of `target` is the image of `facts` under a mapping that fixes
/// constants (and frozen nulls) and sends the remaining nulls bijectively to nulls.
pub fn exists_isomorphic_embedding(facts: &[Fact], target: &Instance) -> bool {
    let atoms: Vec<Atom> = facts.iter().map(Fact::to_atom).collect();
    atoms_embed_isomorphically(&atoms, target)
}

/// Variant of [`exists_isomorphic_embedding`] where variables stand for fresh nulls.
pub(crate) fn atoms_embed_isomorphically(atoms: &[Atom], target: &Instance) -> bool {
    let compiled = Pattern::compile(atoms, target, true, true, &[]);
    Matcher::new(&compiled, target).exists()
}

/// True iff the atoms (variables and unfrozen nulls free) map homomorphically into `target`.
pub(crate) fn atoms_map_homomorphically(atoms: &[Atom], target: &Instance) -> bool {
    let compiled = Pattern::compile(atoms, target, true, false, &[]);
    Matcher::new(&compiled, target).exists()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fact, NullId};

    fn nu(i: u32) -> Value {
        Value::Null(NullId::new(0, i))
    }

    fn null_term(i: u32) -> Term {
        Term::Null(NullId::new(0, i))
    }

    #[test]
    fn null_maps_to_constant_in_nulls_also_free_mode() {
        let target = Instance::from_facts([Fact::constants("q", &["a", "b"])]);
        let pattern = [Atom::new("q", vec![Term::constant("a"), null_term(9)])];
        let homs = find_homomorphisms(&pattern, &target, MatchMode::NullsAlsoFree);
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].get(&null_term(9)), Some(Value::constant("b")));
        assert!(find_homomorphisms(&pattern, &target, MatchMode::VariablesFree).is_empty());
    }

    #[test]
    fn repeated_variable_is_an_equality_constraint() {
        let target = Instance::from_facts([Fact::constants("p", &["c", "c"]), Fact::constants("p", &["c", "d"])]);
        let pattern = [Atom::new("p", vec![Term::var("X"), Term::var("X")])];
        let homs = find_homomorphisms(&pattern, &target, MatchMode::VariablesFree);
        assert_eq!(homs, vec![Substitution::new().with("X", Value::constant("c"))]);
    }

    #[test]
    fn frozen_nulls_are_rigid() {
        let mut target = Instance::from_facts([Fact::constants("p", &["c"])]);
        let n = target.fresh_null();
        target.freeze();
        let pattern = [Atom::new("p", vec![Term::Null(n)])];
        assert!(find_homomorphisms(&pattern, &target, MatchMode::NullsAlsoFree).is_empty());
    }

    #[test]
    fn frozen_instance_blocks_constant_patterns_but_not_fresh_nulls() {
        let target = Instance::from_facts([Fact::new("p", vec![nu(1), nu(2)])]).freeze_nulls();
        let fresh = |i| Term::Null(NullId::new(1, i));
        let ok = [Atom::new("p", vec![fresh(3), fresh(4)])];
        assert_eq!(find_homomorphisms(&ok, &target, MatchMode::NullsAlsoFree).len(), 1);
        let bad = [Atom::new("p", vec![Term::constant("c"), fresh(4)])];
        assert!(find_homomorphisms(&bad, &target, MatchMode::NullsAlsoFree).is_empty());
    }

    #[test]
    fn join_enumeration_is_complete() {
        let target = Instance::from_facts([
            Fact::constants("e", &["a", "b"]),
            Fact::constants("e", &["b", "c"]),
            Fact::constants("e", &["b", "d"]),
            Fact::constants("e", &["c", "a"]),
        ]);
        let pattern = [
            Atom::new("e", vec![Term::var("X"), Term::var("Y")]),
            Atom::new("e", vec![Term::var("Y"), Term::var("Z")]),
        ];
        let mut paths: Vec<String> =
            find_homomorphisms(&pattern, &target, MatchMode::VariablesFree).iter().map(|s| s.to_string()).collect();
        paths.sort();
        assert_eq!(paths.len(), 4);
        assert_eq!(paths[0], "{X->a, Y->b, Z->c}");
    }

    #[test]
    fn missing_predicate_yields_nothing() {
        let target = Instance::new();
        let pattern = [Atom::new("p", vec![Term::var("X")])];
        assert!(first_homomorphism(&pattern, &target, MatchMode::VariablesFree).is_none());
    }

    #[test]
    fn isomorphic_embedding_cases() {
        let fresh = Value::Null(NullId::new(0, 100));
        let constant_target = Instance::from_facts([Fact::constants("q", &["a", "b"])]);
        assert!(!exists_isomorphic_embedding(&[Fact::new("q", vec![Value::constant("a"), fresh])], &constant_target));
        let null_target = Instance::from_facts([Fact::new("q", vec![Value::constant("a"), nu(1)])]);
        assert!(exists_isomorphic_embedding(&[Fact::new("q", vec![Value::constant("a"), fresh])], &null_target));
        let distinct = Instance::from_facts([Fact::new("r", vec![nu(1), nu(2)])]);
        assert!(!exists_isomorphic_embedding(&[Fact::new("r", vec![fresh, fresh])], &distinct));
    }

    #[test]
    fn isomorphic_embedding_is_injective_across_atoms() {
        let target = Instance::from_facts([Fact::new("p", vec![nu(1)]), Fact::new("q", vec![nu(1)])]);
        let two = [
            Fact::new("p", vec![Value::Null(NullId::new(0, 10))]),
            Fact::new("q", vec![Value::Null(NullId::new(0, 11))]),
        ];
        assert!(!exists_isomorphic_embedding(&two, &target));
        let shared = [
            Fact::new("p", vec![Value::Null(NullId::new(0, 10))]),
            Fact::new("q", vec![Value::Null(NullId::new(0, 10))]),
        ];
        assert!(exists_isomorphic_embedding(&shared, &target));
    }
}
