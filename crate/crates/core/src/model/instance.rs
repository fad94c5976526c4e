use std::collections::{BTreeSet, HashMap};

use indexmap::IndexSet;

use super::atom::Fact;
use super::term::{NullId, Symbol, Value};

/// All tuples of one predicate, in insertion order, with a per-column hash index.
#[derive(Clone, Debug)]
pub struct Relation {
    arity: usize,
    tuples: IndexSet<Box<[Value]>>,
    columns: Vec<HashMap<Value, Vec<u32>>>,
}

impl Relation {
    fn new(arity: usize) -> Self {
        Relation { arity, tuples: IndexSet::new(), columns: vec![HashMap::new(); arity] }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, id: u32) -> &[Value] {
        &self.tuples[id as usize]
    }

    pub fn contains(&self, args: &[Value]) -> bool {
        self.tuples.contains(args)
    }

    /// Ids of tuples whose `column` (0-based) holds `value`, ascending.
    pub fn lookup(&self, column: usize, value: &Value) -> &[u32] {
        self.columns[column].get(value).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Value]> {
        self.tuples.iter().map(|t| &**t)
    }

    fn insert(&mut self, args: Box<[Value]>) -> bool {
        let (id, added) = self.tuples.insert_full(args);
        if added {
            let tuple = &self.tuples[id];
            for (col, v) in tuple.iter().enumerate() {
                self.columns[col].entry(*v).or_default().push(id as u32);
            }
        }
        added
    }
}

/// A set of facts over constants and labelled nulls.
///
/// Nulls whose epoch is below the instance epoch are frozen: homomorphism search
/// treats them as constants. Freezing only bumps the epoch, facts are untouched.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    relations: HashMap<Symbol, Relation>,
    nulls: BTreeSet<NullId>,
    epoch: u32,
    next_null: u32,
    len: usize,
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_facts(facts: impl IntoIterator<Item = Fact>) -> Self {
        let mut instance = Instance::new();
        for fact in facts {
            instance.insert(fact);
        }
        instance
    }

    /// Set semantics: returns `false` when the fact was already present.
    ///
    /// Panics if the fact's arity disagrees with facts already stored for its predicate.
    pub fn insert(&mut self, fact: Fact) -> bool {
        self.insert_args(fact.predicate, fact.args.into_boxed_slice())
    }

    pub(crate) fn insert_args(&mut self, predicate: Symbol, args: Box<[Value]>) -> bool {
        let relation = self.relations.entry(predicate).or_insert_with(|| Relation::new(args.len()));
        assert_eq!(relation.arity, args.len(), "arity mismatch for predicate {predicate}");
        for n in args.iter().filter_map(Value::as_null) {
            self.nulls.insert(n);
            self.next_null = self.next_null.max(n.ordinal);
        }
        let added = relation.insert(args);
        if added {
            self.len += 1;
        }
        added
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.relations.get(&fact.predicate).is_some_and(|r| r.contains(&fact.args))
    }

    pub fn relation(&self, predicate: Symbol) -> Option<&Relation> {
        self.relations.get(&predicate)
    }

    /// Number of tuples stored for `predicate`, 0 when unknown.
    pub fn relation_len(&self, predicate: Symbol) -> usize {
        self.relations.get(&predicate).map_or(0, Relation::len)
    }

    pub fn predicates(&self) -> BTreeSet<Symbol> {
        self.relations.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Facts grouped by predicate (sorted by name), insertion order within a predicate.
    pub fn facts(&self) -> Vec<Fact> {
        let mut preds: Vec<_> = self.relations.keys().copied().collect();
        preds.sort();
        preds.into_iter().flat_map(|p| self.relations[&p].iter().map(move |args| Fact::new(p, args.to_vec()))).collect()
    }

    pub fn fact_set(&self) -> BTreeSet<Fact> {
        self.facts().into_iter().collect()
    }

    /// Every null occurring in some fact.
    pub fn nulls(&self) -> &BTreeSet<NullId> {
        &self.nulls
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn is_frozen(&self, null: NullId) -> bool {
        null.epoch < self.epoch
    }

    /// Allocates a null label not yet used in this instance, tagged with the current epoch.
    pub fn fresh_null(&mut self) -> NullId {
        self.next_null += 1;
        NullId::new(self.epoch, self.next_null)
    }

    /// Marks every existing null as frozen.
    pub fn freeze(&mut self) {
        self.epoch += 1;
    }

    pub fn freeze_nulls(&self) -> Instance {
        let mut frozen = self.clone();
        frozen.freeze();
        frozen
    }

    /// One fact per line, `pred(t1,...,tn).`, sorted lexicographically.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.facts().iter().map(|f| format!("{f}.")).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    /// Per-predicate tuple counts, used for semi-naive delta tracking.
    pub(crate) fn watermark(&self) -> HashMap<Symbol, usize> {
        self.relations.iter().map(|(p, r)| (*p, r.len())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_semantics() {
        let mut i = Instance::new();
        assert!(i.insert(Fact::constants("p", &["a"])));
        assert!(!i.insert(Fact::constants("p", &["a"])));
        assert_eq!(i.len(), 1);
    }

    #[test]
    fn registry_tracks_nulls() {
        let n = NullId::new(0, 7);
        let i = Instance::from_facts([Fact::new("p", vec![Value::constant("a"), Value::Null(n)])]);
        assert!(i.nulls().contains(&n));
        let mut j = i.clone();
        assert!(j.fresh_null().ordinal > 7);
    }

    #[test]
    fn freeze_keeps_facts() {
        let mut i = Instance::new();
        let n = i.fresh_null();
        i.insert(Fact::new("p", vec![Value::constant("a"), Value::Null(n)]));
        let frozen = i.freeze_nulls();
        assert_eq!(frozen.fact_set(), i.fact_set());
        assert!(frozen.is_frozen(n));
        assert!(!i.is_frozen(n));
        assert_eq!(Instance::new().freeze_nulls().len(), 0);
    }

    #[test]
    fn dump_is_sorted() {
        let i = Instance::from_facts([Fact::constants("q", &["b"]), Fact::constants("p", &["z"])]);
        assert_eq!(i.dump(), "p(z).\nq(b).\n");
    }

    #[test]
    fn column_lookup() {
        let i = Instance::from_facts([
            Fact::constants("e", &["a", "b"]),
            Fact::constants("e", &["b", "c"]),
            Fact::constants("e", &["a", "c"]),
        ]);
        let r = i.relation(Symbol::new("e")).unwrap();
        assert_eq!(r.lookup(0, &Value::constant("a")), &[0, 2]);
        assert_eq!(r.lookup(1, &Value::constant("c")), &[1, 2]);
        assert!(r.lookup(1, &Value::constant("a")).is_empty());
    }
}
