use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::model::{Atom, ExistentialVarId, Position, Program, Rule, Symbol};

/// Positions that may carry a null during the chase.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct AffectedSet(BTreeSet<Position>);

impl AffectedSet {
    pub fn contains(&self, pos: &Position) -> bool {
        self.0.contains(pos)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Position> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Position> for AffectedSet {
    fn from_iter<I: IntoIterator<Item = Position>>(iter: I) -> Self {
        AffectedSet(iter.into_iter().collect())
    }
}

/// For every invaded position, the existential variables invading it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvasionMap(BTreeMap<Position, BTreeSet<ExistentialVarId>>);

impl InvasionMap {
    pub fn invaders(&self, pos: &Position) -> Option<&BTreeSet<ExistentialVarId>> {
        self.0.get(pos)
    }

    pub fn is_invaded_by(&self, pos: &Position, y: &ExistentialVarId) -> bool {
        self.0.get(pos).is_some_and(|s| s.contains(y))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, &BTreeSet<ExistentialVarId>)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for InvasionMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (pos, ys) in &self.0 {
            map.serialize_entry(&pos.to_string(), ys)?;
        }
        map.end()
    }
}

/// Body positions at which `var` occurs, in order of occurrence.
pub fn body_occurrences(rule: &Rule, var: Symbol) -> Vec<Position> {
    occurrences(&rule.body, var)
}

fn occurrences(atoms: &[Atom], var: Symbol) -> Vec<Position> {
    atoms.iter().flat_map(|a| a.positions()).filter(|(_, t)| t.as_var() == Some(var)).map(|(p, _)| p).collect()
}

/// Least fixpoint of: a head position holding an existential variable is affected; a
/// head position holding a universal variable whose body occurrences are all affected
/// is affected.
pub fn compute_affected(program: &Program) -> AffectedSet {
    let mut affected = BTreeSet::new();
    loop {
        let before = affected.len();
        for rule in program.rules() {
            for atom in &rule.head {
                for (pos, term) in atom.positions() {
                    let Some(v) = term.as_var() else { continue };
                    let hit = rule.existentials().contains(&v)
                        || body_occurrences(rule, v).iter().all(|p| affected.contains(p));
                    if hit {
                        affected.insert(pos);
                    }
                }
            }
        }
        if affected.len() == before {
            return AffectedSet(affected);
        }
    }
}

/// Least fixpoint of invasion, per existential variable. A head position is invaded by
/// `y` if it holds `y`, or holds a universal variable all of whose body occurrences are
/// invaded by `y`. Each head atom of a rule is treated separately.
pub fn compute_invaded(program: &Program) -> InvasionMap {
    let mut map: BTreeMap<Position, BTreeSet<ExistentialVarId>> = BTreeMap::new();
    loop {
        let mut changed = false;
        for rule in program.rules() {
            for atom in &rule.head {
                for (pos, term) in atom.positions() {
                    let Some(v) = term.as_var() else { continue };
                    let invaders: BTreeSet<ExistentialVarId> = if rule.existentials().contains(&v) {
                        BTreeSet::from([ExistentialVarId { rule: rule.id, var: v }])
                    } else {
                        common_invaders(&map, &body_occurrences(rule, v))
                    };
                    if invaders.is_empty() {
                        continue;
                    }
                    let entry = map.entry(pos).or_default();
                    for y in invaders {
                        changed |= entry.insert(y);
                    }
                }
            }
        }
        if !changed {
            return InvasionMap(map);
        }
    }
}

/// Existential variables invading every one of `positions`.
pub(crate) fn common_invaders(
    map: &BTreeMap<Position, BTreeSet<ExistentialVarId>>,
    positions: &[Position],
) -> BTreeSet<ExistentialVarId> {
    let mut iter = positions.iter();
    let Some(first) = iter.next() else {
        return BTreeSet::new();
    };
    let mut acc = map.get(first).cloned().unwrap_or_default();
    for p in iter {
        if acc.is_empty() {
            break;
        }
        match map.get(p) {
            Some(s) => acc.retain(|y| s.contains(y)),
            None => acc.clear(),
        }
    }
    acc
}

impl InvasionMap {
    pub(crate) fn raw(&self) -> &BTreeMap<Position, BTreeSet<ExistentialVarId>> {
        &self.0
    }
}
