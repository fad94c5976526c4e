use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::positions::{body_occurrences, common_invaders, AffectedSet, InvasionMap};
use crate::model::{ExistentialVarId, Position, Program, Rule, RuleId, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarClass {
    Harmless,
    ProtectedHarmful,
    AttackedHarmful,
}

impl VarClass {
    pub fn is_harmful(self) -> bool {
        self != VarClass::Harmless
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VarClass::Harmless => "harmless",
            VarClass::ProtectedHarmful => "protected-harmful",
            VarClass::AttackedHarmful => "attacked-harmful",
        }
    }
}

impl fmt::Display for VarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarInfo {
    pub name: Symbol,
    #[serde(skip)]
    pub occurrences: Vec<Position>,
    /// Number of distinct body atoms the variable occurs in.
    #[serde(skip)]
    pub atoms: BTreeSet<usize>,
    pub class: VarClass,
    pub attackers: BTreeSet<ExistentialVarId>,
    pub dangerous: bool,
}

impl VarInfo {
    pub fn is_join(&self) -> bool {
        self.atoms.len() > 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleClassification {
    pub id: RuleId,
    pub vars: Vec<VarInfo>,
}

impl RuleClassification {
    pub fn var(&self, name: &str) -> Option<&VarInfo> {
        self.vars.iter().find(|v| v.name.as_str() == name)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VariableClassification {
    pub rules: Vec<RuleClassification>,
}

impl VariableClassification {
    pub fn rule(&self, id: RuleId) -> &RuleClassification {
        &self.rules[id.0]
    }
}

pub fn classify_variables(program: &Program, affected: &AffectedSet, invaded: &InvasionMap) -> VariableClassification {
    let rules = program
        .rules()
        .iter()
        .map(|rule| RuleClassification {
            id: rule.id,
            vars: rule.body_vars().iter().map(|&v| classify_var(rule, v, affected, invaded)).collect(),
        })
        .collect();
    VariableClassification { rules }
}

fn classify_var(rule: &Rule, var: Symbol, affected: &AffectedSet, invaded: &InvasionMap) -> VarInfo {
    let occurrences = body_occurrences(rule, var);
    let atoms = rule.body.iter().enumerate().filter(|(_, a)| a.variables().any(|x| x == var)).map(|(i, _)| i).collect();
    let harmful = occurrences.iter().all(|p| affected.contains(p));
    let attackers = common_invaders(invaded.raw(), &occurrences);
    let class = if !harmful {
        VarClass::Harmless
    } else if attackers.is_empty() {
        VarClass::ProtectedHarmful
    } else {
        VarClass::AttackedHarmful
    };
    VarInfo { name: var, occurrences, atoms, class, attackers, dangerous: harmful && rule.head_contains(var) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    S1,
    S2,
    W1,
    W2,
    P1,
    P2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: RuleId,
    pub condition: Condition,
    pub variables: Vec<Symbol>,
    pub positions: Vec<Position>,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Verdict { holds: violations.is_empty(), violations }
    }
}

fn positions_of<'a>(vars: impl IntoIterator<Item = &'a VarInfo>) -> Vec<Position> {
    let set: BTreeSet<Position> = vars.into_iter().flat_map(|v| v.occurrences.iter().copied()).collect();
    set.into_iter().collect()
}

fn names(vars: &[Symbol]) -> String {
    vars.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ")
}

fn fmt_attackers(ys: &BTreeSet<ExistentialVarId>) -> String {
    ys.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Join variables that are attacked. Shared by S1 and P1, which reject the same
/// variables under different names.
fn attacked_joins(rule: &RuleClassification, condition: Condition) -> Vec<Violation> {
    rule.vars
        .iter()
        .filter(|v| v.is_join() && v.class == VarClass::AttackedHarmful)
        .map(|v| Violation {
            rule: rule.id,
            condition,
            variables: vec![v.name],
            positions: v.occurrences.clone(),
            explanation: format!(
                "join variable {} occurs in {} body atoms and is attacked by {}",
                v.name,
                v.atoms.len(),
                fmt_attackers(&v.attackers)
            ),
        })
        .collect()
}

pub fn check_shy(program: &Program, classes: &VariableClassification) -> Verdict {
    let mut violations = Vec::new();
    for rc in &classes.rules {
        let rule = program.rule(rc.id);
        violations.extend(attacked_joins(rc, Condition::S1));
        let candidates: Vec<&VarInfo> =
            rc.vars.iter().filter(|v| v.class.is_harmful() && rule.head_contains(v.name)).collect();
        for (i, a) in candidates.iter().enumerate() {
            for b in &candidates[i + 1..] {
                let separate = a.atoms.iter().any(|x| b.atoms.iter().any(|y| x != y));
                if !separate {
                    continue;
                }
                let shared: BTreeSet<_> = a.attackers.intersection(&b.attackers).copied().collect();
                if shared.is_empty() {
                    continue;
                }
                violations.push(Violation {
                    rule: rc.id,
                    condition: Condition::S2,
                    variables: vec![a.name, b.name],
                    positions: positions_of([*a, *b]),
                    explanation: format!(
                        "head variables {} and {} occur in different body atoms and are both attacked by {}",
                        a.name,
                        b.name,
                        fmt_attackers(&shared)
                    ),
                });
            }
        }
    }
    Verdict::from_violations(violations)
}

pub fn check_warded(program: &Program, classes: &VariableClassification) -> Verdict {
    let mut violations = Vec::new();
    for rc in &classes.rules {
        violations.extend(ward_violations(program.rule(rc.id), rc));
    }
    Verdict::from_violations(violations)
}

fn ward_violations(rule: &Rule, rc: &RuleClassification) -> Option<Violation> {
    let dangerous: Vec<&VarInfo> = rc.vars.iter().filter(|v| v.dangerous).collect();
    if dangerous.is_empty() {
        return None;
    }
    let dangerous_names: Vec<Symbol> = dangerous.iter().map(|v| v.name).collect();
    let wards: Vec<usize> = (0..rule.body.len()).filter(|&i| dangerous.iter().all(|v| v.atoms.contains(&i))).collect();
    if wards.is_empty() {
        return Some(Violation {
            rule: rc.id,
            condition: Condition::W1,
            variables: dangerous_names.clone(),
            positions: positions_of(dangerous.iter().copied()),
            explanation: format!("no single body atom contains all dangerous variables {}", names(&dangerous_names)),
        });
    }
    let mut first_failure = None;
    for &w in &wards {
        let shared_harmful: Vec<&VarInfo> =
            rc.vars.iter().filter(|v| v.class.is_harmful() && v.atoms.contains(&w) && v.atoms.len() > 1).collect();
        if shared_harmful.is_empty() {
            return None;
        }
        first_failure.get_or_insert((w, shared_harmful));
    }
    let (w, shared) = first_failure.expect("at least one ward candidate");
    let vars: Vec<Symbol> = shared.iter().map(|v| v.name).collect();
    Some(Violation {
        rule: rc.id,
        condition: Condition::W2,
        variables: vars.clone(),
        positions: positions_of(shared.iter().copied()),
        explanation: format!("ward {} shares harmful variables {} with other body atoms", rule.body[w], names(&vars)),
    })
}

/// P1 (no attacked harmful joins) and P2 (the rule is warded), rule by rule.
pub fn check_protected(program: &Program, classes: &VariableClassification) -> Verdict {
    let mut violations = Vec::new();
    for rc in &classes.rules {
        violations.extend(attacked_joins(rc, Condition::P1));
        if let Some(w) = ward_violations(program.rule(rc.id), rc) {
            violations.push(Violation {
                condition: Condition::P2,
                explanation: format!("rule is not warded ({}: {})", w.condition, w.explanation),
                ..w
            });
        }
    }
    Verdict::from_violations(violations)
}
