use std::collections::{HashMap, HashSet};
use std::ops::{ControlFlow, Range};

use super::homomorphism::{atoms_embed_isomorphically, atoms_map_homomorphically, Matcher, Pattern};
use super::{
    termination, BlockReason, ChaseConfig, ChaseError, ChaseRun, ChaseStatus, ChaseVariant, TraceRecord, Trigger,
};
use crate::model::{Atom, Fact, Instance, Program, Rule, RuleId, Symbol, Term, Value};

/// Body pattern of one rule with slots aligned to the sorted body variables.
pub(crate) struct CompiledRule<'p> {
    pub rule: &'p Rule,
    pub vars: Vec<Symbol>,
    pub body: Pattern,
}

impl<'p> CompiledRule<'p> {
    pub fn new(rule: &'p Rule) -> Self {
        let vars: Vec<Symbol> = rule.body_vars().iter().copied().collect();
        let order: Vec<Term> = vars.iter().map(|v| Term::Var(*v)).collect();
        let body = Pattern::compile(&rule.body, &Instance::new(), false, false, &order);
        CompiledRule { rule, vars, body }
    }

    fn value_of(&self, values: &[Value], var: Symbol) -> Option<Value> {
        self.vars.iter().position(|v| *v == var).map(|i| values[i])
    }

    /// The head with frontier variables replaced; existential variables stay variables
    /// and act as fresh nulls in the firing-condition checks.
    pub fn head_pattern(&self, values: &[Value]) -> Vec<Atom> {
        self.rule
            .head
            .iter()
            .map(|a| {
                Atom::new(
                    a.predicate,
                    a.terms
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) => self.value_of(values, *v).map_or(*t, Term::from),
                            other => *other,
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Instantiates the head, drawing one fresh null per existential variable.
    pub fn instantiate_head(&self, values: &[Value], instance: &mut Instance) -> Vec<Fact> {
        let fresh: HashMap<Symbol, Value> =
            self.rule.existentials().iter().map(|v| (*v, Value::Null(instance.fresh_null()))).collect();
        self.rule
            .head
            .iter()
            .map(|a| {
                Fact::new(
                    a.predicate,
                    a.terms
                        .iter()
                        .map(|t| match t {
                            Term::Var(v) => self
                                .value_of(values, *v)
                                .or_else(|| fresh.get(v).copied())
                                .expect("head variable is frontier or existential"),
                            other => other.as_value().expect("rules carry no nulls"),
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn substitution(&self, values: &[Value]) -> crate::model::Substitution {
        self.vars.iter().zip(values).map(|(v, x)| (Term::Var(*v), *x)).collect()
    }

    fn collect_into(&self, matcher_out: &mut Vec<Box<[Value]>>, bindings: &[Option<Value>]) {
        matcher_out.push(
            bindings[..self.vars.len()].iter().map(|b| b.expect("every body variable is bound by a match")).collect(),
        );
    }

    pub fn matches_full(&self, instance: &Instance) -> Vec<Box<[Value]>> {
        let mut out = Vec::new();
        let _ = Matcher::new(&self.body, instance).for_each(&mut |b| {
            self.collect_into(&mut out, b);
            ControlFlow::Continue(())
        });
        out
    }

    /// Matches that use at least one tuple from `delta` (per-predicate id ranges).
    pub fn matches_delta(&self, instance: &Instance, delta: &HashMap<Symbol, Range<usize>>) -> Vec<Box<[Value]>> {
        let mut out = Vec::new();
        for (i, atom) in self.body.atoms.iter().enumerate() {
            let Some(range) = delta.get(&atom.predicate) else {
                continue;
            };
            let Some(rel) = instance.relation(atom.predicate) else {
                continue;
            };
            let mut matcher = Matcher::new(&self.body, instance);
            for id in range.clone() {
                let _ = matcher.for_each_seeded(i, rel.tuple(id as u32), &mut |b| {
                    self.collect_into(&mut out, b);
                    ControlFlow::Continue(())
                });
            }
        }
        out
    }
}

enum Round {
    Fixpoint { added: bool },
    StepLimit,
}

pub(crate) struct Engine<'p> {
    rules: Vec<CompiledRule<'p>>,
    variant: ChaseVariant,
    max_steps: Option<u64>,
    pub instance: Instance,
    steps: u64,
    level: u32,
    fired: HashSet<(usize, Box<[Value]>)>,
    considered: HashSet<(usize, Box<[Value]>)>,
    trace: Option<Vec<TraceRecord>>,
}

impl<'p> Engine<'p> {
    pub fn new(program: &'p Program, config: &ChaseConfig) -> Self {
        Engine {
            rules: program.rules().iter().map(CompiledRule::new).collect(),
            variant: config.variant,
            max_steps: config.max_steps,
            instance: Instance::from_facts(program.facts().iter().cloned()),
            steps: 0,
            level: 0,
            fired: HashSet::new(),
            considered: HashSet::new(),
            trace: config.record_trace.then(Vec::new),
        }
    }

    fn enumerate(&mut self, delta: Option<&HashMap<Symbol, Range<usize>>>) -> Vec<(usize, Box<[Value]>)> {
        let mut triggers = Vec::new();
        for (r, rule) in self.rules.iter().enumerate() {
            let matches = match delta {
                None => rule.matches_full(&self.instance),
                Some(d) => rule.matches_delta(&self.instance, d),
            };
            for values in matches {
                if self.considered.insert((r, values.clone())) {
                    triggers.push((r, values));
                }
            }
        }
        triggers.sort();
        triggers
    }

    fn blocked(&self, rule: usize, values: &[Value]) -> Option<BlockReason> {
        if self.fired.contains(&(rule, values.into())) {
            return Some(BlockReason::DuplicateTrigger);
        }
        let compiled = &self.rules[rule];
        match self.variant {
            ChaseVariant::Oblivious => None,
            ChaseVariant::Parsimonious | ChaseVariant::ParsimoniousResumption { .. } => {
                let head = compiled.head_pattern(values);
                atoms_map_homomorphically(&head, &self.instance).then_some(BlockReason::Homomorphism)
            }
            ChaseVariant::Isomorphic => {
                let head = compiled.head_pattern(values);
                atoms_embed_isomorphically(&head, &self.instance).then_some(BlockReason::Isomorphism)
            }
        }
    }

    fn record(&mut self, rule: usize, values: &[Value], block: Option<BlockReason>) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceRecord {
                rule: RuleId(rule),
                subst: self.rules[rule].substitution(values),
                fired: block.is_none(),
                block_reason: block,
                level: self.level,
            });
        }
    }

    fn fire(&mut self, rule: usize, values: Box<[Value]>) -> Vec<Fact> {
        let facts = self.rules[rule].instantiate_head(&values, &mut self.instance);
        let mut added = Vec::new();
        for f in facts {
            if self.instance.insert(f.clone()) {
                added.push(f);
            }
        }
        self.steps += 1;
        self.fired.insert((rule, values));
        added
    }

    /// Runs level by level until no trigger passes the firing condition.
    fn saturate(&mut self) -> Round {
        self.considered.clear();
        let start_len = self.instance.len();
        let mut delta: Option<HashMap<Symbol, Range<usize>>> = None;
        loop {
            let mark = self.instance.watermark();
            let triggers = self.enumerate(delta.as_ref());
            if triggers.is_empty() {
                break;
            }
            for (rule, values) in triggers {
                let block = self.blocked(rule, &values);
                if block.is_none() && self.max_steps.is_some_and(|m| self.steps >= m) {
                    return Round::StepLimit;
                }
                self.record(rule, &values, block);
                if block.is_none() {
                    self.fire(rule, values);
                }
            }
            let next: HashMap<Symbol, Range<usize>> = self
                .instance
                .watermark()
                .into_iter()
                .filter_map(|(p, len)| {
                    let from = mark.get(&p).copied().unwrap_or(0);
                    (len > from).then_some((p, from..len))
                })
                .collect();
            self.level += 1;
            if next.is_empty() {
                break;
            }
            delta = Some(next);
        }
        Round::Fixpoint { added: self.instance.len() > start_len }
    }

    pub fn run(mut self, observer: &mut dyn FnMut(&Instance) -> ControlFlow<()>) -> ChaseRun {
        let resumptions = match self.variant {
            ChaseVariant::ParsimoniousResumption { resumptions } => resumptions,
            _ => 0,
        };
        let mut used = 0;
        let mut status = ChaseStatus::Fixpoint;
        match self.saturate() {
            Round::StepLimit => status = ChaseStatus::StepLimitReached,
            Round::Fixpoint { .. } => {
                let mut flow = observer(&self.instance);
                while flow.is_continue() && used < resumptions && !self.instance.nulls().is_empty() {
                    self.instance.freeze();
                    used += 1;
                    match self.saturate() {
                        Round::StepLimit => {
                            status = ChaseStatus::StepLimitReached;
                            break;
                        }
                        Round::Fixpoint { added } => {
                            flow = observer(&self.instance);
                            if !added {
                                break;
                            }
                        }
                    }
                }
            }
        }
        ChaseRun {
            variant: self.variant,
            max_steps: self.max_steps,
            instance: self.instance,
            status,
            steps: self.steps,
            levels: self.level,
            resumptions_used: used,
            trace: self.trace,
        }
    }
}

pub fn run_chase(program: &Program, config: &ChaseConfig) -> Result<ChaseRun, ChaseError> {
    run_chase_observed(program, config, |_| ControlFlow::Continue(()))
}

/// Runs the chase, calling `observer` after every epoch fixpoint (the plain fixpoint,
/// then once per resumption). Returning `Break` stops the run at that epoch.
pub fn run_chase_observed(
    program: &Program,
    config: &ChaseConfig,
    mut observer: impl FnMut(&Instance) -> ControlFlow<()>,
) -> Result<ChaseRun, ChaseError> {
    if config.variant == ChaseVariant::Oblivious && config.max_steps.is_none() {
        let risky = termination::recursive_existential_rules(program);
        if !risky.is_empty() {
            return Err(ChaseError::NonTerminationRisk { rules: risky });
        }
    }
    Ok(Engine::new(program, config).run(&mut observer))
}

/// Every trigger of `program` on `instance`: by rule id, then by substitution.
pub fn enumerate_triggers(program: &Program, instance: &Instance) -> Vec<Trigger> {
    let mut out = Vec::new();
    for rule in program.rules() {
        let compiled = CompiledRule::new(rule);
        let mut matches = compiled.matches_full(instance);
        matches.sort();
        out.extend(matches.iter().map(|values| Trigger { rule: rule.id, subst: compiled.substitution(values) }));
    }
    out
}

/// Fires `trigger` unconditionally and returns the facts it added (duplicates absorbed).
pub fn fire_trigger(program: &Program, trigger: &Trigger, instance: &mut Instance) -> Result<Vec<Fact>, ChaseError> {
    let rule = program.rule(trigger.rule);
    let compiled = CompiledRule::new(rule);
    let values = compiled
        .vars
        .iter()
        .map(|v| trigger.subst.get_var(*v).ok_or(ChaseError::NotApplicable(trigger.rule)))
        .collect::<Result<Vec<_>, _>>()?;
    for atom in &rule.body {
        let fact = trigger.subst.apply_fact(atom).map_err(|_| ChaseError::NotApplicable(trigger.rule))?;
        if !instance.contains(&fact) {
            return Err(ChaseError::NotApplicable(trigger.rule));
        }
    }
    let facts = compiled.instantiate_head(&values, instance);
    Ok(facts.into_iter().filter(|f| instance.insert(f.clone())).collect())
}
