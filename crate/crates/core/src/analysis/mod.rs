//! Static analysis of existential rule sets.
//!
//! Affected and invaded positions are computed as least fixpoints over the whole
//! program. Every body variable of every rule is then classified as harmless,
//! protected-harmful or attacked-harmful, and the classification feeds the three
//! fragment checks:
//!
//! * shy: S1 (join variables are not attacked) and S2 (head variables in different
//!   body atoms do not share an attacker);
//! * warded: W1 (one body atom, the ward, holds every dangerous variable) and W2 (the
//!   ward shares only harmless variables with the rest of the body);
//! * protected: P1 (no attacked harmful join) and P2 (warded).
//!
//! The protected verdict is computed on its own and then compared with
//! `shy && warded`; a mismatch is reported as [`AnalysisError::InternalInconsistency`].

mod fragments;
pub mod generate;
mod positions;

use std::fmt::Write as _;

use serde::Serialize;

pub use fragments::{
    check_protected, check_shy, check_warded, classify_variables, Condition, RuleClassification, VarClass, VarInfo,
    VariableClassification, Verdict, Violation,
};
pub use positions::{body_occurrences, compute_affected, compute_invaded, AffectedSet, InvasionMap};

use crate::model::Program;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("internal inconsistency: protected={protected} but shy={shy} and warded={warded}")]
    InternalInconsistency { shy: bool, warded: bool, protected: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FragmentVerdicts {
    pub shy: bool,
    pub warded: bool,
    pub protected: bool,
}

impl FragmentVerdicts {
    pub fn class_name(&self) -> &'static str {
        match (self.shy, self.warded) {
            (true, true) => "protected",
            (true, false) => "shy-only",
            (false, true) => "warded-only",
            (false, false) => "neither",
        }
    }

    pub fn holds(&self, fragment: Fragment) -> bool {
        match fragment {
            Fragment::Shy => self.shy,
            Fragment::Warded => self.warded,
            Fragment::Protected => self.protected,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    Shy,
    Warded,
    Protected,
}

impl std::str::FromStr for Fragment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shy" => Ok(Fragment::Shy),
            "warded" => Ok(Fragment::Warded),
            "protected" => Ok(Fragment::Protected),
            other => Err(format!("unknown fragment `{other}` (expected shy, warded or protected)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub affected: AffectedSet,
    pub invaded: InvasionMap,
    pub rules: VariableClassification,
    pub verdicts: FragmentVerdicts,
    pub violations: Vec<Violation>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("analysis report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let v = &self.verdicts;
        let _ = writeln!(out, "shy: {}\nwarded: {}\nprotected: {}", v.shy, v.warded, v.protected);
        let affected: Vec<String> = self.affected.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "affected: {}", affected.join(" "));
        for (pos, ys) in self.invaded.iter() {
            let ys: Vec<String> = ys.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "invaded {pos}: {}", ys.join(" "));
        }
        for rc in &self.rules.rules {
            for var in &rc.vars {
                let _ = write!(out, "{} {}: {}", rc.id, var.name, var.class);
                if !var.attackers.is_empty() {
                    let ys: Vec<String> = var.attackers.iter().map(ToString::to_string).collect();
                    let _ = write!(out, " by {}", ys.join(" "));
                }
                if var.dangerous {
                    out.push_str(" dangerous");
                }
                out.push('\n');
            }
        }
        for violation in &self.violations {
            let _ = writeln!(out, "violation {} {}: {}", violation.rule, violation.condition, violation.explanation);
        }
        out
    }
}

/// Runs the full analysis. Violations are listed shy first, then warded, then protected.
pub fn analyze(program: &Program) -> Result<AnalysisReport, AnalysisError> {
    let affected = compute_affected(program);
    let invaded = compute_invaded(program);
    let rules = classify_variables(program, &affected, &invaded);
    let shy = check_shy(program, &rules);
    let warded = check_warded(program, &rules);
    let protected = check_protected(program, &rules);
    let verdicts = FragmentVerdicts { shy: shy.holds, warded: warded.holds, protected: protected.holds };
    if verdicts.protected != (verdicts.shy && verdicts.warded) {
        return Err(AnalysisError::InternalInconsistency {
            shy: verdicts.shy,
            warded: verdicts.warded,
            protected: verdicts.protected,
        });
    }
    let violations = [shy.violations, warded.violations, protected.violations].concat();
    Ok(AnalysisReport { affected, invaded, rules, verdicts, violations })
}

/// Shorthand for the three verdicts.
pub fn classify(program: &Program) -> Result<FragmentVerdicts, AnalysisError> {
    analyze(program).map(|r| r.verdicts)
}
