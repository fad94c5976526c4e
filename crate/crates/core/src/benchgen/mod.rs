//! Synthetic benchmark scenarios and a timing harness.
//!
//! Two scenario families are generated from a seed: a company-control network with a
//! recursive "person of significant control" rule set, and a small schema-mapping
//! task in the style of data-integration benchmarks. Both rule sets are synthetic and
//! protected by construction; the generator re-checks this on every call.

mod doctors;
mod psc;
mod run;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write as _;
use std::path::Path;

pub use doctors::{doctors_rules, generate_doctors_like};
pub use psc::{generate_psc, psc_query, psc_rules};
pub use run::{run_bench, write_results_csv, write_results_json, BenchResult};

use crate::analysis::classify;
use crate::model::{Fact, Program, Symbol};
use crate::parser::{print_program, write_facts_csv};
use crate::query::Query;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("generated program for {0} is not protected")]
    GeneratorConstraintViolation(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Psc { persons: usize, companies: usize },
    DoctorsLike { patients: usize, doctors: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub seed: u64,
    /// Edge density in (0, 1].
    pub density: f64,
}

impl ScenarioSpec {
    pub fn psc(persons: usize, companies: usize) -> Self {
        ScenarioSpec { scenario: Scenario::Psc { persons, companies }, seed: 0, density: 0.5 }
    }

    pub fn doctors_like(patients: usize, doctors: usize) -> Self {
        ScenarioSpec { scenario: Scenario::DoctorsLike { patients, doctors }, seed: 0, density: 0.5 }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.scenario {
            Scenario::Psc { .. } => "psc",
            Scenario::DoctorsLike { .. } => "doctors-like",
        }
    }

    /// The headline entity count: persons for psc, patients for doctors-like.
    pub fn scale(&self) -> usize {
        match self.scenario {
            Scenario::Psc { persons, .. } => persons,
            Scenario::DoctorsLike { patients, .. } => patients,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let (a, b) = match self.scenario {
            Scenario::Psc { persons, companies } => (persons, companies),
            Scenario::DoctorsLike { patients, doctors } => (patients, doctors),
        };
        if a == 0 || b == 0 {
            return Err(BenchError::InvalidSpec("entity counts must be at least 1".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(BenchError::InvalidSpec(format!("density {} is outside (0, 1]", self.density)));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<GeneratedScenario, BenchError> {
        match self.scenario {
            Scenario::Psc { .. } => generate_psc(self),
            Scenario::DoctorsLike { .. } => generate_doctors_like(self),
        }
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scenario {
            Scenario::Psc { persons, companies } => write!(f, "psc(persons={persons}, companies={companies}")?,
            Scenario::DoctorsLike { patients, doctors } => {
                write!(f, "doctors-like(patients={patients}, doctors={doctors}")?
            }
        }
        write!(f, ", seed={}, density={})", self.seed, self.density)
    }
}

/// Rules, per-predicate database facts and named queries of one scenario.
#[derive(Clone, Debug)]
pub struct GeneratedScenario {
    pub rules: Program,
    pub facts: BTreeMap<Symbol, Vec<Fact>>,
    pub queries: Vec<(String, Query)>,
}

impl GeneratedScenario {
    pub fn fact_count(&self) -> usize {
        self.facts.values().map(Vec::len).sum()
    }

    /// The rules together with all database facts.
    pub fn program(&self) -> Program {
        let mut p = self.rules.clone();
        p.add_facts(self.facts.values().flatten().cloned()).expect("generated facts follow the schema");
        p
    }

    /// Writes `program.dlgx`, one `<predicate>.csv` per database predicate and
    /// `queries/<name>.dlgq`.
    pub fn write_to(&self, dir: &Path) -> Result<(), BenchError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| BenchError::Io { path, source }
        };
        std::fs::create_dir_all(dir.join("queries")).map_err(io(dir))?;
        let program_path = dir.join("program.dlgx");
        std::fs::write(&program_path, print_program(&self.rules)).map_err(io(&program_path))?;
        for (pred, facts) in &self.facts {
            let path = dir.join(format!("{pred}.csv"));
            let file = std::fs::File::create(&path).map_err(io(&path))?;
            let mut w = std::io::BufWriter::new(file);
            write_facts_csv(facts, &mut w).map_err(|e| io(&path)(std::io::Error::other(e)))?;
            w.flush().map_err(io(&path))?;
        }
        for (name, q) in &self.queries {
            let path = dir.join("queries").join(format!("{name}.dlgq"));
            std::fs::write(&path, format!("{q}\n")).map_err(io(&path))?;
        }
        Ok(())
    }
}

fn ensure_protected(spec: &ScenarioSpec, rules: &Program) -> Result<(), BenchError> {
    match classify(rules) {
        Ok(v) if v.protected => Ok(()),
        _ => Err(BenchError::GeneratorConstraintViolation(spec.to_string())),
    }
}
