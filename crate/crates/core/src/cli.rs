//! The `shyward` command line.
//!
//! Exit codes: 0 success, 1 query false or empty, 2 usage, parse or IO error,
//! 3 program outside the fragment given to `--require`, 4 oblivious chase refused
//! without `--max-steps`, 5 differential disagreement.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{analyze, generate, Fragment};
use crate::benchgen::{run_bench, write_results_csv, write_results_json, ScenarioSpec};
use crate::chase::{run_chase, ChaseConfig, ChaseError, ChaseStatus, ChaseVariant};
use crate::model::{Fact, Program, Symbol};
use crate::parser::{add_csv_facts, parse_program_file, parse_query_file, print_program, SourceError};
use crate::query::{answer_with_variant, differential_bcqa, AnswerError, DiffConfig, Fault, Query};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_NOT_IN_FRAGMENT: i32 = 3;
pub const EXIT_NON_TERMINATION: i32 = 4;
pub const EXIT_DISAGREEMENT: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "shyward", version, about = "Classify existential rule sets and answer queries with chase variants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report affected positions, variable classes and shy/warded/protected verdicts.
    Classify(ClassifyArgs),
    /// Run a chase and print the resulting instance.
    Chase(ChaseArgs),
    /// Answer a query under one chase variant.
    Query(QueryArgs),
    /// Compare query answers across chase variants.
    Diff(DiffArgs),
    /// Time chase variants on a synthetic scenario.
    Bench(BenchArgs),
    /// Write a synthetic scenario or a random program to a directory.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct ProgramArgs {
    #[arg(long)]
    program: PathBuf,
    /// Load facts for a predicate from CSV, as `pred=path`. Repeatable.
    #[arg(long = "facts", value_name = "PRED=PATH")]
    facts: Vec<String>,
    /// Skip the first row of every fact file.
    #[arg(long)]
    header: bool,
}

#[derive(Args, Debug)]
struct ChaseOpts {
    #[arg(long, default_value = "ichase")]
    variant: ChaseVariant,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Resumptions for `pchase-r`.
    #[arg(long)]
    resumptions: Option<u32>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long)]
    require: Option<Fragment>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct ChaseArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[command(flatten)]
    chase: ChaseOpts,
    /// Write the JSON-lines trigger trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[arg(long)]
    query: PathBuf,
    #[command(flatten)]
    chase: ChaseOpts,
    /// Keep only answer tuples without nulls.
    #[arg(long)]
    certain: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct DiffArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[arg(long)]
    query: PathBuf,
    /// Step limit for each chase.
    #[arg(long, default_value_t = 10_000)]
    max_steps: u64,
    #[arg(long)]
    resumptions: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioName {
    Psc,
    DoctorsLike,
    Random,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "psc")]
    scenario: ScenarioName,
    /// Persons (psc) or patients (doctors-like).
    #[arg(long, default_value_t = 1000)]
    scale: usize,
    /// Companies (psc) or doctors (doctors-like); defaults to `--scale`.
    #[arg(long)]
    secondary: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ScenarioArgs {
    fn spec(&self) -> Option<ScenarioSpec> {
        let secondary = self.secondary.unwrap_or(self.scale);
        let spec = match self.scenario {
            ScenarioName::Psc => ScenarioSpec::psc(self.scale, secondary),
            ScenarioName::DoctorsLike => ScenarioSpec::doctors_like(self.scale, secondary),
            ScenarioName::Random => return None,
        };
        Some(spec.seed(self.seed).density(self.density))
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Variants to time. Repeatable; defaults to `ichase` and `pchase-r`.
    #[arg(long)]
    variant: Vec<ChaseVariant>,
    #[arg(long)]
    resumptions: Option<u32>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long)]
    max_steps: Option<u64>,
    /// `text` prints CSV.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    out: PathBuf,
}

/// Runs the command line with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Classify(a) => cmd_classify(a, out, err),
        Command::Chase(a) => cmd_chase(a, out, err),
        Command::Query(a) => cmd_query(a, out, err),
        Command::Diff(a) => cmd_diff(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Generate(a) => cmd_generate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "{message}");
            code
        }
    }
}

struct Failure(i32, String);

fn fail(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_ERROR, format!("error: {e}"))
}

/// Syntax diagnostics already carry their own location and severity.
fn fail_source(e: SourceError) -> Failure {
    match e {
        SourceError::Syntax(_) => Failure(EXIT_ERROR, e.to_string()),
        other => fail(other),
    }
}

type CmdResult = Result<i32, Failure>;

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(fail)
}

fn load_program(args: &ProgramArgs) -> Result<Program, Failure> {
    let mut program = parse_program_file(&args.program).map_err(fail_source)?;
    for binding in &args.facts {
        let (pred, path) =
            binding.split_once('=').ok_or_else(|| fail(format!("`--facts {binding}` is not of the form pred=path")))?;
        let predicate = Symbol::new(pred);
        if program.arity(predicate).is_none() {
            return Err(fail(format!("`--facts {binding}`: predicate {pred} does not occur in the program")));
        }
        add_csv_facts(&mut program, predicate, Path::new(path), args.header).map_err(fail)?;
    }
    Ok(program)
}

fn chase_failure(e: ChaseError) -> Failure {
    match e {
        ChaseError::NonTerminationRisk { .. } => Failure(EXIT_NON_TERMINATION, format!("error: {e}")),
        other => fail(other),
    }
}

fn resolve_variant(opts: &ChaseOpts, default_resumptions: u32, err: &mut dyn Write) -> ChaseConfig {
    let variant = match opts.variant {
        ChaseVariant::ParsimoniousResumption { .. } => {
            ChaseVariant::ParsimoniousResumption { resumptions: opts.resumptions.unwrap_or(default_resumptions) }
        }
        other => {
            if opts.resumptions.is_some() {
                let _ = writeln!(err, "warning: --resumptions only applies to pchase-r");
            }
            other
        }
    };
    let mut config = ChaseConfig::new(variant);
    config.max_steps = opts.max_steps;
    config
}

fn cmd_classify(a: ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let program = parse_program_file(&a.program).map_err(fail_source)?;
    let report = analyze(&program).map_err(fail)?;
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    write_out(out, &text)?;
    match a.require {
        Some(f) if !report.verdicts.holds(f) => {
            let _ = writeln!(err, "program is not {}", format!("{f:?}").to_lowercase());
            Ok(EXIT_NOT_IN_FRAGMENT)
        }
        _ => Ok(EXIT_OK),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ChaseJson {
    variant: String,
    status: ChaseStatus,
    steps: u64,
    resumptions_used: u32,
    facts: Vec<Fact>,
}

fn cmd_chase(a: ChaseArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let program = load_program(&a.program)?;
    let mut config = resolve_variant(&a.chase, 1, err);
    config.record_trace = a.trace.is_some();
    let run = run_chase(&program, &config).map_err(chase_failure)?;
    if let Some(path) = &a.trace {
        std::fs::write(path, run.trace_jsonl()).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    }
    if run.status == ChaseStatus::StepLimitReached {
        let _ = writeln!(err, "note: step limit reached after {} steps", run.steps);
    }
    let text = match a.format {
        Format::Text => run.instance.dump(),
        Format::Json => {
            let mut facts = run.instance.facts();
            facts.sort_by_cached_key(|f| f.to_string());
            let json = ChaseJson {
                variant: run.variant.to_string(),
                status: run.status,
                steps: run.steps,
                resumptions_used: run.resumptions_used,
                facts,
            };
            let mut s = serde_json::to_string_pretty(&json).map_err(fail)?;
            s.push('\n');
            s
        }
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

fn load_query(path: &Path) -> Result<Query, Failure> {
    parse_query_file(path).map_err(fail_source)
}

fn answer_failure(e: AnswerError) -> Failure {
    match e {
        AnswerError::Chase(c) => chase_failure(c),
        other => fail(other),
    }
}

fn cmd_query(a: QueryArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let program = load_program(&a.program)?;
    let query = load_query(&a.query)?;
    let config = resolve_variant(&a.chase, query.default_resumptions(), err);
    let mut answer = answer_with_variant(&program, &query, &config).map_err(answer_failure)?;
    if a.certain {
        answer.answer = answer.answer.certain();
    }
    for w in &answer.answer.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if answer.run.status == ChaseStatus::StepLimitReached {
        let _ = writeln!(err, "note: step limit reached after {} steps", answer.run.steps);
    }
    let text = match a.format {
        Format::Json => answer.to_json(),
        Format::Text => answer_text(&answer.answer),
    };
    write_out(out, &text)?;
    Ok(if answer.answer.verdict { EXIT_OK } else { EXIT_FALSE })
}

fn answer_text(answer: &crate::query::Answer) -> String {
    match &answer.tuples {
        None => format!("{}\n", answer.verdict),
        Some(tuples) => tuples
            .iter()
            .map(|t| {
                let cells: Vec<String> = t.iter().map(ToString::to_string).collect();
                format!("{}\n", cells.join(","))
            })
            .collect(),
    }
}

fn cmd_diff(a: DiffArgs, out: &mut dyn Write) -> CmdResult {
    let program = load_program(&a.program)?;
    let query = load_query(&a.query)?;
    if !query.is_boolean() {
        return Err(fail("diff compares Boolean queries; use `?- ...`"));
    }
    let config = DiffConfig {
        budget: a.max_steps,
        resumptions: a.resumptions,
        fault: a.inject_fault.then_some(Fault::FlipIsomorphic),
    };
    let report = differential_bcqa(&program, &query, &config).map_err(fail)?;
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    write_out(out, &text)?;
    Ok(if report.disagrees() { EXIT_DISAGREEMENT } else { EXIT_OK })
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> CmdResult {
    let spec = a.scenario.spec().ok_or_else(|| fail("bench needs --scenario psc or doctors-like"))?;
    let variants: Vec<ChaseVariant> = if a.variant.is_empty() {
        vec![ChaseVariant::Isomorphic, ChaseVariant::ParsimoniousResumption { resumptions: 1 }]
    } else {
        a.variant.clone()
    };
    let variants: Vec<ChaseVariant> = variants
        .into_iter()
        .map(|v| match (v, a.resumptions) {
            (ChaseVariant::ParsimoniousResumption { .. }, Some(k)) => {
                ChaseVariant::ParsimoniousResumption { resumptions: k }
            }
            (other, _) => other,
        })
        .collect();
    let rows = run_bench(&spec, &variants, a.repetitions, a.max_steps).map_err(fail)?;
    let mut buf = Vec::new();
    match a.format {
        Format::Text => write_results_csv(&rows, &mut buf).map_err(fail)?,
        Format::Json => write_results_json(&rows, &mut buf).map_err(fail)?,
    }
    out.write_all(&buf).map_err(fail)?;
    Ok(EXIT_OK)
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> CmdResult {
    match a.scenario.spec() {
        Some(spec) => {
            let scenario = spec.generate().map_err(fail)?;
            scenario.write_to(&a.out).map_err(fail)?;
            write_out(out, &format!("wrote {} ({} facts) to {}\n", spec, scenario.fact_count(), a.out.display()))?;
        }
        None => {
            let profile = generate::ProgramProfile::default();
            let program = generate::generate_random_instance(a.scenario.seed, &profile, 20);
            let query = generate::generate_query(a.scenario.seed, &program, 3);
            std::fs::create_dir_all(&a.out).map_err(fail)?;
            std::fs::write(a.out.join("program.dlgx"), print_program(&program)).map_err(fail)?;
            std::fs::write(a.out.join("query.dlgq"), format!("{query}\n")).map_err(fail)?;
            write_out(out, &format!("wrote random program (seed {}) to {}\n", a.scenario.seed, a.out.display()))?;
        }
    }
    Ok(EXIT_OK)
}
