//! Command-line front-end.
//!
//! Exit codes: 0 when the circuit is valid or the check passes, 1 when the
//! circuit is invalid or a causality check fails, 2 for usage, IO, parse and
//! evaluation errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use optcausal_core::circuit::{future_cone, past_cone, validate, Circuit, SystemType, Violation};
use optcausal_core::engine::{
    check_deterministic_effect_uniqueness, check_marginal_invariance, falsification_experiment, joint_distribution,
    Alternative, Backend, CausalityReport, ClassicalBackend, EffectSpace, EngineError, NoSignalingPlan, QuantumBackend,
    TableBackend,
};
use optcausal_core::quantum::{self, KrausMap, QState};
use rayon::prelude::*;

use crate::payload::{parse_classical_payloads, parse_quantum_payloads, parse_table_payloads, PayloadError};
use crate::report::{
    cones_text, distribution_text, falsify_text, report_text, to_json, validation_text, ConesDoc, DistributionDoc,
    FalsifyDoc, ReportDoc, ValidationDoc,
};
use crate::text::{parse_circuit, FormatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Quantum,
    Classical,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        Ok(_) => Err("tolerance must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Simulate operational circuits and check them for causality.
#[derive(Debug, Parser)]
#[command(name = "optcausal", version)]
pub struct Args {
    /// Circuit description file.
    #[arg(long, global = true)]
    pub circuit: Option<PathBuf>,
    /// JSON payload file resolving node payload keys.
    #[arg(long, global = true)]
    pub payloads: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = BackendKind::Quantum)]
    pub backend: BackendKind,
    /// Seed for the randomized alternative tests.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Verdict tolerance replacing the check's default.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Evaluate independent alternatives in parallel.
    #[arg(long, global = true)]
    pub parallel: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report structural violations of the circuit.
    Validate,
    /// Print the past and future cones of a node.
    Cones {
        #[arg(long)]
        node: String,
    },
    /// Print the joint outcome distribution.
    Simulate,
    /// Run a causality check.
    Check {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// Run the two-test falsification cascade.
    Falsify {
        /// Payload key of the prepared state.
        #[arg(long)]
        prep: String,
        /// Payload key of the two-outcome test A.
        #[arg(long)]
        test_a: String,
        #[arg(long)]
        test_b: String,
        #[arg(long)]
        test_b_alt: String,
        /// Payload key of the test compared with A for forward dependence.
        #[arg(long)]
        test_a_alt: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Marginal of a target under alternative tests at one swap node.
    Marginal {
        #[arg(long)]
        target: String,
        #[arg(long)]
        swap: String,
        /// Payload keys or library labels; defaults to the node's own test
        /// followed by the library.
        #[arg(long, value_delimiter = ',')]
        alternatives: Option<Vec<String>>,
    },
    /// Marginal of a target under every test outside its past cone.
    NoSignaling {
        #[arg(long)]
        target: String,
    },
    /// Uniqueness of the deterministic effect of a system.
    Uniqueness {
        /// A system label of the circuit, or a descriptor without a circuit.
        #[arg(long)]
        system: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Payload { path: PathBuf, source: PayloadError },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(0, text)
            };
        }
    };
    match execute(&args) {
        Ok(outcome) => outcome,
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_circuit(args: &Args) -> Result<Circuit, CliError> {
    let path = args.circuit.as_deref().ok_or_else(|| CliError::Usage("--circuit is required".into()))?;
    parse_circuit(&read(path)?).map_err(|source| CliError::Format { path: path.to_path_buf(), source })
}

enum Loaded {
    Quantum(QuantumBackend),
    Classical(ClassicalBackend),
    Table(TableBackend),
}

fn load_backend(args: &Args) -> Result<Loaded, CliError> {
    let text = match &args.payloads {
        Some(path) => Some((path, read(path)?)),
        None => None,
    };
    fn wrap(path: &Path) -> impl Fn(PayloadError) -> CliError + '_ {
        move |source| CliError::Payload { path: path.to_path_buf(), source }
    }
    Ok(match (args.backend, text) {
        (BackendKind::Quantum, None) => Loaded::Quantum(QuantumBackend::new()),
        (BackendKind::Classical, None) => Loaded::Classical(ClassicalBackend::new()),
        (BackendKind::Table, None) => return Err(CliError::Usage("the table backend needs --payloads".into())),
        (BackendKind::Quantum, Some((p, t))) => Loaded::Quantum(parse_quantum_payloads(&t).map_err(wrap(p))?),
        (BackendKind::Classical, Some((p, t))) => Loaded::Classical(parse_classical_payloads(&t).map_err(wrap(p))?),
        (BackendKind::Table, Some((p, t))) => Loaded::Table(parse_table_payloads(&t).map_err(wrap(p))?),
    })
}

fn render<T: serde::Serialize>(args: &Args, doc: &T, text: impl FnOnce(&T) -> String) -> String {
    match args.output {
        OutputFormat::Text => text(doc),
        OutputFormat::Json => to_json(doc),
    }
}

fn execute(args: &Args) -> Result<Outcome, CliError> {
    match &args.command {
        Command::Validate => {
            let doc = ValidationDoc::from(&validate(&load_circuit(args)?));
            Ok(Outcome::ok(if doc.valid { 0 } else { 1 }, render(args, &doc, validation_text)))
        }
        Command::Cones { node } => cones(args, node),
        Command::Simulate => {
            let circuit = load_circuit(args)?;
            let joint = match load_backend(args)? {
                Loaded::Quantum(b) => joint_distribution(&circuit, &b)?,
                Loaded::Classical(b) => joint_distribution(&circuit, &b)?,
                Loaded::Table(b) => joint_distribution(&circuit, &b)?,
            };
            Ok(Outcome::ok(0, render(args, &DistributionDoc::from(&joint), distribution_text)))
        }
        Command::Check { check: CheckCommand::Uniqueness { system } } => uniqueness(args, system),
        Command::Check { check } => {
            let circuit = load_circuit(args)?;
            let report = match load_backend(args)? {
                Loaded::Quantum(b) => causality_check(args, &circuit, &b, check)?,
                Loaded::Classical(b) => causality_check(args, &circuit, &b, check)?,
                Loaded::Table(b) => causality_check(args, &circuit, &b, check)?,
            };
            Ok(report_outcome(args, report))
        }
        Command::Falsify { prep, test_a, test_b, test_b_alt, test_a_alt } => {
            let backend = match load_backend(args)? {
                Loaded::Quantum(b) => b,
                Loaded::Classical(b) => b.embed(),
                Loaded::Table(_) => {
                    return Err(CliError::Usage("falsify needs the quantum or classical backend".into()))
                }
            };
            let get = |key: &str| -> Result<Vec<KrausMap>, CliError> {
                backend
                    .get(key)
                    .map(<[KrausMap]>::to_vec)
                    .ok_or_else(|| CliError::Usage(format!("unknown payload key {key:?}")))
            };
            let rho = prepared_state(prep, &get(prep)?)?;
            let a_alt = test_a_alt.as_deref().map(get).transpose()?;
            let mut result =
                falsification_experiment(&rho, &get(test_a)?, &get(test_b)?, &get(test_b_alt)?, a_alt.as_deref())?;
            if let Some(tol) = args.tol {
                result.report = result.report.with_tolerance(tol);
            }
            let doc = FalsifyDoc::from(&result);
            Ok(Outcome::ok(if result.report.passed() { 0 } else { 1 }, render(args, &doc, falsify_text)))
        }
    }
}

fn cones(args: &Args, node: &str) -> Result<Outcome, CliError> {
    let circuit = load_circuit(args)?;
    if circuit.node(node).is_none() {
        return Err(CliError::Usage(format!("unknown node {node}")));
    }
    let report = validate(&circuit);
    if report.violations.iter().any(|v| matches!(v, Violation::Cycle { .. })) {
        let doc = ValidationDoc::from(&report);
        return Ok(Outcome::ok(1, render(args, &doc, validation_text)));
    }
    let doc = ConesDoc::new(
        node,
        &past_cone(&circuit, node).map_err(EngineError::from)?,
        &future_cone(&circuit, node).map_err(EngineError::from)?,
    );
    Ok(Outcome::ok(0, render(args, &doc, cones_text)))
}

fn report_outcome(args: &Args, report: CausalityReport) -> Outcome {
    let report = match args.tol {
        Some(tol) => report.with_tolerance(tol),
        None => report,
    };
    let doc = ReportDoc::from(&report);
    Outcome::ok(if report.passed() { 0 } else { 1 }, render(args, &doc, report_text))
}

fn prepared_state(key: &str, test: &[KrausMap]) -> Result<QState, CliError> {
    match test {
        [event] if event.in_dim() == 1 => Ok(quantum::apply(event, &QState::basis(1, 0)).map_err(EngineError::from)?),
        _ => Err(CliError::Usage(format!("payload {key:?} is not a single-event preparation"))),
    }
}

fn causality_check<B>(
    args: &Args,
    circuit: &Circuit,
    backend: &B,
    check: &CheckCommand,
) -> Result<CausalityReport, CliError>
where
    B: Backend + Sync,
    B::Test: Send + Sync,
{
    match check {
        CheckCommand::Marginal { target, swap, alternatives } => {
            let node = circuit.node(swap).ok_or_else(|| EngineError::UnknownNode(swap.clone()))?;
            let library = backend.alternatives(circuit, node, args.seed)?;
            let alts = match alternatives {
                Some(labels) => labels
                    .iter()
                    .map(|l| {
                        library
                            .iter()
                            .find(|a| &a.label == l)
                            .cloned()
                            .or_else(|| backend.lookup(l).map(|t| Alternative::new(l.clone(), t)))
                            .ok_or_else(|| CliError::Usage(format!("unknown alternative {l:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => {
                    let own = backend.lookup(&node.payload).ok_or_else(|| EngineError::UnresolvedPayload {
                        node: node.id.clone(),
                        payload: node.payload.clone(),
                    })?;
                    std::iter::once(Alternative::new(node.payload.clone(), own)).chain(library).collect()
                }
            };
            Ok(check_marginal_invariance(circuit, backend, target, swap, &alts)?)
        }
        CheckCommand::NoSignaling { target } => {
            let plan = NoSignalingPlan::new(circuit, backend, &[target.as_str()], args.seed)?;
            let results = if args.parallel {
                plan.jobs()
                    .par_iter()
                    .map(|j| NoSignalingPlan::run(circuit, backend, j))
                    .collect::<Result<Vec<_>, _>>()?
            } else {
                plan.jobs().iter().map(|j| NoSignalingPlan::run(circuit, backend, j)).collect::<Result<Vec<_>, _>>()?
            };
            Ok(plan.merge(&results)?.remove(0))
        }
        CheckCommand::Uniqueness { .. } => unreachable!("dispatched separately"),
    }
}

fn uniqueness(args: &Args, system: &str) -> Result<Outcome, CliError> {
    let system_type = match &args.circuit {
        Some(_) => load_circuit(args)?
            .systems()
            .get(system)
            .cloned()
            .ok_or_else(|| EngineError::UnknownSystem(system.to_string()))?,
        None => SystemType { label: system.to_string(), descriptor: system.to_string() },
    };
    let space: Box<dyn EffectSpace> = match load_backend(args)? {
        Loaded::Quantum(b) => Box::new(b),
        Loaded::Classical(b) => Box::new(b),
        Loaded::Table(b) => Box::new(b),
    };
    let report = check_deterministic_effect_uniqueness(space.as_ref(), &system_type)?;
    Ok(report_outcome(args, report))
}
