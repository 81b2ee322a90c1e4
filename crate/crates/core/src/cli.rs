//! The `mfmart` command line.
//!
//! JSON and CSV go to stdout, diagnostics to stderr. Exit codes: `0` when the
//! checked condition holds, `1` when it fails for a domain reason, `2` for
//! usage, I/O and parse errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::boltzmann::ProbabilityVector;
use crate::experiments::{
    convergence_report, generate_equicontinuous, lambda_field, net_convergence_study,
    EquicontinuousSpec, ExperimentError,
};
use crate::io::{
    measure_from_json, measure_to_json, parse_sample, ExplicitRuleDocument, MeasureDocument,
    TwoPointDocument,
};
use crate::lattice::{LatticeKind, LatticeSpec};
use crate::measures::{
    build_measure, check_martingale, consistency_error, enumerate_extremes, equivalence_bounds,
    measure_entropy_profile, Boltzmann, ConditionalRule, Explicit, MeasureError, TwoPoint,
    UniformFeasible,
};
use crate::tree::{envelope, FiltrationTree};

/// Martingale error accepted by `check`.
pub const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "mfmart",
    version,
    about = "Measure-free martingales on finite filtration trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the measure-free martingale condition.
    Verify { tree: PathBuf },
    /// Build a martingale measure and write its document.
    Build(BuildArgs),
    /// Check a stored measure against its tree.
    Check { tree: PathBuf, measure: PathBuf },
    /// Stream extreme martingale measures (NDJSON) followed by the exact count.
    Extremes {
        tree: PathBuf,
        #[arg(long)]
        cap: usize,
        /// JSON object mapping level-1 cell ids to probabilities.
        #[arg(long)]
        root: Option<PathBuf>,
    },
    /// Generate a binomial or trinomial price lattice.
    Lattice(LatticeArgs),
    /// Tail oscillation table for a random tree with geometric increments.
    Converge(ConvergeArgs),
    /// Boltzmann distributions on shrinking ε-nets of a sample.
    Netstudy(NetstudyArgs),
    /// Tilt field of the Boltzmann measure and its envelope check.
    LambdaField {
        tree: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Ratio bounds and equivalence of two measures on one tree.
    Equiv {
        tree: PathBuf,
        m: PathBuf,
        p: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub tree: PathBuf,
    /// boltzmann | uniform-feasible | two-point[:FILE] | explicit:FILE
    #[arg(long, default_value = "boltzmann")]
    pub rule: String,
    /// JSON object mapping level-1 cell ids to probabilities.
    #[arg(long)]
    pub root: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Binomial,
    Trinomial,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub levels: usize,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    #[arg(long)]
    pub up: f64,
    #[arg(long)]
    pub down: f64,
    #[arg(long)]
    pub mid: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 2)]
    pub branching: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub root_value: f64,
    /// Long format, one row per (atom, level).
    #[arg(long)]
    pub per_atom: bool,
    /// Also write the generated tree document here.
    #[arg(long)]
    pub tree_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetstudyArgs {
    pub sample: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    /// Anchor offsets (in units of ε) for alternative nets.
    #[arg(long, value_delimiter = ',')]
    pub jitter: Vec<f64>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    /// Condition fails for a domain reason; exit 1.
    Domain(String),
    /// Usage, I/O or parse problem; exit 2.
    Input(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Input(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn measure_failure(e: MeasureError) -> Failure {
    match e {
        MeasureError::EnvelopeViolation(_) | MeasureError::RuleInfeasible { .. } => {
            Failure::Domain(e.to_string())
        }
        other => Failure::Input(other.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<FiltrationTree, Failure> {
    FiltrationTree::from_json(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn load_root(tree: &FiltrationTree, path: &Path) -> Result<ProbabilityVector, Failure> {
    let map: BTreeMap<String, f64> = serde_json::from_str(&read(path)?).map_err(input)?;
    if let Some(k) = map
        .keys()
        .find(|k| tree.lookup(k).is_none_or(|id| tree.cell(id).level() != 1))
    {
        return Err(Failure::Input(format!(
            "root file names `{k}`, not a level-1 cell"
        )));
    }
    let roots = tree.roots();
    let values = roots.iter().map(|&r| tree.value(r)).collect();
    let probs = roots
        .iter()
        .map(|&r| map.get(tree.cell(r).id()).copied().unwrap_or(0.0))
        .collect();
    ProbabilityVector::new(values, probs).map_err(input)
}

fn parse_rule(spec: &str) -> Result<Box<dyn ConditionalRule>, Failure> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    match (name, arg) {
        ("boltzmann", None) => Ok(Box::new(Boltzmann::default())),
        ("uniform-feasible", None) => Ok(Box::new(UniformFeasible)),
        ("two-point", None) => Ok(Box::new(TwoPoint::lowest_feasible())),
        ("two-point", Some(file)) => {
            let doc: TwoPointDocument =
                serde_json::from_str(&read(Path::new(file))?).map_err(input)?;
            Ok(Box::new(TwoPoint::with_pairs(doc.pairs)))
        }
        ("explicit", Some(file)) => {
            let doc: ExplicitRuleDocument =
                serde_json::from_str(&read(Path::new(file))?).map_err(input)?;
            Ok(Box::new(Explicit::new(doc.conditionals)))
        }
        _ => Err(Failure::Input(format!("unknown rule `{spec}`"))),
    }
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>, header: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(input)
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Verify { tree } => {
            let tree = load_tree(&tree)?;
            let report = envelope(&tree);
            emit(out, &pretty(&report))?;
            if let Some(bad) = report.first_violation() {
                let _ = writeln!(
                    err,
                    "not a measure-free martingale: violation at cell `{bad}`"
                );
                Ok(1)
            } else {
                Ok(0)
            }
        }

        Command::Build(args) => {
            let tree = load_tree(&args.tree)?;
            let rule = parse_rule(&args.rule)?;
            let root = args
                .root
                .as_deref()
                .map(|p| load_root(&tree, p))
                .transpose()?;
            let measure =
                build_measure(&tree, rule.as_ref(), root.as_ref()).map_err(measure_failure)?;
            let mart = check_martingale(&tree, &measure);
            let profile = measure_entropy_profile(&tree, &measure);
            let entropies: Vec<f64> = profile.iter().map(|e| e.entropy).collect();
            let summary = json!({
                "rule": rule.name(),
                "cells": tree.len(),
                "max_martingale_error": mart.max_error,
                "consistency_error": consistency_error(&tree, &measure),
                "entropy": {
                    "cells": entropies.len(),
                    "min": entropies.iter().copied().reduce(f64::min),
                    "max": entropies.iter().copied().reduce(f64::max),
                    "total": entropies.iter().sum::<f64>(),
                },
            });
            let mut doc = measure_to_json(&tree, &measure);
            doc.push('\n');
            match args.out {
                Some(path) => {
                    write_file(&path, &doc)?;
                    emit(out, &pretty(&summary))?;
                }
                None => {
                    emit(out, &doc)?;
                    let _ = err.write_all(pretty(&summary).as_bytes());
                }
            }
            Ok(0)
        }

        Command::Check { tree, measure } => {
            let tree = load_tree(&tree)?;
            let m = measure_from_json(&tree, &read(&measure)?).map_err(input)?;
            let report = check_martingale(&tree, &m);
            let consistency = consistency_error(&tree, &m);
            emit(
                out,
                &pretty(&json!({
                    "max_martingale_error": report.max_error,
                    "consistency_error": consistency,
                    "cells": report.cells,
                    "skipped": report.skipped,
                })),
            )?;
            Ok(if report.max_error <= CHECK_TOL { 0 } else { 1 })
        }

        Command::Extremes { tree, cap, root } => {
            let tree = load_tree(&tree)?;
            if cap == 0 {
                return Err(Failure::Input("--cap must be positive".into()));
            }
            let root = root.as_deref().map(|p| load_root(&tree, p)).transpose()?;
            let en = enumerate_extremes(&tree, cap, root.as_ref()).map_err(measure_failure)?;
            let count = en.total().clone();
            let mut emitted = 0usize;
            for (index, (spec, measure)) in en.enumerate() {
                let doc = MeasureDocument::from_measure(&tree, &measure);
                let line = json!({
                    "index": index,
                    "spec": spec.cells,
                    "tree_hash": doc.tree_hash,
                    "masses": doc.masses,
                });
                emit(out, &format!("{line}\n"))?;
                emitted += 1;
            }
            let tail = json!({
                "count": count.to_string(),
                "emitted": emitted,
                "capped": count > num_bigint::BigUint::from(emitted),
            });
            emit(out, &format!("{tail}\n"))?;
            Ok(0)
        }

        Command::Lattice(a) => {
            let spec = LatticeSpec {
                kind: match a.kind {
                    KindArg::Binomial => LatticeKind::Binomial,
                    KindArg::Trinomial => LatticeKind::Trinomial,
                },
                levels: a.levels,
                s0: a.s0,
                up: a.up,
                down: a.down,
                mid: a.mid,
            };
            let tree = spec.generate().map_err(input)?;
            let mut text = tree.to_json_pretty();
            text.push('\n');
            match a.out {
                Some(path) => write_file(&path, &text)?,
                None => emit(out, &text)?,
            }
            if !spec.brackets() {
                let _ = writeln!(
                    err,
                    "warning: d <= 1 <= u fails; the lattice will not verify"
                );
            }
            Ok(0)
        }

        Command::Converge(a) => {
            let spec = EquicontinuousSpec {
                depth: a.depth,
                c: a.c,
                r: a.r,
                branching: a.branching,
                seed: a.seed,
                root_value: a.root_value,
            };
            let tree = generate_equicontinuous(&spec).map_err(input)?;
            if let Some(path) = &a.tree_out {
                write_file(path, &(tree.to_json_pretty() + "\n"))?;
            }
            let report = convergence_report(&tree);
            let text = if a.per_atom {
                let rows = report.atoms.iter().flat_map(|atom| {
                    atom.path
                        .iter()
                        .zip(&atom.osc)
                        .enumerate()
                        .map(move |(n, (v, o))| {
                            vec![
                                atom.id.clone(),
                                (n + 1).to_string(),
                                v.to_string(),
                                o.to_string(),
                            ]
                        })
                });
                csv_string(rows, &["atom", "level", "value", "osc"])
            } else {
                let rows = report.max_osc.iter().enumerate().map(|(n, o)| {
                    vec![
                        (n + 1).to_string(),
                        o.to_string(),
                        spec.tail_bound(n + 1).to_string(),
                    ]
                });
                csv_string(rows, &["level", "max_osc", "bound"])
            };
            emit(out, &text)?;
            Ok(0)
        }

        Command::Netstudy(a) => {
            let sample = parse_sample(&read(&a.sample)?).map_err(input)?;
            let rows =
                net_convergence_study(&sample, a.alpha, &a.eps, &a.jitter).map_err(
                    |e| match e {
                        ExperimentError::Infeasible { .. } => Failure::Domain(e.to_string()),
                        other => input(other),
                    },
                )?;
            let text = csv_string(
                rows.iter().map(|r| {
                    vec![
                        r.epsilon.to_string(),
                        r.net_size.to_string(),
                        r.lambda.to_string(),
                        opt(r.to_previous.map(|d| d.kolmogorov)),
                        opt(r.to_previous.map(|d| d.wasserstein1)),
                        opt(r.cross_net.map(|d| d.kolmogorov)),
                        opt(r.cross_net.map(|d| d.wasserstein1)),
                    ]
                }),
                &NETSTUDY_HEADER,
            );
            emit(out, &text)?;
            Ok(0)
        }

        Command::LambdaField { tree, csv } => {
            let tree = load_tree(&tree)?;
            let report = lambda_field(&tree).map_err(|e| match e {
                ExperimentError::EnvelopeViolation(_) => Failure::Domain(e.to_string()),
                other => input(other),
            })?;
            if csv {
                let status = |id: &str| {
                    if report.excluded.iter().any(|x| x == id) {
                        "excluded"
                    } else if report.envelope.violations.iter().any(|x| x == id) {
                        "violation"
                    } else if report.envelope.records.iter().any(|r| r.id == id) {
                        "ok"
                    } else {
                        "unchecked"
                    }
                };
                let rows = report.field.entries.iter().map(|e| {
                    vec![
                        e.id.clone(),
                        e.level.to_string(),
                        e.lambda.to_string(),
                        status(&e.id).to_string(),
                    ]
                });
                emit(out, &csv_string(rows, &["id", "level", "lambda", "status"]))?;
            } else {
                emit(out, &pretty(&report))?;
            }
            Ok(if report.envelope.ok { 0 } else { 1 })
        }

        Command::Equiv { tree, m, p } => {
            let tree = load_tree(&tree)?;
            let m = measure_from_json(&tree, &read(&m)?).map_err(input)?;
            let p = measure_from_json(&tree, &read(&p)?).map_err(input)?;
            let report = equivalence_bounds(&tree, &m, &p);
            emit(out, &pretty(&report))?;
            Ok(if report.equivalent { 0 } else { 1 })
        }
    }
}

/// Column names of the `netstudy` CSV.
pub const NETSTUDY_HEADER: [&str; 7] = [
    "epsilon",
    "net_size",
    "lambda",
    "ks_to_prev",
    "w1_to_prev",
    "ks_cross",
    "w1_cross",
];
