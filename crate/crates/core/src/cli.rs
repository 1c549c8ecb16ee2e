//! `oraclesim` command line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algorithms::{Algorithm, Circuit, Variant, INPUT_REGISTER};
use crate::bits::BitString;
use crate::oracle::{self, ClassCounts, FunctionFamily, ModeClass};
use crate::protocol::{self, TrialStats};
use crate::rng::SeededRng;
use crate::statevector::{MeasurementRecord, StateDump, DUMP_THRESHOLD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "oraclesim",
    version,
    about = "Oracle algorithms with a superposed mode register"
)]
pub struct Cli {
    /// RNG seed for measurements and protocol rounds.
    #[arg(long, global = true, env = "ORACLE_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,

    /// Maximum qubits per simulated state.
    #[arg(long, global = true)]
    pub qubit_cap: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an algorithm and dump the state before measurement.
    Run {
        /// deutsch, deutsch-jozsa or grover
        algorithm: Algorithm,
        /// Input arity (defaults: 1 for deutsch, 2 otherwise).
        #[arg(long)]
        n: Option<usize>,
        /// `superposed` or `sharp:<label>`.
        #[arg(long, default_value = "superposed")]
        variant: Variant,
        /// Grover loop count (default: optimal).
        #[arg(long)]
        iterations: Option<usize>,
        /// Also measure x and show the collapsed state.
        #[arg(long)]
        measure: bool,
    },
    /// Play seeded examiner/examinee rounds and aggregate them.
    Protocol {
        algorithm: Algorithm,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Collapse k right after its preparation.
        #[arg(long)]
        backdated: bool,
        /// Report the exact backdating total variation distance.
        #[arg(long)]
        audit: bool,
    },
    /// Validate or display a function family file.
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum FamilyAction {
    Check { path: PathBuf },
    Show { path: PathBuf },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn runtime(e: impl std::fmt::Display) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn default_n(algorithm: Algorithm) -> usize {
    match algorithm {
        Algorithm::Deutsch => 1,
        _ => 2,
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Run {
            algorithm,
            n,
            variant,
            iterations,
            measure,
        } => {
            let circuit = build_circuit(cli, *algorithm, *n, *iterations)?;
            cmd_run(cli, &circuit, *variant, *measure, out)
        }
        Command::Protocol {
            algorithm,
            n,
            trials,
            backdated,
            audit,
        } => {
            let circuit = build_circuit(cli, *algorithm, *n, None)?;
            cmd_protocol(cli, &circuit, *trials, *backdated, *audit, out)
        }
        Command::Family { action } => cmd_family(cli, action, out),
    }
}

fn build_circuit(
    cli: &Cli,
    algorithm: Algorithm,
    n: Option<usize>,
    iterations: Option<usize>,
) -> Result<Circuit, Failure> {
    let n = n.unwrap_or_else(|| default_n(algorithm));
    let circuit =
        Circuit::new(algorithm, n, iterations).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(match cli.qubit_cap {
        Some(cap) => circuit.with_qubit_cap(cap),
        None => circuit,
    })
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Failure::runtime)?;
    writeln!(out, "{text}").map_err(Failure::runtime)
}

fn labelled_distribution(probs: &[f64], width: usize) -> BTreeMap<String, f64> {
    probs
        .iter()
        .enumerate()
        .map(|(v, &p)| (BitString::new(v as u64, width).to_string(), p))
        .collect()
}

#[derive(Serialize)]
struct MeasurementReport {
    record: MeasurementRecord,
    post_state: StateDump,
}

#[derive(Serialize)]
struct RunReport {
    algorithm: Algorithm,
    variant: Variant,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    state: StateDump,
    x_marginal: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measurement: Option<MeasurementReport>,
}

fn cmd_run(
    cli: &Cli,
    circuit: &Circuit,
    variant: Variant,
    measure: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let run = circuit.run(variant).map_err(Failure::runtime)?;
    let state = &run.pre_measurement_state;
    let marginal = state
        .marginal_distribution(INPUT_REGISTER)
        .map_err(Failure::runtime)?;
    let measured = if measure {
        let mut rng = SeededRng::new(cli.seed);
        Some(
            state
                .measure(INPUT_REGISTER, &mut rng)
                .map_err(Failure::runtime)?,
        )
    } else {
        None
    };

    match cli.output {
        OutputFormat::Json => emit_json(
            out,
            &RunReport {
                algorithm: run.algorithm,
                variant: run.variant,
                n: run.n,
                iterations: run.iterations,
                state: state.to_dump(),
                x_marginal: labelled_distribution(&marginal, run.n),
                measurement: measured.map(|(record, post)| MeasurementReport {
                    record,
                    post_state: post.to_dump(),
                }),
            },
        ),
        OutputFormat::Text => {
            let mut text = format!("algorithm: {}", run.algorithm);
            text.push_str(&format!(" (n={}", run.n));
            if let Some(t) = run.iterations {
                text.push_str(&format!(", iterations={t}"));
            }
            text.push_str(")\n");
            text.push_str(&format!("variant:   {}\n", run.variant));
            let layout: Vec<String> = run
                .layout()
                .registers()
                .iter()
                .map(|r| format!("{}[{}]", r.name(), r.width()))
                .collect();
            text.push_str(&format!("layout:    {}\n", layout.join(" ")));
            text.push_str("state before measurement:\n");
            text.push_str(&state.to_string());
            text.push_str("x marginal:\n");
            for (label, p) in labelled_distribution(&marginal, run.n) {
                if p > DUMP_THRESHOLD {
                    text.push_str(&format!("  {label}  {p:.6}\n"));
                }
            }
            if let Some((record, post)) = measured {
                text.push_str(&format!(
                    "measured x = {} (p = {:.6}, {})\n",
                    record.outcome, record.probability, record.seed_path
                ));
                text.push_str("state after collapse:\n");
                text.push_str(&post.to_string());
            }
            out.write_all(text.as_bytes()).map_err(Failure::runtime)
        }
    }
}

#[derive(Serialize)]
struct ProtocolReport {
    algorithm: Algorithm,
    n: usize,
    seed: u64,
    backdated: bool,
    stats: TrialStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    backdating_tv_distance: Option<f64>,
}

fn cmd_protocol(
    cli: &Cli,
    circuit: &Circuit,
    trials: u64,
    backdated: bool,
    audit: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let stats = protocol::run_trials_with(circuit, trials, cli.seed, backdated)
        .map_err(Failure::runtime)?;
    let distance = if audit {
        Some(protocol::backdating_equivalence_with(circuit).map_err(Failure::runtime)?)
    } else {
        None
    };
    match cli.output {
        OutputFormat::Json => emit_json(
            out,
            &ProtocolReport {
                algorithm: circuit.algorithm(),
                n: circuit.n(),
                seed: cli.seed,
                backdated,
                stats,
                backdating_tv_distance: distance,
            },
        ),
        OutputFormat::Text => {
            let mut text = format!(
                "protocol {} (n={}, seed={}, backdated={})\n",
                circuit.algorithm(),
                circuit.n(),
                cli.seed,
                backdated
            );
            text.push_str(&format!(
                "correct: {}/{}\n",
                stats.correct_count, stats.trials
            ));
            text.push_str(&format!("{:<12} {:<16} {:>8}\n", "x", "k", "count"));
            for (&(x, k), &count) in &stats.joint_histogram {
                text.push_str(&format!(
                    "{:<12} {:<16} {:>8}\n",
                    x.to_string(),
                    k.to_string(),
                    count
                ));
            }
            if let Some(d) = distance {
                text.push_str(&format!("backdating TV distance: {d:e}\n"));
            }
            out.write_all(text.as_bytes()).map_err(Failure::runtime)
        }
    }
}

fn load_family(path: &PathBuf) -> Result<FunctionFamily, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    oracle::parse_family_file(&text)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ModeEntry {
    label: BitString,
    class: ModeClass,
}

#[derive(Serialize)]
struct FamilyCheckReport {
    n: usize,
    label_width: usize,
    modes: usize,
    #[serde(flatten)]
    counts: ClassCounts,
    classes: Vec<ModeEntry>,
}

#[derive(Serialize)]
struct TableRow {
    k: BitString,
    x: BitString,
    f: u8,
}

fn summary_line(family: &FunctionFamily) -> String {
    let c = family.class_counts();
    let mut line = format!(
        "{} modes: {} balanced, {} constant",
        family.len(),
        c.balanced,
        c.constant
    );
    if c.other > 0 {
        line.push_str(&format!(", {} other", c.other));
    }
    line
}

fn cmd_family(cli: &Cli, action: &FamilyAction, out: &mut dyn Write) -> Result<(), Failure> {
    match action {
        FamilyAction::Check { path } => {
            let family = load_family(path)?;
            let classes: Vec<ModeEntry> = family
                .modes()
                .iter()
                .map(|m| ModeEntry {
                    label: m.label(),
                    class: oracle::classify_table(m.table()),
                })
                .collect();
            match cli.output {
                OutputFormat::Json => emit_json(
                    out,
                    &FamilyCheckReport {
                        n: family.n(),
                        label_width: family.label_width(),
                        modes: family.len(),
                        counts: family.class_counts(),
                        classes,
                    },
                ),
                OutputFormat::Text => {
                    let mut text = summary_line(&family);
                    text.push('\n');
                    for e in classes {
                        text.push_str(&format!("  {}  {}\n", e.label, e.class));
                    }
                    out.write_all(text.as_bytes()).map_err(Failure::runtime)
                }
            }
        }
        FamilyAction::Show { path } => {
            let family = load_family(path)?;
            let mut modes: Vec<_> = family.modes().iter().collect();
            modes.sort_by_key(|m| m.label());
            let rows: Vec<TableRow> = modes
                .iter()
                .flat_map(|m| {
                    m.table().iter().enumerate().map(|(x, &v)| TableRow {
                        k: m.label(),
                        x: BitString::new(x as u64, family.n()),
                        f: v as u8,
                    })
                })
                .collect();
            match cli.output {
                OutputFormat::Json => emit_json(out, &rows),
                OutputFormat::Text => {
                    let kw = family.label_width().max(1);
                    let xw = family.n();
                    let mut text = format!("{:<kw$} {:<xw$} F\n", "k", "x");
                    for r in rows {
                        text.push_str(&format!(
                            "{:<kw$} {:<xw$} {}\n",
                            r.k.to_string(),
                            r.x.to_string(),
                            r.f
                        ));
                    }
                    out.write_all(text.as_bytes()).map_err(Failure::runtime)
                }
            }
        }
    }
}
