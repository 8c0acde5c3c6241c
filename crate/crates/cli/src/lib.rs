//! Command-line front end. [`run`] parses arguments, executes one query
//! and returns the process exit code.
//!
//! Exit codes: 0 for a positive verdict, 1 for a negative one, 2 when a
//! search budget ran out, 3 for unreadable or unsuitable input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use resetnet::deciders::{
    concretize_cover_witness, decide_cover_rapn, decide_reach_rawn, oracle_search, Answer, SearchBudget, Verdict,
};
use resetnet::format::{format_marking, parse_marking, parse_net_file, serialize_net_file, NetDocument};
use resetnet::qbf::parse_qdimacs;
use resetnet::reductions::{
    acyclify_zero_tests, binary_to_unary, compile_qbf_to_rawn, goodness_report, zero_tests_to_resets, CompiledQbfNet,
    PlaceRole,
};
use resetnet::semantics::{replay, FiringMode, NetView};
use resetnet::structure::{validate_structure, ClaimedKind, WorkflowViolation};
use resetnet::{Instance, Net, Objective, TransitionId};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "resetnet", version, about = "Analyse acyclic Petri nets with resets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check acyclicity and the workflow shape claimed in the header.
    Validate { net: PathBuf },
    /// Fire a sequence of transitions from the initial marking.
    Simulate {
        net: PathBuf,
        /// Comma-separated transition names.
        #[arg(long, value_delimiter = ',')]
        fire: Vec<String>,
        /// Use the ω-abstraction rule.
        #[arg(long = "abstract")]
        abstraction: bool,
    },
    /// Decide reachability in an acyclic workflow net with resets.
    Reach { net: PathBuf },
    /// Decide coverability in an acyclic net with resets.
    Cover { net: PathBuf },
    /// Bounded brute-force search for the file's objective.
    Oracle {
        net: PathBuf,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        max_norm: Option<BigUint>,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Compile a QDIMACS formula into a coverability instance.
    CompileQbf {
        qdimacs: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replace binary arc weights with unary gadgets.
    ToUnary {
        net: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Make a zero-test net acyclic by splitting its transitions.
    Acyclify {
        net: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate zero tests with resets on copied places.
    Deresets {
        net: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replay a run from a file and check the file's objective.
    CheckWitness {
        net: PathBuf,
        /// Whitespace-separated transition names, or the output of `reach`,
        /// `cover` or `oracle`.
        #[arg(long)]
        run: PathBuf,
    },
    /// Report the balance functions of a marking of a compiled QBF net.
    Goodness {
        net: PathBuf,
        /// Comma-separated `place=count` entries.
        #[arg(long)]
        marking: String,
    },
}

/// Runs one command, writing reports to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_YES };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", format!("{e:#}").replace('\n', " "));
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<NetDocument> {
    let text = read(path)?;
    parse_net_file(&text).with_context(|| path.display().to_string())
}

fn instance(doc: &NetDocument) -> Result<&Instance> {
    doc.instance
        .as_ref()
        .ok_or_else(|| anyhow!("net `{}` has no initial/target block", doc.name))
}

fn with_objective(inst: &Instance, objective: Objective) -> Result<Instance> {
    Ok(Instance::new(inst.net.clone(), inst.initial.clone(), inst.target.clone(), objective)?)
}

fn run_names(net: &Net, run: &[TransitionId]) -> String {
    run.iter()
        .map(|t| net.transition(*t).name())
        .collect::<Vec<_>>()
        .join(" ")
}

fn report_verdict(out: &mut dyn Write, net: &Net, objective: Objective, v: &Verdict) -> Result<i32> {
    let (yes, no) = match objective {
        Objective::Reach => ("REACHABLE", "UNREACHABLE"),
        Objective::Cover => ("COVERABLE", "UNCOVERABLE"),
    };
    let (label, code) = match v.answer {
        Answer::Yes => (yes, EXIT_YES),
        Answer::No => (no, EXIT_NO),
        Answer::Exhausted => ("EXHAUSTED", EXIT_EXHAUSTED),
    };
    writeln!(out, "{label}")?;
    if let Some(w) = &v.witness {
        writeln!(out, "witness: {}", run_names(net, w).trim_end())?;
    }
    writeln!(out, "stats: states={} peak_norm={}", v.stats.states, v.stats.peak_norm)?;
    Ok(code)
}

fn emit(out: &mut dyn Write, output: Option<&Path>, doc: &NetDocument) -> Result<i32> {
    let text = serialize_net_file(doc);
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_YES)
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { net } => {
            let doc = load(&net)?;
            let report = validate_structure(&doc.net, &doc.kind)?;
            let arcs = doc.net.arcs();
            writeln!(out, "acyclic: {}", report.acyclic)?;
            if let Some(order) = &report.topo_order {
                let names: Vec<&str> = order.iter().map(|n| arcs.node_name(*n)).collect();
                writeln!(out, "order: {}", names.join(" "))?;
            }
            if let Some(cycle) = &report.cycle {
                let names: Vec<&str> = cycle.iter().map(|n| arcs.node_name(*n)).collect();
                writeln!(out, "cycle: {}", names.join(" "))?;
            }
            if let Some(w) = &report.workflow {
                writeln!(out, "workflow: {}", w.is_workflow())?;
                for v in &w.violations {
                    let line = match v {
                        WorkflowViolation::ProductionIntoInitial(t) => {
                            format!("{} produces into the initial place", arcs.transition(*t).name())
                        }
                        WorkflowViolation::ConsumptionFromFinal(t) => {
                            format!("{} consumes from the final place", arcs.transition(*t).name())
                        }
                        WorkflowViolation::NotOnPath(n) => format!("{} is not on a path from the initial to the final place", arcs.node_name(*n)),
                    };
                    writeln!(out, "  {line}")?;
                }
            }
            writeln!(out, "every transition consumes: {}", report.every_transition_consumes)?;
            writeln!(out, "conforms: {}", report.conforms)?;
            Ok(if report.conforms { EXIT_YES } else { EXIT_NO })
        }
        Command::Simulate { net, fire, abstraction } => {
            let doc = load(&net)?;
            let view = NetView::from(&doc.net);
            let arcs = view.arcs();
            let mode = match (abstraction, &doc.net) {
                (false, _) => view.concrete_mode(),
                (true, resetnet::AnyNet::Reset(_)) => FiringMode::Abstract,
                (true, resetnet::AnyNet::ZeroTest(_)) => bail!("--abstract applies to nets with resets only"),
            };
            let seq = fire
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| arcs.transition_id(s).ok_or_else(|| anyhow!("unknown transition `{s}`")))
                .collect::<Result<Vec<_>>>()?;
            let mut m = doc
                .instance
                .as_ref()
                .map_or_else(|| arcs.zero_marking(), |i| i.initial.clone());
            writeln!(out, "{}", format_marking(arcs, &m, ", "))?;
            for (i, t) in seq.iter().enumerate() {
                match view.fire(&m, *t, mode) {
                    Ok(next) => {
                        m = next;
                        writeln!(out, "{} -> {}", arcs.transition(*t).name(), format_marking(arcs, &m, ", "))?;
                    }
                    Err(e) => {
                        writeln!(out, "step {}: {} blocked: {e}", i + 1, arcs.transition(*t).name())?;
                        return Ok(EXIT_NO);
                    }
                }
            }
            Ok(EXIT_YES)
        }
        Command::Reach { net } => {
            let doc = load(&net)?;
            let inst = with_objective(instance(&doc)?, Objective::Reach)?;
            let v = decide_reach_rawn(&inst)?;
            report_verdict(out, inst.net.arcs(), Objective::Reach, &v)
        }
        Command::Cover { net } => {
            let doc = load(&net)?;
            let inst = with_objective(instance(&doc)?, Objective::Cover)?;
            let mut v = decide_cover_rapn(&inst)?;
            let arcs = inst.net.arcs();
            if let Some(w) = &v.witness {
                let concrete = concretize_cover_witness(arcs, &inst.initial, w, &inst.target)?;
                v.witness = Some(concrete);
                v.witness_mode = FiringMode::Concrete;
            }
            report_verdict(out, arcs, Objective::Cover, &v)
        }
        Command::Oracle {
            net,
            max_steps,
            max_norm,
            max_states,
        } => {
            let doc = load(&net)?;
            let inst = instance(&doc)?;
            let budget = SearchBudget {
                max_steps,
                max_norm,
                max_states,
            };
            let v = oracle_search(inst, &budget);
            report_verdict(out, inst.net.arcs(), inst.objective, &v)
        }
        Command::CompileQbf { qdimacs, output } => {
            let q = parse_qdimacs(&read(&qdimacs)?).with_context(|| qdimacs.display().to_string())?;
            let (c, inst) = compile_qbf_to_rawn(&q)?;
            let kind = ClaimedKind::Workflow {
                initial: c.net.place_name(c.place(PlaceRole::Holding(1))).to_string(),
                final_place: c.net.place_name(c.place(PlaceRole::Final)).to_string(),
            };
            let name = qdimacs.file_stem().and_then(|s| s.to_str()).unwrap_or("qbf");
            emit(out, output.as_deref(), &NetDocument::from_instance(name, kind, inst))
        }
        Command::ToUnary { net, output } => {
            let doc = load(&net)?;
            let r = binary_to_unary(instance(&doc)?)?;
            let name = format!("{}-unary", doc.name);
            emit(out, output.as_deref(), &NetDocument::from_instance(name, doc.kind.clone(), r.instance))
        }
        Command::Acyclify { net, output } => {
            let doc = load(&net)?;
            let r = acyclify_zero_tests(instance(&doc)?)?;
            let name = format!("{}-acyclic", doc.name);
            emit(out, output.as_deref(), &NetDocument::from_instance(name, ClaimedKind::Acyclic, r.instance))
        }
        Command::Deresets { net, output } => {
            let doc = load(&net)?;
            let r = zero_tests_to_resets(instance(&doc)?)?;
            let name = format!("{}-resets", doc.name);
            emit(out, output.as_deref(), &NetDocument::from_instance(name, ClaimedKind::Plain, r.instance))
        }
        Command::CheckWitness { net, run } => {
            let doc = load(&net)?;
            let inst = instance(&doc)?;
            let view = NetView::from(&inst.net);
            let arcs = view.arcs();
            let text = read(&run)?;
            // accept verdict output as is: only its witness line matters
            let names = text
                .lines()
                .find_map(|l| l.trim_start().strip_prefix("witness:"))
                .unwrap_or(&text);
            let seq = names
                .split_whitespace()
                .map(|s| arcs.transition_id(s).ok_or_else(|| anyhow!("unknown transition `{s}`")))
                .collect::<Result<Vec<_>>>()?;
            let end = match replay(view, &inst.initial, &seq, view.concrete_mode()) {
                Ok(trace) => trace.final_marking().clone(),
                Err(e) => {
                    writeln!(out, "INVALID")?;
                    writeln!(out, "{e}")?;
                    return Ok(EXIT_NO);
                }
            };
            let ok = match inst.objective {
                Objective::Reach => end == inst.target,
                Objective::Cover => end.covers(&inst.target),
            };
            writeln!(out, "{}", if ok { "VALID" } else { "INVALID" })?;
            writeln!(out, "final: {}", format_marking(arcs, &end, ", "))?;
            Ok(if ok { EXIT_YES } else { EXIT_NO })
        }
        Command::Goodness { net, marking } => {
            let doc = load(&net)?;
            let arcs = doc
                .net
                .as_reset()
                .ok_or_else(|| anyhow!("a compiled net has resets, not zero tests"))?;
            let c = CompiledQbfNet::from_net(arcs)?;
            let m = parse_marking(arcs, &marking)?;
            let report = goodness_report(&c, &m)?;
            writeln!(out, "{report}")?;
            Ok(if report.is_good { EXIT_YES } else { EXIT_NO })
        }
    }
}
