//! Command-line front end.
//!
//! Human-readable lines are followed by machine-readable ones: an uppercase
//! tag and tab-separated fields, exact rational first, then its decimal.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{dual_profile, parse_sequence, run_sequence, serialize_sequence, MoveSequence};
use crate::error::Error;
use crate::exact::{
    kappa_edge, kappa_path_general, kappa_universal_target, solve_auto, SolverResult,
};
use crate::fixtures::{demo, DEMO_NAMES};
use crate::graph::Graph;
use crate::heuristics::{find_bottlenecks, gla_value, plan_heuristic, GlaMode, HeuristicCaps};
use crate::instance::{parse_instance, serialize_instance, Instance};
use crate::oracle::{kappa_oracle, OracleConfig, SearchMode};
use crate::rational::{approx, format_rational, Rational};
use crate::reduction::{
    brute_sat, build_reduction, parse_dimacs, to_exact_3sat, witness_strategy, ReductionScale,
    BRUTE_SAT_MAX_VARS,
};
use crate::sampling::random_sequence;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "water-transport",
    version,
    about = "Exact solvers and search for the water transport problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Edge,
    Path,
    Universal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Hyper,
    Edge,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GlaModeArg {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact value on a tractable family, with a realizing strategy.
    Solve {
        /// Instance file (`-` for standard input).
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        /// Write the strategy to this file.
        #[arg(long)]
        strategy_out: Option<PathBuf>,
    },
    /// Exhaustive search over sequences of complete moves.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value = "hyper")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = OracleConfig::default().max_vertices)]
        max_vertices: usize,
        #[arg(long, default_value_t = OracleConfig::default().max_depth)]
        max_depth: usize,
        /// Memo entries per first-level branch.
        #[arg(long, default_value_t = OracleConfig::default().memo_capacity)]
        memo: usize,
    },
    /// Best lattice animal around the target.
    Gla {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: GlaModeArg,
    },
    /// Heuristic strategy built from lattice-animal improvements.
    Plan {
        input: PathBuf,
        /// Try all orders of the best few candidate preparations per step.
        #[arg(long)]
        order_search: bool,
        /// Largest set pooled while preparing a vertex.
        #[arg(long, default_value_t = HeuristicCaps::default().prep_size)]
        prep_size: usize,
        #[arg(long)]
        strategy_out: Option<PathBuf>,
    },
    /// Run a move sequence.
    Simulate {
        input: PathBuf,
        sequence: PathBuf,
        /// Print every intermediate profile.
        #[arg(long)]
        trace: bool,
    },
    /// Check the dual weight identity on seeded random sequences.
    Duality {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_moves: usize,
    },
    /// Build the comb instance of a CNF formula.
    Reduce {
        /// DIMACS CNF file (`-` for standard input).
        input: PathBuf,
        /// Convert to exact 3-SAT first.
        #[arg(long)]
        convert: bool,
        /// Vertices per tooth (multiple of 3); experimental.
        #[arg(long)]
        tooth_len: Option<usize>,
        /// Edges per connector path; experimental.
        #[arg(long)]
        connector_edges: Option<usize>,
        /// Where to write the instance.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the witness strategy, if one is found.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Built-in fixtures; lists them when no name is given.
    Demo {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        strategy_out: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WrongFamily(_) => EXIT_NOT_APPLICABLE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Solve {
            input,
            method,
            strategy_out,
        } => cmd_solve(&input, method, strategy_out.as_deref(), out),
        Command::Oracle {
            input,
            depth,
            mode,
            workers,
            max_vertices,
            max_depth,
            memo,
        } => {
            let config = OracleConfig {
                max_vertices,
                max_depth,
                memo_capacity: memo,
                workers,
            };
            cmd_oracle(&input, depth, mode, &config, out)
        }
        Command::Gla { input, mode } => cmd_gla(&input, mode, out),
        Command::Plan {
            input,
            order_search,
            prep_size,
            strategy_out,
        } => {
            let caps = HeuristicCaps {
                order_search,
                prep_size,
                ..HeuristicCaps::default()
            };
            cmd_plan(&input, &caps, strategy_out.as_deref(), out)
        }
        Command::Simulate {
            input,
            sequence,
            trace,
        } => cmd_simulate(&input, &sequence, trace, out),
        Command::Duality {
            input,
            count,
            seed,
            max_moves,
        } => cmd_duality(&input, count, seed, max_moves, out),
        Command::Reduce {
            input,
            convert,
            tooth_len,
            connector_edges,
            out: out_path,
            witness_out,
        } => cmd_reduce(
            &input,
            convert,
            tooth_len,
            connector_edges,
            out_path.as_deref(),
            witness_out.as_deref(),
            out,
        ),
        Command::Demo {
            name,
            out: out_path,
            strategy_out,
        } => cmd_demo(
            name.as_deref(),
            out_path.as_deref(),
            strategy_out.as_deref(),
            out,
        ),
    }
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> std::result::Result<Instance, Failure> {
    let text = read_text(path)?;
    parse_instance(&text).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

/// `3/5 (≈0.6)`, or just `2` for integers.
fn show(r: &Rational) -> String {
    if r.is_integer() {
        format_rational(r)
    } else {
        format!("{} (≈{})", format_rational(r), approx(r))
    }
}

/// Tab-separated exact and decimal fields.
fn fields(r: &Rational) -> String {
    format!("{}\t{}", format_rational(r), approx(r))
}

fn print_sequence(
    out: &mut dyn Write,
    title: &str,
    seq: &MoveSequence,
    graph: &Graph,
) -> io::Result<()> {
    let plural = if seq.len() == 1 { "" } else { "s" };
    writeln!(out, "{title} ({} move{plural}):", seq.len())?;
    for line in serialize_sequence(seq, graph).lines() {
        writeln!(out, "  {line}")?;
    }
    Ok(())
}

fn cmd_solve(
    input: &Path,
    method: Method,
    strategy_out: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = read_instance(input)?;
    let result: crate::Result<SolverResult> = match method {
        Method::Auto => solve_auto(&inst),
        Method::Edge => kappa_edge(&inst),
        Method::Path => kappa_path_general(&inst),
        Method::Universal => kappa_universal_target(&inst),
    };
    let res = result?;
    writeln!(out, "family = {}", res.family)?;
    writeln!(out, "kappa = {}", show(&res.kappa))?;
    print_sequence(out, "strategy", &res.strategy, &inst.graph)?;
    writeln!(out, "KAPPA\t{}\t{}", fields(&res.kappa), res.family)?;
    if let Some(path) = strategy_out {
        write_file(path, &serialize_sequence(&res.strategy, &inst.graph))?;
    }
    Ok(())
}

fn cmd_oracle(
    input: &Path,
    depth: usize,
    mode: ModeArg,
    config: &OracleConfig,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = read_instance(input)?;
    let mode = match mode {
        ModeArg::Hyper => SearchMode::Hypermove,
        ModeArg::Edge => SearchMode::SingleEdge,
    };
    let res = kappa_oracle(&inst, depth, mode, config)?;
    writeln!(out, "value = {}", show(&res.value))?;
    writeln!(out, "depth = {}, mode = {}", res.depth, res.mode)?;
    print_sequence(out, "certificate", &res.certificate, &inst.graph)?;
    writeln!(
        out,
        "VALUE\t{}\t{}\t{}",
        fields(&res.value),
        res.depth,
        res.mode
    )?;
    writeln!(
        out,
        "STATS\tnodes\t{}\tpruned\t{}\tmemo_hits\t{}",
        res.stats.nodes, res.stats.pruned, res.stats.memo_hits
    )?;
    Ok(())
}

fn names(graph: &Graph, set: &[usize]) -> String {
    set.iter()
        .map(|&u| graph.name(u))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_gla(input: &Path, mode: GlaModeArg, out: &mut dyn Write) -> CmdResult {
    let inst = read_instance(input)?;
    let mode = match mode {
        GlaModeArg::Exhaustive => GlaMode::Exhaustive,
        GlaModeArg::Greedy => GlaMode::Greedy,
    };
    let animal = gla_value(&inst, mode, &HeuristicCaps::default())?;
    let bottlenecks = find_bottlenecks(&inst, &animal);
    writeln!(out, "gla = {}", show(&animal.value))?;
    writeln!(out, "animal = {{{}}}", names(&inst.graph, &animal.vertices))?;
    writeln!(
        out,
        "bottlenecks = {{{}}}",
        names(&inst.graph, &bottlenecks)
    )?;
    writeln!(
        out,
        "GLA\t{}\t{}",
        fields(&animal.value),
        names(&inst.graph, &animal.vertices)
    )?;
    Ok(())
}

fn cmd_plan(
    input: &Path,
    caps: &HeuristicCaps,
    strategy_out: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = read_instance(input)?;
    let plan = plan_heuristic(&inst, caps)?;
    writeln!(out, "achieved = {}", show(&plan.achieved))?;
    writeln!(
        out,
        "final animal = {{{}}}",
        names(&inst.graph, &plan.final_animal.vertices)
    )?;
    print_sequence(out, "strategy", &plan.sequence, &inst.graph)?;
    writeln!(out, "PLAN\t{}", fields(&plan.achieved))?;
    if let Some(path) = strategy_out {
        write_file(path, &serialize_sequence(&plan.sequence, &inst.graph))?;
    }
    Ok(())
}

fn cmd_simulate(input: &Path, sequence: &Path, trace: bool, out: &mut dyn Write) -> CmdResult {
    let inst = read_instance(input)?;
    let text = read_text(sequence)?;
    let seq = parse_sequence(&text, &inst.graph)
        .map_err(|e| input_failure(format!("{}: {e}", sequence.display())))?;
    let run = run_sequence(&inst, &seq)?;
    let g = &inst.graph;
    if trace {
        for (step, profile) in run.profiles.iter().enumerate() {
            for (u, level) in profile.levels.iter().enumerate() {
                writeln!(out, "TRACE\t{step}\t{}\t{}", g.name(u), fields(level))?;
            }
        }
    }
    let last = run.final_profile();
    for (u, level) in last.levels.iter().enumerate() {
        writeln!(out, "LEVEL\t{}\t{}", g.name(u), fields(level))?;
    }
    let t = inst.target;
    writeln!(out, "target {} = {}", g.name(t), show(&last.levels[t]))?;
    Ok(())
}

fn cmd_duality(
    input: &Path,
    count: usize,
    seed: u64,
    max_moves: usize,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = read_instance(input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failed = 0;
    for i in 0..count {
        let seq = random_sequence(&mut rng, &inst.graph, max_moves, false);
        let direct = crate::engine::target_outcome(&inst, &seq)?;
        let dual = dual_profile(&inst.graph, inst.target, &seq)?;
        let combined = dual.combine(inst.levels());
        if direct != combined {
            failed += 1;
            writeln!(
                out,
                "MISMATCH\t{i}\t{}\t{}",
                format_rational(&direct),
                format_rational(&combined)
            )?;
        }
    }
    let passed = count - failed;
    writeln!(
        out,
        "duality held on {passed} of {count} sequences (seed {seed})"
    )?;
    writeln!(out, "DUALITY\t{count}\t{passed}\t{failed}")?;
    if failed > 0 {
        return Err(input_failure(format!("{failed} duality mismatches")));
    }
    Ok(())
}

fn cmd_reduce(
    input: &Path,
    convert: bool,
    tooth_len: Option<usize>,
    connector_edges: Option<usize>,
    out_path: Option<&Path>,
    witness_out: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let mut formula = parse_dimacs(&read_text(input)?)?;
    if convert {
        formula = to_exact_3sat(&formula)?;
    } else if !formula.is_exact_3sat() {
        return Err(input_failure(
            "formula is not exact 3-SAT; rerun with --convert to pad clauses with forced-false dummies",
        ));
    }
    let n = formula.clauses.len().max(1);
    let scale = match (tooth_len, connector_edges) {
        (None, None) => None,
        (t, c) => {
            let d = ReductionScale::default_for(n);
            Some(ReductionScale {
                tooth_len: t.unwrap_or(d.tooth_len),
                connector_edges: c.unwrap_or(d.connector_edges),
            })
        }
    };
    let comb = build_reduction(&formula, scale)?;
    let inst = &comb.instance;
    writeln!(
        out,
        "clauses n = {}, variables k = {}, |V| = {}, |E| = {}",
        comb.n,
        comb.k,
        inst.vertex_count(),
        inst.graph.edge_count()
    )?;
    if !comb.default_scale {
        writeln!(
            out,
            "note: non-default scale; the threshold guarantee does not apply"
        )?;
    }
    writeln!(
        out,
        "COUNTS\t{}\t{}\t{}\t{}",
        comb.n,
        comb.k,
        inst.vertex_count(),
        inst.graph.edge_count()
    )?;
    if let Some(path) = out_path {
        write_file(path, &serialize_instance(inst))?;
    }
    if formula.num_vars > BRUTE_SAT_MAX_VARS {
        writeln!(
            out,
            "witness search skipped ({} variables)",
            formula.num_vars
        )?;
        return Ok(());
    }
    match brute_sat(&formula)? {
        None => {
            writeln!(out, "no witness (unsatisfiable)")?;
            writeln!(out, "WITNESS\tnone")?;
        }
        Some(assignment) => {
            let seq = witness_strategy(&comb, &assignment)?;
            let value = crate::engine::target_outcome(inst, &seq)?;
            let bits: String = assignment
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            writeln!(out, "witness assignment = {bits}")?;
            writeln!(out, "witness target level = {}", show(&value))?;
            writeln!(out, "WITNESS\t{}\t{bits}", fields(&value))?;
            if let Some(path) = witness_out {
                write_file(path, &serialize_sequence(&seq, &inst.graph))?;
            }
        }
    }
    Ok(())
}

fn cmd_demo(
    name: Option<&str>,
    out_path: Option<&Path>,
    strategy_out: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let Some(name) = name else {
        for name in DEMO_NAMES {
            let d = demo(name).expect("listed demo exists");
            writeln!(out, "{name}\t{}", d.description)?;
        }
        return Ok(());
    };
    let d = demo(name)
        .ok_or_else(|| input_failure(format!("unknown demo `{name}`; run `demo` to list them")))?;
    writeln!(out, "# {}: {}", d.name, d.description)?;
    write!(out, "{}", serialize_instance(&d.instance))?;
    if let Some(path) = out_path {
        write_file(path, &serialize_instance(&d.instance))?;
    }
    if let Some(seq) = &d.strategy {
        let value = crate::engine::target_outcome(&d.instance, seq)?;
        print_sequence(out, "# strategy", seq, &d.instance.graph)?;
        writeln!(out, "# strategy reaches {}", show(&value))?;
        if let Some(path) = strategy_out {
            write_file(path, &serialize_sequence(seq, &d.instance.graph))?;
        }
    }
    Ok(())
}
