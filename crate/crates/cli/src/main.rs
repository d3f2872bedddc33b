//! `h2mc`: model checking second-order hyperproperties on tree-shaped and acyclic
//! Kripke structures.
//!
//! Exit codes: 0 when the checked property holds, 1 when it does not, 2 on any error.
//! Reports are `key: value` lines on stdout; wall time goes to stderr so that stdout
//! is byte-stable for identical inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use h2mc_core::formula::{classify_fragment, count_so_alternations, parse_formula, Formula, Fragment, Quantifier};
use h2mc_core::kripke::{extract_traces, is_acyclic, is_tree_shaped, parse_kripke, print_kripke, unroll_to_tree, KripkeStructure};
use h2mc_core::reductions::{horn_oracle, horn_to_instance, parse_horn, parse_qbf, qbf_oracle, qbf_to_instance, Instance};
use h2mc_core::semantics::{check_traces, CheckOptions, FixpointMode, SOL_BOUND};

#[derive(Parser)]
#[command(name = "h2mc", version, about = "Model checker for second-order hyperproperties on finite tree-shaped and acyclic structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula against a structure.
    Check {
        structure: PathBuf,
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = FragmentArg::Auto)]
        fragment: FragmentArg,
        /// Evaluate the prefix literally: no miniscoping, short-circuiting or memoization.
        #[arg(long)]
        no_prune: bool,
        /// Append work counters to the report.
        #[arg(long)]
        stats: bool,
    },
    /// Parse a structure and report its shape.
    Validate {
        structure: PathBuf,
        #[arg(long, value_enum)]
        expect: Option<Shape>,
    },
    /// List the traces of an acyclic structure.
    Traces { structure: PathBuf },
    /// Unroll an acyclic structure into a tree with the same traces.
    Unroll {
        structure: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Report the fragment of a formula.
    Classify { formula: PathBuf },
    /// Generate a model-checking instance from a Horn or QBF input.
    Gen {
        kind: Kind,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decide a Horn or QBF input directly.
    Oracle { kind: Kind, input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FragmentArg {
    /// Least fixpoints by iteration, whatever the formula.
    Auto,
    /// Like `auto`, but reject formulas outside the fixpoint fragment.
    Fixpoint,
    /// Fixpoints via brute-force enumeration of minimal solutions.
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Tree,
    Acyclic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Horn,
    Qbf,
}

type Res<T> = Result<T, String>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_structure(path: &Path) -> Res<KripkeStructure> {
    parse_kripke(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_formula(path: &Path) -> Res<Formula> {
    parse_formula(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn shape_name(k: &KripkeStructure) -> &'static str {
    if is_tree_shaped(k) {
        "tree"
    } else if is_acyclic(k) {
        "acyclic"
    } else {
        "cyclic"
    }
}

fn run_check(
    structure: &Path,
    formula: &Path,
    fragment: FragmentArg,
    no_prune: bool,
    stats: bool,
) -> Res<(bool, String)> {
    let k = load_structure(structure)?;
    let f = load_formula(formula)?;
    let class = classify_fragment(&f);
    if let FragmentArg::Fixpoint = fragment {
        if !matches!(class, Fragment::FixpointFragment | Fragment::QuantifierFree) {
            return Err(format!("formula is {class}, not in the fixpoint fragment"));
        }
    }
    let mut opts = if no_prune {
        CheckOptions::no_prune()
    } else {
        CheckOptions::default()
    };
    if let FragmentArg::Full = fragment {
        opts.fixpoint = FixpointMode::BruteForce { bound: SOL_BOUND };
    }
    let shape = shape_name(&k);
    let ts = extract_traces(&k).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = check_traces(&ts, &f, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", r.verdict);
    let _ = writeln!(out, "fragment: {class}");
    let _ = writeln!(out, "shape: {shape}");
    let _ = writeln!(out, "states: {}", k.num_states());
    let _ = writeln!(out, "traces: {}", ts.len());
    for (x, a) in &r.fixpoint_witnesses {
        let idx: Vec<String> = a.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "witness.{x}.size: {}", a.len());
        let _ = writeln!(out, "witness.{x}: {{{}}}", idx.join(","));
    }
    if stats {
        let s = r.stats;
        let _ = writeln!(out, "stats.subsets_enumerated: {}", s.subsets_enumerated);
        let _ = writeln!(out, "stats.fixpoint_rounds: {}", s.fixpoint_rounds);
        let _ = writeln!(out, "stats.body_evaluations: {}", s.body_evaluations);
        let _ = writeln!(out, "stats.memo_hits: {}", s.memo_hits);
    }
    eprintln!("wall_time_ms: {:.3}", elapsed.as_secs_f64() * 1e3);
    Ok((r.verdict, out))
}

fn run_validate(structure: &Path, expect: Option<Shape>) -> Res<(bool, String)> {
    let k = load_structure(structure)?;
    let tree = is_tree_shaped(&k);
    let acyclic = is_acyclic(&k);
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", k.num_states());
    let _ = writeln!(out, "aps: {}", k.aps().join(" "));
    let _ = writeln!(out, "initial: {}", k.state_name(k.initial()));
    let _ = writeln!(out, "shape: {}", shape_name(&k));
    if acyclic {
        let ts = extract_traces(&k).map_err(|e| e.to_string())?;
        let _ = writeln!(out, "traces: {}", ts.len());
    }
    let ok = match expect {
        None => true,
        Some(Shape::Tree) => tree,
        Some(Shape::Acyclic) => acyclic,
    };
    Ok((ok, out))
}

fn run_traces(structure: &Path) -> Res<String> {
    let k = load_structure(structure)?;
    let ts = extract_traces(&k).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for i in 0..ts.len() {
        let _ = writeln!(out, "{i}: {}", ts.show(i));
    }
    Ok(out)
}

fn run_classify(formula: &Path) -> Res<String> {
    let f = load_formula(formula)?;
    let count = |p: fn(&Quantifier) -> bool| f.prefix.iter().filter(|q| p(q)).count();
    let mut out = String::new();
    let _ = writeln!(out, "fragment: {}", classify_fragment(&f));
    let _ = writeln!(out, "so_alternations: {}", count_so_alternations(&f));
    let _ = writeln!(
        out,
        "set_quantifiers: {}",
        count(|q| matches!(q, Quantifier::SoExists(_) | Quantifier::SoForall(_)))
    );
    let _ = writeln!(out, "fixpoints: {}", count(|q| matches!(q, Quantifier::Fixpoint(_))));
    let _ = writeln!(out, "trace_quantifiers: {}", count(Quantifier::is_first_order));
    Ok(out)
}

fn instance(kind: Kind, input: &Path) -> Res<Instance> {
    let text = read(input)?;
    let err = |e: h2mc_core::Error| format!("{}: {e}", input.display());
    match kind {
        Kind::Horn => Ok(horn_to_instance(&parse_horn(&text).map_err(err)?)),
        Kind::Qbf => qbf_to_instance(&parse_qbf(&text).map_err(err)?).map_err(err),
    }
}

fn run_gen(kind: Kind, input: &Path, dir: &Path) -> Res<String> {
    let inst = instance(kind, input)?;
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance");
    let files = [
        (format!("{stem}.kripke"), print_kripke(&inst.structure)),
        (format!("{stem}.formula"), inst.formula.to_pretty_string()),
        (format!("{stem}.meta"), inst.meta_text()),
    ];
    let mut out = String::new();
    for (name, text) in &files {
        let path = dir.join(name);
        write(&path, text)?;
        let _ = writeln!(out, "wrote: {}", path.display());
    }
    Ok(out)
}

fn run_oracle(kind: Kind, input: &Path) -> Res<(bool, String)> {
    let text = read(input)?;
    let err = |e: h2mc_core::Error| format!("{}: {e}", input.display());
    Ok(match kind {
        Kind::Horn => {
            let v = horn_oracle(&parse_horn(&text).map_err(err)?);
            (v, format!("satisfiable: {v}\n"))
        }
        Kind::Qbf => {
            let v = qbf_oracle(&parse_qbf(&text).map_err(err)?);
            (v, format!("valid: {v}\n"))
        }
    })
}

fn run(cli: Cli) -> Res<bool> {
    let (ok, out) = match cli.command {
        Command::Check {
            structure,
            formula,
            fragment,
            no_prune,
            stats,
        } => run_check(&structure, &formula, fragment, no_prune, stats)?,
        Command::Validate { structure, expect } => run_validate(&structure, expect)?,
        Command::Traces { structure } => (true, run_traces(&structure)?),
        Command::Unroll { structure, output } => {
            let k = load_structure(&structure)?;
            let u = unroll_to_tree(&k).map_err(|e| e.to_string())?;
            write(&output, &print_kripke(&u))?;
            (true, format!("states: {}\nwrote: {}\n", u.num_states(), output.display()))
        }
        Command::Classify { formula } => (true, run_classify(&formula)?),
        Command::Gen {
            kind,
            input,
            output,
        } => (true, run_gen(kind, &input, &output)?),
        Command::Oracle { kind, input } => run_oracle(kind, &input)?,
    };
    print!("{out}");
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
