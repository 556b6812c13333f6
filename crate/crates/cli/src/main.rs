//! Command-line surface over the state-vector engine.
//!
//! Exit codes are part of the contract: `prove` maps its verdict to 0
//! (entailed), 1 (refuted), 3 (contingent) or 4 (premises unsatisfiable);
//! `equiv` and `oracle-check` exit 1 on a negative answer; any input or
//! processing failure exits 2 with a diagnostic on stderr. Stdout carries
//! results only and is byte-identical for identical inputs and flags,
//! parallel mode included; traces and warnings go to stderr.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use state_algebra::{
    canonicalize, reduce_heuristic, CompileConfig, DenseVector, KbConfig, KnowledgeBase,
    OpCounters, Registry, StateVector, Strategy, ValidSetOpts, ValidSetTrace, VarId,
    VariableOrder, Verdict,
};

#[derive(Parser)]
#[command(name = "stalg", version, about = "Compile, reduce and query sparse state vectors")]
struct Cli {
    #[command(flatten)]
    opts: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input syntax (oracle-check always reads row files)
    #[arg(long, global = true, value_enum, default_value_t = Format::Dsl, env = "STALG_FORMAT")]
    format: Format,

    /// Event order for canonical forms, e.g. "3,1,2", "E3,E1,E2" or "1<2"
    #[arg(long, global = true, env = "STALG_ORDER")]
    order: Option<String>,

    /// Canonicalize printed vectors and fold steps under the event order
    #[arg(long, global = true, env = "STALG_CANONICAL")]
    canonical: bool,

    /// Report per-step statistics on stderr
    #[arg(long, global = true, env = "STALG_TRACE")]
    trace: bool,

    /// Data-parallel row operations; output stays byte-identical
    #[arg(long, global = true, env = "STALG_PARALLEL")]
    parallel: bool,

    /// Largest universe oracle-check is willing to expand densely
    #[arg(long, global = true, default_value_t = 20, env = "STALG_ORACLE_CAP")]
    oracle_cap: u32,

    /// Widest formula compiled by direct enumeration
    #[arg(long, global = true, default_value_t = 16, env = "STALG_COMPILE_CAP")]
    compile_cap: usize,

    /// Keep supplementary definition events instead of projecting them away
    #[arg(long, global = true, env = "STALG_KEEP_SUPPLEMENTARIES")]
    keep_supplementaries: bool,

    /// Machine-readable JSON on stdout
    #[arg(long, global = true, env = "STALG_JSON")]
    json: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Formula statements, one per line
    Dsl,
    /// DIMACS CNF
    Dimacs,
    /// A state vector as pattern lines
    Rows,
}

#[derive(Subcommand)]
enum Command {
    /// Compile each input formula and print its state vector
    Compile {
        /// Input file; absent or `-` reads stdin
        input: Option<PathBuf>,
    },
    /// Decide how the input relates to a query formula
    Prove {
        /// Formula to test against the knowledge base
        query: String,
        input: Option<PathBuf>,
    },
    /// Count models of the input (assignments of a row file)
    Count { input: Option<PathBuf> },
    /// Canonical form of the input vector under the event order
    Canon { input: Option<PathBuf> },
    /// Heuristic reduction of the input vector
    Reduce { input: Option<PathBuf> },
    /// Compare two inputs for set equivalence
    Equiv { a: PathBuf, b: PathBuf },
    /// Recompute an operation densely and report agree/disagree
    OracleCheck {
        #[arg(value_enum)]
        op: OracleOp,
        a: PathBuf,
        b: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OracleOp {
    Product,
    Add,
    Subtract,
    Reduce,
    Canon,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => process::exit(code),
        Err(err) => {
            eprintln!("stalg: {err:#}");
            process::exit(2);
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let g = &cli.opts;
    match &cli.command {
        Command::Compile { input } => cmd_compile(&read_input(input.as_deref())?, g),
        Command::Prove { query, input } => cmd_prove(query, &read_input(input.as_deref())?, g),
        Command::Count { input } => cmd_count(&read_input(input.as_deref())?, g),
        Command::Canon { input } => cmd_canon(&read_input(input.as_deref())?, g),
        Command::Reduce { input } => cmd_reduce(&read_input(input.as_deref())?, g),
        Command::Equiv { a, b } => cmd_equiv(&read_input(Some(a))?, &read_input(Some(b))?, g),
        Command::OracleCheck { op, a, b } => cmd_oracle_check(*op, a, b.as_deref(), g),
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .context("reading stdin")?;
            Ok(text)
        }
    }
}

fn load_kb(text: &str, g: &Global) -> Result<KnowledgeBase> {
    let config = KbConfig {
        compile: CompileConfig { cap: g.compile_cap },
        ..KbConfig::default()
    };
    let mut kb = KnowledgeBase::with_config(config);
    match g.format {
        Format::Dsl => kb.add_source(text)?,
        Format::Dimacs => {
            for warning in kb.add_dimacs(text)? {
                eprintln!("stalg: warning: {warning}");
            }
        }
        Format::Rows => bail!("rows input is a vector, not formulas; use --format dsl or dimacs"),
    }
    Ok(kb)
}

fn parse_rows(text: &str) -> Result<(StateVector, u32)> {
    StateVector::parse_pattern_block(text).map_err(|e| anyhow!("{e}"))
}

/// Resolves `--order` against the registry when there is one; bare numbers
/// and `E<n>` names always work, so row files can be ordered too.
fn explicit_order(g: &Global, registry: Option<&Registry>) -> Result<Option<VariableOrder>> {
    let Some(text) = g.order.as_deref() else {
        return Ok(None);
    };
    let mut ids = Vec::new();
    for token in text
        .split([',', ' ', '<'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        let id = registry
            .and_then(|r| r.lookup(token))
            .or_else(|| token.parse::<u32>().ok().and_then(VarId::new))
            .or_else(|| {
                token
                    .strip_prefix('E')
                    .and_then(|d| d.parse::<u32>().ok())
                    .and_then(VarId::new)
            })
            .ok_or_else(|| anyhow!("--order: unknown event {token:?}"))?;
        ids.push(id);
    }
    Ok(Some(VariableOrder::new(ids)?))
}

fn fold_opts(g: &Global, registry: &Registry) -> Result<ValidSetOpts> {
    Ok(ValidSetOpts {
        trace: g.trace,
        parallel: g.parallel,
        canonical: g.canonical,
        order: explicit_order(g, Some(registry))?,
        ..ValidSetOpts::default()
    })
}

fn print_trace(trace: &ValidSetTrace) {
    let Some(steps) = &trace.steps else { return };
    for (i, s) in steps.iter().enumerate() {
        eprintln!(
            "stalg: step {:>3} [{}]: {} rows -> product {} -> reduced {} \
             ({} checks, {} merges, {} rounds)",
            i + 1,
            s.source,
            s.rows_before,
            s.rows_product,
            s.rows_after,
            s.reduction.pairwise_checks,
            s.reduction.reductions_applied,
            s.reduction.rounds,
        );
    }
    if trace.budget_exhausted {
        eprintln!("stalg: step budget exhausted; result covers a prefix of the premises");
    }
}

/// The vector a vector-level command operates on, with its print width.
/// Formula inputs go through the fold; the knowledge base rides along for
/// name-aware `--order` resolution.
fn vector_input(text: &str, g: &Global) -> Result<(StateVector, u32, Option<KnowledgeBase>)> {
    if g.format == Format::Rows {
        let (vector, width) = parse_rows(text)?;
        return Ok((vector, width.max(1), None));
    }
    let kb = load_kb(text, g)?;
    let opts = fold_opts(g, kb.registry())?;
    let trace = kb.valid_set(&opts);
    if g.trace {
        print_trace(&trace);
    }
    let (vector, width) = if g.keep_supplementaries {
        (trace.result, kb.registry().len().max(1))
    } else {
        let projected = kb.eliminate_supplementaries(&trace.result);
        let width = kb.registry().user_vars().max_id().map_or(1, VarId::get);
        (projected, width)
    };
    Ok((vector, width, Some(kb)))
}

fn row_strings(v: &StateVector, width: u32) -> Result<Vec<String>> {
    v.rows()
        .iter()
        .map(|(r, m)| {
            let mut p = r.to_pattern(width)?;
            if *m > 1 {
                p.push('x');
                p.push_str(&m.to_string());
            }
            Ok(p)
        })
        .collect()
}

fn cmd_compile(text: &str, g: &Global) -> Result<i32> {
    let kb = load_kb(text, g)?;
    let width = kb.registry().len().max(1);
    let order = explicit_order(g, Some(kb.registry()))?.unwrap_or_else(|| VariableOrder::ascending(0));
    let compiled: Vec<(String, StateVector)> = kb
        .entries()
        .iter()
        .map(|entry| {
            let vector = if g.canonical {
                canonicalize(&entry.valid, &order)
            } else {
                entry.valid.clone()
            };
            (entry.formula.to_string(), vector)
        })
        .collect();

    if g.json {
        let entries = compiled
            .iter()
            .map(|(source, vector)| {
                Ok(json!({"source": source, "rows": row_strings(vector, width)?}))
            })
            .collect::<Result<Vec<_>>>()?;
        println!("{}", json!({"width": width, "entries": entries}));
    } else {
        let many = compiled.len() > 1;
        for (i, (source, vector)) in compiled.iter().enumerate() {
            if many {
                println!("# {}: {}", i + 1, source);
            }
            print!("{}", vector.to_pattern_block(width)?);
        }
    }
    Ok(0)
}

fn cmd_prove(query: &str, text: &str, g: &Global) -> Result<i32> {
    let mut kb = load_kb(text, g)?;
    let f = kb.parse_formula(query)?;
    let opts = fold_opts(g, kb.registry())?;
    let trace = kb.valid_set(&opts);
    if g.trace {
        print_trace(&trace);
    }
    let outcome = kb.query_with(&trace.result, &f, Strategy::default())?;
    let width = kb.registry().len().max(1);
    let witness = outcome
        .witness
        .as_ref()
        .map(|w| w.to_pattern(width))
        .transpose()?;

    if g.json {
        println!(
            "{}",
            json!({"verdict": outcome.verdict.to_string(), "witness": witness})
        );
    } else {
        println!("{}", outcome.verdict);
        if let Some(w) = witness {
            println!("witness: {w}");
        }
    }
    Ok(match outcome.verdict {
        Verdict::Entailed => 0,
        Verdict::Refuted => 1,
        Verdict::Contingent => 3,
        Verdict::PremiseUnsatisfiable => 4,
    })
}

fn cmd_count(text: &str, g: &Global) -> Result<i32> {
    let count = if g.format == Format::Rows {
        let (vector, width) = parse_rows(text)?;
        vector.cardinality(width)?
    } else {
        let kb = load_kb(text, g)?;
        let opts = fold_opts(g, kb.registry())?;
        let trace = kb.valid_set(&opts);
        if g.trace {
            print_trace(&trace);
        }
        if g.keep_supplementaries {
            trace.result.cardinality(kb.registry().len())?
        } else {
            let projected = kb.eliminate_supplementaries(&trace.result);
            projected.cardinality_over(&kb.registry().user_vars())?
        }
    };
    if g.json {
        println!("{}", json!({"models": count.to_string()}));
    } else {
        println!("{count}");
    }
    Ok(0)
}

fn cmd_canon(text: &str, g: &Global) -> Result<i32> {
    let (vector, width, kb) = vector_input(text, g)?;
    let order = explicit_order(g, kb.as_ref().map(|k| k.registry()))?
        .unwrap_or_else(|| VariableOrder::ascending(0));
    let canon = canonicalize(&vector, &order);
    if g.json {
        println!(
            "{}",
            json!({"width": width, "rows": row_strings(&canon, width)?})
        );
    } else {
        print!("{}", canon.to_pattern_block(width)?);
    }
    Ok(0)
}

fn cmd_reduce(text: &str, g: &Global) -> Result<i32> {
    let (vector, width, _) = vector_input(text, g)?;
    let (reduced, stats) = reduce_heuristic(&vector);
    if g.trace {
        eprintln!(
            "stalg: reduce: {} rows -> {} ({} checks, {} merges, {} rounds)",
            stats.rows_in, stats.rows_out, stats.pairwise_checks, stats.reductions_applied,
            stats.rounds,
        );
    }
    if g.json {
        println!(
            "{}",
            json!({"width": width, "rows": row_strings(&reduced, width)?})
        );
    } else {
        print!("{}", reduced.to_pattern_block(width)?);
    }
    Ok(0)
}

fn cmd_equiv(text_a: &str, text_b: &str, g: &Global) -> Result<i32> {
    let (a, _, _) = vector_input(text_a, g)?;
    let (b, _, _) = vector_input(text_b, g)?;
    let same = a.equivalent(&b);
    if g.json {
        println!("{}", json!({"equivalent": same}));
    } else {
        println!("{}", if same { "equivalent" } else { "inequivalent" });
    }
    Ok(if same { 0 } else { 1 })
}

fn cmd_oracle_check(op: OracleOp, a: &Path, b: Option<&Path>, g: &Global) -> Result<i32> {
    let (va, wa) = parse_rows(&read_input(Some(a))?)?;
    let takes_two = matches!(op, OracleOp::Product | OracleOp::Add | OracleOp::Subtract);
    let (vb, wb) = match (takes_two, b) {
        (true, Some(p)) => parse_rows(&read_input(Some(p))?)?,
        (true, None) => bail!("this check needs two row files"),
        (false, None) => (StateVector::empty(), 0),
        (false, Some(_)) => bail!("this check takes a single row file"),
    };
    let n = wa.max(wb).max(1);
    if n > g.oracle_cap {
        bail!("universe of {n} events exceeds --oracle-cap {}", g.oracle_cap);
    }
    let expand = |v: &StateVector| DenseVector::expand_capped(v, n, g.oracle_cap);

    let agree = match op {
        OracleOp::Product => {
            let sparse = va.multiply_with(&vb, g.parallel, &mut OpCounters::default());
            expand(&sparse)? == expand(&va)?.mul(&expand(&vb)?)?
        }
        OracleOp::Add => expand(&va.add(&vb))? == expand(&va)?.add(&expand(&vb)?)?,
        OracleOp::Subtract => {
            expand(&va.subtract_set(&vb))?
                == expand(&va)?
                    .binary_project()
                    .set_subtract(&expand(&vb)?.binary_project())?
        }
        OracleOp::Reduce => expand(&reduce_heuristic(&va).0)? == expand(&va)?,
        OracleOp::Canon => {
            let order =
                explicit_order(g, None)?.unwrap_or_else(|| VariableOrder::ascending(0));
            expand(&canonicalize(&va, &order))? == expand(&va)?.binary_project()
        }
    };

    if g.json {
        println!("{}", json!({"agree": agree}));
    } else {
        println!("{}", if agree { "agree" } else { "disagree" });
    }
    Ok(if agree { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn global() -> Global {
        Global {
            format: Format::Dsl,
            order: None,
            canonical: false,
            trace: false,
            parallel: false,
            oracle_cap: 20,
            compile_cap: 16,
            keep_supplementaries: false,
            json: false,
        }
    }

    #[test]
    fn order_tokens_accept_numbers_names_and_chevrons() {
        let mut g = global();
        g.order = Some("3,1 2".into());
        let order = explicit_order(&g, None).unwrap().unwrap();
        let ids: Vec<u32> = order.as_slice().iter().map(|v| v.get()).collect();
        assert_eq!(ids, [3, 1, 2]);

        g.order = Some("E2<E1".into());
        let order = explicit_order(&g, None).unwrap().unwrap();
        let ids: Vec<u32> = order.as_slice().iter().map(|v| v.get()).collect();
        assert_eq!(ids, [2, 1]);
    }

    #[test]
    fn duplicate_order_tokens_are_rejected() {
        let mut g = global();
        g.order = Some("1,1".into());
        assert!(explicit_order(&g, None).is_err());
    }

    #[test]
    fn rows_input_keeps_its_printed_width() {
        let (vector, width, kb) = vector_input("1-\n01\n", &Global {
            format: Format::Rows,
            ..global()
        })
        .unwrap();
        assert_eq!(width, 2);
        assert_eq!(vector.len(), 2);
        assert!(kb.is_none());
    }
}
