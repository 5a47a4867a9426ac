//! Command-line front end. Every output is a pure function of the arguments.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::calculus::{deriv_check, CheckPoint, Multiset, DEFAULT_JET_CAP};
use crate::chain::{ChainParams, PercolationSampler, RecursiveSampler};
use crate::error::{Error, Result};
use crate::measure::{nu_connected, nu_full, EAGER_CAP};
use crate::montecarlo::{compare_laws, zero_pattern_check, PoissonField};
use crate::rational::{fmt_decimal, fmt_rational, parse_rational, Q};
use crate::representability::{is_representable, phase_scan, scaling_check, Verdict};
use crate::thresholds::threshold_table;
use crate::tree::{parse_tree, parse_vertex_set, RootedTree, VertexSet, DEFAULT_ORDER_CAP};

#[derive(Parser, Debug)]
#[command(name = "treerep", version, about = "Exact Poisson-representability of tree-indexed Markov chains")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Signed measure entries and the representability verdict.
    Analyze(AnalyzeArgs),
    /// Verdicts over an (r, p) grid as CSV.
    Scan(ScanArgs),
    /// Threshold table as CSV.
    Thresholds(ThresholdArgs),
    /// Exact derivative of ν(S) next to its closed form.
    DerivCheck(DerivArgs),
    /// Monte-Carlo comparison of the Poisson field and both chain samplers.
    Verify(VerifyArgs),
    /// Subdivision consistency of the measure.
    ScalingCheck(ScalingArgs),
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    /// `path:N`, `star:K`, `spider:KxL`, `octopus:MxD` or a tree JSON file.
    #[arg(long)]
    pub tree: String,
    /// Uniform probability of a fresh 0.
    #[arg(long, default_value = "1/2")]
    pub r: String,
    /// Uniform resampling probability.
    #[arg(long, default_value = "1/2")]
    pub p: String,
    /// Per-vertex and per-edge parameters as JSON; overrides --r and --p.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Representable,
    NotRepresentable,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Only list connected sets (all others are exactly zero).
    #[arg(long)]
    pub connected_only: bool,
    /// Exit with status 1 unless the verdict matches.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub tree: String,
    /// `start:stop:step`, a comma list, or a single value.
    #[arg(long)]
    pub r: String,
    #[arg(long)]
    pub p: String,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// `a..b` (inclusive) or a single n.
    #[arg(long, default_value = "3..8")]
    pub n: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum At {
    P0,
    P1,
    R1,
}

#[derive(Args, Debug)]
pub struct DerivArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Vertex set S, e.g. `0,1,3`.
    #[arg(long)]
    pub set: String,
    /// Base point: all p_e = 0, all p_e = 1, or the octopus point with r_o = 1.
    #[arg(long, value_enum)]
    pub at: At,
    /// Edges `u-v` (or edge indices) for p0/p1, vertex ids for r1; repeats add multiplicity.
    #[arg(long)]
    pub multiset: String,
    /// Highest order kept per variable in the jet.
    #[arg(long, default_value_t = DEFAULT_JET_CAP)]
    pub cap: u32,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Significance level of the chi-square test.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Tolerance of the zero-pattern check in binomial standard deviations.
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long)]
    pub tree: String,
    #[arg(long, default_value = "1/2")]
    pub r: String,
    #[arg(long, default_value = "1/2")]
    pub p: String,
    /// Subdivision factor.
    #[arg(long)]
    pub k: usize,
}

/// Rendered output plus exit status.
pub struct Outcome {
    pub body: String,
    pub status: i32,
}

/// Parses arguments, runs, writes output and returns the exit status
/// (0 success, 1 failed expectation or check, 2 usage or input error).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    outcome.status
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze(a) => analyze(a),
        Command::Scan(a) => scan(a, cmd),
        Command::Thresholds(a) => thresholds(a, cmd),
        Command::DerivCheck(a) => deriv(a),
        Command::Verify(a) => verify(a),
        Command::ScalingCheck(a) => scaling(a),
    }
}

fn load(chain: &ChainArgs) -> Result<(RootedTree, ChainParams)> {
    let tree = parse_tree(&chain.tree, DEFAULT_ORDER_CAP)?;
    let params = match &chain.params {
        Some(path) => {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            ChainParams::from_json(&tree, &v)?
        }
        None => ChainParams::uniform(&tree, &parse_rational(&chain.r)?, &parse_rational(&chain.p)?)?,
    };
    Ok((tree, params))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

/// `# treerep <version> config=<sha256 of the parsed command>`.
fn trailer(cmd: &Command) -> String {
    let digest = Sha256::digest(format!("{cmd:?}").as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("# treerep {} config={hex}\n", env!("CARGO_PKG_VERSION"))
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "representable": v.representable,
        "witness": v.witness.map(VertexSet::to_vec),
        "checked_sets": v.checked_sets,
        "restricted_to_connected": v.restricted_to_connected,
    })
}

fn analyze(a: &AnalyzeArgs) -> Result<Outcome> {
    let (tree, params) = load(&a.chain)?;
    let verdict = is_representable(&tree, &params)?;
    let connected_only = a.connected_only || tree.n() > EAGER_CAP;
    let entries: Vec<Value> = if connected_only {
        let sets = tree.connected_subsets();
        let mut out = Vec::with_capacity(sets.len());
        for s in sets {
            out.push(serde_json::to_value(nu_connected(&tree, &params, s)?.record(s))?);
        }
        out
    } else {
        let m = nu_full(&tree, &params)?;
        let mut all = m.entries();
        all.sort_by_key(|(s, _)| (s.len(), s.bits()));
        all.iter().map(|(s, v)| serde_json::to_value(v.record(*s))).collect::<std::result::Result<_, _>>()?
    };
    let witness = match verdict.witness {
        Some(w) => Some(serde_json::to_value(nu_connected(&tree, &params, w)?.record(w))?),
        None => None,
    };
    let body = pretty(&json!({
        "tree": serde_json::to_value(tree.to_json())?,
        "params": params.to_json(&tree),
        "verdict": verdict_json(&verdict),
        "witness_entry": witness,
        "connected_only": connected_only,
        "entries": entries,
    }));
    let status = match a.expect {
        Some(Expect::Representable) if !verdict.representable => 1,
        Some(Expect::NotRepresentable) if verdict.representable => 1,
        _ => 0,
    };
    Ok(Outcome { body, status })
}

/// `start:stop:step` (inclusive, exact), `a,b,c`, or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<Q>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_rational(start)?, parse_rational(stop)?, parse_rational(step)?);
            if !step.is_positive() || stop < start {
                return Err(Error::Parse(format!("bad grid {s:?}")));
            }
            let mut out = Vec::new();
            let mut x = start;
            while x <= stop {
                out.push(x.clone());
                x += &step;
            }
            Ok(out)
        }
        [_] => s.split(',').map(|t| parse_rational(t.trim())).collect(),
        _ => Err(Error::Parse(format!("bad grid {s:?}"))),
    }
}

fn csv_body(header: &[&str], rows: Vec<Vec<String>>, notes: &[String], cmd: &Command) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let mut body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).expect("utf-8 csv");
    for n in notes {
        body.push_str(&format!("# note: {n}\n"));
    }
    body.push_str(&trailer(cmd));
    Ok(body)
}

fn scan(a: &ScanArgs, cmd: &Command) -> Result<Outcome> {
    let tree = parse_tree(&a.tree, DEFAULT_ORDER_CAP)?;
    let points = phase_scan(&tree, &parse_grid(&a.r)?, &parse_grid(&a.p)?)?;
    let rows = points
        .iter()
        .map(|pt| {
            vec![
                fmt_decimal(&pt.r),
                fmt_decimal(&pt.p),
                pt.verdict.representable.to_string(),
                pt.verdict.witness.map(|w| w.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Outcome { body: csv_body(&["r", "p", "representable", "witness"], rows, &[], cmd)?, status: 0 })
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad range {s:?}")));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(Error::Parse(format!("empty range {s:?}")));
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![num(s)?]),
    }
}

fn thresholds(a: &ThresholdArgs, cmd: &Command) -> Result<Outcome> {
    let ns = parse_range(&a.n)?;
    if ns.iter().any(|&n| n < 2) {
        return Err(Error::InvalidSize("n must be at least 2".into()));
    }
    let table = threshold_table(ns)?;
    let mut notes = Vec::new();
    let rows = table
        .iter()
        .map(|row| {
            let r0 = match row.r0 {
                Some(x) => format!("{x:.10}"),
                None => {
                    notes.push(format!(
                        "r0({}) is undefined: no 2 <= j <= {} has (-1)^j * bell_c(j) > 0",
                        row.n, row.n
                    ));
                    "undefined".to_string()
                }
            };
            vec![row.n.to_string(), row.bell_c.to_string(), format!("{:.10}", row.r_star), r0, format!("{:.10}", row.r1)]
        })
        .collect();
    Ok(Outcome { body: csv_body(&["n", "bell_c", "r_star", "r0", "r1"], rows, &notes, cmd)?, status: 0 })
}

fn opt_rational(x: &Option<Q>) -> Value {
    x.as_ref().map_or(Value::Null, |v| Value::String(fmt_rational(v)))
}

fn deriv(a: &DerivArgs) -> Result<Outcome> {
    let (tree, params) = load(&a.chain)?;
    let s = parse_vertex_set(&a.set, tree.n())?;
    let (at, m) = match a.at {
        At::P0 => (CheckPoint::P0, Multiset::parse_edges(&tree, &a.multiset)?),
        At::P1 => (CheckPoint::P1, Multiset::parse_edges(&tree, &a.multiset)?),
        At::R1 => (CheckPoint::R1, Multiset::parse_vertices(&tree, &a.multiset)?),
    };
    let check = deriv_check(&tree, &params, s, &m, at, a.cap)?;
    let labels: Vec<String> = m
        .0
        .iter()
        .flat_map(|(p, &k)| {
            let label = match *p {
                crate::calculus::Param::Edge(e) => {
                    let (u, v) = tree.edges()[e];
                    format!("{u}-{v}")
                }
                crate::calculus::Param::Vertex(v) => v.to_string(),
            };
            std::iter::repeat_n(label, k as usize)
        })
        .collect();
    let at_name = match a.at {
        At::P0 => "p0",
        At::P1 => "p1",
        At::R1 => "r1",
    };
    let body = pretty(&json!({
        "set": s.to_vec(),
        "at": at_name,
        "multiset": labels,
        "jet": fmt_rational(&check.jet),
        "closed_form": opt_rational(&check.closed_form),
        "equal": check.agrees(),
        "leading_term": opt_rational(&check.leading_term),
        "leading_term_equal": check.leading_term.as_ref().map(|l| *l == check.jet),
    }));
    Ok(Outcome { body, status: 0 })
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let (tree, params) = load(&a.chain)?;
    let field = PoissonField::from_measure(&nu_full(&tree, &params)?)?;
    let rec = RecursiveSampler { tree: &tree, params: (&params).into() };
    let perc = PercolationSampler { tree: &tree, params: (&params).into() };
    let zero = zero_pattern_check(&tree, &params, &field, a.draws, a.seed, a.sigma)?;
    let ab = compare_laws(&rec, &perc, tree.n(), a.draws, a.seed.wrapping_add(1), a.alpha)?;
    let fr = compare_laws(&field, &rec, tree.n(), a.draws, a.seed.wrapping_add(2), a.alpha)?;
    let passed = zero.passed && ab.passed && fr.passed;
    let body = pretty(&json!({
        "tree": serde_json::to_value(tree.to_json())?,
        "draws": a.draws,
        "seed": a.seed,
        "poisson_zero_patterns": serde_json::to_value(&zero)?,
        "recursive_vs_percolation": serde_json::to_value(&ab)?,
        "poisson_vs_recursive": serde_json::to_value(&fr)?,
        "passed": passed,
    }));
    Ok(Outcome { body, status: if passed { 0 } else { 1 } })
}

fn scaling(a: &ScalingArgs) -> Result<Outcome> {
    let tree = parse_tree(&a.tree, DEFAULT_ORDER_CAP)?;
    let (r, p) = (parse_rational(&a.r)?, parse_rational(&a.p)?);
    let equal = scaling_check(&tree, &r, &p, a.k)?;
    let p_prime = Q::one() - num_traits::Pow::pow(Q::one() - &p, a.k);
    let body = pretty(&json!({
        "k": a.k,
        "r": fmt_rational(&r),
        "p": fmt_rational(&p),
        "p_prime": fmt_rational(&p_prime),
        "equal": equal,
    }));
    Ok(Outcome { body, status: if equal { 0 } else { 1 } })
}
