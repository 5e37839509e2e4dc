use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use covgrass::bounds::{bound_report, BoundReport, BoundValue};
use covgrass::code::{
    dualize, exact_max, packing_to_text, CodeError, DEFAULT_SEARCH_CAP,
};
use covgrass::constructions::{self as cons, ConstructionError};
use covgrass::hypergraph::{
    check_63_configuration, code_to_hyperplane_hypergraph, code_to_point_hypergraph, find_berge_cycle,
    find_berge_path, find_linear_cycle, HypergraphError, SearchLimits,
};
use covgrass::subspace::{SubspaceError, DEFAULT_ENUMERATION_CAP};
use covgrass::{CodeSpec, CoveringCode, Verdict};

/// Covering Grassmannian codes: construct, verify, search and bound.
#[derive(Parser)]
#[command(name = "covgrass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write it in the code file format.
    Construct(ConstructArgs),
    /// Check every alpha-subset of a code file.
    Verify {
        file: PathBuf,
    },
    /// Evaluate all bounds for one spec.
    Bounds {
        #[command(flatten)]
        spec: SpecArgs,
        /// Emit one JSON document instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate bounds for every spec in a CSV grid (header q,n,k,delta,alpha).
    Table {
        #[arg(long)]
        grid: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact maximum code size by branch and bound.
    Search {
        #[command(flatten)]
        spec: SpecArgs,
        /// Largest Grassmannian size searched.
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
        /// Where to write an optimal code.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the dual subspace packing of a code file.
    Dualize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search the code's hypergraph for a forbidden configuration.
    HypergraphCheck {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        /// Edge limit for the Berge and linear-cycle searches.
        #[arg(long, default_value_t = SearchLimits::default().max_edges)]
        max_edges: usize,
    },
}

#[derive(Args, Clone, Copy)]
struct SpecArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta: usize,
    #[arg(long)]
    alpha: usize,
}

impl SpecArgs {
    fn spec(&self) -> Result<CodeSpec> {
        Ok(CodeSpec::new(self.q, self.n, self.k, self.delta, self.alpha).map_err(usage)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    C1,
    C2,
    C3,
    C4,
    C5,
    Greedy,
    Random,
    TwoStage,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Bc3,
    Bp3,
    Linear3,
    Sixthree,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Extra distance for c2, c3 and c5.
    #[arg(long)]
    gamma: Option<usize>,
    /// Needed by greedy, random and two-stage.
    #[arg(long)]
    alpha: Option<usize>,
    /// Needed by random and two-stage.
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant in the random-deletion sampling probability.
    #[arg(long, default_value_t = 1.0)]
    c_const: f64,
    /// Exponent slack in the two-stage sampling probability.
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Largest Grassmannian the randomized methods may enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Infeasible(String),
    Cap(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::Cap(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    Failure::Usage(e.to_string()).into()
}

fn from_code(e: CodeError) -> anyhow::Error {
    if e.is_cap() {
        Failure::Cap(e.to_string()).into()
    } else {
        usage(e)
    }
}

fn from_construction(e: ConstructionError) -> anyhow::Error {
    match e {
        e if e.is_cap() => Failure::Cap(e.to_string()).into(),
        ConstructionError::Precondition(_) => Failure::Infeasible(e.to_string()).into(),
        e => usage(e),
    }
}

fn from_hypergraph(e: HypergraphError) -> anyhow::Error {
    match e {
        HypergraphError::CapExceeded { .. } | HypergraphError::Subspace(SubspaceError::CapExceeded { .. }) => {
            Failure::Cap(e.to_string()).into()
        }
        HypergraphError::Degenerate => Failure::Infeasible(e.to_string()).into(),
        e => usage(e),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Failure>() {
        Some(Failure::Infeasible(_)) => 1,
        Some(Failure::Cap(_)) => 3,
        _ => 2,
    }
}

fn read_code(path: &Path) -> Result<CoveringCode> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    CoveringCode::parse_text(&text).map_err(from_code)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn need(v: Option<usize>, flag: &str, method: &str) -> Result<usize> {
    v.ok_or_else(|| usage(format!("--{flag} is required for method {method}")))
}

fn construct(a: &ConstructArgs) -> Result<CoveringCode> {
    let (n, k) = (a.n, a.k);
    let binary_only = |name: &str| -> Result<()> {
        if a.q != 2 {
            return Err(usage(format!("method {name} works over GF(2) only")));
        }
        Ok(())
    };
    let randomized_spec = |name: &str| -> Result<CodeSpec> {
        let d = need(a.delta, "delta", name)?;
        let al = need(a.alpha, "alpha", name)?;
        CodeSpec::new(a.q, n, k, d, al).map_err(usage)
    };
    let code = match a.method {
        Method::C1 => {
            binary_only("c1")?;
            cons::construction1(n, k)
        }
        Method::C2 => {
            binary_only("c2")?;
            cons::construction2(n, k, need(a.gamma, "gamma", "c2")?)
        }
        Method::C3 => {
            binary_only("c3")?;
            cons::construction3(n, k, need(a.gamma, "gamma", "c3")?)
        }
        Method::C4 => {
            binary_only("c4")?;
            cons::construction4(n, k)
        }
        Method::C5 => cons::construction5(a.q, n, k, need(a.gamma, "gamma", "c5")?),
        Method::Greedy => cons::greedy_spread(a.q, n, k, need(a.alpha, "alpha", "greedy")?).map(|t| t.code()),
        Method::Random => cons::random_deletion(&randomized_spec("random")?, a.seed, a.c_const, a.cap),
        Method::TwoStage => {
            cons::two_stage_deletion(&randomized_spec("two-stage")?, a.seed, a.epsilon, a.cap)
        }
    };
    code.map_err(from_construction)
}

fn value_text(v: &Option<BoundValue>) -> String {
    match v {
        Some(BoundValue::Exact(x)) => x.to_string(),
        Some(BoundValue::AsymptoticOnly(s)) => format!("asymptotic: {s}"),
        None => "-".into(),
    }
}

fn report_table(r: &BoundReport) -> String {
    let rows: Vec<[String; 4]> = r
        .entries
        .iter()
        .map(|e| {
            [
                e.id.to_string(),
                format!("{:?}", e.side).to_lowercase(),
                if e.applicable { "yes".into() } else { "no".into() },
                if e.applicable {
                    value_text(&e.value)
                } else {
                    e.reason.clone().unwrap_or_default()
                },
            ]
        })
        .collect();
    let header = ["bound", "side", "applicable", "value"];
    let mut width = header.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = format!("{}\n", r.spec);
    for row in std::iter::once(header.map(String::from)).chain(rows) {
        let line: Vec<String> = row
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    let max_lower = r.max_lower().map_or("-".into(), |(id, v)| format!("{v} ({id})"));
    let min_upper = r.min_upper().map_or("-".into(), |(id, v)| format!("{v} ({id})"));
    writeln!(out, "max lower: {max_lower}").unwrap();
    writeln!(out, "min upper: {min_upper}").unwrap();
    writeln!(out, "consistent: {}", r.consistent).unwrap();
    out
}

fn parse_grid(text: &str) -> Result<Vec<CodeSpec>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| usage("empty grid file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["q", "n", "k", "delta", "alpha"] {
        return Err(usage(format!("grid header must be q,n,k,delta,alpha, got {header}")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(usage(format!("grid row {}: expected 5 fields", i + 1)));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|e| usage(format!("grid row {}: {e}", i + 1)));
            let spec = CodeSpec::new(
                num(f[0])?,
                num(f[1])? as usize,
                num(f[2])? as usize,
                num(f[3])? as usize,
                num(f[4])? as usize,
            );
            spec.map_err(|e| usage(format!("grid row {}: {e}", i + 1)))
        })
        .collect()
}

fn table(specs: &[CodeSpec]) -> String {
    let reports: Vec<BoundReport> = specs.iter().map(bound_report).collect();
    let mut out = String::from("q,n,k,delta,alpha");
    if let Some(first) = reports.first() {
        for e in &first.entries {
            write!(out, ",{}", e.id).unwrap();
        }
    }
    out.push_str(",consistent\n");
    for r in &reports {
        let s = r.spec;
        write!(out, "{},{},{},{},{}", s.q, s.n, s.k, s.delta, s.alpha).unwrap();
        for e in &r.entries {
            let cell = match (&e.value, e.applicable) {
                (Some(BoundValue::Exact(v)), true) => v.to_string(),
                (Some(BoundValue::AsymptoticOnly(_)), true) => "asymptotic".into(),
                _ => "-".into(),
            };
            write!(out, ",{cell}").unwrap();
        }
        writeln!(out, ",{}", r.consistent).unwrap();
    }
    out
}

fn hypergraph_check(code: &CoveringCode, property: Property, max_edges: usize) -> Result<Option<String>> {
    let limits = SearchLimits {
        max_edges,
        ..SearchLimits::default()
    };
    let cap = u64::MAX;
    let points = || code_to_point_hypergraph(code, cap).map_err(from_hypergraph);
    let found = match property {
        Property::Bc3 => find_berge_cycle(&points()?, 3, limits)
            .map_err(from_hypergraph)?
            .map(|w| format!("berge 3-cycle {w}")),
        Property::Bp3 => find_berge_path(&points()?, 3, limits)
            .map_err(from_hypergraph)?
            .map(|w| format!("berge 3-path {w}")),
        Property::Linear3 => {
            let h = code_to_hyperplane_hypergraph(code, cap).map_err(from_hypergraph)?;
            find_linear_cycle(&h, 3, limits)
                .map_err(from_hypergraph)?
                .map(|w| format!("linear 3-cycle {w}"))
        }
        Property::Sixthree => {
            let h = points()?;
            let r = h.uniformity().ok_or_else(|| anyhow!("point hypergraph is not uniform"))?;
            check_63_configuration(&h, r).map(|e| format!("(3r-3,3) configuration on edges {e:?}"))
        }
    };
    Ok(found)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Construct(a) => {
            let code = construct(&a)?;
            emit(a.output.as_deref(), &code.to_text())?;
            Ok(0)
        }
        Command::Verify { file } => {
            let code = read_code(&file)?;
            let verdict = code.verify_parallel();
            println!("{verdict}");
            Ok(match verdict {
                Verdict::Valid => 0,
                Verdict::Violated(_) => 1,
            })
        }
        Command::Bounds { spec, json } => {
            let report = bound_report(&spec.spec()?);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).context("serializing report")?);
            } else {
                print!("{}", report_table(&report));
            }
            Ok(0)
        }
        Command::Table { grid, output } => {
            let text = fs::read_to_string(&grid)
                .map_err(|e| usage(format!("cannot read {}: {e}", grid.display())))?;
            emit(output.as_deref(), &table(&parse_grid(&text)?))?;
            Ok(0)
        }
        Command::Search { spec, cap, output } => {
            let spec = spec.spec()?;
            let (size, code) = exact_max(&spec, cap).map_err(from_code)?;
            println!("{spec} maximum size {size}");
            if let Some(p) = output {
                emit(Some(&p), &code.to_text())?;
            }
            Ok(0)
        }
        Command::Dualize { file, output } => {
            let code = read_code(&file)?;
            let (ps, blocks) = dualize(&code);
            emit(output.as_deref(), &packing_to_text(&ps, &blocks))?;
            Ok(0)
        }
        Command::HypergraphCheck {
            file,
            property,
            max_edges,
        } => {
            let code = read_code(&file)?;
            match hypergraph_check(&code, property, max_edges)? {
                Some(w) => {
                    println!("found {w}");
                    Ok(1)
                }
                None => {
                    println!("none");
                    Ok(0)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
