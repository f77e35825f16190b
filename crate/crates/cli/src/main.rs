//! `conecalc`: classify vectors, build causal lattices, estimate null
//! distances and run verification suites from the shell.
//!
//! Every invocation prints one JSON document on stdout (CSV only for
//! `diamond`/`reach` with `--format csv`). Exit status: 0 success, 1
//! computational error, 2 usage error.

mod output;
mod scenario;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conecalc::cone::diagnose;
use conecalc::lattice::{self, build_graph_with, BuildOptions, CausalGraph, Direction, GridSpec, DEFAULT_MAX_NODES};
use conecalc::nulldist::{euclidean_distance, product_oracle, Distance, DistanceResult, NullGraph, TimeFunction};
use conecalc::spacetime::StructureDesc;
use conecalc::verify::{self, SuiteConfig, DEFAULT_SEED};
use conecalc::BoxRegion;
use serde_json::{json, Map, Value};

use crate::output::{Format, Output};
use crate::scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] conecalc::Error),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Parser)]
#[command(name = "conecalc", version, about = "Cone structures, causal lattices and null distances")]
struct Cli {
    /// Leave timestamps and wall-clock times out of the output.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Refuse to build lattices with more nodes than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a tangent vector against the cone at a point.
    Classify(ClassifyArgs),
    /// Estimate the null distance between two points.
    Distance(DistanceArgs),
    /// List the nodes of the discrete causal diamond J⁺(p) ∩ J⁻(q).
    Diamond(DiamondArgs),
    /// List the nodes of the discrete causal future or past of a point.
    Reach(ReachArgs),
    /// Run verification suites.
    Suite(SuiteArgs),
    /// List the built-in scenarios.
    ScenarioList,
    /// Dump the causal graph of a scenario.
    ExportGraph(ExportArgs),
}

fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    let coords: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse::<f64>()).collect();
    match coords {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(format!("expected comma-separated finite decimals, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TauChoice {
    Default,
    Canonical,
    Product,
    OddPower(u32),
    Composite,
}

fn parse_tau(s: &str) -> Result<TauChoice, String> {
    match s {
        "default" => Ok(TauChoice::Default),
        "T" => Ok(TauChoice::Canonical),
        "t" => Ok(TauChoice::Product),
        "composite" => Ok(TauChoice::Composite),
        _ => {
            let e = s
                .strip_prefix("T^")
                .and_then(|e| e.parse::<u32>().ok())
                .filter(|e| e % 2 == 1)
                .ok_or_else(|| format!("time function must be default, T, t, composite or T^<odd>, got {s:?}"))?;
            Ok(TauChoice::OddPower(e / 2))
        }
    }
}

impl TauChoice {
    fn resolve(self, scenario: &Scenario, nu: usize) -> Result<TimeFunction, CliError> {
        Ok(match self {
            TauChoice::Default => scenario.time()?,
            TauChoice::Canonical => TimeFunction::canonical(nu),
            TauChoice::Product => TimeFunction::product_t(),
            TauChoice::OddPower(k) => TimeFunction::odd_power(nu, k),
            TauChoice::Composite => {
                if nu < 2 {
                    return Err(CliError::Input("composite time needs index at least 2".into()));
                }
                TimeFunction::composite_sum(&TimeFunction::canonical(nu - 1))
            }
        })
    }
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario as name or name:arg,arg (see scenario-list).
    #[arg(long, value_parser = scenario::parse)]
    scenario: Scenario,
}

#[derive(Args)]
struct GridArgs {
    /// Lattice spacing (default: the scenario's).
    #[arg(long)]
    h: Option<f64>,
    /// Stencil radius (default: the scenario's).
    #[arg(long)]
    r: Option<usize>,
    /// Lower box corner.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    lo: Option<::std::vec::Vec<f64>>,
    /// Upper box corner.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    hi: Option<::std::vec::Vec<f64>>,
}

impl GridArgs {
    fn grid(&self, scenario: &Scenario) -> Result<GridSpec, CliError> {
        let mut grid = scenario.default_grid.clone();
        if let Some(h) = self.h {
            grid.h = h;
        }
        if let Some(r) = self.r {
            grid.radius = r;
        }
        if self.lo.is_some() || self.hi.is_some() {
            let lo = self.lo.clone().unwrap_or_else(|| grid.bounds.lo.clone());
            let hi = self.hi.clone().unwrap_or_else(|| grid.bounds.hi.clone());
            grid.bounds = BoxRegion::new(lo, hi)?;
        }
        if grid.bounds.dim() != grid.periodic.len() {
            return Err(CliError::Input(format!(
                "box has dimension {}, scenario has {}",
                grid.bounds.dim(),
                grid.periodic.len()
            )));
        }
        Ok(grid)
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    point: ::std::vec::Vec<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    vector: ::std::vec::Vec<f64>,
    /// Tolerance for the cone inequalities.
    #[arg(long, default_value_t = conecalc::cone::TOL_EXACT)]
    tol: f64,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Time function: default, T, t, composite or T^<odd>.
    #[arg(long, value_parser = parse_tau, default_value = "default")]
    tau: TauChoice,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p: ::std::vec::Vec<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    q: ::std::vec::Vec<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Use the closed-form max{|Δt|, d_σ} instead of the lattice (Lorentzian flat products only).
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct DiamondArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p: ::std::vec::Vec<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    q: ::std::vec::Vec<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Future,
    Past,
}

#[derive(Args)]
struct ReachArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    p: ::std::vec::Vec<f64>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Future)]
    direction: DirectionArg,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite name, or "all".
    #[arg(long, default_value = "all")]
    name: String,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    jmax: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Seed; CONECALC_SEED is used when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Extra suite parameter as key=value (repeatable).
    #[arg(long = "set", value_parser = parse_kv)]
    set: Vec<(String, f64)>,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v = v.trim().parse::<f64>().map_err(|_| format!("bad number in {s:?}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[command(flatten)]
    grid: GridArgs,
    /// Write the graph here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn opts(cli: &Cli) -> BuildOptions {
    BuildOptions {
        max_nodes: cli.max_nodes,
        ..BuildOptions::default()
    }
}

fn check_dim(what: &str, p: &[f64], n: usize) -> Result<(), CliError> {
    if p.len() == n {
        Ok(())
    } else {
        Err(CliError::Input(format!("{what} has {} coordinates, scenario has dimension {n}", p.len())))
    }
}

fn snap(graph: &CausalGraph, what: &str, p: &[f64]) -> Result<usize, CliError> {
    graph
        .snap(p)
        .ok_or_else(|| CliError::Input(format!("{what} {p:?} is not within h/2 of an in-domain lattice node")))
}

fn classify(args: &ClassifyArgs, out: &mut Output) -> Result<ExitCode, CliError> {
    let s = args.scenario.scenario.build()?;
    check_dim("point", &args.point, s.dim())?;
    check_dim("vector", &args.vector, s.dim())?;
    let d = diagnose(&s, &args.point, &args.vector, args.tol)?;
    out.insert("scenario", json!(args.scenario.scenario.name));
    out.insert("point", json!(args.point));
    out.insert("vector", json!(args.vector));
    out.insert("class", json!(d.class));
    out.insert("norm_sq", json!(d.norm_sq));
    out.insert("frame_products", json!(d.frame_products));
    Ok(ExitCode::SUCCESS)
}

fn distance(cli: &Cli, args: &DistanceArgs, out: &mut Output) -> Result<ExitCode, CliError> {
    let scenario = &args.scenario.scenario;
    let s = scenario.build()?;
    check_dim("p", &args.p, s.dim())?;
    check_dim("q", &args.q, s.dim())?;
    let grid = args.grid.grid(scenario)?;
    let tau = args.tau.resolve(scenario, s.index())?;
    let result = if args.oracle {
        if !matches!(scenario.structure, StructureDesc::Flat { nu: 1, .. }) {
            return Err(CliError::Input("--oracle needs a flat Lorentzian scenario (flat:n,1 or minkowski:m)".into()));
        }
        DistanceResult::oracle(product_oracle(euclidean_distance, &args.p, &args.q), &grid)
    } else {
        let graph = build_graph_with(&s, &grid, &opts(cli))?;
        NullGraph::new(&graph, &tau).estimate(&args.p, &args.q)?
    };
    out.insert("scenario", json!(scenario.name));
    out.insert("tau", serde_json::to_value(tau.kind())?);
    out.insert("p", json!(args.p));
    out.insert("q", json!(args.q));
    out.extend(serde_json::to_value(&result)?);
    if result.value == Distance::Unreachable {
        out.diagnostic("q is not connected to p in the symmetrized causal graph");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn node_dump(
    graph: &CausalGraph,
    nodes: &[usize],
    format: Format,
    out: &mut Output,
) -> Result<(), CliError> {
    out.insert("count", json!(nodes.len()));
    match format {
        Format::Json => out.insert("nodes", json!(nodes.iter().map(|&i| graph.point(i)).collect::<Vec<_>>())),
        Format::Csv => out.csv(graph.dim(), nodes.iter().map(|&i| graph.point(i)))?,
    }
    Ok(())
}

fn diamond(cli: &Cli, args: &DiamondArgs, out: &mut Output) -> Result<ExitCode, CliError> {
    let scenario = &args.scenario.scenario;
    let s = scenario.build()?;
    check_dim("p", &args.p, s.dim())?;
    check_dim("q", &args.q, s.dim())?;
    let grid = args.grid.grid(scenario)?;
    let graph = build_graph_with(&s, &grid, &opts(cli))?;
    let (a, b) = (snap(&graph, "p", &args.p)?, snap(&graph, "q", &args.q)?);
    let d = lattice::diamond(&graph, a, b)?;
    out.insert("scenario", json!(scenario.name));
    out.insert("p", json!(graph.point(a)));
    out.insert("q", json!(graph.point(b)));
    out.insert("grid", serde_json::to_value(conecalc::nulldist::GridEcho::from(&grid))?);
    node_dump(&graph, d.as_slice(), args.format, out)?;
    Ok(ExitCode::SUCCESS)
}

fn reach(cli: &Cli, args: &ReachArgs, out: &mut Output) -> Result<ExitCode, CliError> {
    let scenario = &args.scenario.scenario;
    let s = scenario.build()?;
    check_dim("p", &args.p, s.dim())?;
    let grid = args.grid.grid(scenario)?;
    let graph = build_graph_with(&s, &grid, &opts(cli))?;
    let a = snap(&graph, "p", &args.p)?;
    let direction = match args.direction {
        DirectionArg::Future => Direction::Future,
        DirectionArg::Past => Direction::Past,
    };
    let set = lattice::reach(&graph, a, direction)?;
    out.insert("scenario", json!(scenario.name));
    out.insert("p", json!(graph.point(a)));
    out.insert("direction", json!(direction));
    out.insert("grid", serde_json::to_value(conecalc::nulldist::GridEcho::from(&grid))?);
    node_dump(&graph, set.as_slice(), args.format, out)?;
    Ok(ExitCode::SUCCESS)
}

fn seed(args: &SuiteArgs) -> Result<u64, CliError> {
    if let Some(s) = args.seed {
        return Ok(s);
    }
    match std::env::var("CONECALC_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("CONECALC_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn suite(args: &SuiteArgs, out: &mut Output) -> Result<ExitCode, CliError> {
    let seed = seed(args)?;
    let mut params: BTreeMap<String, f64> = args.set.iter().cloned().collect();
    for (key, value) in [
        ("k", args.k.map(f64::from)),
        ("j_max", args.jmax.map(|x| x as f64)),
        ("j", args.j.map(|x| x as f64)),
        ("samples", args.samples.map(|x| x as f64)),
    ] {
        if let Some(v) = value {
            params.insert(key.to_string(), v);
        }
    }
    let infos = verify::suites();
    let selected: Vec<&verify::SuiteInfo> = if args.name == "all" {
        if let Some(key) = params.keys().find(|k| !infos.iter().any(|s| s.params.contains(&k.as_str()))) {
            return Err(CliError::Input(format!("no suite takes parameter {key}")));
        }
        infos.iter().collect()
    } else {
        let info = infos
            .iter()
            .find(|s| s.name == args.name)
            .ok_or_else(|| conecalc::Error::UnknownSuite(args.name.clone()))?;
        vec![info]
    };
    let mut reports = Vec::new();
    let mut elapsed = Map::new();
    for info in selected {
        let config = SuiteConfig {
            seed,
            params: params
                .iter()
                .filter(|(k, _)| args.name != "all" || info.params.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        };
        let report = verify::run_suite(info.name, &config)?;
        elapsed.insert(info.name.to_string(), json!(report.elapsed.as_secs_f64() * 1e3));
        reports.push(report);
    }
    let pass = reports.iter().all(|r| r.pass);
    for r in reports.iter().filter(|r| !r.pass) {
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
        out.diagnostic(&format!("suite {} failed: {}", r.suite, failed.join(", ")));
    }
    out.insert("seed", json!(seed));
    out.insert("pass", json!(pass));
    out.insert("suites", serde_json::to_value(&reports)?);
    out.timing("elapsed_ms", Value::Object(elapsed));
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn scenario_list(out: &mut Output) -> Result<ExitCode, CliError> {
    let mut list = Vec::new();
    for t in scenario::TEMPLATES {
        let s = scenario::parse(t.example).map_err(CliError::Input)?;
        list.push(json!({
            "syntax": t.syntax,
            "summary": t.summary,
            "example": t.example,
            "structure": s.structure,
            "default_grid": s.default_grid,
            "default_time": s.default_time,
            "expect_invalid": s.expect_invalid,
            "valid": s.check()?,
        }));
    }
    out.insert("scenarios", Value::Array(list));
    Ok(ExitCode::SUCCESS)
}

fn export_graph(cli: &Cli, args: &ExportArgs, out: &mut Output) -> Result<ExitCode, CliError> {
    let scenario = &args.scenario.scenario;
    let s = scenario.build()?;
    let grid = args.grid.grid(scenario)?;
    let graph = build_graph_with(&s, &grid, &opts(cli))?;
    let export = serde_json::to_value(graph.export())?;
    out.insert("scenario", json!(scenario.name));
    match &args.output {
        Some(path) => {
            std::fs::write(path, serde_json::to_string_pretty(&export)?)?;
            out.insert("written", json!(path));
            out.insert("nodes", json!(graph.node_count()));
            out.insert("edges", json!(graph.edge_count()));
        }
        None => out.insert("graph", export),
    }
    Ok(ExitCode::SUCCESS)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Distance(_) => "distance",
        Command::Diamond(_) => "diamond",
        Command::Reach(_) => "reach",
        Command::Suite(_) => "suite",
        Command::ScenarioList => "scenario-list",
        Command::ExportGraph(_) => "export-graph",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut out = Output::new(command_name(&cli.command), !cli.no_timestamp);
    let result = match &cli.command {
        Command::Classify(a) => classify(a, &mut out),
        Command::Distance(a) => distance(&cli, a, &mut out),
        Command::Diamond(a) => diamond(&cli, a, &mut out),
        Command::Reach(a) => reach(&cli, a, &mut out),
        Command::Suite(a) => suite(a, &mut out),
        Command::ScenarioList => scenario_list(&mut out),
        Command::ExportGraph(a) => export_graph(&cli, a, &mut out),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            out.error(&e.to_string());
            if matches!(e, CliError::Usage(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    };
    out.timing("wall_ms", json!(start.elapsed().as_secs_f64() * 1e3));
    if let Err(e) = out.finish() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    code
}
