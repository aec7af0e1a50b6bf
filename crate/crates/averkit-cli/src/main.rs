//! `averkit` command line: parse edge-list graphs, compute equilibrium and
//! electrical reports, sweep two-community parameter grids, and generate
//! reproducible benchmark graphs.
//!
//! Conventions shared by every subcommand:
//!
//! - stdout carries machine-readable data only (JSON, CSV, or an edge
//!   list); human-readable progress notes go to stderr;
//! - `--output FILE` redirects the data to `FILE` and drops a
//!   `FILE.manifest.json` sidecar recording the command line, the
//!   configuration, the seeds and the library version, so any artifact can
//!   be regenerated bit-for-bit;
//! - without `--output`, JSON reports embed the same manifest under a
//!   `"manifest"` key;
//! - exit codes: 0 success, 2 malformed input, 3 numerical failure,
//!   4 violated structural precondition. Failures print a one-line JSON
//!   object `{"error": kind, "message": ...}` to stderr;
//! - `AVERKIT_THREADS` caps the rayon thread pool (results never depend
//!   on it).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use averkit::electrical::{
    effective_resistance, glue, terminal_key, voltage_solution, ElectricalReport,
    VoltageSolution,
};
use averkit::equilibrium::{
    influence_matrix, sink_averages, EquilibriumReport, InfluenceMethod,
};
use averkit::generators::{
    erdos_renyi, matched_communities_opts, torus, GeneratorConfig,
};
use averkit::nalgebra::DVector;
use averkit::regimes::{run_matched_er_sweep, sweep_csv, SweepConfig};
use averkit::{condense, parse_edge_list, write_edge_list, DerivedMatrices, WeightedDigraph};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

// ---------------------------------------------------------------------------
// Failure handling
// ---------------------------------------------------------------------------

/// A terminal failure: exit code, coarse class, human-readable message.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "parse",
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "config",
            message: message.into(),
        }
    }
}

impl From<averkit::Error> for Failure {
    fn from(e: averkit::Error) -> Self {
        let (code, kind) = match e.kind() {
            averkit::ErrorKind::Parse => (2, "parse"),
            averkit::ErrorKind::Numeric => (3, "numeric"),
            averkit::ErrorKind::Gate => (4, "gate"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 2,
            kind: "io",
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 3,
            kind: "serialize",
            message: e.to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Command-line grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "averkit",
    version,
    about = "Averaging dynamics on weighted digraphs: equilibria, electrical networks, parameter sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condense a graph and compute its equilibrium report.
    Analyze(AnalyzeArgs),
    /// Solve the unit-voltage problem between two terminal sets.
    Electrical(ElectricalArgs),
    /// Run a matched-communities parameter sweep and emit one row per instance.
    Sweep(SweepArgs),
    /// Generate a reproducible benchmark graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MethodArg {
    /// Linear solve on the non-absorbing block.
    Block,
    /// Laplacian boundary-value solve.
    Laplace,
    /// Seeded random-walk estimation.
    Mc,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FamilyArg {
    /// Undirected unit-weight random graph with pair probability c·ln(n)/n.
    #[value(name = "er")]
    Er,
    /// Deterministic d-dimensional toroidal grid.
    #[value(name = "torus")]
    Torus,
    /// Two matched random communities attached to a pair of anchor nodes.
    #[value(name = "matched_er")]
    MatchedEr,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list file (`src<TAB>dst<TAB>weight` lines, `#` comments, optional `n=<count>` header).
    #[arg(long)]
    graph: PathBuf,

    /// Laziness parameter of the update matrix, in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,

    /// Initial state as comma-separated `node=value` pairs; `default=value` fills
    /// the unmentioned nodes (0 otherwise). Example: `0=0,3=1,default=0.25`.
    #[arg(long, conflicts_with = "x0_file")]
    x0: Option<String>,

    /// Initial state file: one value per line, `#` comments allowed; length must equal n.
    #[arg(long)]
    x0_file: Option<PathBuf>,

    /// Influence-matrix route.
    #[arg(long, value_enum, default_value_t = MethodArg::Block)]
    method: MethodArg,

    /// Walks per start node for the `mc` route.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,

    /// Seed for the `mc` route.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Compute all three routes and report their worst pairwise deviations.
    #[arg(long)]
    cross_check: bool,

    /// Write the JSON report here (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ElectricalArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,

    /// Source terminal set (held at potential 1), comma-separated node ids.
    #[arg(long, value_delimiter = ',', required = true)]
    sources: Vec<usize>,

    /// Target terminal set (held at potential 0), comma-separated node ids.
    #[arg(long, value_delimiter = ',', required = true)]
    targets: Vec<usize>,

    /// Also reconstruct the potentials from pairwise effective resistances
    /// and report the worst deviation from the direct solve.
    #[arg(long)]
    resistance_route: bool,

    /// Write the JSON report here (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Instance family; only `matched_er` is available.
    #[arg(long, default_value = "matched_er")]
    family: String,

    /// Anchor-link weights, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    gammas: Vec<f64>,

    /// Matching-link weights, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    betas: Vec<f64>,

    /// Community sizes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,

    /// Either a count `N` (expands to seeds 0..N) or an explicit
    /// comma-separated list; a trailing comma forces list form (`7,` is the
    /// single seed 7).
    #[arg(long, default_value = "5")]
    seeds: String,

    /// Density constant of the community graphs (pair probability ω·ln(m)/m).
    #[arg(long, default_value_t = 2.0)]
    omega: f64,

    /// Band half-width for the polarization/homogenization fractions.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Write the table here (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Graph family to generate.
    #[arg(long, value_enum)]
    family: FamilyArg,

    /// Node count (er).
    #[arg(long)]
    n: Option<usize>,

    /// Density constant (er): pair probability c·ln(n)/n.
    #[arg(long, default_value_t = 2.0)]
    c: f64,

    /// Grid dimension (torus).
    #[arg(long, default_value_t = 1)]
    d: usize,

    /// Grid side length (torus); the graph has side^d nodes.
    #[arg(long)]
    side: Option<usize>,

    /// Community size (matched_er); the graph has 2m+2 nodes.
    #[arg(long)]
    m: Option<usize>,

    /// Density constant of the community graphs (matched_er); must exceed 1.
    #[arg(long, default_value_t = 2.0)]
    omega: f64,

    /// Matching-link weight (matched_er).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Anchor-link weight (matched_er).
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,

    /// Shuffle the cross-community matching instead of pairing i with i (matched_er).
    #[arg(long)]
    permuted_matching: bool,

    /// Seed for the randomized families.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the edge list here (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            f.code
        }
    };
    std::process::exit(i32::from(code));
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Electrical(args) => cmd_electrical(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

/// Applies the `AVERKIT_THREADS` cap to the global rayon pool. Unset means
/// rayon's default; anything but a positive integer is rejected.
fn configure_threads() -> Result<(), Failure> {
    let raw = match std::env::var("AVERKIT_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(Failure::config(format!("AVERKIT_THREADS: {e}"))),
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| {
            Failure::config(format!(
                "AVERKIT_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: 3,
            kind: "internal",
            message: format!("thread pool: {e}"),
        })
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn read_graph(path: &Path) -> Result<WeightedDigraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    Ok(parse_edge_list(&text)?)
}

/// The reproducibility record attached to every output.
fn manifest(config: Value, seeds: &[u64], started: Instant) -> Value {
    json!({
        "command_line": std::env::args().collect::<Vec<String>>(),
        "config": config,
        "seeds": seeds,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_ms": started.elapsed().as_millis() as u64,
    })
}

fn write_with_manifest(data: &str, manifest: &Value, path: &Path) -> Result<(), Failure> {
    std::fs::write(path, data)?;
    let sidecar = format!("{}.manifest.json", path.display());
    std::fs::write(&sidecar, serde_json::to_string_pretty(manifest)? + "\n")?;
    eprintln!("wrote {} and {sidecar}", path.display());
    Ok(())
}

/// Delivers a JSON report: to `--output` with a manifest sidecar, or to
/// stdout with the manifest embedded.
fn deliver_json(mut body: Value, manifest: Value, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            let text = serde_json::to_string_pretty(&body)? + "\n";
            write_with_manifest(&text, &manifest, path)
        }
        None => {
            body["manifest"] = manifest;
            println!("{}", serde_json::to_string_pretty(&body)?);
            Ok(())
        }
    }
}

/// Delivers a textual table or edge list: to `--output` with a manifest
/// sidecar, or verbatim to stdout (stdout carries the data alone, so
/// repeated invocations are byte-comparable).
fn deliver_text(data: &str, manifest: &Value, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => write_with_manifest(data, manifest, path),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

/// Parses the `node=value` initial-state mini-language: comma-separated
/// assignments, with `default=value` filling every unmentioned node.
fn parse_x0_spec(spec: &str, n: usize) -> averkit::Result<DVector<f64>> {
    let bad = |message: String| averkit::Error::ParseInitialCondition { message };
    let mut fill = 0.0;
    let mut pins: Vec<(usize, f64)> = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `node=value`, got {part:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid value in {part:?}")))?;
        let key = key.trim();
        if key == "default" {
            fill = value;
        } else {
            let node: usize = key
                .parse()
                .map_err(|_| bad(format!("invalid node id in {part:?}")))?;
            if node >= n {
                return Err(bad(format!("node {node} out of range for {n} nodes")));
            }
            pins.push((node, value));
        }
    }
    let mut x0 = DVector::from_element(n, fill);
    for (node, value) in pins {
        x0[node] = value;
    }
    Ok(x0)
}

/// Reads an initial state from a file: one value per line, empty lines and
/// `#` comments skipped. The value count must equal the node count.
fn read_x0_file(path: &Path, n: usize) -> Result<DVector<f64>, Failure> {
    let bad =
        |message: String| Failure::from(averkit::Error::ParseInitialCondition { message });
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line
            .parse()
            .map_err(|_| bad(format!("line {}: invalid value {line:?}", idx + 1)))?;
        values.push(value);
    }
    if values.len() != n {
        return Err(bad(format!(
            "expected {n} values, found {}",
            values.len()
        )));
    }
    Ok(DVector::from_vec(values))
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let g = read_graph(&args.graph)?;
    let n = g.n();
    let x0 = match (&args.x0, &args.x0_file) {
        (Some(spec), _) => parse_x0_spec(spec, n)?,
        (None, Some(path)) => read_x0_file(path, n)?,
        (None, None) => DVector::zeros(n),
    };

    let cond = condense(&g);
    let dm = DerivedMatrices::new(&g, args.alpha)?;
    let averages = sink_averages(&cond, &dm, &x0)?;
    let method = match args.method {
        MethodArg::Block => InfluenceMethod::BlockSolve,
        MethodArg::Laplace => InfluenceMethod::LaplaceSolve,
        MethodArg::Mc => InfluenceMethod::MonteCarlo {
            samples: args.samples,
            seed: args.seed,
        },
    };
    let inf = influence_matrix(&cond, &dm, method)?;
    let report = EquilibriumReport::new(&averages.xbar, &inf, method);

    let mut body = json!({
        "n": n,
        "alpha": args.alpha,
        "condensation": cond.to_json(),
        "equilibrium": serde_json::to_value(&report)?,
    });
    if args.cross_check {
        let block = influence_matrix(&cond, &dm, InfluenceMethod::BlockSolve)?.h;
        let laplace = influence_matrix(&cond, &dm, InfluenceMethod::LaplaceSolve)?.h;
        let sampled = influence_matrix(
            &cond,
            &dm,
            InfluenceMethod::MonteCarlo {
                samples: args.samples,
                seed: args.seed,
            },
        )?
        .h;
        body["cross_check"] = json!({
            "exact_disagreement": (&block - &laplace).abs().max(),
            "sampled_deviation": (&sampled - &block).abs().max(),
            "samples": args.samples,
        });
    }

    let uses_sampling = args.cross_check || args.method == MethodArg::Mc;
    let seeds: Vec<u64> = if uses_sampling { vec![args.seed] } else { Vec::new() };
    let config = json!({
        "graph": args.graph.display().to_string(),
        "alpha": args.alpha,
        "method": method.name(),
        "samples": args.samples,
        "cross_check": args.cross_check,
        "x0": args.x0,
        "x0_file": args.x0_file.as_ref().map(|p| p.display().to_string()),
    });
    deliver_json(body, manifest(config, &seeds, started), args.output.as_deref())
}

// ---------------------------------------------------------------------------
// electrical
// ---------------------------------------------------------------------------

fn cmd_electrical(args: &ElectricalArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let g = read_graph(&args.graph)?;

    // Merge each terminal set into a single node first. The merge mirrors
    // directed attachments into the terminals (they are equipotential
    // anyway), so only an asymmetric pair between interior nodes fails the
    // undirectedness gate afterwards.
    let (glued, map) = glue(&g, &[args.sources.clone(), args.targets.clone()])?;
    let a = map[args.sources[0]];
    let b = map[args.targets[0]];
    let sol = voltage_solution(&glued, &[a], &[b])?;

    let mut report = ElectricalReport::from_solution(&glued, &sol);
    // Re-express the potentials on the original node ids and key the
    // resistance by the user-supplied terminal sets.
    report.voltages = (0..g.n()).map(|v| sol.voltages[map[v]]).collect();
    report.r_eff = BTreeMap::from([(
        terminal_key(&args.sources, &args.targets),
        sol.resistance,
    )]);

    let mut body = serde_json::to_value(&report)?;
    if map.iter().enumerate().any(|(v, &img)| v != img) {
        // Flows refer to the merged graph; expose the node mapping.
        body["node_map"] = json!(map);
    }
    if args.resistance_route {
        let (reconstructed, deviation) = resistance_route(&glued, &map, &sol)?;
        body["reconstructed"] = json!(reconstructed);
        body["deviation"] = json!(deviation);
    }

    let config = json!({
        "graph": args.graph.display().to_string(),
        "sources": args.sources,
        "targets": args.targets,
        "resistance_route": args.resistance_route,
    });
    deliver_json(body, manifest(config, &[], started), args.output.as_deref())
}

/// Rebuilds the node potentials from pairwise effective resistances alone:
/// `y_v = (R_ab + R_vb − R_va) / (2 R_ab)` on the merged graph, with
/// terminals pinned and spectator components held at 0 like the direct
/// solve. Returns the potentials (on original node ids) and the worst
/// absolute deviation from the solved ones.
fn resistance_route(
    glued: &WeightedDigraph,
    map: &[usize],
    sol: &VoltageSolution,
) -> Result<(Vec<f64>, f64), Failure> {
    let a = sol.sources[0];
    let b = sol.targets[0];
    let r_pair = sol.resistance;
    let cond = condense(glued);
    let home = cond.component_of(a);

    // Resistances are per merged node; compute each image once.
    let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
    let mut reconstructed = Vec::with_capacity(map.len());
    for &img in map {
        let value = if let Some(&v) = cache.get(&img) {
            v
        } else {
            let v = if img == a {
                1.0
            } else if img == b || cond.component_of(img) != home {
                0.0
            } else {
                let r_vb = effective_resistance(glued, &[img], &[b])?;
                let r_va = effective_resistance(glued, &[img], &[a])?;
                (r_pair + r_vb - r_va) / (2.0 * r_pair)
            };
            cache.insert(img, v);
            v
        };
        reconstructed.push(value);
    }
    let deviation = reconstructed
        .iter()
        .zip(map.iter())
        .map(|(rec, &img)| (rec - sol.voltages[img]).abs())
        .fold(0.0_f64, f64::max);
    Ok((reconstructed, deviation))
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let started = Instant::now();
    if args.family != "matched_er" {
        return Err(Failure::parse(format!(
            "unknown sweep family {:?}; available: matched_er",
            args.family
        )));
    }
    if let Some(g) = args.gammas.iter().find(|&&g| !(g > 0.0)) {
        return Err(Failure::parse(format!("gammas must be positive, got {g}")));
    }
    if let Some(b) = args.betas.iter().find(|&&b| !(b > 0.0)) {
        return Err(Failure::parse(format!("betas must be positive, got {b}")));
    }
    if let Some(m) = args.sizes.iter().find(|&&m| m < 2) {
        return Err(Failure::parse(format!("sizes must be at least 2, got {m}")));
    }
    if !(args.omega > 1.0) {
        return Err(Failure::parse(format!(
            "omega must exceed 1, got {}",
            args.omega
        )));
    }
    if !(args.epsilon > 0.0) {
        return Err(Failure::parse(format!(
            "epsilon must be positive, got {}",
            args.epsilon
        )));
    }
    let seeds = parse_seed_spec(&args.seeds)?;

    let cfg = SweepConfig {
        gammas: args.gammas.clone(),
        betas: args.betas.clone(),
        sizes: args.sizes.clone(),
        seeds: seeds.clone(),
        omega: args.omega,
        epsilon: args.epsilon,
    };
    let records = run_matched_er_sweep(&cfg)?;
    let data = match args.format {
        FormatArg::Csv => sweep_csv(&records),
        FormatArg::Json => serde_json::to_string_pretty(&records)? + "\n",
    };

    let config = json!({
        "family": args.family,
        "gammas": args.gammas,
        "betas": args.betas,
        "sizes": args.sizes,
        "omega": args.omega,
        "epsilon": args.epsilon,
        "format": match args.format { FormatArg::Csv => "csv", FormatArg::Json => "json" },
    });
    deliver_text(&data, &manifest(config, &seeds, started), args.output.as_deref())
}

/// Expands the `--seeds` argument: a bare count `N` means seeds `0..N`,
/// while any string containing a comma is an explicit seed list.
fn parse_seed_spec(spec: &str) -> Result<Vec<u64>, Failure> {
    let spec = spec.trim();
    let seeds: Vec<u64> = if spec.contains(',') {
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| Failure::parse(format!("invalid seed {s:?}")))
            })
            .collect::<Result<_, _>>()?
    } else {
        let count: u64 = spec.parse().map_err(|_| {
            Failure::parse(format!(
                "seeds must be a count or a comma-separated list, got {spec:?}"
            ))
        })?;
        (0..count).collect()
    };
    if seeds.is_empty() {
        return Err(Failure::parse("seed list is empty".to_string()));
    }
    Ok(seeds)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let dense_limit = averkit::tol::DENSE_LIMIT;
    let (graph, config) = match args.family {
        FamilyArg::Er => {
            let n = args
                .n
                .ok_or_else(|| Failure::parse("er requires --n".to_string()))?;
            if n < 2 {
                return Err(Failure::parse(format!("--n must be at least 2, got {n}")));
            }
            if !(args.c > 0.0) {
                return Err(Failure::parse(format!("--c must be positive, got {}", args.c)));
            }
            if n > dense_limit {
                return Err(Failure::parse(format!(
                    "--n {n} exceeds the dense analysis limit of {dense_limit}"
                )));
            }
            let (g, connected) = erdos_renyi(n, args.c, args.seed);
            eprintln!(
                "er: n={n} edges={} connected={connected}",
                g.edge_count()
            );
            (g, GeneratorConfig::ErdosRenyi { n, c: args.c, seed: args.seed })
        }
        FamilyArg::Torus => {
            let side = args
                .side
                .ok_or_else(|| Failure::parse("torus requires --side".to_string()))?;
            if args.d < 1 {
                return Err(Failure::parse(format!("--d must be at least 1, got {}", args.d)));
            }
            if side < 3 {
                return Err(Failure::parse(format!("--side must be at least 3, got {side}")));
            }
            let nodes = side
                .checked_pow(args.d as u32)
                .filter(|&n| n <= dense_limit)
                .ok_or_else(|| {
                    Failure::parse(format!(
                        "torus of side^d = {side}^{} nodes exceeds the dense analysis limit of {dense_limit}",
                        args.d
                    ))
                })?;
            let g = torus(args.d, side, args.seed);
            eprintln!("torus: d={} side={side} n={nodes}", args.d);
            (g, GeneratorConfig::Torus { d: args.d, side, seed: args.seed })
        }
        FamilyArg::MatchedEr => {
            let m = args
                .m
                .ok_or_else(|| Failure::parse("matched_er requires --m".to_string()))?;
            if m < 2 {
                return Err(Failure::parse(format!("--m must be at least 2, got {m}")));
            }
            if !(args.omega > 1.0) {
                return Err(Failure::parse(format!(
                    "--omega must exceed 1, got {}",
                    args.omega
                )));
            }
            if !(args.beta > 0.0) || !(args.gamma > 0.0) {
                return Err(Failure::parse(format!(
                    "--beta and --gamma must be positive, got {} and {}",
                    args.beta, args.gamma
                )));
            }
            if 2 * m + 2 > dense_limit {
                return Err(Failure::parse(format!(
                    "--m {m} gives {} nodes, exceeding the dense analysis limit of {dense_limit}",
                    2 * m + 2
                )));
            }
            let mc = matched_communities_opts(
                m,
                args.omega,
                args.beta,
                args.gamma,
                args.seed,
                args.permuted_matching,
            )?;
            eprintln!(
                "matched_er: m={m} edges={:?} attempts={}",
                mc.er_edges, mc.attempts
            );
            let config = mc.config.clone();
            (mc.graph, config)
        }
    };

    let data = format!("# {}\n{}", serde_json::to_string(&config)?, write_edge_list(&graph));
    let manifest = manifest(serde_json::to_value(&config)?, &[args.seed], started);
    deliver_text(&data, &manifest, args.output.as_deref())
}
