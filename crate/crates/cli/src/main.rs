//! `aspl`: generate networks, measure them, add shortcut edges and run
//! batch experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 graph or
//! strategy error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aspl_core::experiment::{self, ExperimentPlan, RunManifest};
use aspl_core::generators::{waxman_side_for_mean_degree, ModelKind, ModelParams, TARGET_MEAN_DEGREE};
use aspl_core::io::{self as gio, write_atomic, IngestOptions};
use aspl_core::measures::{accessibility, betweenness, DEFAULT_WALK_LENGTH};
use aspl_core::strategies::{run_strategy, StrategyConfig, StrategyKind, DEFAULT_BUDGET};
use aspl_core::{ExperimentError, Graph, GraphError, IoError};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

const OUTPUT_DIR_ENV: &str = "ASPL_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "aspl", version, about = "Shrink average shortest path length by adding edges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a model network and write it as an edge list.
    Generate(GenerateArgs),
    /// Per-node degree, betweenness and accessibility as CSV.
    Measure(MeasureArgs),
    /// Apply one strategy to an edge-list graph and record the ASPL trajectory.
    Optimize(OptimizeArgs),
    /// Run every strategy on many model instances and aggregate the results.
    Experiment(ExperimentArgs),
    /// Build the airport network from OpenFlights routes.dat.
    IngestAirports(IngestArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// er, ba, ws or wax.
    #[arg(long)]
    model: ModelKind,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// ER connection probability (default 0.006) or WS rewiring probability (default 0.4).
    #[arg(long)]
    p: Option<f64>,
    /// BA edges per new node.
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// WS ring-lattice degree.
    #[arg(long, default_value_t = 6)]
    k_ring: usize,
    #[arg(long, default_value_t = 0.014)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    /// Side of the Waxman square; default solves for mean degree 6.
    #[arg(long)]
    wax_side: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep only the largest connected component.
    #[arg(long)]
    lcc: bool,
    #[arg(long)]
    out: PathBuf,
    /// Node coordinates CSV (Waxman only).
    #[arg(long)]
    coords_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Walk length for accessibility.
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    h: usize,
    /// Measure the largest connected component instead of the whole file.
    #[arg(long)]
    lcc: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    strategy: StrategyKind,
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    h: usize,
    /// Number of edges to add.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Refresh betweenness/accessibility every K iterations.
    #[arg(long, default_value_t = 1)]
    recompute_every: usize,
    /// Let extremal strategies reuse a node as an endpoint within one run.
    #[arg(long)]
    allow_endpoint_reuse: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run on the largest connected component of a disconnected input.
    #[arg(long)]
    lcc: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Use the published parameter set (N=1000, ER p=0.006, WS k=6 p=0.4,
    /// BA m=3, WAX alpha=0.014 beta=0.2, budget 50, 30 instances). This is
    /// also the baseline the other flags override.
    #[arg(long)]
    paper_defaults: bool,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    recompute_every: Option<usize>,
    #[arg(long)]
    allow_endpoint_reuse: bool,
    /// Node count for every model.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated subset of ba,er,ws,wax.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    /// Comma-separated subset of strategies.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<StrategyKind>>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism); output is identical for any value.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    out: PathBuf,
    /// Suppress progress on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// OpenFlights routes.dat.
    #[arg(long)]
    routes: PathBuf,
    /// Optional OpenFlights airports.dat; routes naming unknown airports are dropped.
    #[arg(long)]
    airports: Option<PathBuf>,
    /// Fail on malformed rows instead of skipping them.
    #[arg(long)]
    strict: bool,
    /// Edge list of the largest connected component.
    #[arg(long)]
    out: PathBuf,
    /// node_id,label CSV.
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

enum Failure {
    Data(String),
    Runtime(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::InvalidPlan(msg) => Failure::Runtime(format!("invalid plan: {msg}")),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Measure(args) => measure(args),
        Command::Optimize(args) => optimize(args),
        Command::Experiment(args) => run_experiment(args),
        Command::IngestAirports(args) => ingest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn print_config(command: &str, config: &serde_json::Value) {
    eprintln!("aspl {command}: {config}");
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn write_manifest(path: &Path, manifest: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(manifest).map_err(IoError::from)?;
    write_atomic(path, |w| {
        writeln!(w, "{text}").map_err(|e| io_err(path, e))
    })?;
    Ok(())
}

fn io_err(path: &Path, e: std::io::Error) -> IoError {
    IoError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn library() -> serde_json::Value {
    json!({ "name": "aspl", "version": env!("CARGO_PKG_VERSION") })
}

fn load(path: &Path, lcc: bool) -> Result<Graph, Failure> {
    let g = gio::load_edge_list(path)?;
    if lcc {
        return Ok(g.largest_connected_component().0);
    }
    if !g.is_connected() {
        return Err(Failure::Runtime(format!(
            "{} is disconnected; pass --lcc to use its largest connected component",
            path.display()
        )));
    }
    Ok(g)
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let params = match args.model {
        ModelKind::Er => ModelParams::Er {
            n: args.n,
            p: args.p.unwrap_or(0.006),
        },
        ModelKind::Ba => ModelParams::Ba { n: args.n, m: args.m },
        ModelKind::Ws => ModelParams::Ws {
            n: args.n,
            k_ring: args.k_ring,
            p: args.p.unwrap_or(0.4),
        },
        ModelKind::Wax => {
            let side = match args.wax_side {
                Some(side) => side,
                None => waxman_side_for_mean_degree(args.n, args.alpha, args.beta, TARGET_MEAN_DEGREE)?,
            };
            ModelParams::Wax {
                n: args.n,
                alpha: args.alpha,
                beta: args.beta,
                side,
            }
        }
    };
    let config = json!({ "params": params, "seed": args.seed, "lcc": args.lcc, "library": library() });
    print_config("generate", &config);

    let generated = params.generate(args.seed)?;
    let (graph, mapping) = if args.lcc {
        let (g, m) = generated.graph.largest_connected_component();
        (g, Some(m))
    } else {
        (generated.graph.clone(), None)
    };
    let header = vec![
        format!("config {config}"),
        format!("nodes {} edges {}", graph.node_count(), graph.edge_count()),
    ];
    write_atomic(&args.out, |w| {
        gio::write_edge_list(w, &graph, &header).map_err(|e| io_err(&args.out, e))
    })?;
    if let Some(coords_path) = &args.coords_out {
        let Some(coords) = &generated.coordinates else {
            return Err(Failure::Runtime("--coords-out needs a spatial model (wax)".into()));
        };
        let coords = match &mapping {
            // keep rows aligned with the relabelled nodes
            Some(m) => aspl_core::Coordinates(
                m.iter()
                    .zip(&coords.0)
                    .filter_map(|(new, &xy)| new.map(|_| xy))
                    .collect(),
            ),
            None => coords.clone(),
        };
        write_atomic(coords_path, |w| gio::write_coordinates_csv(w, &coords))?;
    }
    eprintln!(
        "wrote {} ({} nodes, {} edges)",
        args.out.display(),
        graph.node_count(),
        graph.edge_count()
    );
    Ok(())
}

fn measure(args: MeasureArgs) -> Result<(), Failure> {
    let config = json!({ "input": args.input, "h": args.h, "lcc": args.lcc, "library": library() });
    print_config("measure", &config);
    let g = load(&args.input, args.lcc)?;
    let btw = betweenness(&g)?;
    let acc = accessibility(&g, args.h)?;
    write_atomic(&args.out, |w| {
        writeln!(w, "node_id,degree,betweenness,accessibility_h").map_err(|e| io_err(&args.out, e))?;
        for u in 0..g.node_count() {
            writeln!(w, "{},{},{},{}", u, g.degree(u), btw.values[u], acc.values[u])
                .map_err(|e| io_err(&args.out, e))?;
        }
        Ok(())
    })?;
    write_manifest(&sidecar(&args.out), &config)?;
    Ok(())
}

fn optimize(args: OptimizeArgs) -> Result<(), Failure> {
    let cfg = StrategyConfig {
        kind: args.strategy,
        budget: args.budget,
        h: args.h,
        recompute_every: args.recompute_every,
        fresh_endpoints: !args.allow_endpoint_reuse,
        seed: args.seed,
    };
    let config = json!({ "input": args.input, "lcc": args.lcc, "strategy": cfg, "library": library() });
    print_config("optimize", &config);
    let g = load(&args.input, args.lcc)?;
    let run = run_strategy(&g, &cfg)?;
    write_atomic(&args.out, |w| {
        let err = |e| io_err(&args.out, e);
        writeln!(w, "iteration,u,v,aspl_after").map_err(err)?;
        writeln!(w, "0,,,{}", run.trajectory[0]).map_err(err)?;
        for (i, (&(u, v), aspl)) in run.added.iter().zip(&run.trajectory[1..]).enumerate() {
            writeln!(w, "{},{},{},{}", i + 1, u, v, aspl).map_err(err)?;
        }
        Ok(())
    })?;
    write_manifest(&sidecar(&args.out), &config)?;
    let (first, last) = (run.trajectory[0], *run.trajectory.last().unwrap_or(&run.trajectory[0]));
    eprintln!(
        "{}: ASPL {first:.4} -> {last:.4} ({:+.3}%)",
        cfg.kind,
        100.0 * (last - first) / first
    );
    Ok(())
}

fn run_experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let mut plan = ExperimentPlan::paper_defaults();
    if let Some(n) = args.n {
        let side_for = |n: usize, alpha: f64, beta: f64| waxman_side_for_mean_degree(n, alpha, beta, TARGET_MEAN_DEGREE);
        let mut models = Vec::new();
        for m in &plan.models {
            models.push(match *m {
                ModelParams::Er { p, .. } => ModelParams::Er { n, p },
                ModelParams::Ba { m, .. } => ModelParams::Ba { n, m },
                ModelParams::Ws { k_ring, p, .. } => ModelParams::Ws { n, k_ring, p },
                ModelParams::Wax { alpha, beta, .. } => ModelParams::Wax {
                    n,
                    alpha,
                    beta,
                    side: side_for(n, alpha, beta)?,
                },
            });
        }
        plan.models = models;
    }
    if let Some(kinds) = &args.models {
        plan.models.retain(|m| kinds.contains(&m.kind()));
    }
    if let Some(strategies) = args.strategies {
        plan.strategies = strategies;
    }
    if let Some(v) = args.instances {
        plan.instances = v;
    }
    if let Some(v) = args.budget {
        plan.budget = v;
    }
    if let Some(v) = args.h {
        plan.h = v;
    }
    if let Some(v) = args.recompute_every {
        plan.recompute_every = v;
    }
    if let Some(v) = args.seed {
        plan.master_seed = v;
    }
    plan.fresh_endpoints = !args.allow_endpoint_reuse;
    print_config(
        "experiment",
        &json!({ "plan": plan, "paper_defaults": args.paper_defaults, "jobs": args.jobs, "out": args.out }),
    );
    plan.validate()?;

    let quiet = args.quiet;
    let progress = move |done: usize, total: usize| {
        if !quiet && (done == total || done % 10 == 0) {
            eprintln!("  {done}/{total} runs");
        }
    };
    let output = experiment::run_plan_with_progress(&plan, args.jobs, &progress)?;
    let summary = experiment::summarize(&output.trajectories)?;
    let scatter = if plan.instances >= 2 {
        Some(experiment::scatter_data(&output.trajectories)?)
    } else {
        None
    };
    let manifest = RunManifest::new(&plan, &output.instances);

    let dir = &args.out;
    let path = |name: &str| dir.join(name);
    write_atomic(path("trajectories.csv"), |w| {
        experiment::write_trajectories_csv(w, &output.trajectories)
    })?;
    write_atomic(path("summary.csv"), |w| experiment::write_summary_csv(w, &summary))?;
    if let Some(series) = &scatter {
        write_atomic(path("scatter.csv"), |w| experiment::write_scatter_csv(w, series))?;
        write_atomic(path("correlations.csv"), |w| experiment::write_correlations_csv(w, series))?;
    }
    let manifest_json = manifest.to_json()?;
    let manifest_path = path("manifest.json");
    write_atomic(&manifest_path, |w| {
        writeln!(w, "{manifest_json}").map_err(|e| io_err(&manifest_path, e))
    })?;

    for row in &summary.rows {
        eprintln!(
            "{:<4} {:<24} initial {:.3} ± {:.3}  variation {:+.3} ± {:.3} %{}",
            row.model,
            row.strategy.tag(),
            row.initial_mean,
            row.initial_std,
            row.variation_pct_mean,
            row.variation_pct_std,
            if row.best { "  *" } else { "" }
        );
    }
    eprintln!("wrote results to {}", dir.display());
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let config = json!({
        "routes": args.routes,
        "airports": args.airports,
        "strict": args.strict,
        "library": library(),
    });
    print_config("ingest-airports", &config);
    let net = gio::ingest_openflights(
        &args.routes,
        args.airports.as_deref(),
        IngestOptions { strict: args.strict },
    )?;
    let provenance = serde_json::to_value(&net.provenance).map_err(IoError::from)?;
    let header = vec![format!("provenance {provenance}")];
    write_atomic(&args.out, |w| {
        gio::write_edge_list(w, &net.graph, &header).map_err(|e| io_err(&args.out, e))
    })?;
    if let Some(labels) = &args.labels_out {
        write_atomic(labels, |w| gio::write_labels_csv(w, &net.labels))?;
    }
    write_manifest(&sidecar(&args.out), &json!({ "config": config, "provenance": provenance }))?;
    let p = &net.provenance;
    eprintln!(
        "{} rows: {} accepted, {} dropped; LCC {} airports, {} routes",
        p.total_rows, p.accepted_rows, p.dropped_rows, p.lcc_airports, p.lcc_edges
    );
    Ok(())
}
