use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cascade_core::error::{Error, ErrorKind, Result};
use cascade_core::experiments::report::{atomic_write, parse_size_width_csv, sweep_csv};
use cascade_core::experiments::width::{mean_and_std, positive_utility_width_for};
use cascade_core::experiments::{
    expected_added_utility_over_prior, fit_power_law_with, m_robustness_ratio, optimization_region_width, sweep,
    utility_condition, SizeVariable, StrategySpec, SweepResult,
};
use cascade_core::influence::oracle_agreement_suite;
use cascade_core::io::{threads_from_env, write_edge_list, ExperimentConfig, NetworkSource};
use cascade_core::percolation::critical_point;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cascade-lab", version, about = "Influence-maximization sweeps on independent-cascade networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Experiment config (TOML).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set network.n=4000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Replaces the config's output_dir.
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured network(s) and write edge lists.
    Generate(ConfigArgs),
    /// Clean an edge list (network.source = "edge_list") and report its statistics.
    Ingest(ConfigArgs),
    /// Run the p-sweep and write sweep.csv, sweep.json and summary.json.
    Sweep(ConfigArgs),
    /// Optimization-region width, from a previous sweep.json or a fresh sweep.
    Width {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Power-law fit of widths against size from a `size,width` CSV.
    Fit {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SizeArg::Nodes)]
        size_variable: SizeArg,
        #[arg(short, long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Utility analysis of a sweep, or a single evaluation with --opt/--rand/--time.
    Utility {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, requires_all = ["rand", "time"])]
        opt: Option<f64>,
        #[arg(long)]
        rand: Option<f64>,
        #[arg(long)]
        time: Option<f64>,
    },
    /// Ratio of prior-integrated local and hill-climbing influence per sub-network mass.
    Mratio(ConfigArgs),
    /// Monte-Carlo versus exact influence on random small graphs.
    OracleCheck {
        #[arg(long, default_value_t = 20)]
        graphs: usize,
        #[arg(long, default_value_t = 50_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long, default_value = ".")]
        output_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeArg {
    Nodes,
    Edges,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match setup_threads().and_then(|_| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let details = match &e {
                Error::Config(v) => v.clone(),
                _ => vec![],
            };
            let report = json!({
                "error": {
                    "kind": kind_label(e.kind()),
                    "type": e.kind_name(),
                    "message": e.to_string(),
                    "details": details,
                }
            });
            eprintln!("{report}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

fn kind_label(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Config => "config",
        ErrorKind::Data => "data",
        ErrorKind::Runtime => "runtime",
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Runtime => 4,
    }
}

fn setup_threads() -> Result<()> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(vec![format!("cannot start {n} worker threads: {e}")]))?;
    }
    Ok(())
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::Config(vec!["this subcommand needs --config".into()]))?;
    let mut cfg = ExperimentConfig::load(path, &args.overrides)?;
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(&path, text.as_bytes())?;
    Ok(path)
}

fn config_echo(cfg: &ExperimentConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate(args) => generate(&load(&args)?),
        Command::Ingest(args) => ingest(&load(&args)?),
        Command::Sweep(args) => run_sweep(&load(&args)?),
        Command::Width { cfg, input } => width(&load(&cfg)?, input.as_deref()),
        Command::Fit { input, size_variable, output_dir } => fit(&input, size_variable, &output_dir),
        Command::Utility { cfg, input, opt, rand, time } => match (opt, rand, time) {
            (Some(o), Some(r), Some(t)) => utility_point(&cfg, o, r, t),
            _ => utility(&load(&cfg)?, input.as_deref()),
        },
        Command::Mratio(args) => mratio(&load(&args)?),
        Command::OracleCheck { graphs, trials, seed, output_dir } => oracle(graphs, trials, seed, &output_dir),
    }
}

fn generate(cfg: &ExperimentConfig) -> Result<()> {
    let mut networks = Vec::new();
    for i in 0..cfg.instances {
        let (g, d) = cfg.build_network(i)?;
        let name = format!("network_{i}.edges");
        write_edge_list(&g, &cfg.output_dir.join(&name))?;
        networks.push(json!({ "file": name, "network": d, "critical_point": critical_point(&g).ok() }));
    }
    let path = write_json(
        &cfg.output_dir,
        "generate.json",
        &json!({ "networks": networks, "rng_seed": cfg.rng_seed, "config": config_echo(cfg) }),
    )?;
    println!("{}", path.display());
    Ok(())
}

fn ingest(cfg: &ExperimentConfig) -> Result<()> {
    let NetworkSource::EdgeList { path, dominant_component } = &cfg.network else {
        return Err(Error::Config(vec!["ingest needs network.source = \"edge_list\"".into()]));
    };
    let ingested = cascade_core::io::ingest_edge_list(path)?;
    let g = if *dominant_component {
        cascade_core::graph::dominant_component(&ingested.graph)?.graph
    } else {
        ingested.graph.clone()
    };
    write_edge_list(&g, &cfg.output_dir.join("ingested.edges"))?;
    let report = json!({
        "raw_nodes": ingested.graph.node_count(),
        "raw_edges": ingested.graph.edge_count(),
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "dropped_self_loops": ingested.warnings.self_loops,
        "dropped_duplicates": ingested.warnings.duplicates,
        "critical_point": critical_point(&g).ok(),
        "rng_seed": cfg.rng_seed,
        "config": config_echo(cfg),
    });
    println!("{}", write_json(&cfg.output_dir, "ingest.json", &report)?.display());
    Ok(())
}

fn sweeps(cfg: &ExperimentConfig) -> Result<Vec<SweepResult>> {
    (0..cfg.instances)
        .map(|i| {
            let (g, d) = cfg.build_network(i)?;
            let grid = cfg.resolve_grid(&g)?;
            log::info!("instance {i}: {} nodes, {} edges, {} grid points", d.n, d.edges, grid.len());
            let mut r = sweep(&g, &grid, &cfg.sweep_settings(i))?;
            r.network = d;
            Ok(r)
        })
        .collect()
}

fn read_sweeps(path: &Path) -> Result<Vec<SweepResult>> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let sweeps = value.get("sweeps").cloned().unwrap_or(value);
    Ok(serde_json::from_value(sweeps)?)
}

fn has_hill_climb(r: &SweepResult) -> bool {
    r.strategies.iter().any(|s| matches!(s, StrategySpec::HillClimb { .. }))
}

fn summaries(cfg: &ExperimentConfig, results: &[SweepResult]) -> Result<Value> {
    let mut per_instance = Vec::new();
    let mut widths = Vec::new();
    let mut utility_widths = Vec::new();
    for r in results {
        let mut entry = json!({ "network": r.network });
        if has_hill_climb(r) {
            let w = optimization_region_width(r, cfg.width.threshold_fraction)?;
            let uw = positive_utility_width_for(r, "hill_climb", &cfg.utility)?;
            let (peak_p, peak_gain) = r.marginal_gain_peak()?;
            widths.push(w);
            utility_widths.push(uw);
            entry["optimization_region_width"] = json!(w);
            entry["positive_utility_width"] = json!(uw);
            entry["marginal_gain_peak"] = json!({ "p": peak_p, "gain": peak_gain });
        }
        match expected_added_utility_over_prior(r, &cfg.utility) {
            Ok(e) => entry["expected_added_utility"] = json!(e),
            Err(err) => log::warn!("skipping prior expectation: {err}"),
        }
        per_instance.push(entry);
    }
    let aggregate = |v: &[f64]| {
        let (mean, std) = mean_and_std(v);
        json!({ "mean": mean, "std": std, "instances": v.len() })
    };
    Ok(json!({
        "instances": per_instance,
        "optimization_region_width": if widths.is_empty() { Value::Null } else { aggregate(&widths) },
        "positive_utility_width": if utility_widths.is_empty() { Value::Null } else { aggregate(&utility_widths) },
        "threshold_fraction": cfg.width.threshold_fraction,
        "rng_seed": cfg.rng_seed,
        "config": config_echo(cfg),
    }))
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<()> {
    let results = sweeps(cfg)?;
    for (i, r) in results.iter().enumerate() {
        let name = if results.len() == 1 { "sweep.csv".to_string() } else { format!("sweep_{i}.csv") };
        atomic_write(&cfg.output_dir.join(name), sweep_csv(r, &cfg.utility).as_bytes())?;
    }
    write_json(
        &cfg.output_dir,
        "sweep.json",
        &json!({ "sweeps": results, "rng_seed": cfg.rng_seed, "config": config_echo(cfg) }),
    )?;
    let path = write_json(&cfg.output_dir, "summary.json", &summaries(cfg, &results)?)?;
    println!("{}", path.display());
    Ok(())
}

fn width(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<()> {
    let results = match input {
        Some(p) => read_sweeps(p)?,
        None => sweeps(cfg)?,
    };
    if !results.iter().all(has_hill_climb) {
        return Err(Error::Config(vec!["width needs a hill_climb strategy in the sweep".into()]));
    }
    let path = write_json(&cfg.output_dir, "width.json", &summaries(cfg, &results)?)?;
    println!("{}", path.display());
    Ok(())
}

fn fit(input: &Path, size_variable: SizeArg, output_dir: &Path) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let (sizes, widths) = parse_size_width_csv(&text)?;
    let variable = match size_variable {
        SizeArg::Nodes => SizeVariable::Nodes,
        SizeArg::Edges => SizeVariable::Edges,
    };
    let fit = fit_power_law_with(&sizes, &widths, variable)?;
    let path = write_json(output_dir, "fit.json", &json!({ "fit": fit, "input": input }))?;
    println!("{}", path.display());
    Ok(())
}

fn utility_point(args: &ConfigArgs, opt: f64, rand: f64, time: f64) -> Result<()> {
    let (cost, value, dir) = match &args.config {
        Some(_) => {
            let cfg = load(args)?;
            (cfg.utility.cost_per_time, cfg.utility.value_per_node, cfg.output_dir)
        }
        None => (1e-3, 1.0, args.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))),
    };
    let check = utility_condition(opt, rand, time, cost, value)?;
    let path = write_json(&dir, "utility.json", &json!({ "check": check, "cost_per_time": cost, "value_per_node": value }))?;
    println!("{}", path.display());
    Ok(())
}

fn utility(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<()> {
    let results = match input {
        Some(p) => read_sweeps(p)?,
        None => sweeps(cfg)?,
    };
    let mut per_instance = Vec::new();
    for r in &results {
        let mut widths = serde_json::Map::new();
        for s in r.strategies.iter().filter(|s| **s != StrategySpec::Random) {
            widths.insert(s.label(), json!(positive_utility_width_for(r, &s.label(), &cfg.utility)?));
        }
        per_instance.push(json!({
            "network": r.network,
            "positive_utility_width": widths,
            "expected_added_utility": expected_added_utility_over_prior(r, &cfg.utility)?,
        }));
    }
    let path = write_json(
        &cfg.output_dir,
        "utility.json",
        &json!({ "instances": per_instance, "utility": cfg.utility, "rng_seed": cfg.rng_seed, "config": config_echo(cfg) }),
    )?;
    println!("{}", path.display());
    Ok(())
}

fn mratio(cfg: &ExperimentConfig) -> Result<()> {
    let (g, d) = cfg.build_network(0)?;
    let grid = cfg.resolve_grid(&g)?;
    let (mut result, ratios) = m_robustness_ratio(
        &g,
        &cfg.robustness.masses,
        cfg.k,
        &grid,
        cfg.trials,
        cfg.robustness.trials_per_eval,
        cfg.sweep_settings(0).rng_seed,
    )?;
    result.network = d;
    atomic_write(&cfg.output_dir.join("mratio.csv"), sweep_csv(&result, &cfg.utility).as_bytes())?;
    let path = write_json(
        &cfg.output_dir,
        "mratio.json",
        &json!({ "ratios": ratios, "network": result.network, "rng_seed": cfg.rng_seed, "config": config_echo(cfg) }),
    )?;
    println!("{}", path.display());
    Ok(())
}

fn oracle(graphs: usize, trials: usize, seed: u64, output_dir: &Path) -> Result<()> {
    let report = oracle_agreement_suite(graphs, trials, seed)?;
    println!("oracle agreement: {} passed, {} failed", report.passed, report.failed);
    write_json(output_dir, "oracle.json", &json!({ "report": report, "rng_seed": seed }))?;
    Ok(())
}
