//! `netcongruence` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use netcongruence::experiments::{
    fig2_panels, m_for_dbar, run_connectome, run_distributions, run_grid, DistributionPanel,
    GridConfig, GridPreset,
};
use netcongruence::geometry::geodesic_matrix;
use netcongruence::io::{load_network, save_network, StoredNetwork};
use netcongruence::metrics::{gre, gre_all_pairs, GreedyRouter, NavigabilityReport};
use netcongruence::paths::{gsp_lengths, pair_records};
use netcongruence::{
    gc, generate, Error, NpsoParams, Reference, Result, WeightedGraph, DEFAULT_PATH_CAP,
};

#[derive(Parser, Debug)]
#[command(
    name = "netcongruence",
    version,
    about = "Geometrical congruence and navigability of hyperbolic networks"
)]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true, env = "NETCONGRUENCE_THREADS")]
    threads: Option<usize>,

    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an nPSO network into a directory.
    Generate(GenerateArgs),
    /// Geometrical congruence of a stored network.
    Gc(MetricArgs),
    /// Greedy routing efficiency of a stored network.
    Gre(GreArgs),
    /// Parameter sweep of GC and GRE heatmaps.
    Grid(GridArgs),
    /// GEO vs mean TSP projection distribution comparison.
    Distributions(DistributionArgs),
    /// Compare GC(GSP) between two groups of connectomes.
    Connectome(ConnectomeArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Temperature.
    #[arg(long = "t")]
    temperature: f64,
    #[arg(long)]
    gamma: f64,
    /// Number of communities (0 = uniform angles).
    #[arg(long = "c", default_value_t = 0)]
    communities: usize,
    /// Skip writing the dense geodesic matrix.
    #[arg(long)]
    no_geodesics: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CapArg {
    /// Maximum shortest paths enumerated per pair (0 = unlimited).
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    path_cap: usize,
}

impl CapArg {
    fn cap(&self) -> Option<usize> {
        (self.path_cap > 0).then_some(self.path_cap)
    }
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// Network directory written by `generate`.
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value = "geo")]
    reference: Reference,
    /// Include per-pair ratios in the report.
    #[arg(long)]
    per_pair: bool,
    #[command(flatten)]
    cap: CapArg,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GreArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value = "geo")]
    reference: Reference,
    /// Average over all ordered pairs instead of nonadjacent ones only.
    #[arg(long)]
    all_pairs: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// fig3, suppl1, suppl2, suppl3 or suppl4.
    #[arg(long)]
    preset: Option<GridPreset>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    dbar: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    #[arg(long = "t", value_delimiter = ',')]
    temperature: Option<Vec<f64>>,
    #[arg(long = "c")]
    communities: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[command(flatten)]
    cap: CapArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DistributionArgs {
    /// `fig2` runs the 18 preset panels; otherwise a single network is
    /// described by the model flags.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 12)]
    dbar: u32,
    #[arg(long = "t", default_value_t = 0.5)]
    temperature: f64,
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    #[arg(long = "c", default_value_t = 0)]
    communities: usize,
    #[command(flatten)]
    cap: CapArg,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ConnectomeArgs {
    /// CSV with columns subject_id,file and any label columns.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    label_key: String,
    /// Exact label value or numeric range `lo-hi`.
    #[arg(long)]
    group_a: String,
    #[arg(long)]
    group_b: String,
    #[command(flatten)]
    cap: CapArg,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn header(command: &str, seed: u64, config: Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn emit(out: Option<&Path>, report: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(seed: u64, a: &GenerateArgs) -> Result<()> {
    let params = NpsoParams {
        n: a.n,
        m: a.m,
        temperature: a.temperature,
        gamma: a.gamma,
        communities: a.communities,
        seed,
    };
    let net = generate(&params)?;
    let head = header("generate", seed, json!({ "params": params }));
    save_network(
        &a.out,
        &net,
        &serde_json::to_string(&head)?,
        !a.no_geodesics,
    )?;
    println!(
        "generated {} nodes, {} edges (mean degree {:.3}) into {}",
        net.graph.node_count(),
        net.graph.edge_count(),
        net.graph.mean_degree(),
        a.out.display()
    );
    Ok(())
}

/// Network with geodesic edge weights recomputed from its coordinates.
fn load_weighted(
    dir: &Path,
) -> Result<(StoredNetwork, WeightedGraph, netcongruence::GeodesicMatrix)> {
    let stored = load_network(dir)?;
    let geo = geodesic_matrix(&stored.coords);
    let weights = WeightedGraph::from_graph(&stored.graph, |u, v| geo.get(u, v))?;
    Ok((stored, weights, geo))
}

fn cmd_gc(seed: u64, a: &MetricArgs) -> Result<()> {
    let (stored, weights, geo) = load_weighted(&a.network)?;
    let pairs = pair_records(&weights, Some(&geo), a.cap.cap())?;
    let mut report = gc(&pairs, a.reference)?;
    if !a.per_pair {
        report.per_pair_ratios = None;
    }
    eprintln!(
        "GC({}) = {:.6} over {} pairs",
        a.reference, report.gc, report.n_pairs
    );
    let config = json!({
        "network": a.network.display().to_string(),
        "reference": a.reference,
        "path_cap": a.cap.cap(),
    });
    emit(
        a.out.as_deref(),
        &json!({
            "header": header("gc", seed, config),
            "nodes": stored.graph.node_count(),
            "edges": stored.graph.edge_count(),
            "disconnected_pairs": pairs.disconnected_pairs,
            "report": report,
        }),
    )
}

fn cmd_gre(seed: u64, a: &GreArgs) -> Result<()> {
    let (stored, weights, geo) = load_weighted(&a.network)?;
    let router = GreedyRouter::new(&weights, &stored.coords)?;
    let routes = router.route_all(!a.all_pairs);
    let report: NavigabilityReport = match a.reference {
        Reference::Geo => {
            let rd = |i, j| geo.get(i, j);
            if a.all_pairs {
                gre_all_pairs(&stored.graph, &routes, rd, a.reference)?
            } else {
                gre(&stored.graph, &routes, rd, a.reference)?
            }
        }
        Reference::Gsp => {
            let gsp = gsp_lengths(&weights);
            let rd = |i, j| gsp.get(i, j);
            if a.all_pairs {
                gre_all_pairs(&stored.graph, &routes, rd, a.reference)?
            } else {
                gre(&stored.graph, &routes, rd, a.reference)?
            }
        }
    };
    eprintln!(
        "GRE({}) = {:.6}, success rate {:.4} over {} routes",
        a.reference, report.gre, report.success_rate, report.routes
    );
    let config = json!({
        "network": a.network.display().to_string(),
        "reference": a.reference,
        "all_pairs": a.all_pairs,
    });
    emit(
        a.out.as_deref(),
        &json!({
            "header": header("gre", seed, config),
            "nodes": stored.graph.node_count(),
            "edges": stored.graph.edge_count(),
            "report": report,
        }),
    )
}

fn grid_config(seed: u64, a: &GridArgs) -> GridConfig {
    let mut cfg = match a.preset {
        Some(p) => p.config(seed),
        None => GridConfig {
            temperature_values: vec![0.1, 0.3, 0.5],
            communities: 0,
            ..GridPreset::Fig3.config(seed)
        },
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(v) = &a.dbar {
        cfg.dbar_values = v.clone();
    }
    if let Some(v) = &a.gamma {
        cfg.gamma_values = v.clone();
    }
    if let Some(v) = &a.temperature {
        cfg.temperature_values = v.clone();
    }
    if let Some(c) = a.communities {
        cfg.communities = c;
    }
    if let Some(r) = a.realizations {
        cfg.realizations = r;
    }
    cfg.path_cap = a.cap.cap();
    cfg
}

fn cmd_grid(seed: u64, a: &GridArgs) -> Result<()> {
    let cfg = grid_config(seed, a);
    let result = run_grid(&cfg)?;
    let text = match a.format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json() + "\n",
    };
    write(&a.out, &text)?;
    let failed: usize = result.cells.iter().map(|c| c.failed).sum();
    println!(
        "{} cells x {} realizations, {failed} failed, written to {}",
        result.cells.len(),
        cfg.realizations,
        a.out.display()
    );
    Ok(())
}

fn cmd_distributions(seed: u64, a: &DistributionArgs) -> Result<()> {
    let panels: Vec<DistributionPanel> = match a.preset.as_deref() {
        Some("fig2") => fig2_panels(seed),
        Some(other) => {
            return Err(Error::Usage(format!(
                "unknown distributions preset '{other}'"
            )))
        }
        None => vec![DistributionPanel {
            label: format!(
                "dbar={}:T={}:gamma={}:C={}",
                a.dbar, a.temperature, a.gamma, a.communities
            ),
            dbar: a.dbar,
            params: NpsoParams {
                n: a.n,
                m: m_for_dbar(a.dbar),
                temperature: a.temperature,
                gamma: a.gamma,
                communities: a.communities,
                seed,
            },
        }],
    };
    for p in &panels {
        p.params.validate()?;
    }
    let report = run_distributions(&panels, a.cap.cap());
    let head = header(
        "distributions",
        seed,
        json!({ "preset": a.preset, "panels": panels, "path_cap": a.cap.cap() }),
    );
    let comment = format!("# config: {}\n", serde_json::to_string(&head)?);
    fs::create_dir_all(&a.out)?;
    write(
        &a.out.join("summary.csv"),
        &(comment.clone() + &report.summary_csv()),
    )?;
    write(&a.out.join("kde.csv"), &(comment + &report.kde_csv()))?;
    write(
        &a.out.join("report.json"),
        &(serde_json::to_string_pretty(&json!({ "header": head, "report": report }))? + "\n"),
    )?;
    for p in &report.panels {
        match &p.comparison {
            Some(c) => println!(
                "{}: p = {:.3e} over {} pairs",
                p.panel.label,
                c.mwu.p_value,
                c.geo.len()
            ),
            None => println!(
                "{}: failed: {}",
                p.panel.label,
                p.error.as_deref().unwrap_or("")
            ),
        }
    }
    Ok(())
}

fn cmd_connectome(seed: u64, a: &ConnectomeArgs) -> Result<()> {
    let report = run_connectome(
        &a.manifest,
        &a.label_key,
        &a.group_a,
        &a.group_b,
        a.cap.cap(),
    )?;
    let head = header(
        "connectome",
        seed,
        json!({
            "manifest": a.manifest.display().to_string(),
            "label_key": a.label_key,
            "group_a": a.group_a,
            "group_b": a.group_b,
            "path_cap": a.cap.cap(),
        }),
    );
    fs::create_dir_all(&a.out)?;
    write(
        &a.out.join("subjects.csv"),
        &format!(
            "# config: {}\n{}",
            serde_json::to_string(&head)?,
            report.to_csv()
        ),
    )?;
    write(
        &a.out.join("report.json"),
        &(serde_json::to_string_pretty(&json!({ "header": head, "report": report }))? + "\n"),
    )?;
    let c = &report.comparison;
    println!(
        "{} ({} subjects) vs {} ({} subjects): Mann-Whitney p = {:.4e}; {} skipped",
        c.group_a.label,
        c.group_a.subjects.len(),
        c.group_b.label,
        c.group_b.subjects.len(),
        c.mwu.p_value,
        report.skipped.len()
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(cli.seed, a),
        Command::Gc(a) => cmd_gc(cli.seed, a),
        Command::Gre(a) => cmd_gre(cli.seed, a),
        Command::Grid(a) => cmd_grid(cli.seed, a),
        Command::Distributions(a) => cmd_distributions(cli.seed, a),
        Command::Connectome(a) => cmd_connectome(cli.seed, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
