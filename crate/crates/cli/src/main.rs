// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hetembed::graph::{triangle_counts, Graph};
use hetembed::io::{self as hio, ReconstructionReport};
use hetembed::manifold::ManifoldSpec;
use hetembed::metrics::{self, avg_triangle_distortion, spearman, volume_match};
use hetembed::optim::{train, Embedding, TrainConfig};
use hetembed::randgraph::{
    self, degree_barycenter, degree_histogram, summarize, Mode, SampleConfig,
};
use hetembed::reconstruct::{
    curvature_correction, estimate_triangles, nn_graph, tune_threshold, ReconstructionResult,
};
use hetembed::Error;

#[derive(Parser)]
#[command(name = "hetembed", version, about = "Curvature-aware graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Train an embedding of a graph.
    Embed(EmbedArgs),
    /// Distortion, mAP and curvature metrics of an embedding.
    Eval(EvalArgs),
    /// Rebuild a graph from an embedding by distance thresholding.
    Reconstruct(ReconstructArgs),
    /// Sample random geometric graphs.
    Generate(GenerateArgs),
    /// Compare graph ball sizes with manifold annular volumes.
    Volume(VolumeArgs),
    /// Degree, clustering and clique statistics of a graph.
    Stats(StatsArgs),
}

/// Training options. Each overrides the key of the same name in `--config`.
#[derive(Args, Default)]
struct TrainFlags {
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long = "ell_plus")]
    ell_plus: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long = "lambda_rot")]
    lambda_rot: Option<String>,
    #[arg(long = "learning_rate")]
    learning_rate: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long = "batch_pairs")]
    batch_pairs: Option<String>,
    #[arg(long = "radial_init")]
    radial_init: Option<String>,
    #[arg(long = "curvature_loss")]
    curvature_loss: Option<String>,
    #[arg(long = "normalize_forman")]
    normalize_forman: Option<String>,
}

impl TrainFlags {
    fn pairs(&self) -> [(&'static str, &Option<String>); 12] {
        [
            ("tau", &self.tau),
            ("epsilon", &self.epsilon),
            ("gamma", &self.gamma),
            ("ell_plus", &self.ell_plus),
            ("delta", &self.delta),
            ("lambda_rot", &self.lambda_rot),
            ("learning_rate", &self.learning_rate),
            ("epochs", &self.epochs),
            ("batch_pairs", &self.batch_pairs),
            ("radial_init", &self.radial_init),
            ("curvature_loss", &self.curvature_loss),
            ("normalize_forman", &self.normalize_forman),
        ]
    }
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Product space, e.g. `h5,h5,rot(a=auto)`.
    #[arg(long)]
    manifold: String,
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "embedding.json")]
    out: PathBuf,
    /// Loss history CSV; defaults to `<out>.history.csv`.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Add wall-clock timings to the history.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    /// Report path; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    /// Fixed threshold; tuned on a validation set otherwise.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long = "val-fraction", default_value_t = 0.1)]
    val_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run the curvature correction on top of the threshold graph.
    #[arg(long)]
    correct: bool,
    #[arg(long, default_value_t = 90.0)]
    percentile: f64,
    /// Threshold change of the correction; defaults to `rho / 10`.
    #[arg(long)]
    step: Option<f64>,
    /// Estimate per-node triangle counts from the encoded curvature.
    #[arg(long)]
    triangles: bool,
    /// Weight of the triangle term in the estimation identity.
    #[arg(long, default_value_t = 4.0)]
    gamma: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Homogeneous,
    Heterogeneous,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long = "tangent-radius", default_value_t = randgraph::DEFAULT_TANGENT_RADIUS)]
    tangent_radius: f64,
    #[arg(long = "radial-lo", default_value_t = 0.0)]
    radial_lo: f64,
    #[arg(long = "radial-hi", default_value_t = 2.0)]
    radial_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Curvature threshold of the heterogeneous rule.
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-graph time budget of the exact clique search, in seconds.
    #[arg(long = "clique-budget", default_value_t = 10.0)]
    clique_budget: f64,
    /// Output directory.
    #[arg(long, default_value = "generated")]
    out: PathBuf,
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long, default_value_t = 4.0)]
    rho: f64,
    #[arg(long, default_value = "volume.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long = "clique-budget", default_value_t = 10.0)]
    clique_budget: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Embed(a) => embed(a),
        Command::Eval(a) => eval(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Generate(a) => generate(a),
        Command::Volume(a) => volume(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(Error::NumericAbort { state, .. }) = e.downcast_ref::<Error>() {
                eprintln!("error: {e:#}");
                eprintln!("{state}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let report = Graph::load_edge_list(io::BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))?;
    if report.duplicates_dropped + report.self_loops_dropped > 0 {
        eprintln!(
            "note: dropped {} duplicate edges and {} self-loops",
            report.duplicates_dropped, report.self_loops_dropped
        );
    }
    if report.graph.n() == 0 {
        bail!("{} contains no edges", path.display());
    }
    Ok(report.graph)
}

/// Loads an embedding and reorders its nodes to match `g`.
fn load_aligned(path: &Path, g: &Graph) -> Result<Embedding> {
    let (emb, ids) =
        hio::load_embedding(path).with_context(|| format!("loading {}", path.display()))?;
    if ids.len() != g.n() {
        bail!("graph has {} nodes, embedding has {}", g.n(), ids.len());
    }
    let index: std::collections::HashMap<i64, usize> =
        ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let points = g
        .labels()
        .iter()
        .map(|l| {
            index
                .get(l)
                .map(|&k| emb.points[k].clone())
                .ok_or_else(|| anyhow!("node {l} is missing from the embedding"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Embedding { points, ..emb })
}

fn write_or_print<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => hio::write_json(p, value)?,
        None => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            io::stdout().write_all(s.as_bytes())?;
        }
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn embed(a: EmbedArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let spec: ManifoldSpec = a.manifold.parse().context("parsing --manifold")?;
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            TrainConfig::parse(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => TrainConfig::default(),
    };
    for (key, value) in a.train.pairs() {
        if let Some(v) = value {
            cfg.set(key, v).with_context(|| format!("--{key}"))?;
        }
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let outcome = train(&g, &spec, &cfg)?;
    hio::save_embedding(&a.out, &outcome.embedding, g.labels())?;
    let history = a.history.unwrap_or_else(|| sibling(&a.out, ".history.csv"));
    let mut w = io::BufWriter::new(fs::File::create(&history)?);
    hio::write_history(&mut w, &outcome.history, a.timing)?;
    w.flush()?;
    if outcome.skipped_pairs > 0 {
        eprintln!(
            "note: {} singular pair derivatives skipped",
            outcome.skipped_pairs
        );
    }
    if let Some(last) = outcome.history.last() {
        eprintln!("epoch {}: l_d={} l_c={}", last.epoch, last.l_d, last.l_c);
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let emb = load_aligned(&a.embedding, &g)?;
    let report = metrics::evaluate(&emb, &g)?;
    write_or_print(a.out.as_deref(), &report)
}

#[derive(Serialize)]
struct TriangleReport {
    gamma: f64,
    ad_triangle_nn: f64,
    ad_triangle_curvature: f64,
    negative_estimates: usize,
}

#[derive(Serialize)]
struct ReconstructOutput<'a> {
    #[serde(flatten)]
    result: ReconstructionReport<'a>,
    validation_mismatch: Option<usize>,
    baseline_mismatch: Option<usize>,
    triangles: Option<TriangleReport>,
    notes: Vec<String>,
}

fn reconstruct(a: ReconstructArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let emb = load_aligned(&a.embedding, &g)?;
    let mut notes = Vec::new();
    let (rho, validation_mismatch) = match a.rho {
        Some(r) => {
            if !(r > 0.0) {
                bail!("--rho must be positive");
            }
            (r, None)
        }
        None => {
            let t = tune_threshold(&emb, &g, a.val_fraction, a.seed)?;
            (t.rho, Some(t.validation_mismatch))
        }
    };
    let base = ReconstructionResult::plain(rho, nn_graph(&emb, rho)).compare(&g);
    let baseline_mismatch = base.mismatch;
    let result = if a.correct {
        let step = a.step.unwrap_or(rho / 10.0);
        curvature_correction(&emb, &base.graph, a.percentile, rho, step)?.compare(&g)
    } else {
        base
    };
    let triangles = if a.triangles {
        if a.gamma != emb.provenance.gamma {
            notes.push(format!(
                "triangle gamma {} differs from the training gamma {}",
                a.gamma, emb.provenance.gamma
            ));
        }
        let est = estimate_triangles(&emb, &result.graph, a.gamma)?;
        let truth: Vec<f64> = triangle_counts(&g)
            .per_node
            .iter()
            .map(|&t| t as f64)
            .collect();
        Some(TriangleReport {
            gamma: a.gamma,
            ad_triangle_nn: avg_triangle_distortion(&truth, &est.nn_only)?,
            ad_triangle_curvature: avg_triangle_distortion(&truth, &est.clamped)?,
            negative_estimates: est.raw.iter().filter(|&&v| v < 0.0).count(),
        })
    } else {
        None
    };
    let out = ReconstructOutput {
        result: ReconstructionReport::new(&result, g.labels()),
        validation_mismatch,
        baseline_mismatch: a.correct.then_some(baseline_mismatch).flatten(),
        triangles,
        notes,
    };
    write_or_print(a.out.as_deref(), &out)
}

#[derive(Serialize)]
struct GenerateMeta {
    mode: Mode,
    n: usize,
    tangent_radius: f64,
    radial_interval: (f64, f64),
    alpha: f64,
    rho: f64,
    ell: Option<f64>,
    runs: usize,
    seed: u64,
    clique_budget_s: f64,
}

fn generate(a: GenerateArgs) -> Result<()> {
    let mode = match a.mode {
        ModeArg::Homogeneous => Mode::Homogeneous,
        ModeArg::Heterogeneous => Mode::Heterogeneous,
    };
    if !(a.clique_budget >= 0.0) {
        bail!("--clique-budget must be non-negative");
    }
    let cfg = SampleConfig {
        n: a.n,
        tangent_radius: a.tangent_radius,
        radial_interval: (a.radial_lo, a.radial_hi),
        alpha: a.alpha,
        rho: a.rho,
        ell: a.ell,
        runs: a.runs,
        seed: a.seed,
        clique_budget: Duration::from_secs_f64(a.clique_budget),
    };
    let runs = randgraph::generate_runs(&cfg, mode)?;
    fs::create_dir_all(&a.out)?;
    for r in &runs {
        hio::write_edge_list(&a.out.join(format!("run_{:03}.edges", r.run)), &r.graph)?;
    }
    let rows: Vec<_> = runs
        .iter()
        .map(|r| (r.run, cfg.run_seed(r.run), r.stats.clone()))
        .collect();
    let summary = summarize(&rows.iter().map(|r| r.2.clone()).collect::<Vec<_>>());
    let mut w = io::BufWriter::new(fs::File::create(a.out.join("stats.csv"))?);
    hio::write_stats(&mut w, &rows, &summary)?;
    w.flush()?;
    let hists: Vec<Vec<u64>> = runs.iter().map(|r| degree_histogram(&r.graph)).collect();
    let mut w = io::BufWriter::new(fs::File::create(a.out.join("barycenter.csv"))?);
    hio::write_barycenter(&mut w, &degree_barycenter(&hists)?)?;
    w.flush()?;
    let meta = GenerateMeta {
        mode,
        n: cfg.n,
        tangent_radius: cfg.tangent_radius,
        radial_interval: cfg.radial_interval,
        alpha: cfg.alpha,
        rho: cfg.rho,
        ell: cfg.ell,
        runs: cfg.runs,
        seed: cfg.seed,
        clique_budget_s: a.clique_budget,
    };
    hio::write_json(&a.out.join("meta.json"), &meta)?;
    if !summary.all_exact {
        eprintln!("note: clique search hit its budget on some runs; sizes are lower bounds");
    }
    Ok(())
}

fn volume(a: VolumeArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let emb = load_aligned(&a.embedding, &g)?;
    let v = volume_match(&emb, &g, a.rho)?;
    let radii: Vec<f64> = (0..emb.n()).map(|i| emb.radius(i).unwrap_or(0.0)).collect();
    let mut w = io::BufWriter::new(fs::File::create(&a.out)?);
    hio::write_volume(&mut w, g.labels(), &radii, &v)?;
    w.flush()?;
    eprintln!("spearman={}", spearman(&v.graph, &v.manifold)?);
    Ok(())
}

#[derive(Serialize)]
struct StatsOutput {
    nodes: usize,
    edges: usize,
    #[serde(flatten)]
    stats: randgraph::GraphStats,
    degree_sd: f64,
    clustering_sd: f64,
    degree_histogram: Vec<u64>,
}

fn stats(a: StatsArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    if !(a.clique_budget >= 0.0) {
        bail!("--clique-budget must be non-negative");
    }
    let stats = randgraph::graph_stats(&g, Duration::from_secs_f64(a.clique_budget));
    let out = StatsOutput {
        nodes: g.n(),
        edges: g.num_edges(),
        degree_sd: stats.degree_sd(),
        clustering_sd: stats.clustering_sd(),
        stats,
        degree_histogram: degree_histogram(&g),
    };
    write_or_print(a.out.as_deref(), &out)
}
