//! Random geometric graphs on `H^3` and `H^3 x R`, and the degree,
//! clustering and clique statistics used to compare them.

mod clique;

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{triangle_counts, Graph};
use crate::manifold::space_form::{hyperbolic_dist, hyperbolic_exp};
use crate::manifold::{rotsym, sample_ball, ManifoldSpec, Point};
use crate::metrics::{mean, population_variance};
use crate::reconstruct::nn_graph_with;

pub use clique::{greedy_clique, max_clique, CliqueResult};

/// Tangent ball radius at which `n = 500`, `rho = 1` graphs on `H^3` have a
/// mean degree close to 7.3.
pub const DEFAULT_TANGENT_RADIUS: f64 = 2.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Homogeneous,
    Heterogeneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub n: usize,
    pub tangent_radius: f64,
    pub radial_interval: (f64, f64),
    pub alpha: f64,
    pub rho: f64,
    /// Curvature threshold of the heterogeneous rule.
    pub ell: Option<f64>,
    pub runs: usize,
    pub seed: u64,
    pub clique_budget: Duration,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            n: 500,
            tangent_radius: DEFAULT_TANGENT_RADIUS,
            radial_interval: (0.0, 2.0),
            alpha: 1.0,
            rho: 1.0,
            ell: None,
            runs: 20,
            seed: 0,
            clique_budget: Duration::from_secs(10),
        }
    }
}

impl SampleConfig {
    pub fn validate(&self, mode: Mode) -> Result<()> {
        let positive = [
            ("tangent_radius", self.tangent_radius),
            ("alpha", self.alpha),
            ("rho", self.rho),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        let (lo, hi) = self.radial_interval;
        if !(0.0 <= lo && lo < hi) || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "radial interval must satisfy 0 <= lo < hi, got ({lo}, {hi})"
            )));
        }
        if self.runs == 0 {
            return Err(Error::Domain("runs must be positive".into()));
        }
        if mode == Mode::Heterogeneous && self.ell.is_none() {
            return Err(Error::Domain(
                "heterogeneous sampling needs a curvature threshold ell".into(),
            ));
        }
        Ok(())
    }

    /// Seed of run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }
}

/// Sampled points: hyperboloid coordinates in `H^3` and, for the
/// heterogeneous mode, radial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub hyperbolic: Vec<[f64; 4]>,
    pub radii: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn spec(&self, alpha: f64) -> ManifoldSpec {
        let s = if self.radii.is_some() {
            format!("h3,rot(a={alpha})")
        } else {
            "h3".to_string()
        };
        ManifoldSpec::parse(&s).expect("valid spec")
    }

    pub fn points(&self) -> Vec<Point> {
        self.hyperbolic
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let mut c = h.to_vec();
                if let Some(r) = &self.radii {
                    c.push(r[i]);
                }
                Point(c)
            })
            .collect()
    }
}

/// Uniform tangent-ball sampling at the origin of `H^3`, pushed through the
/// exponential map; radii uniform on the radial interval.
pub fn sample_points(cfg: &SampleConfig, mode: Mode, run: usize) -> Result<PointCloud> {
    cfg.validate(mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run_seed(run));
    let base = [0.0, 0.0, 0.0, 1.0];
    let hyperbolic: Vec<[f64; 4]> = (0..cfg.n)
        .map(|_| {
            let mut v = [0.0; 4];
            sample_ball(&mut rng, cfg.tangent_radius, &mut v[..3]);
            let mut out = [0.0; 4];
            hyperbolic_exp(&base, &v, &mut out);
            out
        })
        .collect();
    let radii = (mode == Mode::Heterogeneous).then(|| {
        let (lo, hi) = cfg.radial_interval;
        (0..cfg.n).map(|_| rng.random_range(lo..hi)).collect()
    });
    Ok(PointCloud { hyperbolic, radii })
}

/// Threshold graph on `H^3` at distance `rho`.
pub fn generate_homogeneous(cfg: &SampleConfig, run: usize) -> Result<Graph> {
    let pc = sample_points(cfg, Mode::Homogeneous, run)?;
    Ok(homogeneous_graph(&pc, cfg.rho))
}

pub fn homogeneous_graph(pc: &PointCloud, rho: f64) -> Graph {
    let h = &pc.hyperbolic;
    nn_graph_with(h.len(), |i, j| hyperbolic_dist(&h[i], &h[j]), rho)
}

/// Edge `(i, j)` iff `d_H(z_i, z_j) <= 1`, or both radial curvatures exceed
/// `ell` and the product distance is at most `rho`.
pub fn generate_heterogeneous(cfg: &SampleConfig, run: usize) -> Result<Graph> {
    let pc = sample_points(cfg, Mode::Heterogeneous, run)?;
    Ok(heterogeneous_graph(
        &pc,
        cfg.alpha,
        cfg.ell.expect("validated"),
        cfg.rho,
    ))
}

pub fn heterogeneous_graph(pc: &PointCloud, alpha: f64, ell: f64, rho: f64) -> Graph {
    let h = &pc.hyperbolic;
    let r = pc.radii.as_ref().expect("heterogeneous point cloud");
    let curved: Vec<bool> = r
        .iter()
        .map(|&ri| rotsym::curvature(alpha, ri) > ell)
        .collect();
    nn_graph_with(
        h.len(),
        |i, j| {
            let dh = hyperbolic_dist(&h[i], &h[j]);
            if dh <= 1.0 {
                return 0.0;
            }
            if curved[i] && curved[j] {
                let dr = r[i] - r[j];
                let d = (dh * dh + dr * dr).sqrt();
                if d <= rho {
                    return 0.0;
                }
            }
            f64::INFINITY
        },
        0.0,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub degree_mean: f64,
    pub degree_var: f64,
    pub clustering_mean: f64,
    pub clustering_var: f64,
    pub max_clique_size: usize,
    pub clique_exact: bool,
}

/// Local clustering coefficient `#tri(i) / C(d_i, 2)`, `0` when `d_i < 2`.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    let t = triangle_counts(g);
    (0..g.n())
        .map(|i| {
            let d = g.degree(i) as f64;
            if d < 2.0 {
                0.0
            } else {
                t.per_node[i] as f64 / (d * (d - 1.0) / 2.0)
            }
        })
        .collect()
}

pub fn graph_stats(g: &Graph, clique_budget: Duration) -> GraphStats {
    let deg: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
    let cc = clustering_coefficients(g);
    let clique = max_clique(g, Some(clique_budget));
    GraphStats {
        degree_mean: mean(&deg),
        degree_var: population_variance(&deg),
        clustering_mean: mean(&cc),
        clustering_var: population_variance(&cc),
        max_clique_size: clique.size(),
        clique_exact: clique.exact,
    }
}

/// `hist[k]` = number of nodes of degree `k`.
pub fn degree_histogram(g: &Graph) -> Vec<u64> {
    let degs = g.degrees();
    let max = degs.iter().copied().max().unwrap_or(0);
    let mut h = vec![0u64; max + 1];
    for d in degs {
        h[d] += 1;
    }
    h
}

/// Mean and sample standard deviation of each statistic over runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub runs: usize,
    pub mean: [f64; N_STATS],
    pub std: [f64; N_STATS],
    pub all_exact: bool,
}

pub const N_STATS: usize = 7;

pub const STAT_NAMES: [&str; N_STATS] = [
    "degree_mean",
    "degree_var",
    "degree_sd",
    "clustering_mean",
    "clustering_var",
    "clustering_sd",
    "max_clique",
];

impl GraphStats {
    /// Per-node standard deviation of the degree.
    pub fn degree_sd(&self) -> f64 {
        self.degree_var.sqrt()
    }

    /// Per-node standard deviation of the clustering coefficient.
    pub fn clustering_sd(&self) -> f64 {
        self.clustering_var.sqrt()
    }

    /// Values in [`STAT_NAMES`] order.
    pub fn values(&self) -> [f64; N_STATS] {
        [
            self.degree_mean,
            self.degree_var,
            self.degree_sd(),
            self.clustering_mean,
            self.clustering_var,
            self.clustering_sd(),
            self.max_clique_size as f64,
        ]
    }
}

/// Order-independent summary: values are sorted before reduction.
pub fn summarize(stats: &[GraphStats]) -> StatsSummary {
    let mut m = [0.0; N_STATS];
    let mut s = [0.0; N_STATS];
    for k in 0..N_STATS {
        let mut v: Vec<f64> = stats.iter().map(|st| st.values()[k]).collect();
        v.sort_by(f64::total_cmp);
        m[k] = mean(&v);
        s[k] = if v.len() > 1 {
            (population_variance(&v) * v.len() as f64 / (v.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
    }
    StatsSummary {
        runs: stats.len(),
        mean: m,
        std: s,
        all_exact: stats.iter().all(|st| st.clique_exact),
    }
}

/// One generated graph with its statistics.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: usize,
    pub graph: Graph,
    pub stats: GraphStats,
}

/// Generates `cfg.runs` graphs in parallel; run `k` uses seed `seed + k`.
pub fn generate_runs(cfg: &SampleConfig, mode: Mode) -> Result<Vec<RunResult>> {
    cfg.validate(mode)?;
    (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let graph = match mode {
                Mode::Homogeneous => generate_homogeneous(cfg, run)?,
                Mode::Heterogeneous => generate_heterogeneous(cfg, run)?,
            };
            let stats = graph_stats(&graph, cfg.clique_budget);
            Ok(RunResult { run, graph, stats })
        })
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Upper bound on the quantile grid size of [`degree_barycenter`].
pub const MAX_QUANTILE_GRID: u64 = 1_000_000;

/// 1-D Wasserstein barycenter (equal weights) of degree histograms: the
/// quantile functions are averaged on the grid `(k + 1/2) / Q` and the
/// result is rounded to integer degrees. Returns probability masses indexed
/// by degree.
///
/// `Q` is the least common multiple of the histogram totals when that is at
/// most [`MAX_QUANTILE_GRID`], which makes the quantiles exact.
pub fn degree_barycenter(histograms: &[Vec<u64>]) -> Result<Vec<f64>> {
    if histograms.is_empty() {
        return Err(Error::Domain("no histograms".into()));
    }
    let totals: Vec<u64> = histograms.iter().map(|h| h.iter().sum()).collect();
    if totals.contains(&0) {
        return Err(Error::Domain("empty histogram".into()));
    }
    let mut q = 1u64;
    for &t in &totals {
        q = q / gcd(q, t) * t;
        if q > MAX_QUANTILE_GRID {
            q = MAX_QUANTILE_GRID;
            break;
        }
    }
    let cdfs: Vec<Vec<u64>> = histograms
        .iter()
        .map(|h| {
            h.iter()
                .scan(0u64, |acc, &c| {
                    *acc += c;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let k = histograms.len() as f64;
    let max_deg = histograms.iter().map(|h| h.len()).max().unwrap_or(1);
    let mut counts = vec![0u64; max_deg];
    let mut cursor = vec![0usize; histograms.len()];
    for step in 0..q {
        let u = (step as f64 + 0.5) / q as f64;
        let mut avg = 0.0;
        for (h, cdf) in cdfs.iter().enumerate() {
            let total = totals[h] as f64;
            // quantiles are nondecreasing in u: advance a cursor
            while (cdf[cursor[h]] as f64) < u * total {
                cursor[h] += 1;
            }
            avg += cursor[h] as f64;
        }
        let deg = (avg / k).round() as usize;
        counts[deg] += 1;
    }
    let mut out: Vec<f64> = counts.iter().map(|&c| c as f64 / q as f64).collect();
    while out.len() > 1 && out.last() == Some(&0.0) {
        out.pop();
    }
    Ok(out)
}
