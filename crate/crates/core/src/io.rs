//! On-disk formats: the embedding JSON document, reconstruction and
//! evaluation reports, and the CSV tables consumed by plotting tools.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::manifold::{ManifoldSpec, Point};
use crate::metrics::VolumeMatch;
use crate::optim::{Embedding, EpochRecord, Provenance, ShiftConstants};
use crate::randgraph::{GraphStats, StatsSummary, STAT_NAMES};
use crate::reconstruct::{CorrectionEntry, ReconstructionResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: i64,
    pub blocks: Vec<Vec<f64>>,
}

/// Serialized embedding. Floats are written in shortest round-trip form and
/// parsed back exactly, so `load(save(x)) == x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub format_version: u32,
    pub manifold: ManifoldSpec,
    pub shift_constants: Option<ShiftConstants>,
    pub config_digest: String,
    pub seed: u64,
    pub epochs: usize,
    pub gamma: f64,
    #[serde(default)]
    pub normalize_forman: bool,
    pub scale_mode: String,
    pub nodes: Vec<NodeRecord>,
}

impl EmbeddingFile {
    /// `labels[i]` becomes the id of node `i`.
    pub fn from_embedding(emb: &Embedding, labels: &[i64]) -> Result<Self> {
        if labels.len() != emb.n() {
            return Err(Error::Shape(format!(
                "{} labels for {} nodes",
                labels.len(),
                emb.n()
            )));
        }
        let nodes = emb
            .points
            .iter()
            .zip(labels)
            .map(|(p, &id)| NodeRecord {
                id,
                blocks: emb.spec.blocks().map(|(_, r)| p.0[r].to_vec()).collect(),
            })
            .collect();
        Ok(Self {
            format_version: FORMAT_VERSION,
            manifold: emb.spec.clone(),
            shift_constants: emb.shift,
            config_digest: emb.provenance.config_digest.clone(),
            seed: emb.provenance.seed,
            epochs: emb.provenance.epochs,
            gamma: emb.provenance.gamma,
            normalize_forman: emb.provenance.normalize_forman,
            scale_mode: "fixed".into(),
            nodes,
        })
    }

    /// Rebuilds the embedding and returns it with the node ids.
    pub fn to_embedding(&self) -> Result<(Embedding, Vec<i64>)> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Contract(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        let spec = &self.manifold;
        let mut points = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let lens: Vec<usize> = spec.blocks().map(|(_, r)| r.len()).collect();
            let ok = node.blocks.len() == lens.len()
                && node.blocks.iter().zip(&lens).all(|(b, &l)| b.len() == l);
            if !ok {
                return Err(Error::Shape(format!(
                    "node {} does not match manifold {}",
                    node.id, spec
                )));
            }
            points.push(Point(node.blocks.concat()));
        }
        let emb = Embedding {
            spec: spec.clone(),
            points,
            shift: self.shift_constants,
            provenance: Provenance {
                seed: self.seed,
                epochs: self.epochs,
                config_digest: self.config_digest.clone(),
                gamma: self.gamma,
                normalize_forman: self.normalize_forman,
            },
        };
        emb.validate()?;
        let ids = self.nodes.iter().map(|n| n.id).collect();
        Ok((emb, ids))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn save_embedding(path: &Path, emb: &Embedding, labels: &[i64]) -> Result<()> {
    fs::write(path, EmbeddingFile::from_embedding(emb, labels)?.to_json()?)?;
    Ok(())
}

pub fn load_embedding(path: &Path) -> Result<(Embedding, Vec<i64>)> {
    EmbeddingFile::from_json(&fs::read_to_string(path)?)?.to_embedding()
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport<'a> {
    pub rho: f64,
    pub num_edges: usize,
    /// Edges as pairs of node ids.
    pub edges: Vec<(i64, i64)>,
    pub mismatch: Option<usize>,
    pub correction_log: &'a [CorrectionEntry],
}

impl<'a> ReconstructionReport<'a> {
    pub fn new(result: &'a ReconstructionResult, labels: &[i64]) -> Self {
        Self {
            rho: result.rho,
            num_edges: result.graph.num_edges(),
            edges: result
                .graph
                .edges()
                .map(|(i, j)| (labels[i], labels[j]))
                .collect(),
            mismatch: result.mismatch,
            correction_log: &result.correction_log,
        }
    }
}

/// `epoch,l_d,l_c`, plus `wall_ms` when `timing` is set. Timings vary
/// between runs, so they are opt-in.
pub fn write_history(mut w: impl Write, history: &[EpochRecord], timing: bool) -> Result<()> {
    if timing {
        writeln!(w, "epoch,l_d,l_c,wall_ms")?;
    } else {
        writeln!(w, "epoch,l_d,l_c")?;
    }
    for r in history {
        if timing {
            writeln!(w, "{},{},{},{}", r.epoch, r.l_d, r.l_c, r.wall_ms)?;
        } else {
            writeln!(w, "{},{},{}", r.epoch, r.l_d, r.l_c)?;
        }
    }
    Ok(())
}

/// One row per run and a final `summary` row. The `*_run_sd` columns hold the
/// across-run sample standard deviations and are only filled in the summary.
pub fn write_stats(
    mut w: impl Write,
    runs: &[(usize, u64, GraphStats)],
    summary: &StatsSummary,
) -> Result<()> {
    let sd_names: Vec<String> = STAT_NAMES.iter().map(|n| format!("{n}_run_sd")).collect();
    writeln!(
        w,
        "run,seed,{},clique_exact,{}",
        STAT_NAMES.join(","),
        sd_names.join(",")
    )?;
    let blanks = ",".repeat(STAT_NAMES.len() - 1);
    for (run, seed, st) in runs {
        let vals: Vec<String> = st.values().iter().map(f64::to_string).collect();
        writeln!(
            w,
            "{run},{seed},{},{},{blanks}",
            vals.join(","),
            st.clique_exact
        )?;
    }
    let mean: Vec<String> = summary.mean.iter().map(f64::to_string).collect();
    let sd: Vec<String> = summary.std.iter().map(f64::to_string).collect();
    writeln!(
        w,
        "summary,,{},{},{}",
        mean.join(","),
        summary.all_exact,
        sd.join(",")
    )?;
    Ok(())
}

/// `degree,mass`.
pub fn write_barycenter(mut w: impl Write, masses: &[f64]) -> Result<()> {
    writeln!(w, "degree,mass")?;
    for (k, m) in masses.iter().enumerate() {
        writeln!(w, "{k},{m}")?;
    }
    Ok(())
}

/// `node,radius,graph_volume,manifold_volume`.
pub fn write_volume(
    mut w: impl Write,
    labels: &[i64],
    radii: &[f64],
    v: &VolumeMatch,
) -> Result<()> {
    writeln!(w, "node,radius,graph_volume,manifold_volume")?;
    for (i, id) in labels.iter().enumerate() {
        writeln!(w, "{id},{},{},{}", radii[i], v.graph[i], v.manifold[i])?;
    }
    Ok(())
}

/// Edge list with the graph's labels.
pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    g.write_edge_list(&mut f)?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use crate::optim::{train, TrainConfig};

    fn trained() -> (Embedding, Vec<i64>) {
        let g = generators::cycle_plus_tree(6, 2, 2);
        let spec: ManifoldSpec = "h2,s2,rot(a=auto)".parse().unwrap();
        let cfg = TrainConfig {
            epochs: 20,
            seed: 4,
            ..TrainConfig::default()
        };
        let out = train(&g, &spec, &cfg).unwrap();
        (out.embedding, g.labels().to_vec())
    }

    #[test]
    fn round_trip_is_exact() {
        let (emb, labels) = trained();
        let file = EmbeddingFile::from_embedding(&emb, &labels).unwrap();
        let text = file.to_json().unwrap();
        let back = EmbeddingFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        let (emb2, labels2) = back.to_embedding().unwrap();
        assert_eq!(emb2, emb);
        assert_eq!(labels2, labels);
        assert_eq!(
            EmbeddingFile::from_embedding(&emb2, &labels2)
                .unwrap()
                .to_json()
                .unwrap(),
            text
        );
    }

    #[test]
    fn rejects_mismatched_blocks() {
        let (emb, labels) = trained();
        let mut file = EmbeddingFile::from_embedding(&emb, &labels).unwrap();
        file.nodes[0].blocks[0].pop();
        assert!(matches!(file.to_embedding(), Err(Error::Shape(_))));
        assert!(EmbeddingFile::from_embedding(&emb, &labels[1..]).is_err());
    }

    #[test]
    fn history_columns() {
        let h = [EpochRecord {
            epoch: 0,
            l_d: 1.5,
            l_c: 0.25,
            wall_ms: 3.0,
        }];
        let mut out = Vec::new();
        write_history(&mut out, &h, false).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "epoch,l_d,l_c\n0,1.5,0.25\n"
        );
        let mut out = Vec::new();
        write_history(&mut out, &h, true).unwrap();
        assert!(String::from_utf8(out).unwrap().ends_with("0,1.5,0.25,3\n"));
    }
}
