//! Corpus benchmark comparing the traversal tokenizer with two baselines.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use edgetok_core::halfedge::HalfEdgeMesh;
use edgetok_core::tokenizer::{
    stats, tokenize, tokenize_fixed_side_baseline, tokenize_naive, TokenizeError, TraversalStats,
};
use edgetok_core::{QuantizedMesh, Resolution, TokenSequence};

use crate::{load_mesh, obj_files, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tokenizer {
    Ours,
    FixedSide,
    Naive,
}

impl Tokenizer {
    pub const ALL: [Tokenizer; 3] = [Tokenizer::Ours, Tokenizer::FixedSide, Tokenizer::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Tokenizer::Ours => "ours",
            Tokenizer::FixedSide => "fixed-side",
            Tokenizer::Naive => "naive",
        }
    }

    pub fn run(self, mesh: &QuantizedMesh) -> Result<TokenSequence, TokenizeError> {
        match self {
            Tokenizer::Ours => tokenize(mesh),
            Tokenizer::FixedSide => tokenize_fixed_side_baseline(mesh),
            Tokenizer::Naive => tokenize_naive(mesh),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedMesh {
    pub name: String,
    pub mesh: QuantizedMesh,
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub name: &'static str,
    pub mean_compression_ratio: f64,
    pub mean_subsequences: f64,
    pub mean_tokens_per_face: f64,
    pub meshes_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusInfo {
    pub meshes: usize,
    pub skipped: usize,
    pub min_faces: usize,
    pub max_faces: usize,
    pub resolution: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub corpus: CorpusInfo,
    pub jobs: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, name: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Human-readable table.
    pub fn table(&self) -> String {
        let c = &self.corpus;
        let mut out = format!(
            "{} meshes ({} skipped), {}..{} faces, R={}, jobs={}\n",
            c.meshes, c.skipped, c.min_faces, c.max_faces, c.resolution, self.jobs
        );
        out.push_str(&format!(
            "{:<12} {:>12} {:>14} {:>12} {:>12}\n",
            "tokenizer", "ratio", "subsequences", "tok/face", "meshes/s"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<12} {:>11.1}% {:>14.1} {:>12.3} {:>12.1}\n",
                r.name,
                100.0 * r.mean_compression_ratio,
                r.mean_subsequences,
                r.mean_tokens_per_face,
                r.meshes_per_second
            ));
        }
        out
    }
}

/// Loads every `.obj` in `dir`. Meshes that fail half-edge construction are
/// skipped when `skip_invalid` is set and fatal otherwise.
pub fn load_corpus(
    dir: &Path,
    resolution: Resolution,
    normalize: bool,
    skip_invalid: bool,
) -> Result<(Vec<NamedMesh>, Vec<Skipped>), CliError> {
    let mut meshes = Vec::new();
    let mut skipped = Vec::new();
    for path in obj_files(dir)? {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let checked = load_mesh(&path, resolution, normalize).and_then(|mesh| {
            HalfEdgeMesh::from_mesh(&mesh)
                .map_err(|e| CliError::tokenize(&path, e.into()))
                .map(|_| mesh)
        });
        match checked {
            Ok(mesh) => meshes.push(NamedMesh { name, mesh }),
            Err(err) if skip_invalid && !matches!(err, CliError::Io { .. }) => {
                skipped.push(Skipped {
                    name,
                    reason: err.to_string(),
                });
            }
            Err(err) => return Err(err),
        }
    }
    if meshes.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no loadable meshes",
            dir.display()
        )));
    }
    Ok((meshes, skipped))
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
}

/// Tokenizes every mesh `repeat` times and returns per-mesh stats of the
/// first pass (in corpus order) plus the wall-clock time of all passes.
pub fn measure(
    tokenizer: Tokenizer,
    meshes: &[NamedMesh],
    jobs: usize,
    repeat: usize,
) -> (Vec<TraversalStats>, f64) {
    let pool = pool(jobs);
    let start = Instant::now();
    let per_mesh: Vec<TraversalStats> = pool.install(|| {
        let mut first = Vec::new();
        for pass in 0..repeat.max(1) {
            let out: Vec<TraversalStats> = meshes
                .par_iter()
                .map(|m| {
                    let t = Instant::now();
                    let seq = tokenizer
                        .run(&m.mesh)
                        .expect("corpus meshes are validated on load");
                    stats(&seq, &m.mesh, t.elapsed())
                })
                .collect();
            if pass == 0 {
                first = out;
            }
        }
        first
    });
    (per_mesh, start.elapsed().as_secs_f64())
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn run_bench(meshes: &[NamedMesh], skipped: usize, jobs: usize, repeat: usize) -> BenchReport {
    let rows = Tokenizer::ALL
        .iter()
        .map(|&tok| {
            let (per_mesh, wall) = measure(tok, meshes, jobs, repeat);
            BenchRow {
                name: tok.name(),
                mean_compression_ratio: mean(per_mesh.iter().map(|s| s.compression_ratio)),
                mean_subsequences: mean(per_mesh.iter().map(|s| s.subsequences as f64)),
                mean_tokens_per_face: mean(per_mesh.iter().map(|s| s.tokens_per_face)),
                meshes_per_second: (meshes.len() * repeat.max(1)) as f64 / wall.max(1e-12),
            }
        })
        .collect();
    let faces = meshes.iter().map(|m| m.mesh.face_count());
    BenchReport {
        corpus: CorpusInfo {
            meshes: meshes.len(),
            skipped,
            min_faces: faces.clone().min().unwrap_or(0),
            max_faces: faces.max().unwrap_or(0),
            resolution: meshes
                .first()
                .map(|m| m.mesh.resolution().get())
                .unwrap_or(0),
        },
        jobs,
        rows,
    }
}
