//! Dataset preparation: optional augmentation, normalization and quantization
//! of every OBJ file in a directory.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use edgetok_core::mesh::{normalize, quantize};
use edgetok_core::obj::{parse_obj, write_obj};
use edgetok_core::{QuantizedMesh, RawMesh, Resolution};

use crate::bench::Skipped;
use crate::{obj_files, read_to_string, write_file, CliError};

/// Closed interval of uniform scale factors, written `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRange {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for ScaleRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad scale bound {t:?}: {e}"))
        };
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(format!(
                "scale range must satisfy 0 < lo <= hi <= 1, got {s}"
            ));
        }
        Ok(ScaleRange { lo, hi })
    }
}

#[derive(Debug, Clone)]
pub struct PrepOptions {
    pub resolution: Resolution,
    pub scale: Option<ScaleRange>,
    pub max_rotation_degrees: f64,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrepSummary {
    pub written: usize,
    pub skipped: Vec<Skipped>,
}

fn rotate_about_y(mesh: &RawMesh, radians: f64) -> RawMesh {
    let Some((lo, hi)) = mesh.bounds() else {
        return mesh.clone();
    };
    let cx = 0.5 * (lo[0] + hi[0]);
    let cz = 0.5 * (lo[2] + hi[2]);
    let (sin, cos) = radians.sin_cos();
    mesh.map_vertices(|[x, y, z]| {
        let (dx, dz) = (x - cx, z - cz);
        [cx + cos * dx + sin * dz, y, cz - sin * dx + cos * dz]
    })
}

/// Shrinks a normalized mesh about its bounding-box centre and moves that
/// centre to the middle of the unit cube.
fn scale_into_cube(mesh: &RawMesh, factor: f64) -> RawMesh {
    let Some((lo, hi)) = mesh.bounds() else {
        return mesh.clone();
    };
    let centre = [0, 1, 2].map(|k| 0.5 * (lo[k] + hi[k]));
    mesh.map_vertices(|p| [0, 1, 2].map(|k| ((p[k] - centre[k]) * factor + 0.5).clamp(0.0, 1.0)))
}

/// Full pipeline for one mesh. `rng` drives the augmentation only.
pub fn prep_mesh(
    raw: &RawMesh,
    opts: &PrepOptions,
    rng: &mut ChaCha8Rng,
) -> Result<QuantizedMesh, String> {
    let mut mesh = raw.clone();
    if opts.max_rotation_degrees > 0.0 {
        let deg = rng.gen_range(-opts.max_rotation_degrees..=opts.max_rotation_degrees);
        mesh = rotate_about_y(&mesh, deg.to_radians());
    }
    let (mut mesh, _) = normalize(&mesh).map_err(|e| e.to_string())?;
    if let Some(range) = opts.scale {
        let factor = rng.gen_range(range.lo..=range.hi);
        mesh = scale_into_cube(&mesh, factor);
    }
    let q = quantize(&mesh, opts.resolution)
        .map_err(|e| e.to_string())?
        .clean();
    if q.face_count() == 0 {
        return Err("no faces survive quantization".into());
    }
    Ok(q)
}

/// Each file gets its own generator stream keyed by its position in sorted
/// order, so results do not depend on `jobs`.
pub fn prep_dir(input: &Path, output: &Path, opts: &PrepOptions) -> Result<PrepSummary, CliError> {
    let files = obj_files(input)?;
    std::fs::create_dir_all(output).map_err(|e| CliError::io(output, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .expect("thread pool");

    let one = |index: usize, path: &PathBuf| -> Result<Option<Skipped>, CliError> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(index as u64);
        let result = parse_obj(&read_to_string(path)?)
            .map_err(|e| e.to_string())
            .and_then(|raw| prep_mesh(&raw, opts, &mut rng));
        match result {
            Ok(mesh) => {
                write_file(&output.join(&name), write_obj(&mesh))?;
                Ok(None)
            }
            Err(reason) => Ok(Some(Skipped { name, reason })),
        }
    };

    let results: Vec<Result<Option<Skipped>, CliError>> = pool.install(|| {
        files
            .par_iter()
            .enumerate()
            .map(|(i, p)| one(i, p))
            .collect()
    });
    let mut summary = PrepSummary {
        written: 0,
        skipped: Vec::new(),
    };
    for r in results {
        match r? {
            None => summary.written += 1,
            Some(s) => summary.skipped.push(s),
        }
    }
    Ok(summary)
}
