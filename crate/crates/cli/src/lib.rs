//! Command-line front end for `edgetok`.
//!
//! Exit codes: 0 success, 1 parse or mesh error, 2 non-manifold input,
//! 3 I/O failure, 4 ungrammatical token stream, 5 round-trip mismatch.
//! Machine-readable JSON goes to stdout, diagnostics to stderr.

pub mod bench;
pub mod commands;
pub mod prep;

use std::path::{Path, PathBuf};

use thiserror::Error;

use edgetok_core::detokenizer::DetokenizeError;
use edgetok_core::grammar::Violation;
use edgetok_core::mesh::{prepare, quantize};
use edgetok_core::obj::parse_obj;
use edgetok_core::{MeshError, QuantizedMesh, Resolution, TokenizeError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: non-manifold mesh: {message}")]
    NonManifold { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("ungrammatical token stream: {message} (index {index})")]
    Ungrammatical { index: usize, message: String },
    #[error("round-trip mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 1,
            CliError::NonManifold { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Ungrammatical { .. } => 4,
            CliError::Mismatch(_) => 5,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    pub(crate) fn tokenize(path: &Path, err: TokenizeError) -> Self {
        CliError::NonManifold {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

impl From<DetokenizeError> for CliError {
    fn from(err: DetokenizeError) -> Self {
        CliError::Ungrammatical {
            index: err.position(),
            message: err.to_string(),
        }
    }
}

impl From<Violation> for CliError {
    fn from(v: Violation) -> Self {
        CliError::Ungrammatical {
            index: v.index,
            message: v.to_string(),
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Reads an OBJ file and turns it into a cleaned grid mesh.
///
/// With `normalize` unset the file must already lie in the unit cube, as the
/// output of `prep` and `detokenize` does.
pub fn load_mesh(
    path: &Path,
    resolution: Resolution,
    normalize: bool,
) -> Result<QuantizedMesh, CliError> {
    let raw = parse_obj(&read_to_string(path)?).map_err(|e| CliError::parse(path, e))?;
    let mesh = if normalize {
        prepare(&raw, resolution)
    } else {
        quantize(&raw, resolution).map(|q| q.clean())
    };
    mesh.map_err(|e: MeshError| CliError::parse(path, e))
}

pub fn resolution(cells: u32) -> Result<Resolution, CliError> {
    Resolution::new(cells).map_err(|e| CliError::Usage(e.to_string()))
}

/// Sorted `.obj` files directly inside `dir`.
pub fn obj_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_obj = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("obj"));
        if is_obj && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}
