//! Minimal Wavefront OBJ reader/writer. Only `v` and `f` records are used.

use std::fmt::Write as _;

use thiserror::Error;

use crate::mesh::{dequantize, QuantizedMesh, RawMesh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjError {
    #[error("line {line}: malformed number {token:?}")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: vertex record needs 3 coordinates")]
    ShortVertex { line: usize },
    #[error("line {line}: face has {count} vertices, need at least 3")]
    ShortFace { line: usize, count: usize },
    #[error("line {line}: face index {index} out of range ({vertex_count} vertices defined)")]
    IndexOutOfRange {
        line: usize,
        index: i64,
        vertex_count: usize,
    },
}

fn parse_index(token: &str, line: usize, vertex_count: usize) -> Result<u32, ObjError> {
    let head = token.split('/').next().unwrap_or("");
    let index: i64 = head.parse().map_err(|_| ObjError::BadNumber {
        line,
        token: token.to_string(),
    })?;
    let resolved = match index {
        i if i > 0 => i - 1,
        i if i < 0 => vertex_count as i64 + i,
        _ => -1,
    };
    if resolved < 0 || resolved >= vertex_count as i64 {
        return Err(ObjError::IndexOutOfRange {
            line,
            index,
            vertex_count,
        });
    }
    Ok(resolved as u32)
}

/// Parses OBJ text. Polygons are fan-triangulated around their first vertex;
/// negative indices count back from the most recent vertex.
pub fn parse_obj(text: &str) -> Result<RawMesh, ObjError> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut polygon: Vec<u32> = Vec::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        let mut fields = content.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in &mut p {
                    let token = fields.next().ok_or(ObjError::ShortVertex { line })?;
                    *c = token.parse().map_err(|_| ObjError::BadNumber {
                        line,
                        token: token.to_string(),
                    })?;
                }
                vertices.push(p);
            }
            Some("f") => {
                polygon.clear();
                for token in fields {
                    polygon.push(parse_index(token, line, vertices.len())?);
                }
                if polygon.len() < 3 {
                    return Err(ObjError::ShortFace {
                        line,
                        count: polygon.len(),
                    });
                }
                for k in 1..polygon.len() - 1 {
                    faces.push([polygon[0], polygon[k], polygon[k + 1]]);
                }
            }
            _ => {}
        }
    }

    Ok(RawMesh::new(vertices, faces).expect("indices validated during parsing"))
}

/// Formats `x` with 9 significant digits, trimming trailing zeros.
fn fmt_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Writes a raw mesh as `v`/`f` records with 1-based indices.
pub fn write_raw_obj(mesh: &RawMesh) -> String {
    let mut out = String::with_capacity(32 * (mesh.vertices().len() + mesh.faces().len()));
    for v in mesh.vertices() {
        let _ = writeln!(
            out,
            "v {} {} {}",
            fmt_sig9(v[0]),
            fmt_sig9(v[1]),
            fmt_sig9(v[2])
        );
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Writes a quantized mesh at its cell-center coordinates.
pub fn write_obj(mesh: &QuantizedMesh) -> String {
    write_raw_obj(&dequantize(mesh))
}
