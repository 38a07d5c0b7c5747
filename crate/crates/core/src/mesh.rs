//! Mesh containers, unit-cube normalization and vertex quantization.

use std::collections::HashMap;

use thiserror::Error;

/// Errors raised while constructing or transforming meshes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: u32,
        vertex_count: usize,
    },
    #[error("mesh has no vertices")]
    NoVertices,
    #[error("degenerate extent: all vertices are identical")]
    DegenerateExtent,
    #[error("vertex {vertex} has coordinate {value} outside the unit cube")]
    OutOfUnitCube { vertex: usize, value: f64 },
    #[error("vertex {vertex} has grid coordinate {value} outside [0, {resolution})")]
    CoordOutOfRange {
        vertex: usize,
        value: u16,
        resolution: u16,
    },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFinite { vertex: usize },
    #[error("invalid resolution {0}: must be in 2..={max}", max = Resolution::MAX)]
    InvalidResolution(u32),
}

/// Number of grid cells per axis used for vertex quantization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resolution(u16);

impl Resolution {
    /// Largest resolution whose full vocabulary (with extension ids) fits in a `u16` id.
    pub const MAX: u16 = u16::MAX - 10;

    pub const DEFAULT: Resolution = Resolution(512);

    pub fn new(cells: u32) -> Result<Self, MeshError> {
        if (2..=u32::from(Self::MAX)).contains(&cells) {
            Ok(Resolution(cells as u16))
        } else {
            Err(MeshError::InvalidResolution(cells))
        }
    }

    #[inline]
    pub fn get(self) -> u16 {
        self.0
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn check_faces(faces: &[[u32; 3]], vertex_count: usize) -> Result<(), MeshError> {
    for (face, tri) in faces.iter().enumerate() {
        for &index in tri {
            if index as usize >= vertex_count {
                return Err(MeshError::IndexOutOfRange {
                    face,
                    index,
                    vertex_count,
                });
            }
        }
    }
    Ok(())
}

/// A triangle mesh with real-valued vertex positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawMesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[u32; 3]>,
}

impl RawMesh {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        check_faces(&faces, vertices.len())?;
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn into_parts(self) -> (Vec<[f64; 3]>, Vec<[u32; 3]>) {
        (self.vertices, self.faces)
    }

    /// Axis-aligned bounding box as `(min, max)`, or `None` for an empty mesh.
    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(mut lo, mut hi), v| {
                    for k in 0..3 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                    (lo, hi)
                }),
        )
    }

    /// Applies `f` to every vertex position, keeping connectivity.
    pub fn map_vertices(&self, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> RawMesh {
        RawMesh {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            faces: self.faces.clone(),
        }
    }
}

/// Uniform scale + translation that fits a mesh into the unit cube.
///
/// A source point `p` maps to `(p + translation) * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationTransform {
    pub translation: [f64; 3],
    pub scale: f64,
}

impl NormalizationTransform {
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        [
            (p[0] + self.translation[0]) * self.scale,
            (p[1] + self.translation[1]) * self.scale,
            (p[2] + self.translation[2]) * self.scale,
        ]
    }

    pub fn invert(&self, p: [f64; 3]) -> [f64; 3] {
        [
            p[0] / self.scale - self.translation[0],
            p[1] / self.scale - self.translation[1],
            p[2] / self.scale - self.translation[2],
        ]
    }
}

/// Moves the bounding-box minimum to the origin and divides by the longest
/// extent, so the longest axis spans exactly `[0, 1]`.
pub fn normalize(mesh: &RawMesh) -> Result<(RawMesh, NormalizationTransform), MeshError> {
    if let Some(vertex) = mesh
        .vertices
        .iter()
        .position(|v| v.iter().any(|c| !c.is_finite()))
    {
        return Err(MeshError::NonFinite { vertex });
    }
    let (lo, hi) = mesh.bounds().ok_or(MeshError::NoVertices)?;
    let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0_f64, f64::max);
    if extent <= 0.0 {
        return Err(MeshError::DegenerateExtent);
    }
    let transform = NormalizationTransform {
        translation: [0.0 - lo[0], 0.0 - lo[1], 0.0 - lo[2]],
        scale: 1.0 / extent,
    };
    // Divide rather than multiply by the reciprocal so the far corner lands on exactly 1.0.
    let normalized = mesh.map_vertices(|v| {
        [
            ((v[0] - lo[0]) / extent).clamp(0.0, 1.0),
            ((v[1] - lo[1]) / extent).clamp(0.0, 1.0),
            ((v[2] - lo[2]) / extent).clamp(0.0, 1.0),
        ]
    });
    Ok((normalized, transform))
}

/// Slack allowed outside `[0, 1]` before [`quantize`] rejects a coordinate.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Maps a unit-interval coordinate to its grid cell, `min(floor(v * R), R - 1)`.
#[inline]
pub fn quantize_value(v: f64, resolution: Resolution) -> u16 {
    let r = resolution.get();
    let cell = (v.max(0.0) * f64::from(r)).floor();
    if cell >= f64::from(r - 1) {
        r - 1
    } else {
        cell as u16
    }
}

/// Cell-center reconstruction, `(q + 0.5) / R`.
#[inline]
pub fn dequantize_value(q: u16, resolution: Resolution) -> f64 {
    (f64::from(q) + 0.5) / f64::from(resolution.get())
}

/// Quantizes a unit-cube mesh onto an `R`³ grid. Faces are copied unchanged.
pub fn quantize(mesh: &RawMesh, resolution: Resolution) -> Result<QuantizedMesh, MeshError> {
    let mut vertices = Vec::with_capacity(mesh.vertices.len());
    for (vertex, v) in mesh.vertices.iter().enumerate() {
        let mut q = [0u16; 3];
        for k in 0..3 {
            let c = v[k];
            if !c.is_finite() {
                return Err(MeshError::NonFinite { vertex });
            }
            if !(-UNIT_TOLERANCE..=1.0 + UNIT_TOLERANCE).contains(&c) {
                return Err(MeshError::OutOfUnitCube { vertex, value: c });
            }
            q[k] = quantize_value(c, resolution);
        }
        vertices.push(q);
    }
    Ok(QuantizedMesh {
        resolution,
        vertices,
        faces: mesh.faces.clone(),
    })
}

/// Maps every grid vertex back to its cell center.
pub fn dequantize(mesh: &QuantizedMesh) -> RawMesh {
    let r = mesh.resolution;
    RawMesh {
        vertices: mesh
            .vertices
            .iter()
            .map(|q| {
                [
                    dequantize_value(q[0], r),
                    dequantize_value(q[1], r),
                    dequantize_value(q[2], r),
                ]
            })
            .collect(),
        faces: mesh.faces.clone(),
    }
}

/// A triangle mesh whose vertices live on an integer grid `[0, R)`³.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedMesh {
    resolution: Resolution,
    vertices: Vec<[u16; 3]>,
    faces: Vec<[u32; 3]>,
}

impl QuantizedMesh {
    pub fn new(
        resolution: Resolution,
        vertices: Vec<[u16; 3]>,
        faces: Vec<[u32; 3]>,
    ) -> Result<Self, MeshError> {
        for (vertex, q) in vertices.iter().enumerate() {
            if let Some(&value) = q.iter().find(|&&c| c >= resolution.get()) {
                return Err(MeshError::CoordOutOfRange {
                    vertex,
                    value,
                    resolution: resolution.get(),
                });
            }
        }
        check_faces(&faces, vertices.len())?;
        Ok(Self {
            resolution,
            vertices,
            faces,
        })
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn vertices(&self) -> &[[u16; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn into_parts(self) -> (Resolution, Vec<[u16; 3]>, Vec<[u32; 3]>) {
        (self.resolution, self.vertices, self.faces)
    }

    /// Merges coincident grid vertices, drops collapsed and cyclically
    /// duplicated faces, and drops vertices no face references.
    ///
    /// Surviving vertices keep their first-occurrence order.
    pub fn clean(&self) -> QuantizedMesh {
        let mut first_at: HashMap<[u16; 3], u32> = HashMap::with_capacity(self.vertices.len());
        let mut merged: Vec<u32> = Vec::with_capacity(self.vertices.len());
        let mut unique: Vec<[u16; 3]> = Vec::with_capacity(self.vertices.len());
        for q in &self.vertices {
            let id = *first_at.entry(*q).or_insert_with(|| {
                unique.push(*q);
                (unique.len() - 1) as u32
            });
            merged.push(id);
        }

        let mut seen = std::collections::HashSet::with_capacity(self.faces.len());
        let mut faces = Vec::with_capacity(self.faces.len());
        for f in &self.faces {
            let tri = [
                merged[f[0] as usize],
                merged[f[1] as usize],
                merged[f[2] as usize],
            ];
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                continue;
            }
            if seen.insert(min_rotation(tri)) {
                faces.push(tri);
            }
        }

        // Compact away vertices that no surviving face references.
        let mut remap = vec![u32::MAX; unique.len()];
        let mut vertices = Vec::with_capacity(unique.len());
        let mut used = vec![false; unique.len()];
        for f in &faces {
            for &v in f {
                used[v as usize] = true;
            }
        }
        for (old, q) in unique.iter().enumerate() {
            if used[old] {
                remap[old] = vertices.len() as u32;
                vertices.push(*q);
            }
        }
        for f in &mut faces {
            for v in f.iter_mut() {
                *v = remap[*v as usize];
            }
        }

        QuantizedMesh {
            resolution: self.resolution,
            vertices,
            faces,
        }
    }

    /// Order-independent form used for mesh equality after a round trip.
    pub fn canonical(&self) -> CanonicalMesh {
        let mut vertices = self.vertices.clone();
        vertices.sort_unstable();
        vertices.dedup();
        let index: HashMap<[u16; 3], u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, q)| (*q, i as u32))
            .collect();
        let mut faces: Vec<[u32; 3]> = self
            .faces
            .iter()
            .map(|f| {
                min_rotation([
                    index[&self.vertices[f[0] as usize]],
                    index[&self.vertices[f[1] as usize]],
                    index[&self.vertices[f[2] as usize]],
                ])
            })
            .collect();
        faces.sort_unstable();
        CanonicalMesh {
            resolution: self.resolution,
            vertices,
            faces,
        }
    }
}

/// A mesh with sorted vertices and rotation-normalized, sorted faces.
///
/// Two meshes are equal up to vertex reindexing, face order and cyclic face
/// rotation iff their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalMesh {
    pub resolution: Resolution,
    pub vertices: Vec<[u16; 3]>,
    pub faces: Vec<[u32; 3]>,
}

/// Lexicographically least cyclic rotation; winding is preserved.
#[inline]
pub fn min_rotation(f: [u32; 3]) -> [u32; 3] {
    let rots = [[f[0], f[1], f[2]], [f[1], f[2], f[0]], [f[2], f[0], f[1]]];
    *rots.iter().min().expect("three rotations")
}

/// Normalizes, quantizes and cleans a mesh in one step.
pub fn prepare(mesh: &RawMesh, resolution: Resolution) -> Result<QuantizedMesh, MeshError> {
    let (unit, _) = normalize(mesh)?;
    Ok(quantize(&unit, resolution)?.clean())
}
