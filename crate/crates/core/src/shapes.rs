//! Procedural test meshes with consistent winding.
//!
//! Used by the test suites and by `edgetok gen-corpus` to produce a
//! reproducible corpus of open and closed surfaces.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::{QuantizedMesh, RawMesh, Resolution};

fn build(vertices: Vec<[f64; 3]>, faces: Vec<[u32; 3]>) -> RawMesh {
    let faces = faces
        .into_iter()
        .filter(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
        .collect();
    RawMesh::new(vertices, faces).expect("generator indices are in range")
}

/// Quad-splits an `nu × nv` cell lattice. `id(i, j)` maps lattice points to
/// vertex ids (so wrapping and pole collapse are expressed there); triangles
/// that collapse are dropped.
fn lattice(
    nu: usize,
    nv: usize,
    id: impl Fn(usize, usize) -> u32,
    mut keep: impl FnMut(usize, usize) -> bool,
) -> Vec<[u32; 3]> {
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            if !keep(i, j) {
                continue;
            }
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    faces
}

/// Flat `w × h` grid of `2wh` triangles with a gentle height field.
pub fn grid(w: usize, h: usize) -> RawMesh {
    let mut vertices = Vec::with_capacity((w + 1) * (h + 1));
    for i in 0..=w {
        for j in 0..=h {
            let (x, y) = (i as f64, j as f64);
            vertices.push([x, y, 0.3 * (0.7 * x).sin() * (0.5 * y).cos()]);
        }
    }
    let id = |i: usize, j: usize| (i * (h + 1) + j) as u32;
    build(vertices, lattice(w, h, id, |_, _| true))
}

/// Grid with a rectangular hole of `hole × hole` cells in the middle.
pub fn grid_with_hole(w: usize, h: usize, hole: usize) -> RawMesh {
    let mut vertices = Vec::with_capacity((w + 1) * (h + 1));
    for i in 0..=w {
        for j in 0..=h {
            vertices.push([i as f64, j as f64, 0.0]);
        }
    }
    let (i0, j0) = ((w - hole) / 2, (h - hole) / 2);
    let id = |i: usize, j: usize| (i * (h + 1) + j) as u32;
    let faces = lattice(w, h, id, |i, j| {
        !((i0..i0 + hole).contains(&i) && (j0..j0 + hole).contains(&j))
    });
    compact(vertices, faces)
}

/// Drops unreferenced vertices.
fn compact(vertices: Vec<[f64; 3]>, faces: Vec<[u32; 3]>) -> RawMesh {
    let mut remap = vec![u32::MAX; vertices.len()];
    let mut kept = Vec::new();
    let faces = faces
        .into_iter()
        .map(|f| {
            f.map(|v| {
                if remap[v as usize] == u32::MAX {
                    remap[v as usize] = kept.len() as u32;
                    kept.push(vertices[v as usize]);
                }
                remap[v as usize]
            })
        })
        .collect();
    build(kept, faces)
}

/// Zig-zag strip of `n` triangles.
pub fn strip(n: usize) -> RawMesh {
    let m = n / 2 + 2;
    let mut vertices = Vec::with_capacity(2 * m);
    for i in 0..m {
        vertices.push([i as f64, 0.0, 0.0]);
    }
    for i in 0..m {
        vertices.push([i as f64 + 0.5, 1.0, 0.1 * (i as f64).sin()]);
    }
    let bottom = |i: usize| i as u32;
    let top = |i: usize| (m + i) as u32;
    let faces = (0..n)
        .map(|k| {
            if k % 2 == 0 {
                let i = k / 2;
                [bottom(i), bottom(i + 1), top(i)]
            } else {
                let i = k.div_ceil(2);
                [bottom(i), top(i), top(i - 1)]
            }
        })
        .collect();
    compact(vertices, faces)
}

/// `n` triangles around an interior hub vertex.
pub fn fan(n: usize) -> RawMesh {
    let mut vertices = vec![[0.0, 0.0, 0.25]];
    for k in 0..n {
        let a = TAU * k as f64 / n as f64;
        vertices.push([a.cos(), a.sin(), 0.0]);
    }
    let faces = (0..n)
        .map(|k| [0, 1 + k as u32, 1 + ((k + 1) % n) as u32])
        .collect();
    build(vertices, faces)
}

/// Latitude/longitude sphere; the poles are fans.
pub fn uv_sphere(segments: usize, rings: usize) -> RawMesh {
    let mut vertices = vec![[0.0, 1.0, 0.0]];
    for i in 1..rings {
        let theta = std::f64::consts::PI * i as f64 / rings as f64;
        for j in 0..segments {
            let phi = TAU * j as f64 / segments as f64;
            vertices.push([
                theta.sin() * phi.cos(),
                theta.cos(),
                theta.sin() * phi.sin(),
            ]);
        }
    }
    let south = vertices.len() as u32;
    vertices.push([0.0, -1.0, 0.0]);
    let id = |i: usize, j: usize| match i {
        0 => 0,
        i if i == rings => south,
        i => (1 + (i - 1) * segments + j % segments) as u32,
    };
    build(vertices, lattice(rings, segments, id, |_, _| true))
}

/// Closed torus of `2 · major · minor` triangles.
pub fn torus(major: usize, minor: usize) -> RawMesh {
    let (big, small) = (1.0, 0.35);
    let mut vertices = Vec::with_capacity(major * minor);
    for i in 0..major {
        let u = TAU * i as f64 / major as f64;
        for j in 0..minor {
            let v = TAU * j as f64 / minor as f64;
            let r = big + small * v.cos();
            vertices.push([r * u.cos(), small * v.sin(), r * u.sin()]);
        }
    }
    let id = |i: usize, j: usize| ((i % major) * minor + j % minor) as u32;
    build(vertices, lattice(major, minor, id, |_, _| true))
}

/// Open tube: `around` segments, `along` rings of quads.
pub fn cylinder(around: usize, along: usize) -> RawMesh {
    let mut vertices = Vec::with_capacity(around * (along + 1));
    for i in 0..=along {
        for j in 0..around {
            let a = TAU * j as f64 / around as f64;
            vertices.push([a.cos(), 2.0 * i as f64 / along as f64, a.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i * around + j % around) as u32;
    build(vertices, lattice(along, around, id, |_, _| true))
}

/// Closed cube with each side split into `n × n` quads (`12 n²` triangles).
pub fn cube(n: usize) -> RawMesh {
    let mut index: HashMap<[i64; 3], u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let n_i = n as i64;
    // (origin, t1, t2) with t1 × t2 along the outward normal
    let sides: [([i64; 3], [i64; 3], [i64; 3]); 6] = [
        ([n_i, 0, 0], [0, 1, 0], [0, 0, 1]),
        ([0, 0, 0], [0, 0, 1], [0, 1, 0]),
        ([0, n_i, 0], [0, 0, 1], [1, 0, 0]),
        ([0, 0, 0], [1, 0, 0], [0, 0, 1]),
        ([0, 0, n_i], [1, 0, 0], [0, 1, 0]),
        ([0, 0, 0], [0, 1, 0], [1, 0, 0]),
    ];
    for (origin, t1, t2) in sides {
        let mut vid = |i: i64, j: i64| -> u32 {
            let p = [
                origin[0] + i * t1[0] + j * t2[0],
                origin[1] + i * t1[1] + j * t2[1],
                origin[2] + i * t1[2] + j * t2[2],
            ];
            *index.entry(p).or_insert_with(|| {
                vertices.push([p[0] as f64, p[1] as f64, p[2] as f64]);
                (vertices.len() - 1) as u32
            })
        };
        for i in 0..n_i {
            for j in 0..n_i {
                let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
    }
    build(vertices, faces)
}

pub fn tetrahedron() -> RawMesh {
    build(
        vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ],
        vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
    )
}

pub fn octahedron() -> RawMesh {
    build(
        vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ],
    )
}

/// Icosahedron refined `levels` times by edge midpoints, projected to the sphere.
pub fn icosphere(levels: usize) -> RawMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<[f64; 3]>| -> u32 {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a as usize], vertices[b as usize]);
                vertices.push([
                    (p[0] + q[0]) / 2.0,
                    (p[1] + q[1]) / 2.0,
                    (p[2] + q[2]) / 2.0,
                ]);
                (vertices.len() - 1) as u32
            })
        };
        let mut refined = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = refined;
    }
    for v in &mut vertices {
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        *v = [v[0] / len, v[1] / len, v[2] / len];
    }
    build(vertices, faces)
}

/// Places `b` next to `a` as a separate connected component.
pub fn disjoint_union(a: &RawMesh, b: &RawMesh) -> RawMesh {
    let (lo, hi) = a.bounds().unwrap_or(([0.0; 3], [0.0; 3]));
    let (blo, _) = b.bounds().unwrap_or(([0.0; 3], [0.0; 3]));
    let gap = 0.25 * (hi[0] - lo[0]).max(1.0);
    let mut vertices = a.vertices().to_vec();
    let offset = vertices.len() as u32;
    vertices.extend(
        b.vertices()
            .iter()
            .map(|v| [v[0] - blo[0] + hi[0] + gap, v[1], v[2]]),
    );
    let mut faces = a.faces().to_vec();
    faces.extend(b.faces().iter().map(|f| f.map(|v| v + offset)));
    build(vertices, faces)
}

/// Same surface with permuted vertex ids, shuffled faces and randomly
/// rotated (winding-preserving) face index order.
pub fn shuffled(mesh: &RawMesh, seed: u64) -> RawMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mesh.vertices().len();
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let mut vertices = vec![[0.0; 3]; n];
    for (old, &new) in perm.iter().enumerate() {
        vertices[new as usize] = mesh.vertices()[old];
    }
    let mut faces: Vec<[u32; 3]> = mesh
        .faces()
        .iter()
        .map(|f| {
            let f = f.map(|v| perm[v as usize]);
            match rng.gen_range(0..3) {
                0 => f,
                1 => [f[1], f[2], f[0]],
                _ => [f[2], f[0], f[1]],
            }
        })
        .collect();
    faces.shuffle(&mut rng);
    build(vertices, faces)
}

/// Eight-face patch around an interior vertex, with vertex `k` (0-based) at
/// grid position `(10k + 10, 10k + 11, 10k + 12)`.
///
/// Faces in 1-based labels: (2,3,1) (1,3,4) (4,3,5) (1,4,6) (1,6,7) (1,7,8)
/// (1,8,2) (2,8,9). Label 1 is the only interior vertex.
pub fn golden_patch() -> QuantizedMesh {
    let labels: [[u32; 3]; 8] = [
        [2, 3, 1],
        [1, 3, 4],
        [4, 3, 5],
        [1, 4, 6],
        [1, 6, 7],
        [1, 7, 8],
        [1, 8, 2],
        [2, 8, 9],
    ];
    let vertices = (0..9u16).map(|k| golden_vertex(k + 1)).collect();
    let faces = labels.iter().map(|f| f.map(|l| l - 1)).collect();
    QuantizedMesh::new(Resolution::DEFAULT, vertices, faces).expect("valid patch")
}

/// Grid position of the golden patch vertex with 1-based `label`.
pub fn golden_vertex(label: u16) -> [u16; 3] {
    [10 * label, 10 * label + 1, 10 * label + 2]
}

/// Reproducible mix of open and closed surfaces from 4 to 4,000 faces.
pub fn corpus() -> Vec<(String, RawMesh)> {
    let mut out: Vec<(String, RawMesh)> = vec![
        ("tetrahedron".into(), tetrahedron()),
        ("octahedron".into(), octahedron()),
        ("icosphere-0".into(), icosphere(0)),
        ("icosphere-1".into(), icosphere(1)),
        ("icosphere-2".into(), icosphere(2)),
        ("icosphere-3".into(), icosphere(3)),
        ("grid-2x2".into(), grid(2, 2)),
        ("grid-5x4".into(), grid(5, 4)),
        ("grid-10x10".into(), grid(10, 10)),
        ("grid-20x15".into(), grid(20, 15)),
        ("grid-30x30".into(), grid(30, 30)),
        ("grid-50x40".into(), grid(50, 40)),
        ("holed-grid-10".into(), grid_with_hole(10, 10, 4)),
        ("holed-grid-24".into(), grid_with_hole(24, 20, 8)),
        ("strip-4".into(), strip(4)),
        ("strip-17".into(), strip(17)),
        ("strip-100".into(), strip(100)),
        ("strip-250".into(), strip(250)),
        ("strip-1000".into(), strip(1000)),
        ("fan-5".into(), fan(5)),
        ("fan-12".into(), fan(12)),
        ("fan-64".into(), fan(64)),
        ("fan-300".into(), fan(300)),
        ("uv-sphere-8x6".into(), uv_sphere(8, 6)),
        ("uv-sphere-16x10".into(), uv_sphere(16, 10)),
        ("uv-sphere-24x16".into(), uv_sphere(24, 16)),
        ("uv-sphere-32x24".into(), uv_sphere(32, 24)),
        ("uv-sphere-48x32".into(), uv_sphere(48, 32)),
        ("torus-8x6".into(), torus(8, 6)),
        ("torus-16x8".into(), torus(16, 8)),
        ("torus-24x12".into(), torus(24, 12)),
        ("torus-40x20".into(), torus(40, 20)),
        ("torus-60x30".into(), torus(60, 30)),
        ("cylinder-8x3".into(), cylinder(8, 3)),
        ("cylinder-16x10".into(), cylinder(16, 10)),
        ("cylinder-32x20".into(), cylinder(32, 20)),
        ("cylinder-12x40".into(), cylinder(12, 40)),
        ("cube-1".into(), cube(1)),
        ("cube-2".into(), cube(2)),
        ("cube-5".into(), cube(5)),
        ("cube-10".into(), cube(10)),
        ("cube-18".into(), cube(18)),
        (
            "tetra+grid".into(),
            disjoint_union(&tetrahedron(), &grid(6, 6)),
        ),
        (
            "torus+sphere".into(),
            disjoint_union(&torus(12, 8), &icosphere(1)),
        ),
    ];
    let bases: Vec<(String, RawMesh)> = out
        .iter()
        .filter(|(name, _)| {
            matches!(
                name.as_str(),
                "octahedron"
                    | "icosphere-2"
                    | "icosphere-3"
                    | "grid-10x10"
                    | "grid-30x30"
                    | "holed-grid-24"
                    | "fan-64"
                    | "uv-sphere-24x16"
                    | "torus-24x12"
                    | "torus-40x20"
                    | "cylinder-32x20"
                    | "cube-10"
                    | "torus+sphere"
            )
        })
        .cloned()
        .collect();
    for (k, (name, mesh)) in bases.iter().enumerate() {
        out.push((
            format!("{name}-shuffled"),
            shuffled(mesh, 0x5eed + k as u64),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfedge::HalfEdgeMesh;
    use crate::mesh::prepare;

    #[test]
    fn face_counts() {
        assert_eq!(grid(3, 2).faces().len(), 12);
        assert_eq!(strip(7).faces().len(), 7);
        assert_eq!(fan(9).faces().len(), 9);
        assert_eq!(torus(5, 4).faces().len(), 40);
        assert_eq!(cube(3).faces().len(), 108);
        assert_eq!(icosphere(2).faces().len(), 320);
        assert_eq!(uv_sphere(8, 6).faces().len(), 2 * 8 * 6 - 2 * 8);
        assert_eq!(grid_with_hole(10, 10, 4).faces().len(), 2 * (100 - 16));
    }

    #[test]
    fn closed_shapes_have_no_boundary() {
        for mesh in [
            tetrahedron(),
            octahedron(),
            icosphere(1),
            uv_sphere(12, 8),
            torus(9, 5),
            cube(4),
        ] {
            let q = prepare(&mesh, Resolution::DEFAULT).unwrap();
            let he = HalfEdgeMesh::from_mesh(&q).unwrap();
            assert!(he.boundary_vertices().is_empty());
        }
    }

    #[test]
    fn corpus_survives_cleaning_unchanged() {
        let corpus = corpus();
        assert!(corpus.len() >= 50, "{}", corpus.len());
        for (name, mesh) in &corpus {
            let q = prepare(mesh, Resolution::DEFAULT).unwrap();
            assert_eq!(q.face_count(), mesh.faces().len(), "{name}");
            assert_eq!(q.vertex_count(), mesh.vertices().len(), "{name}");
            HalfEdgeMesh::from_mesh(&q).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(
                (4..=4000).contains(&q.face_count()),
                "{name}: {}",
                q.face_count()
            );
        }
    }
}
