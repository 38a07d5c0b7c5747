//! Immutable half-edge connectivity for triangle meshes.
//!
//! Face `f` owns half-edges `3f`, `3f + 1` and `3f + 2`, running
//! `v0 → v1`, `v1 → v2` and `v2 → v0` for the face `(v0, v1, v2)`.
//! The anchor of a face is its first half-edge.

use thiserror::Error;

use crate::mesh::QuantizedMesh;

/// Index into [`HalfEdgeMesh::halfedges`].
pub type HalfEdgeId = u32;

/// Sentinel stored in [`HalfEdge::twin`] for boundary half-edges.
pub const ABSENT: HalfEdgeId = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HalfEdgeError {
    #[error("mesh has no faces")]
    NoFaces,
    #[error("face {face} references vertex {vertex}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: u32,
        vertex: u32,
        vertex_count: usize,
    },
    #[error("face {face} is degenerate (repeated vertex {vertex})")]
    DegenerateFace { face: u32, vertex: u32 },
    #[error(
        "directed edge {from}->{to} appears in faces {first_face} and {second_face} \
         (non-manifold or inconsistent winding)"
    )]
    DuplicateDirectedEdge {
        from: u32,
        to: u32,
        first_face: u32,
        second_face: u32,
    },
    #[error("edge {a}-{b} is shared by {faces} faces")]
    EdgeOveruse { a: u32, b: u32, faces: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: u32,
    pub face: u32,
    pub next: HalfEdgeId,
    /// Opposite half-edge in the neighbouring face, or [`ABSENT`].
    pub twin: HalfEdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeMesh {
    halfedges: Vec<HalfEdge>,
    boundary_vertex: Vec<bool>,
    vertex_count: usize,
}

impl HalfEdgeMesh {
    pub fn from_mesh(mesh: &QuantizedMesh) -> Result<Self, HalfEdgeError> {
        Self::build(mesh.vertex_count(), mesh.faces())
    }

    pub fn build(vertex_count: usize, faces: &[[u32; 3]]) -> Result<Self, HalfEdgeError> {
        if faces.is_empty() {
            return Err(HalfEdgeError::NoFaces);
        }

        for (f, tri) in faces.iter().enumerate() {
            if let Some(&vertex) = tri.iter().find(|&&v| v as usize >= vertex_count) {
                return Err(HalfEdgeError::IndexOutOfRange {
                    face: f as u32,
                    vertex,
                    vertex_count,
                });
            }
            if tri[0] == tri[1] || tri[0] == tri[2] {
                return Err(HalfEdgeError::DegenerateFace {
                    face: f as u32,
                    vertex: tri[0],
                });
            }
            if tri[1] == tri[2] {
                return Err(HalfEdgeError::DegenerateFace {
                    face: f as u32,
                    vertex: tri[1],
                });
            }
        }

        let mut halfedges = Vec::with_capacity(faces.len() * 3);
        for (f, tri) in faces.iter().enumerate() {
            let base = (3 * f) as HalfEdgeId;
            for k in 0..3u32 {
                halfedges.push(HalfEdge {
                    origin: tri[k as usize],
                    face: f as u32,
                    next: base + (k + 1) % 3,
                    twin: ABSENT,
                });
            }
        }

        // Group half-edges by undirected edge; sorting keeps groups contiguous
        // and ordered by edge.
        let key = |h: &HalfEdge, halfedges: &[HalfEdge]| {
            let (a, b) = (h.origin, halfedges[h.next as usize].origin);
            (u64::from(a.min(b)) << 32) | u64::from(a.max(b))
        };
        let mut order: Vec<(u64, HalfEdgeId)> = halfedges
            .iter()
            .enumerate()
            .map(|(i, h)| (key(h, &halfedges), i as HalfEdgeId))
            .collect();
        order.sort_unstable();
        let groups: Vec<&[(u64, HalfEdgeId)]> = order.chunk_by(|x, y| x.0 == y.0).collect();

        // Undirected incidence first, so a three-face fin is reported as overuse
        // rather than as whichever directed edge happens to collide.
        if let Some(group) = groups.iter().find(|g| g.len() > 2) {
            let edge = group[0].0;
            return Err(HalfEdgeError::EdgeOveruse {
                a: (edge >> 32) as u32,
                b: edge as u32,
                faces: group.len(),
            });
        }

        // A repeated directed edge is reported at its second occurrence in
        // face order, taking the earliest such occurrence.
        let duplicate = groups
            .iter()
            .filter(|g| {
                g.len() == 2
                    && halfedges[g[0].1 as usize].origin == halfedges[g[1].1 as usize].origin
            })
            .map(|g| (g[0].1, g[1].1))
            .min_by_key(|&(_, second)| second);
        if let Some((first, second)) = duplicate {
            let h = &halfedges[second as usize];
            return Err(HalfEdgeError::DuplicateDirectedEdge {
                from: h.origin,
                to: halfedges[h.next as usize].origin,
                first_face: first / 3,
                second_face: second / 3,
            });
        }

        let mut boundary_vertex = vec![false; vertex_count];
        for group in &groups {
            match **group {
                [(_, x), (_, y)] => {
                    halfedges[x as usize].twin = y;
                    halfedges[y as usize].twin = x;
                }
                [(edge, _)] => {
                    boundary_vertex[(edge >> 32) as usize] = true;
                    boundary_vertex[(edge & u64::from(u32::MAX)) as usize] = true;
                }
                _ => unreachable!("groups hold one or two half-edges here"),
            }
        }

        Ok(Self {
            halfedges,
            boundary_vertex,
            vertex_count,
        })
    }

    pub fn halfedges(&self) -> &[HalfEdge] {
        &self.halfedges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.halfedges.len() / 3
    }

    /// First half-edge of `face`: the one leaving its first listed vertex.
    #[inline]
    pub fn face_anchor(&self, face: u32) -> HalfEdgeId {
        3 * face
    }

    #[inline]
    pub fn origin(&self, h: HalfEdgeId) -> u32 {
        self.halfedges[h as usize].origin
    }

    #[inline]
    pub fn destination(&self, h: HalfEdgeId) -> u32 {
        self.origin(self.next(h))
    }

    #[inline]
    pub fn face(&self, h: HalfEdgeId) -> u32 {
        self.halfedges[h as usize].face
    }

    #[inline]
    pub fn next(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.halfedges[h as usize].next
    }

    #[inline]
    pub fn prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.next(self.next(h))
    }

    #[inline]
    pub fn twin(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        match self.halfedges[h as usize].twin {
            ABSENT => None,
            t => Some(t),
        }
    }

    /// The vertex of `h`'s face that does not lie on `h`.
    #[inline]
    pub fn apex(&self, h: HalfEdgeId) -> u32 {
        self.origin(self.prev(h))
    }

    #[inline]
    pub fn is_boundary_vertex(&self, v: u32) -> bool {
        self.boundary_vertex[v as usize]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Vertices incident to at least one twin-less half-edge, ascending.
    pub fn boundary_vertices(&self) -> Vec<u32> {
        self.boundary_vertex
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v as u32))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(m: &HalfEdgeMesh, from: u32, to: u32) -> HalfEdgeId {
        (0..m.halfedges().len() as u32)
            .find(|&h| m.origin(h) == from && m.destination(h) == to)
            .unwrap()
    }

    #[test]
    fn single_triangle() {
        let m = HalfEdgeMesh::build(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(m.halfedges().len(), 3);
        assert!(m.halfedges().iter().all(|h| h.twin == ABSENT));
        assert_eq!(m.boundary_vertices(), vec![0, 1, 2]);
        assert_eq!(m.face_anchor(0), 0);
        assert_eq!((m.origin(0), m.destination(0), m.apex(0)), (0, 1, 2));
    }

    #[test]
    fn strip_has_one_twin_pair() {
        let m = HalfEdgeMesh::build(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let paired: Vec<_> = (0..6u32).filter(|&h| m.twin(h).is_some()).collect();
        assert_eq!(paired.len(), 2);
        let a = find(&m, 2, 0);
        let b = find(&m, 0, 2);
        assert_eq!(m.twin(a), Some(b));
        assert_eq!(m.twin(b), Some(a));
    }

    #[test]
    fn duplicate_directed_edge() {
        let err = HalfEdgeMesh::build(4, &[[0, 1, 2], [0, 1, 3]]).unwrap_err();
        assert_eq!(
            err,
            HalfEdgeError::DuplicateDirectedEdge {
                from: 0,
                to: 1,
                first_face: 0,
                second_face: 1
            }
        );
        assert!(err.to_string().contains("0->1"));
    }

    #[test]
    fn edge_overuse() {
        let err = HalfEdgeMesh::build(5, &[[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap_err();
        assert_eq!(
            err,
            HalfEdgeError::EdgeOveruse {
                a: 0,
                b: 1,
                faces: 3
            }
        );
    }

    #[test]
    fn rejects_empty_and_degenerate() {
        assert_eq!(
            HalfEdgeMesh::build(3, &[]).unwrap_err(),
            HalfEdgeError::NoFaces
        );
        assert!(matches!(
            HalfEdgeMesh::build(3, &[[0, 1, 1]]),
            Err(HalfEdgeError::DegenerateFace { face: 0, vertex: 1 })
        ));
        assert!(matches!(
            HalfEdgeMesh::build(2, &[[0, 1, 2]]),
            Err(HalfEdgeError::IndexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn apex_examples() {
        // face (2,3,1): h = 2->3 has apex 1
        let m = HalfEdgeMesh::build(4, &[[2, 3, 1]]).unwrap();
        assert_eq!(m.apex(find(&m, 2, 3)), 1);
        let m = HalfEdgeMesh::build(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(m.apex(find(&m, 1, 2)), 0);
        // face (a,b,t), h = t->a has apex b
        let (a, b, t) = (4, 7, 2);
        let m = HalfEdgeMesh::build(8, &[[a, b, t]]).unwrap();
        assert_eq!(m.apex(find(&m, t, a)), b);
    }

    #[test]
    fn closed_tetrahedron_has_no_boundary() {
        let faces = [[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        let m = HalfEdgeMesh::build(4, &faces).unwrap();
        assert!(m.boundary_vertices().is_empty());
        for h in 0..12 {
            let t = m.twin(h).unwrap();
            assert_eq!(m.twin(t), Some(h));
            assert_eq!(m.origin(t), m.destination(h));
        }
    }

    #[test]
    fn next_cycles_within_face() {
        let m = HalfEdgeMesh::build(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        for h in 0..6 {
            assert_eq!(m.next(m.next(m.next(h))), h);
            assert_eq!(m.face(m.next(h)), m.face(h));
        }
    }
}
