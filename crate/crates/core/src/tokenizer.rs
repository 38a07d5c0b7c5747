//! Face traversal that turns a mesh into a flat token sequence.
//!
//! The traversal is a modified EdgeBreaker walk over the half-edge structure.
//! Every sub-sequence opens with `B` and three full vertices; each further
//! face costs a direction token (`N` to cross the next edge, `P` to cross the
//! previous edge) plus the one vertex it adds. When both neighbours of a face
//! are still unvisited, the walk continues across the next edge and the other
//! side is restarted later as a fresh sub-sequence, duplicating the shared
//! vertices instead of referring back to them.
//!
//! Boundary vertices are marked visited up front, and a missing twin counts
//! as a visited neighbour, so the walk never leaves the surface.

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::halfedge::{HalfEdgeError, HalfEdgeId, HalfEdgeMesh};
use crate::mesh::QuantizedMesh;
use crate::token::{Token, TokenSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error(transparent)]
    Connectivity(#[from] HalfEdgeError),
}

enum Step {
    /// Emit the face behind `he`; `first` faces already wrote their vertices.
    Face { he: HalfEdgeId, first: bool },
    /// Open a new sub-sequence at `he` unless its face was reached meanwhile.
    Restart { he: HalfEdgeId },
}

struct Walker<'a> {
    mesh: &'a QuantizedMesh,
    he: &'a HalfEdgeMesh,
    face_seen: Vec<bool>,
    vertex_seen: Vec<bool>,
    out: Vec<Token>,
    stack: Vec<Step>,
}

impl<'a> Walker<'a> {
    fn write_vertex(&mut self, v: u32) {
        let q = self.mesh.vertices()[v as usize];
        self.out
            .extend([Token::Coord(q[0]), Token::Coord(q[1]), Token::Coord(q[2])]);
    }

    fn neighbour_seen(&self, h: HalfEdgeId) -> bool {
        match self.he.twin(h) {
            Some(t) => self.face_seen[self.he.face(t) as usize],
            None => true,
        }
    }

    fn restart(&mut self, c: HalfEdgeId) {
        if self.face_seen[self.he.face(c) as usize] {
            return;
        }
        let (s, e) = (self.he.origin(c), self.he.destination(c));
        self.out.push(Token::B);
        self.write_vertex(self.he.apex(c));
        self.write_vertex(s);
        self.write_vertex(e);
        self.vertex_seen[s as usize] = true;
        self.vertex_seen[e as usize] = true;
        self.stack.push(Step::Face { he: c, first: true });
    }

    fn face(&mut self, c: HalfEdgeId, first: bool) {
        let he = self.he;
        self.face_seen[he.face(c) as usize] = true;
        let apex = he.apex(c);
        if !first {
            self.write_vertex(apex);
        }
        let right = he.next(c);
        let left = he.prev(c);

        if !self.vertex_seen[apex as usize] {
            self.vertex_seen[apex as usize] = true;
            self.out.push(Token::N);
            // An unvisited apex is interior, so every edge touching it has a twin.
            let t = he
                .twin(right)
                .expect("interior apex has a twin across the next edge");
            self.stack.push(Step::Face {
                he: t,
                first: false,
            });
            return;
        }

        match (self.neighbour_seen(right), self.neighbour_seen(left)) {
            (true, true) => {}
            (true, false) => {
                self.out.push(Token::P);
                let t = he.twin(left).expect("unvisited neighbour exists");
                self.stack.push(Step::Face {
                    he: t,
                    first: false,
                });
            }
            (false, true) => {
                self.out.push(Token::N);
                let t = he.twin(right).expect("unvisited neighbour exists");
                self.stack.push(Step::Face {
                    he: t,
                    first: false,
                });
            }
            (false, false) => {
                self.out.push(Token::N);
                let r = he.twin(right).expect("unvisited neighbour exists");
                let l = he.twin(left).expect("unvisited neighbour exists");
                // LIFO: the right branch finishes before the left restart runs.
                self.stack.push(Step::Restart { he: l });
                self.stack.push(Step::Face {
                    he: r,
                    first: false,
                });
            }
        }
    }

    fn drain(&mut self) {
        while let Some(step) = self.stack.pop() {
            match step {
                Step::Face { he, first } => self.face(he, first),
                Step::Restart { he } => self.restart(he),
            }
        }
    }
}

/// Tokenizes a cleaned mesh. Faces are started in input order from their
/// anchor half-edge, so the output is fully determined by the input order.
pub fn tokenize(mesh: &QuantizedMesh) -> Result<TokenSequence, TokenizeError> {
    let he = HalfEdgeMesh::from_mesh(mesh)?;
    Ok(tokenize_with(mesh, &he))
}

/// Tokenizes using a prebuilt half-edge structure for `mesh`.
pub fn tokenize_with(mesh: &QuantizedMesh, he: &HalfEdgeMesh) -> TokenSequence {
    let faces = he.face_count();
    let mut walker = Walker {
        mesh,
        he,
        face_seen: vec![false; faces],
        vertex_seen: he.boundary_flags().to_vec(),
        out: Vec::with_capacity(2 + 5 * faces),
        stack: Vec::new(),
    };
    walker.out.push(Token::Bos);
    for f in 0..faces as u32 {
        if !walker.face_seen[f as usize] {
            walker.restart(he.face_anchor(f));
            walker.drain();
        }
    }
    walker.out.push(Token::Eos);
    TokenSequence::new(mesh.resolution(), walker.out)
}

/// Comparison baseline that only ever advances across the next edge,
/// emitting three coordinates per face and restarting with `B` plus three
/// vertices whenever that neighbour is missing or already visited.
pub fn tokenize_fixed_side_baseline(mesh: &QuantizedMesh) -> Result<TokenSequence, TokenizeError> {
    let he = HalfEdgeMesh::from_mesh(mesh)?;
    let faces = he.face_count();
    let mut seen = vec![false; faces];
    let mut out = Vec::with_capacity(2 + 4 * faces);
    let push_vertex = |out: &mut Vec<Token>, v: u32| {
        let q = mesh.vertices()[v as usize];
        out.extend([Token::Coord(q[0]), Token::Coord(q[1]), Token::Coord(q[2])]);
    };

    out.push(Token::Bos);
    for f in 0..faces as u32 {
        if seen[f as usize] {
            continue;
        }
        let mut c = he.face_anchor(f);
        seen[f as usize] = true;
        out.push(Token::B);
        push_vertex(&mut out, he.apex(c));
        push_vertex(&mut out, he.origin(c));
        push_vertex(&mut out, he.destination(c));
        while let Some(t) = he.twin(he.next(c)) {
            let g = he.face(t) as usize;
            if seen[g] {
                break;
            }
            seen[g] = true;
            c = t;
            push_vertex(&mut out, he.apex(c));
        }
    }
    out.push(Token::Eos);
    Ok(TokenSequence::new(mesh.resolution(), out))
}

/// Baseline with nine coordinate tokens per face, in listed vertex order.
pub fn tokenize_naive(mesh: &QuantizedMesh) -> Result<TokenSequence, TokenizeError> {
    if mesh.face_count() == 0 {
        return Err(HalfEdgeError::NoFaces.into());
    }
    let mut out = Vec::with_capacity(2 + 9 * mesh.face_count());
    out.push(Token::Bos);
    for f in mesh.faces() {
        for &v in f {
            let q = mesh.vertices()[v as usize];
            out.extend([Token::Coord(q[0]), Token::Coord(q[1]), Token::Coord(q[2])]);
        }
    }
    out.push(Token::Eos);
    Ok(TokenSequence::new(mesh.resolution(), out))
}

/// Per-mesh tokenization metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraversalStats {
    pub faces: usize,
    pub vertices: usize,
    pub tokens: usize,
    pub subsequences: usize,
    /// Tokens per face, excluding `BOS`/`EOS`.
    pub tokens_per_face: f64,
    /// Token count excluding `BOS`/`EOS`, relative to nine tokens per face.
    pub compression_ratio: f64,
    pub tokenize_seconds: f64,
}

pub fn stats(seq: &TokenSequence, mesh: &QuantizedMesh, elapsed: Duration) -> TraversalStats {
    let faces = mesh.face_count();
    let body = seq.len().saturating_sub(2) as f64;
    let (tpf, ratio) = if faces == 0 {
        (0.0, 0.0)
    } else {
        (body / faces as f64, body / (9.0 * faces as f64))
    };
    TraversalStats {
        faces,
        vertices: mesh.vertex_count(),
        tokens: seq.len(),
        subsequences: seq.subsequences(),
        tokens_per_face: tpf,
        compression_ratio: ratio,
        tokenize_seconds: elapsed.as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Resolution;

    fn mesh(vertices: Vec<[u16; 3]>, faces: Vec<[u32; 3]>) -> QuantizedMesh {
        QuantizedMesh::new(Resolution::new(512).unwrap(), vertices, faces).unwrap()
    }

    fn coords(v: [u16; 3]) -> [Token; 3] {
        [Token::Coord(v[0]), Token::Coord(v[1]), Token::Coord(v[2])]
    }

    #[test]
    fn single_triangle() {
        let vs = vec![[1, 2, 3], [4, 5, 6], [7, 8, 9]];
        let m = mesh(vs.clone(), vec![[0, 1, 2]]);
        let seq = tokenize(&m).unwrap();
        let mut expected = vec![Token::Bos, Token::B];
        expected.extend(coords(vs[2]));
        expected.extend(coords(vs[0]));
        expected.extend(coords(vs[1]));
        expected.push(Token::Eos);
        assert_eq!(seq.tokens, expected);
        assert_eq!(seq.len(), 12);
    }

    #[test]
    fn strip_of_two() {
        let m = mesh(
            vec![[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let seq = tokenize(&m).unwrap();
        assert_eq!(seq.len(), 16);
        // (0,2,3) lies across the anchor's previous edge 2->0, so the step is P
        assert_eq!(seq.tokens.iter().filter(|&&t| t == Token::P).count(), 1);
        assert_eq!(seq.tokens.iter().filter(|&&t| t == Token::N).count(), 0);
        assert_eq!(seq.subsequences(), 1);
    }

    #[test]
    fn baselines_on_single_triangle() {
        let m = mesh(vec![[1, 2, 3], [4, 5, 6], [7, 8, 9]], vec![[0, 1, 2]]);
        let fixed = tokenize_fixed_side_baseline(&m).unwrap();
        assert_eq!(fixed.len(), 12);
        assert_eq!(fixed.subsequences(), 1);
        assert_eq!(tokenize_naive(&m).unwrap().len(), 11);
    }

    #[test]
    fn rejects_empty_mesh() {
        let m = mesh(vec![[0, 0, 0]], vec![]);
        assert_eq!(
            tokenize(&m).unwrap_err(),
            TokenizeError::Connectivity(HalfEdgeError::NoFaces)
        );
        assert!(tokenize_naive(&m).is_err());
        assert!(tokenize_fixed_side_baseline(&m).is_err());
    }

    #[test]
    fn stats_of_single_triangle() {
        let m = mesh(vec![[1, 2, 3], [4, 5, 6], [7, 8, 9]], vec![[0, 1, 2]]);
        let seq = tokenize(&m).unwrap();
        let s = stats(&seq, &m, Duration::from_millis(2));
        assert_eq!(s.tokens, 12);
        assert_eq!(s.subsequences, 1);
        assert!((s.compression_ratio - 10.0 / 9.0).abs() < 1e-12);
        assert!((s.tokens_per_face - 10.0).abs() < 1e-12);
        assert!((s.tokenize_seconds - 0.002).abs() < 1e-12);
    }
}
