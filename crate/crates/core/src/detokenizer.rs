//! Reconstruction of meshes from token sequences, plus an orientation check.

use std::collections::HashMap;

use thiserror::Error;

use crate::grammar::{initial_state, GrammarError, Violation};
use crate::mesh::QuantizedMesh;
use crate::token::{Token, TokenSequence, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetokenizeError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("sequence ended at position {position} before EOS")]
    Truncated { position: usize },
    #[error(transparent)]
    Ids(#[from] Violation),
}

impl DetokenizeError {
    /// Index of the first token that could not be accepted.
    pub fn position(&self) -> usize {
        match self {
            DetokenizeError::Grammar(GrammarError::IllegalToken { position, .. })
            | DetokenizeError::Grammar(GrammarError::CoordOutOfRange { position, .. })
            | DetokenizeError::Truncated { position } => *position,
            DetokenizeError::Ids(v) => v.index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DetokenizeOptions {
    /// Keep faces that collapse after duplicate vertices are merged.
    pub keep_degenerate: bool,
}

/// Active half-edge `a → b` with apex `t`; the last emitted face is `(a, b, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub a: u32,
    pub b: u32,
    pub t: u32,
}

/// Incremental decoder state.
#[derive(Debug, Default)]
pub struct DecoderState {
    frame: Option<Frame>,
    vertex_ids: HashMap<[u16; 3], u32>,
    vertices: Vec<[u16; 3]>,
    faces: Vec<[u32; 3]>,
}

impl DecoderState {
    fn vertex(&mut self, q: [u16; 3]) -> u32 {
        let vertices = &mut self.vertices;
        *self.vertex_ids.entry(q).or_insert_with(|| {
            vertices.push(q);
            (vertices.len() - 1) as u32
        })
    }

    /// `B v s e` opens a sub-sequence with face `(s, e, v)`.
    pub fn start(&mut self, v: [u16; 3], s: [u16; 3], e: [u16; 3]) {
        let (v, s, e) = (self.vertex(v), self.vertex(s), self.vertex(e));
        self.emit(Frame { a: s, b: e, t: v });
    }

    /// `N w` crosses the edge `b → t`: face `(t, b, w)`.
    pub fn step_next(&mut self, w: [u16; 3]) {
        let f = self.frame.expect("N before any B");
        let w = self.vertex(w);
        self.emit(Frame {
            a: f.t,
            b: f.b,
            t: w,
        });
    }

    /// `P w` crosses the edge `t → a`: face `(a, t, w)`.
    pub fn step_prev(&mut self, w: [u16; 3]) {
        let f = self.frame.expect("P before any B");
        let w = self.vertex(w);
        self.emit(Frame {
            a: f.a,
            b: f.t,
            t: w,
        });
    }

    fn emit(&mut self, frame: Frame) {
        self.faces.push([frame.a, frame.b, frame.t]);
        self.frame = Some(frame);
    }

    pub fn frame(&self) -> Option<Frame> {
        self.frame
    }

    /// Face count before any cleanup.
    pub fn raw_face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn finish(
        self,
        resolution: crate::mesh::Resolution,
        opts: DetokenizeOptions,
    ) -> QuantizedMesh {
        let mut faces = self.faces;
        if !opts.keep_degenerate {
            faces.retain(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2]);
        }
        QuantizedMesh::new(resolution, self.vertices, faces)
            .expect("decoder only emits in-range vertices")
    }
}

fn vertex_at(tokens: &[Token], at: usize) -> [u16; 3] {
    let c = |i: usize| match tokens[at + i] {
        Token::Coord(v) => v,
        other => unreachable!("grammar admitted {other} inside a vertex"),
    };
    [c(0), c(1), c(2)]
}

/// Rebuilds the mesh encoded by `seq`, with degenerate faces removed.
pub fn detokenize(seq: &TokenSequence) -> Result<QuantizedMesh, DetokenizeError> {
    detokenize_with(seq, DetokenizeOptions::default())
}

pub fn detokenize_with(
    seq: &TokenSequence,
    opts: DetokenizeOptions,
) -> Result<QuantizedMesh, DetokenizeError> {
    let vocab = Vocabulary::new(seq.resolution);
    let mut grammar = initial_state();
    for &t in &seq.tokens {
        grammar = grammar.advance_checked(t, &vocab)?;
    }
    if !grammar.is_accepted() {
        return Err(DetokenizeError::Truncated {
            position: grammar.position,
        });
    }

    let tokens = &seq.tokens;
    let mut state = DecoderState::default();
    let mut i = 1;
    while i < tokens.len() - 1 {
        match tokens[i] {
            Token::B => {
                state.start(
                    vertex_at(tokens, i + 1),
                    vertex_at(tokens, i + 4),
                    vertex_at(tokens, i + 7),
                );
                i += 10;
            }
            Token::N => {
                state.step_next(vertex_at(tokens, i + 1));
                i += 4;
            }
            Token::P => {
                state.step_prev(vertex_at(tokens, i + 1));
                i += 4;
            }
            other => unreachable!("grammar admitted {other} as a face token"),
        }
    }
    Ok(state.finish(seq.resolution, opts))
}

/// Decodes raw ids; unknown ids are reported as grammar violations.
pub fn detokenize_ids(
    ids: &[u32],
    vocab: &Vocabulary,
    opts: DetokenizeOptions,
) -> Result<QuantizedMesh, DetokenizeError> {
    crate::grammar::validate(ids, vocab)?;
    let seq = TokenSequence::from_ids(vocab, ids).expect("validated ids decode");
    detokenize_with(&seq, opts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationReport {
    pub consistent: bool,
    /// Offending undirected edges as `[min, max]`, ascending.
    pub violations: Vec<[u32; 2]>,
}

/// Checks that no directed edge occurs twice, i.e. that every edge shared by
/// two faces is walked in opposite directions by them.
pub fn orientation_check(mesh: &QuantizedMesh) -> OrientationReport {
    let mut directed: HashMap<(u32, u32), u32> = HashMap::with_capacity(mesh.face_count() * 3);
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if a != b {
                *directed.entry((a, b)).or_default() += 1;
            }
        }
    }
    let mut violations: Vec<[u32; 2]> = directed
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|(&(a, b), _)| [a.min(b), a.max(b)])
        .collect();
    violations.sort_unstable();
    violations.dedup();
    OrientationReport {
        consistent: violations.is_empty(),
        violations,
    }
}
