//! Lossless tokenization of triangle meshes into compact token sequences.
//!
//! The pipeline is [`mesh::normalize`] → [`mesh::quantize`] →
//! [`mesh::QuantizedMesh::clean`] → [`tokenizer::tokenize`], and
//! [`detokenizer::detokenize`] inverts the last step. [`grammar`] describes
//! which sequences are well formed and produces next-token masks for
//! constrained sampling.

pub mod detokenizer;
pub mod ertk;
pub mod grammar;
pub mod halfedge;
pub mod mesh;
pub mod obj;
pub mod shapes;
pub mod token;
pub mod tokenizer;

pub use detokenizer::{detokenize, orientation_check, DetokenizeError, DetokenizeOptions};
pub use grammar::{allowed_next, initial_state, validate, GrammarState, TokenMask};
pub use halfedge::{HalfEdgeError, HalfEdgeMesh};
pub use mesh::{normalize, quantize, MeshError, QuantizedMesh, RawMesh, Resolution};
pub use token::{Token, TokenSequence, Vocabulary};
pub use tokenizer::{stats, tokenize, TokenizeError, TraversalStats};
