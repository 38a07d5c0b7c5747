//! Sequence grammar and next-token masks for constrained sampling.
//!
//! A valid sequence is `BOS`, then `B` with nine coordinates, then any number
//! of `B` + 9 / `N` + 3 / `P` + 3 groups, then `EOS`.

use std::fmt;

use thiserror::Error;

use crate::token::{Token, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    ExpectBos,
    ExpectB,
    /// Coordinates still owed by the current face group (1..=9).
    InVertexRun(u8),
    ExpectFaceTypeOrEnd,
    Accepted,
}

/// Token classes used to describe what the grammar expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenClass {
    Coord,
    B,
    N,
    P,
    Bos,
    Eos,
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenClass::Coord => "coordinate",
            TokenClass::B => "B",
            TokenClass::N => "N",
            TokenClass::P => "P",
            TokenClass::Bos => "BOS",
            TokenClass::Eos => "EOS",
        })
    }
}

fn join(classes: &[TokenClass]) -> String {
    classes
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error(
        "illegal token {got} at position {position}; expected one of [{}]",
        join(expected)
    )]
    IllegalToken {
        expected: Vec<TokenClass>,
        got: Token,
        position: usize,
    },
    #[error("coordinate {value} at position {position} is not below resolution {resolution}")]
    CoordOutOfRange {
        value: u16,
        resolution: u16,
        position: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrammarState {
    pub phase: Phase,
    /// Tokens consumed so far.
    pub position: usize,
    pub b_count: u32,
    pub n_count: u32,
    pub p_count: u32,
}

impl Default for GrammarState {
    fn default() -> Self {
        initial_state()
    }
}

pub fn initial_state() -> GrammarState {
    GrammarState {
        phase: Phase::ExpectBos,
        position: 0,
        b_count: 0,
        n_count: 0,
        p_count: 0,
    }
}

impl GrammarState {
    pub fn faces(&self) -> u32 {
        self.b_count + self.n_count + self.p_count
    }

    pub fn is_accepted(&self) -> bool {
        self.phase == Phase::Accepted
    }

    pub fn expected(&self) -> Vec<TokenClass> {
        match self.phase {
            Phase::ExpectBos => vec![TokenClass::Bos],
            Phase::ExpectB => vec![TokenClass::B],
            Phase::InVertexRun(_) => vec![TokenClass::Coord],
            Phase::ExpectFaceTypeOrEnd => {
                vec![TokenClass::B, TokenClass::N, TokenClass::P, TokenClass::Eos]
            }
            Phase::Accepted => vec![],
        }
    }

    /// Consumes one token, returning the successor state.
    pub fn advance(&self, token: Token) -> Result<GrammarState, GrammarError> {
        let mut next = *self;
        next.position += 1;
        next.phase = match (self.phase, token) {
            (Phase::ExpectBos, Token::Bos) => Phase::ExpectB,
            (Phase::ExpectB, Token::B) | (Phase::ExpectFaceTypeOrEnd, Token::B) => {
                next.b_count += 1;
                Phase::InVertexRun(9)
            }
            (Phase::ExpectFaceTypeOrEnd, Token::N) => {
                next.n_count += 1;
                Phase::InVertexRun(3)
            }
            (Phase::ExpectFaceTypeOrEnd, Token::P) => {
                next.p_count += 1;
                Phase::InVertexRun(3)
            }
            (Phase::ExpectFaceTypeOrEnd, Token::Eos) => Phase::Accepted,
            (Phase::InVertexRun(1), Token::Coord(_)) => Phase::ExpectFaceTypeOrEnd,
            (Phase::InVertexRun(k), Token::Coord(_)) => Phase::InVertexRun(k - 1),
            _ => {
                return Err(GrammarError::IllegalToken {
                    expected: self.expected(),
                    got: token,
                    position: self.position,
                })
            }
        };
        Ok(next)
    }

    /// Like [`advance`](Self::advance) but also range-checks coordinates.
    pub fn advance_checked(
        &self,
        token: Token,
        vocab: &Vocabulary,
    ) -> Result<GrammarState, GrammarError> {
        if let Token::Coord(value) = token {
            let resolution = vocab.resolution().get();
            if value >= resolution {
                return Err(GrammarError::CoordOutOfRange {
                    value,
                    resolution,
                    position: self.position,
                });
            }
        }
        self.advance(token)
    }
}

/// Boolean mask over vocabulary ids, stored as a little-endian bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenMask {
    bits: Vec<u64>,
    len: usize,
}

impl TokenMask {
    pub fn none(len: usize) -> Self {
        Self {
            bits: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn allow(&mut self, id: u32) {
        let i = id as usize;
        assert!(i < self.len, "id {id} outside mask of {}", self.len);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn allow_range(&mut self, ids: std::ops::Range<u32>) {
        for id in ids {
            self.allow(id);
        }
    }

    pub fn is_allowed(&self, id: u32) -> bool {
        let i = id as usize;
        i < self.len && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn allowed_ids(&self) -> Vec<u32> {
        (0..self.len as u32)
            .filter(|&id| self.is_allowed(id))
            .collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len as u32).map(|id| self.is_allowed(id)).collect()
    }

    /// `ceil(len / 8)` bytes; id `i` is bit `i % 8` of byte `i / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.bits.iter().flat_map(|w| w.to_le_bytes()).collect();
        bytes.truncate(self.len.div_ceil(8));
        bytes
    }
}

/// Ids the grammar accepts next from `state`.
pub fn allowed_next(state: &GrammarState, vocab: &Vocabulary) -> TokenMask {
    let mut mask = TokenMask::none(vocab.size());
    match state.phase {
        Phase::ExpectBos => mask.allow(vocab.bos()),
        Phase::ExpectB => mask.allow(vocab.b()),
        Phase::InVertexRun(_) => mask.allow_range(0..u32::from(vocab.resolution().get())),
        Phase::ExpectFaceTypeOrEnd => {
            for id in [vocab.b(), vocab.n(), vocab.p(), vocab.eos()] {
                mask.allow(id);
            }
        }
        Phase::Accepted => {}
    }
    mask
}

/// Where and why an id sequence failed to validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending index; equals the sequence length when it ended early.
    pub index: usize,
    pub expected: Vec<u32>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "grammar violation at index {}", self.index)?;
        if self.expected.len() <= 8 {
            write!(f, "; expected ids {:?}", self.expected)
        } else {
            write!(f, "; expected {} possible ids", self.expected.len())
        }
    }
}

impl std::error::Error for Violation {}

/// Runs the grammar over a prefix of ids, stopping at the first illegal id.
pub fn state_after(ids: &[u32], vocab: &Vocabulary) -> Result<GrammarState, Violation> {
    let mut state = initial_state();
    for (index, &id) in ids.iter().enumerate() {
        let violation = || Violation {
            index,
            expected: allowed_next(&state, vocab).allowed_ids(),
        };
        let token = vocab.token(id).ok_or_else(violation)?;
        state = state
            .advance_checked(token, vocab)
            .map_err(|_| violation())?;
    }
    Ok(state)
}

/// Accepts `ids` iff it drives the grammar from the initial state to `Accepted`.
pub fn validate(ids: &[u32], vocab: &Vocabulary) -> Result<(), Violation> {
    let state = state_after(ids, vocab)?;
    if state.is_accepted() {
        Ok(())
    } else {
        Err(Violation {
            index: ids.len(),
            expected: allowed_next(&state, vocab).allowed_ids(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("face count must be at least 1")]
pub struct EmptyFaceCount;

/// Conditioning bucket for a target face count: `<= 1000`, `<= 2000`,
/// `<= 4000`, or more. The unconditional bucket is never returned.
pub fn face_count_bucket(faces: usize) -> Result<Token, EmptyFaceCount> {
    let k = match faces {
        0 => return Err(EmptyFaceCount),
        1..=1000 => 0,
        1001..=2000 => 1,
        2001..=4000 => 2,
        _ => 3,
    };
    Ok(Token::FaceBucket(k))
}
