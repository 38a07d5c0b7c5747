//! Token alphabet and the id layout of the vocabulary.
//!
//! Ids `0..R` are coordinate values, followed by `B`, `N`, `P`, `BOS`, `EOS`
//! and `PAD`, giving `R + 6` base ids (518 at `R = 512`). Face-count bucket
//! tokens are an optional extension placed after `PAD`.

use std::fmt;

use crate::mesh::Resolution;

/// Number of face-count bucket tokens, including the unconditional one.
pub const FACE_BUCKETS: u8 = 5;

/// Bucket id meaning "no face-count condition".
pub const UNCONDITIONAL_BUCKET: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    /// One quantized coordinate component.
    Coord(u16),
    /// Start of a sub-sequence; followed by three vertices.
    B,
    /// Step across the next edge; followed by one vertex.
    N,
    /// Step across the previous edge; followed by one vertex.
    P,
    Bos,
    Eos,
    Pad,
    FaceBucket(u8),
}

impl Token {
    pub fn is_coord(self) -> bool {
        matches!(self, Token::Coord(_))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Coord(v) => write!(f, "{v}"),
            Token::B => f.write_str("B"),
            Token::N => f.write_str("N"),
            Token::P => f.write_str("P"),
            Token::Bos => f.write_str("BOS"),
            Token::Eos => f.write_str("EOS"),
            Token::Pad => f.write_str("PAD"),
            Token::FaceBucket(k) => write!(f, "FC{k}"),
        }
    }
}

/// Bijection between tokens and integer ids for one resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vocabulary {
    resolution: Resolution,
    extended: bool,
}

impl Vocabulary {
    pub fn new(resolution: Resolution) -> Self {
        Self {
            resolution,
            extended: false,
        }
    }

    /// Vocabulary that also maps the face-count bucket tokens.
    pub fn with_face_buckets(resolution: Resolution) -> Self {
        Self {
            resolution,
            extended: true,
        }
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    fn r(&self) -> u32 {
        u32::from(self.resolution.get())
    }

    pub fn base_size(&self) -> usize {
        self.r() as usize + 6
    }

    pub fn size(&self) -> usize {
        self.base_size()
            + if self.extended {
                FACE_BUCKETS as usize
            } else {
                0
            }
    }

    pub fn b(&self) -> u32 {
        self.r()
    }

    pub fn n(&self) -> u32 {
        self.r() + 1
    }

    pub fn p(&self) -> u32 {
        self.r() + 2
    }

    pub fn bos(&self) -> u32 {
        self.r() + 3
    }

    pub fn eos(&self) -> u32 {
        self.r() + 4
    }

    pub fn pad(&self) -> u32 {
        self.r() + 5
    }

    /// Id of `token`, or `None` if the token does not exist in this vocabulary.
    pub fn id(&self, token: Token) -> Option<u32> {
        let r = self.r();
        Some(match token {
            Token::Coord(v) if u32::from(v) < r => u32::from(v),
            Token::Coord(_) => return None,
            Token::B => r,
            Token::N => r + 1,
            Token::P => r + 2,
            Token::Bos => r + 3,
            Token::Eos => r + 4,
            Token::Pad => r + 5,
            Token::FaceBucket(k) if self.extended && k < FACE_BUCKETS => r + 6 + u32::from(k),
            Token::FaceBucket(_) => return None,
        })
    }

    pub fn token(&self, id: u32) -> Option<Token> {
        let r = self.r();
        if id < r {
            return Some(Token::Coord(id as u16));
        }
        Some(match id - r {
            0 => Token::B,
            1 => Token::N,
            2 => Token::P,
            3 => Token::Bos,
            4 => Token::Eos,
            5 => Token::Pad,
            k if self.extended && k < 6 + u32::from(FACE_BUCKETS) => {
                Token::FaceBucket((k - 6) as u8)
            }
            _ => return None,
        })
    }
}

/// A token stream together with the resolution its coordinates refer to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub resolution: Resolution,
    pub tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new(resolution: Resolution, tokens: Vec<Token>) -> Self {
        Self { resolution, tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of `B` tokens, i.e. sub-sequences.
    pub fn subsequences(&self) -> usize {
        self.tokens.iter().filter(|&&t| t == Token::B).count()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::new(self.resolution)
    }

    /// Ids under the base vocabulary. Panics on tokens the vocabulary lacks.
    pub fn ids(&self) -> Vec<u32> {
        let vocab = self.vocabulary();
        self.tokens
            .iter()
            .map(|&t| {
                vocab
                    .id(t)
                    .unwrap_or_else(|| panic!("token {t} not in vocabulary"))
            })
            .collect()
    }

    /// Decodes ids; returns the index of the first unknown id on failure.
    pub fn from_ids(vocab: &Vocabulary, ids: &[u32]) -> Result<Self, usize> {
        let tokens = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| vocab.token(id).ok_or(i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(vocab.resolution(), tokens))
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_vocabulary_is_518_at_512() {
        let v = Vocabulary::new(Resolution::new(512).unwrap());
        assert_eq!(v.size(), 518);
        assert_eq!(
            (v.b(), v.n(), v.p(), v.bos(), v.eos(), v.pad()),
            (512, 513, 514, 515, 516, 517)
        );
        let v = Vocabulary::new(Resolution::new(128).unwrap());
        assert_eq!(v.size(), 134);
    }

    #[test]
    fn id_layout_is_a_bijection() {
        for vocab in [
            Vocabulary::new(Resolution::new(16).unwrap()),
            Vocabulary::with_face_buckets(Resolution::new(16).unwrap()),
        ] {
            for id in 0..vocab.size() as u32 {
                let t = vocab.token(id).unwrap();
                assert_eq!(vocab.id(t), Some(id));
            }
            assert_eq!(vocab.token(vocab.size() as u32), None);
        }
    }

    #[test]
    fn face_buckets_only_in_extension() {
        let r = Resolution::new(512).unwrap();
        assert_eq!(Vocabulary::new(r).id(Token::FaceBucket(0)), None);
        let ext = Vocabulary::with_face_buckets(r);
        assert_eq!(ext.size(), 523);
        assert_eq!(ext.id(Token::FaceBucket(0)), Some(518));
        assert_eq!(ext.id(Token::FaceBucket(UNCONDITIONAL_BUCKET)), Some(522));
        assert_eq!(ext.id(Token::Coord(512)), None);
    }
}
