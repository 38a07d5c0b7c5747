//! `ERTK` binary token files.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                                              |
//! |--------|------|----------------------------------------------------|
//! | 0      | 4    | magic `b"ERTK"`                                    |
//! | 4      | 1    | version (low 7 bits, = 1); high bit = bucket ids   |
//! | 5      | 2    | resolution                                         |
//! | 7      | 4    | token count                                        |
//! | 11     | 2·n  | token ids, `u16` each                              |

use thiserror::Error;

use crate::mesh::Resolution;
use crate::token::{TokenSequence, Vocabulary};

pub const MAGIC: [u8; 4] = *b"ERTK";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 11;
const EXTENDED_FLAG: u8 = 0x80;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErtkError {
    #[error("file too short for an ERTK header ({0} bytes)")]
    ShortHeader(usize),
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported ERTK version {0}")]
    UnsupportedVersion(u8),
    #[error("invalid resolution {0}")]
    BadResolution(u16),
    #[error("payload holds {actual} bytes, header promises {expected}")]
    PayloadLength { expected: usize, actual: usize },
    #[error("token id {id} at index {index} is outside the vocabulary of size {vocab_size}")]
    IdOutOfRange {
        index: usize,
        id: u16,
        vocab_size: usize,
    },
}

/// Decoded contents of an `ERTK` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenFile {
    pub vocab: Vocabulary,
    pub ids: Vec<u16>,
}

impl TokenFile {
    pub fn new(vocab: Vocabulary, ids: Vec<u16>) -> Self {
        Self { vocab, ids }
    }

    pub fn from_sequence(seq: &TokenSequence) -> Self {
        Self {
            vocab: seq.vocabulary(),
            ids: seq.ids().into_iter().map(|id| id as u16).collect(),
        }
    }

    pub fn resolution(&self) -> Resolution {
        self.vocab.resolution()
    }

    pub fn ids_u32(&self) -> Vec<u32> {
        self.ids.iter().map(|&id| u32::from(id)).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * self.ids.len());
        out.extend_from_slice(&MAGIC);
        out.push(
            VERSION
                | if self.vocab.is_extended() {
                    EXTENDED_FLAG
                } else {
                    0
                },
        );
        out.extend_from_slice(&self.vocab.resolution().get().to_le_bytes());
        out.extend_from_slice(&(self.ids.len() as u32).to_le_bytes());
        for id in &self.ids {
            out.extend_from_slice(&id.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ErtkError> {
        if bytes.len() < HEADER_LEN {
            return Err(ErtkError::ShortHeader(bytes.len()));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().expect("4 bytes");
        if magic != MAGIC {
            return Err(ErtkError::BadMagic(magic));
        }
        let version = bytes[4];
        if version & !EXTENDED_FLAG != VERSION {
            return Err(ErtkError::UnsupportedVersion(version));
        }
        let raw_resolution = u16::from_le_bytes([bytes[5], bytes[6]]);
        let resolution = Resolution::new(u32::from(raw_resolution))
            .map_err(|_| ErtkError::BadResolution(raw_resolution))?;
        let count = u32::from_le_bytes(bytes[7..11].try_into().expect("4 bytes")) as usize;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != 2 * count {
            return Err(ErtkError::PayloadLength {
                expected: 2 * count,
                actual: payload.len(),
            });
        }
        let vocab = if version & EXTENDED_FLAG != 0 {
            Vocabulary::with_face_buckets(resolution)
        } else {
            Vocabulary::new(resolution)
        };
        let ids: Vec<u16> = payload
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        if let Some((index, &id)) = ids
            .iter()
            .enumerate()
            .find(|(_, &id)| usize::from(id) >= vocab.size())
        {
            return Err(ErtkError::IdOutOfRange {
                index,
                id,
                vocab_size: vocab.size(),
            });
        }
        Ok(Self { vocab, ids })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detokenizer::detokenize_ids;

    #[test]
    fn header_layout() {
        let vocab = Vocabulary::new(Resolution::new(512).unwrap());
        let bytes = TokenFile::new(vocab, vec![515, 516]).to_bytes();
        assert_eq!(
            bytes,
            vec![b'E', b'R', b'T', b'K', 1, 0x00, 0x02, 2, 0, 0, 0, 0x03, 0x02, 0x04, 0x02]
        );
        let back = TokenFile::from_bytes(&bytes).unwrap();
        assert_eq!(back.ids, vec![515, 516]);
        assert_eq!(back.resolution().get(), 512);
    }

    #[test]
    fn hand_built_triangle_file() {
        // BOS B (3 vertices) EOS at R = 8
        let mut bytes = b"ERTK\x01\x08\x00\x0c\x00\x00\x00".to_vec();
        let ids: [u16; 12] = [11, 8, 0, 0, 7, 1, 0, 0, 0, 1, 0, 12];
        for id in ids {
            bytes.extend_from_slice(&id.to_le_bytes());
        }
        let file = TokenFile::from_bytes(&bytes).unwrap();
        assert_eq!(file.ids.len(), 12);
        let mesh = detokenize_ids(&file.ids_u32(), &file.vocab, Default::default()).unwrap();
        assert_eq!(mesh.face_count(), 1);
        assert_eq!(mesh.vertices(), &[[0, 0, 7], [1, 0, 0], [0, 1, 0]]);
        assert_eq!(mesh.faces(), &[[1, 2, 0]]);
    }

    #[test]
    fn rejects_malformed_files() {
        assert_eq!(
            TokenFile::from_bytes(b"ERTK"),
            Err(ErtkError::ShortHeader(4))
        );
        assert!(matches!(
            TokenFile::from_bytes(b"XRTK\x01\x08\x00\x00\x00\x00\x00"),
            Err(ErtkError::BadMagic(_))
        ));
        assert_eq!(
            TokenFile::from_bytes(b"ERTK\x02\x08\x00\x00\x00\x00\x00"),
            Err(ErtkError::UnsupportedVersion(2))
        );
        assert_eq!(
            TokenFile::from_bytes(b"ERTK\x01\x01\x00\x00\x00\x00\x00"),
            Err(ErtkError::BadResolution(1))
        );
        assert_eq!(
            TokenFile::from_bytes(b"ERTK\x01\x08\x00\x01\x00\x00\x00"),
            Err(ErtkError::PayloadLength {
                expected: 2,
                actual: 0
            })
        );
        assert_eq!(
            TokenFile::from_bytes(b"ERTK\x01\x08\x00\x01\x00\x00\x00\x0e\x00"),
            Err(ErtkError::IdOutOfRange {
                index: 0,
                id: 14,
                vocab_size: 14
            })
        );
        // the extension flag admits bucket ids
        let ok = TokenFile::from_bytes(b"ERTK\x81\x08\x00\x01\x00\x00\x00\x0e\x00").unwrap();
        assert!(ok.vocab.is_extended());
    }
}
