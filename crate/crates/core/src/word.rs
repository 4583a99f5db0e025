//! Five-letter lowercase words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const WORD_LEN: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid word {0:?}: expected exactly 5 ASCII letters")]
pub struct InvalidWord(pub String);

/// A validated five-letter word stored as lowercase ASCII bytes.
///
/// Ordering is lexicographic, which is also the tie-break order used by
/// [`crate::ingest::Dictionary`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word([u8; WORD_LEN]);

impl Word {
    /// Parses a word, folding ASCII uppercase to lowercase.
    pub fn parse(s: &str) -> Result<Self, InvalidWord> {
        let bytes = s.as_bytes();
        if bytes.len() != WORD_LEN || !bytes.iter().all(u8::is_ascii_alphabetic) {
            return Err(InvalidWord(s.to_string()));
        }
        let mut out = [0u8; WORD_LEN];
        for (o, b) in out.iter_mut().zip(bytes) {
            *o = b.to_ascii_lowercase();
        }
        Ok(Word(out))
    }

    pub fn bytes(&self) -> &[u8; WORD_LEN] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII letters are ever stored.
        std::str::from_utf8(&self.0).expect("word bytes are ascii")
    }

    /// Letter indices 0..26.
    pub(crate) fn letter_indices(&self) -> [usize; WORD_LEN] {
        self.0.map(|b| (b - b'a') as usize)
    }
}

impl FromStr for Word {
    type Err = InvalidWord;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.as_str())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_folds_case() {
        assert_eq!(Word::parse("TrAiN").unwrap().as_str(), "train");
    }

    #[test]
    fn parse_rejects_bad_input() {
        for bad in ["", "abcd", "abcdef", "ab1de", "ab de", "éclat"] {
            assert!(Word::parse(bad).is_err(), "{bad:?} should be rejected");
        }
    }
}
