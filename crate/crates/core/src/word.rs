//! Words over `{1, *}` indexing mixed products of a matrix and its adjoint.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One letter of a word: the matrix itself or its adjoint (transpose, for real entries).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Plain,
    Star,
}

impl Symbol {
    pub fn flip(self) -> Symbol {
        match self {
            Symbol::Plain => Symbol::Star,
            Symbol::Star => Symbol::Plain,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Plain => '1',
            Symbol::Star => '*',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '1' => Some(Symbol::Plain),
            '*' => Some(Symbol::Star),
            _ => None,
        }
    }
}

/// A nonempty word `ε₁⋯ε_k`, printed as a string over `1` and `*` with no separators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Word> {
        if symbols.is_empty() {
            return Err(Error::parse("word must be nonempty"));
        }
        Ok(Word(symbols))
    }

    /// `(1*)^half`, the alternating word of length `2·half`.
    pub fn alternating(half: usize) -> Word {
        assert!(half > 0, "alternating word needs at least one pair");
        Word(
            (0..2 * half)
                .map(|r| if r % 2 == 0 { Symbol::Plain } else { Symbol::Star })
                .collect(),
        )
    }

    /// All `2^len` words of the given length, in lexicographic order with `1 < *`.
    pub fn all_of_length(len: usize) -> Vec<Word> {
        assert!(len > 0 && len < 32);
        (0..1u32 << len)
            .map(|mask| {
                Word((0..len)
                    .map(|r| {
                        if mask >> (len - 1 - r) & 1 == 0 {
                            Symbol::Plain
                        } else {
                            Symbol::Star
                        }
                    })
                    .collect())
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Symbol at a 1-based position.
    pub fn at(&self, position: usize) -> Symbol {
        self.0[position - 1]
    }

    /// The word of the adjoint product: reversed, with every symbol flipped.
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|s| s.flip()).collect())
    }

    /// Canonical representative under cyclic rotation and adjoint.
    ///
    /// Both operations preserve the normalized trace of real matrices.
    pub fn trace_canonical(&self) -> Word {
        let mut best = self.clone();
        for base in [self.clone(), self.adjoint()] {
            let k = base.len();
            for shift in 0..k {
                let rotated: Vec<Symbol> = (0..k).map(|r| base.0[(r + shift) % k]).collect();
                if rotated < best.0 {
                    best = Word(rotated);
                }
            }
        }
        best
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let symbols = s
            .chars()
            .map(|c| {
                Symbol::from_char(c)
                    .ok_or_else(|| Error::parse(format!("malformed word {s:?}: unexpected {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
