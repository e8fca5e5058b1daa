//! The restricted character set the noise model is defined over.

use std::collections::HashMap;

/// An ordered set of characters the model can corrupt.
///
/// Characters outside the alphabet pass through every stage untouched: they
/// are never corrupted, never counted toward error rates, and any seed pair
/// containing one is skipped during parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    chars: Vec<char>,
    index: HashMap<char, usize>,
}

impl Alphabet {
    /// Build an alphabet from a list of characters. Duplicates are dropped;
    /// order is normalized to ascending.
    pub fn new(chars: impl IntoIterator<Item = char>) -> Self {
        let mut chars: Vec<char> = chars.into_iter().collect();
        chars.sort_unstable();
        chars.dedup();
        let index = chars.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Self { chars, index }
    }

    /// The 26 lowercase ASCII letters.
    pub fn ascii_lowercase() -> Self {
        Self::new('a'..='z')
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }

    /// Position of `c` in the ordered alphabet, if present.
    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// True iff every character of `word` is in the alphabet.
    pub fn covers(&self, word: &str) -> bool {
        word.chars().all(|c| self.contains(c))
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::ascii_lowercase()
    }
}
