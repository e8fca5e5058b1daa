//! Dictionary-based spelling suggestions and confusion enforcement.
//!
//! Candidate lookup uses a symmetric-delete index: every vocabulary word is
//! filed under all strings reachable by deleting up to `radius` characters,
//! and a query's own delete-variants are probed against that index. Survivors
//! are verified with the true edit distance, so results equal a brute-force
//! scan of the vocabulary. Ranking is (edit distance, frequency descending,
//! lexicographic), which is total: no two words share a rank.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use crate::align::edit_distance;
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DISTANCE: usize = 2;

/// One ranked correction candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    pub word: String,
    pub edit_distance: usize,
    pub frequency: u64,
}

/// A vocabulary with word frequencies and a delete-variant index.
#[derive(Debug, Clone)]
pub struct Lexicon {
    frequency: HashMap<String, u64>,
    words: Vec<String>,
    delete_index: HashMap<String, Vec<u32>>,
    radius: usize,
}

fn delete_variants(word: &str, radius: usize) -> HashSet<String> {
    let mut variants = HashSet::new();
    variants.insert(word.to_string());
    let mut frontier = vec![word.to_string()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            let chars: Vec<char> = w.chars().collect();
            for skip in 0..chars.len() {
                let shorter: String = chars
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, c)| *c)
                    .collect();
                if variants.insert(shorter.clone()) {
                    next.push(shorter);
                }
            }
        }
        frontier = next;
    }
    variants
}

impl Lexicon {
    /// Read `word<TAB>count` lines; duplicates merge, malformed or
    /// out-of-alphabet lines are skipped with a diagnostic.
    pub fn build(reader: impl BufRead, alphabet: &Alphabet) -> Result<Lexicon> {
        Self::build_with_radius(reader, alphabet, DEFAULT_MAX_DISTANCE)
    }

    pub fn build_with_radius(
        reader: impl BufRead,
        alphabet: &Alphabet,
        radius: usize,
    ) -> Result<Lexicon> {
        let mut frequency: std::collections::BTreeMap<String, u64> = Default::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let parsed = match (fields.next(), fields.next(), fields.next()) {
                (Some(w), Some(n), None) => n.trim().parse::<u64>().ok().map(|n| (w, n)),
                _ => None,
            };
            let Some((word, count)) = parsed else {
                log::warn!("lexicon line {}: expected `word<TAB>count`", lineno + 1);
                continue;
            };
            let word = word.trim().to_lowercase();
            if word.is_empty() || !alphabet.covers(&word) {
                log::warn!("lexicon line {}: {word:?} leaves the alphabet", lineno + 1);
                continue;
            }
            *frequency.entry(word).or_insert(0) += count;
        }
        if frequency.is_empty() {
            log::warn!("lexicon stream produced no usable words");
        }

        let words: Vec<String> = frequency.keys().cloned().collect();
        let mut delete_index: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, word) in words.iter().enumerate() {
            for variant in delete_variants(word, radius) {
                delete_index.entry(variant).or_default().push(id as u32);
            }
        }
        Ok(Lexicon {
            frequency: frequency.into_iter().collect(),
            words,
            delete_index,
            radius,
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.frequency.contains_key(word)
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.frequency.get(word).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// All vocabulary words within `max_distance` edits of `token`, ranked.
    /// An in-vocabulary token ranks itself first at distance 0.
    pub fn suggest(&self, token: &str, max_distance: usize) -> Vec<Suggestion> {
        let max_distance = if max_distance > self.radius {
            log::warn!(
                "suggestion distance {max_distance} exceeds index radius {}; clamping",
                self.radius
            );
            self.radius
        } else {
            max_distance
        };
        let mut candidates: HashSet<u32> = HashSet::new();
        for variant in delete_variants(token, max_distance) {
            if let Some(ids) = self.delete_index.get(&variant) {
                candidates.extend(ids);
            }
        }
        let mut suggestions: Vec<Suggestion> = candidates
            .into_iter()
            .filter_map(|id| {
                let word = &self.words[id as usize];
                let d = edit_distance(token, word);
                (d <= max_distance).then(|| Suggestion {
                    word: word.clone(),
                    edit_distance: d,
                    frequency: self.frequency[word],
                })
            })
            .collect();
        rank(&mut suggestions);
        suggestions
    }

    /// [`suggest`](Self::suggest) plus two-word splits: if inserting one
    /// space yields two vocabulary words, the pair joins the candidates at
    /// edit distance 1.
    pub fn suggest_with_splits(&self, token: &str, max_distance: usize) -> Vec<Suggestion> {
        let mut suggestions = self.suggest(token, max_distance);
        if max_distance >= 1 {
            let chars: Vec<char> = token.chars().collect();
            for split in 1..chars.len() {
                let left: String = chars[..split].iter().collect();
                let right: String = chars[split..].iter().collect();
                if self.contains(&left) && self.contains(&right) {
                    suggestions.push(Suggestion {
                        word: format!("{left} {right}"),
                        edit_distance: 1,
                        frequency: self.frequency(&left).min(self.frequency(&right)),
                    });
                }
            }
        }
        rank(&mut suggestions);
        suggestions
    }
}

fn rank(suggestions: &mut [Suggestion]) {
    suggestions.sort_by(|a, b| {
        a.edit_distance
            .cmp(&b.edit_distance)
            .then(b.frequency.cmp(&a.frequency))
            .then(a.word.cmp(&b.word))
    });
}

/// Replace a misspelled token with the highest-ranked suggestion that is not
/// the original word, manufacturing a real-word error.
///
/// A lone suggestion is accepted even if it restores the original; no
/// suggestions, or a token that is already a vocabulary word, leave the
/// token unchanged.
pub fn enforce_confusion(
    misspelled: &str,
    original: &str,
    lexicon: &Lexicon,
    max_distance: usize,
) -> String {
    if lexicon.contains(misspelled) {
        return misspelled.to_string();
    }
    let suggestions = lexicon.suggest(misspelled, max_distance);
    match suggestions.as_slice() {
        [] => misspelled.to_string(),
        [only] => only.word.clone(),
        many => many
            .iter()
            .find(|s| s.word != original)
            .expect("distinct ranked words cannot all equal the original")
            .word
            .clone(),
    }
}

/// Replace a misspelled token with the top suggestion, original or not.
pub fn best_suggestion(misspelled: &str, lexicon: &Lexicon, max_distance: usize) -> String {
    if lexicon.contains(misspelled) {
        return misspelled.to_string();
    }
    lexicon
        .suggest(misspelled, max_distance)
        .first()
        .map(|s| s.word.clone())
        .unwrap_or_else(|| misspelled.to_string())
}

/// Collapse a possibly multi-word suggestion to a single word: the longest
/// part wins, ties go to the later part.
pub fn resolve_split(suggestion: &str) -> Result<String> {
    let mut best: Option<&str> = None;
    for part in suggestion.split_whitespace() {
        let longer = match best {
            None => true,
            Some(b) => part.chars().count() >= b.chars().count(),
        };
        if longer {
            best = Some(part);
        }
    }
    best.map(str::to_string).ok_or(Error::EmptySuggestion)
}
