//! Edit-script recovery from annotated (typo, correct) word pairs.
//!
//! Each pair is aligned with a unit-cost Damerau-Levenshtein backtrace and
//! every alignment edit is classified into one of five categories:
//! substitution, insertion, replication, deletion, transposition. Replaying a
//! pair's script on the correct word reproduces the typo exactly, and the
//! accumulated [`ErrorCounts`] are the raw material the noise model is
//! normalized from.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::Result;
use crate::keyboard::{KeyboardLayout, Side};
use crate::rng::keyed_rng;

/// One annotated seed-corpus entry, normalized to the model alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypoPair {
    pub typo: String,
    pub correct: String,
}

/// The five error categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Substitution,
    Insertion,
    Replication,
    Deletion,
    Transposition,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Substitution,
        Category::Insertion,
        Category::Replication,
        Category::Deletion,
        Category::Transposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Substitution => "substitution",
            Category::Insertion => "insertion",
            Category::Replication => "replication",
            Category::Deletion => "deletion",
            Category::Transposition => "transposition",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which side of its anchor an inserted character lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InsertionSide {
    Before,
    After,
}

/// A single classified character edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Substitution { original: char, replacement: char },
    Insertion { inserted: char, anchor: char, side: InsertionSide },
    Replication(char),
    Deletion(char),
    Transposition { first: char, second: char },
}

impl EditKind {
    pub fn category(&self) -> Category {
        match self {
            EditKind::Substitution { .. } => Category::Substitution,
            EditKind::Insertion { .. } => Category::Insertion,
            EditKind::Replication(_) => Category::Replication,
            EditKind::Deletion(_) => Category::Deletion,
            EditKind::Transposition { .. } => Category::Transposition,
        }
    }
}

/// An edit anchored at a position of the correct word. Substitutions,
/// deletions and transpositions sit on a character index; insertions and
/// replications sit on the gap before that index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifiedEdit {
    pub kind: EditKind,
    pub position: usize,
}

/// Raw frequencies recovered from the seed corpus: character and bigram
/// occurrences over the correct side, plus one table per error family.
///
/// Pair tables are stored nested (`[anchor][other] -> count`), so family
/// totals per character are the row sums by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub char_freq: BTreeMap<char, u64>,
    pub bigram_freq: BTreeMap<char, BTreeMap<char, u64>>,
    pub substitution: BTreeMap<char, BTreeMap<char, u64>>,
    pub insertion_before: BTreeMap<char, BTreeMap<char, u64>>,
    pub insertion_after: BTreeMap<char, BTreeMap<char, u64>>,
    pub replication: BTreeMap<char, u64>,
    pub deletion: BTreeMap<char, u64>,
    pub transposition: BTreeMap<char, BTreeMap<char, u64>>,
}

fn row_sum(row: Option<&BTreeMap<char, u64>>) -> u64 {
    row.map(|r| r.values().sum()).unwrap_or(0)
}

fn table_sum(table: &BTreeMap<char, BTreeMap<char, u64>>) -> u64 {
    table.values().map(|r| r.values().sum::<u64>()).sum()
}

impl ErrorCounts {
    pub fn char_freq(&self, c: char) -> u64 {
        self.char_freq.get(&c).copied().unwrap_or(0)
    }

    pub fn bigram_freq(&self, c1: char, c2: char) -> u64 {
        self.bigram_freq
            .get(&c1)
            .and_then(|r| r.get(&c2))
            .copied()
            .unwrap_or(0)
    }

    /// How often `c` was replaced by some other character.
    pub fn substitution_total(&self, c: char) -> u64 {
        row_sum(self.substitution.get(&c))
    }

    /// How often some character was inserted adjacent to `c`, either side.
    pub fn insertion_total(&self, c: char) -> u64 {
        row_sum(self.insertion_before.get(&c)) + row_sum(self.insertion_after.get(&c))
    }

    pub fn replication_total(&self, c: char) -> u64 {
        self.replication.get(&c).copied().unwrap_or(0)
    }

    pub fn deletion_total(&self, c: char) -> u64 {
        self.deletion.get(&c).copied().unwrap_or(0)
    }

    /// Total classified edits per category.
    pub fn category_totals(&self) -> BTreeMap<Category, u64> {
        let mut totals = BTreeMap::new();
        totals.insert(Category::Substitution, table_sum(&self.substitution));
        totals.insert(
            Category::Insertion,
            table_sum(&self.insertion_before) + table_sum(&self.insertion_after),
        );
        totals.insert(Category::Replication, self.replication.values().sum());
        totals.insert(Category::Deletion, self.deletion.values().sum());
        totals.insert(Category::Transposition, table_sum(&self.transposition));
        totals
    }

    pub fn total_edits(&self) -> u64 {
        self.category_totals().values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_edits() == 0 && self.char_freq.values().all(|&n| n == 0)
    }

    fn record_word(&mut self, word: &str) {
        let chars: Vec<char> = word.chars().collect();
        for &c in &chars {
            *self.char_freq.entry(c).or_insert(0) += 1;
        }
        for pair in chars.windows(2) {
            *self
                .bigram_freq
                .entry(pair[0])
                .or_default()
                .entry(pair[1])
                .or_insert(0) += 1;
        }
    }

    fn record_edit(&mut self, edit: &ClassifiedEdit) {
        match edit.kind {
            EditKind::Substitution { original, replacement } => {
                *self
                    .substitution
                    .entry(original)
                    .or_default()
                    .entry(replacement)
                    .or_insert(0) += 1;
            }
            EditKind::Insertion { inserted, anchor, side } => {
                let table = match side {
                    InsertionSide::Before => &mut self.insertion_before,
                    InsertionSide::After => &mut self.insertion_after,
                };
                *table.entry(anchor).or_default().entry(inserted).or_insert(0) += 1;
            }
            EditKind::Replication(c) => {
                *self.replication.entry(c).or_insert(0) += 1;
            }
            EditKind::Deletion(c) => {
                *self.deletion.entry(c).or_insert(0) += 1;
            }
            EditKind::Transposition { first, second } => {
                *self
                    .transposition
                    .entry(first)
                    .or_default()
                    .entry(second)
                    .or_insert(0) += 1;
            }
        }
    }

    /// Associative merge, so counts can be accumulated in parallel partitions
    /// and still equal the sequential totals.
    pub fn merge(&mut self, other: &ErrorCounts) {
        fn merge_flat(into: &mut BTreeMap<char, u64>, from: &BTreeMap<char, u64>) {
            for (&c, &n) in from {
                *into.entry(c).or_insert(0) += n;
            }
        }
        fn merge_nested(
            into: &mut BTreeMap<char, BTreeMap<char, u64>>,
            from: &BTreeMap<char, BTreeMap<char, u64>>,
        ) {
            for (&c, row) in from {
                merge_flat(into.entry(c).or_default(), row);
            }
        }
        merge_flat(&mut self.char_freq, &other.char_freq);
        merge_nested(&mut self.bigram_freq, &other.bigram_freq);
        merge_nested(&mut self.substitution, &other.substitution);
        merge_nested(&mut self.insertion_before, &other.insertion_before);
        merge_nested(&mut self.insertion_after, &other.insertion_after);
        merge_flat(&mut self.replication, &other.replication);
        merge_flat(&mut self.deletion, &other.deletion);
        merge_nested(&mut self.transposition, &other.transposition);
    }

    /// Dump every counter as `category,args...,count` CSV lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (&c, &n) in &self.char_freq {
            out.push_str(&format!("char_freq,{c},{n}\n"));
        }
        let nested = [
            ("bigram_freq", &self.bigram_freq),
            ("substitution", &self.substitution),
            ("insertion_before", &self.insertion_before),
            ("insertion_after", &self.insertion_after),
            ("transposition", &self.transposition),
        ];
        for (name, table) in nested {
            for (&c1, row) in table {
                for (&c2, &n) in row {
                    out.push_str(&format!("{name},{c1},{c2},{n}\n"));
                }
            }
        }
        for (&c, &n) in &self.replication {
            out.push_str(&format!("replication,{c},{n}\n"));
        }
        for (&c, &n) in &self.deletion {
            out.push_str(&format!("deletion,{c},{n}\n"));
        }
        out
    }
}

/// Outcome of parsing a seed-corpus stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub parsed: usize,
    pub skipped: usize,
}

/// Read `typo<TAB>correct` lines, lowercasing both words and skipping any
/// line that is malformed or leaves the model alphabet after normalization.
pub fn parse_seed_corpus(
    reader: impl BufRead,
    alphabet: &Alphabet,
) -> Result<(Vec<TypoPair>, ParseReport)> {
    let mut pairs = Vec::new();
    let mut report = ParseReport::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (typo, correct) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(c), None) => (t.trim(), c.trim()),
            _ => {
                log::warn!("seed corpus line {}: expected `typo<TAB>correct`", lineno + 1);
                report.skipped += 1;
                continue;
            }
        };
        let typo = typo.to_lowercase();
        let correct = correct.to_lowercase();
        if typo.is_empty()
            || correct.is_empty()
            || !alphabet.covers(&typo)
            || !alphabet.covers(&correct)
        {
            log::warn!(
                "seed corpus line {}: pair {typo:?}/{correct:?} leaves the model alphabet",
                lineno + 1
            );
            report.skipped += 1;
            continue;
        }
        pairs.push(TypoPair { typo, correct });
        report.parsed += 1;
    }
    if pairs.is_empty() {
        log::warn!("seed corpus stream produced no usable pairs");
    }
    Ok((pairs, report))
}

// Backtrace moves, in preference order for equal-cost alignments.
#[derive(Clone, Copy, PartialEq)]
enum Move {
    Transpose,
    Diagonal, // match or substitution
    Delete,
    Insert,
}

/// Align a pair and classify every edit.
///
/// The alignment is a minimal-cost Damerau-Levenshtein backtrace (unit cost
/// for substitution, insertion, deletion and adjacent transposition) with the
/// fixed tie-break order transposition > substitution > deletion > insertion.
/// An insertion whose character equals an adjacent character of the typo is
/// reclassified as a replication; remaining insertions are attributed to the
/// nearer keyboard neighbor, with `rng` breaking exact distance ties.
///
/// Replaying the returned script on `pair.correct` with [`apply_edit_script`]
/// reproduces `pair.typo` exactly; identical words yield an empty script.
pub fn align_pair<R: Rng + ?Sized>(
    pair: &TypoPair,
    layout: &KeyboardLayout,
    rng: &mut R,
) -> Result<Vec<ClassifiedEdit>> {
    let correct: Vec<char> = pair.correct.chars().collect();
    let typo: Vec<char> = pair.typo.chars().collect();
    let n = correct.len();
    let m = typo.len();

    // d[i][j]: cost of turning correct[..i] into typo[..j]
    let mut d = vec![vec![0u32; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i as u32;
    }
    for j in 0..=m {
        d[0][j] = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = u32::from(correct[i - 1] != typo[j - 1]);
            let mut best = (d[i - 1][j - 1] + sub_cost)
                .min(d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1);
            if i >= 2
                && j >= 2
                && correct[i - 1] == typo[j - 2]
                && correct[i - 2] == typo[j - 1]
                && correct[i - 1] != correct[i - 2]
            {
                best = best.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }

    // Backtrace, collecting edits right to left.
    let mut edits: Vec<ClassifiedEdit> = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let cost = d[i][j];
        let mut chosen = None;
        for mv in [Move::Transpose, Move::Diagonal, Move::Delete, Move::Insert] {
            let ok = match mv {
                Move::Transpose => {
                    i >= 2
                        && j >= 2
                        && correct[i - 1] == typo[j - 2]
                        && correct[i - 2] == typo[j - 1]
                        && correct[i - 1] != correct[i - 2]
                        && cost == d[i - 2][j - 2] + 1
                }
                Move::Diagonal => {
                    i >= 1
                        && j >= 1
                        && cost == d[i - 1][j - 1] + u32::from(correct[i - 1] != typo[j - 1])
                }
                Move::Delete => i >= 1 && cost == d[i - 1][j] + 1,
                Move::Insert => j >= 1 && cost == d[i][j - 1] + 1,
            };
            if ok {
                chosen = Some(mv);
                break;
            }
        }
        match chosen.expect("edit-distance table admits a backtrace move") {
            Move::Transpose => {
                edits.push(ClassifiedEdit {
                    kind: EditKind::Transposition {
                        first: correct[i - 2],
                        second: correct[i - 1],
                    },
                    position: i - 2,
                });
                i -= 2;
                j -= 2;
            }
            Move::Diagonal => {
                if correct[i - 1] != typo[j - 1] {
                    edits.push(ClassifiedEdit {
                        kind: EditKind::Substitution {
                            original: correct[i - 1],
                            replacement: typo[j - 1],
                        },
                        position: i - 1,
                    });
                }
                i -= 1;
                j -= 1;
            }
            Move::Delete => {
                edits.push(ClassifiedEdit {
                    kind: EditKind::Deletion(correct[i - 1]),
                    position: i - 1,
                });
                i -= 1;
            }
            Move::Insert => {
                let inserted = typo[j - 1];
                let doubles_left = j >= 2 && typo[j - 2] == inserted;
                let doubles_right = j < m && typo[j] == inserted;
                let kind = if doubles_left || doubles_right {
                    EditKind::Replication(inserted)
                } else {
                    let left = (i >= 1).then(|| correct[i - 1]);
                    let right = (i < n).then(|| correct[i]);
                    match layout.attribute_insertion(left, inserted, right, rng)? {
                        Side::AttachLeft => EditKind::Insertion {
                            inserted,
                            anchor: correct[i - 1],
                            side: InsertionSide::After,
                        },
                        Side::AttachRight => EditKind::Insertion {
                            inserted,
                            anchor: correct[i],
                            side: InsertionSide::Before,
                        },
                    }
                };
                edits.push(ClassifiedEdit { kind, position: i });
                j -= 1;
            }
        }
    }
    edits.reverse();
    Ok(edits)
}

/// Unit-cost edit distance between two words, counting substitutions,
/// insertions, deletions and adjacent transpositions — the same alignment
/// family [`align_pair`] minimizes over.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![0u32; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i as u32;
    }
    for j in 0..=m {
        d[0][j] = j as u32;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = u32::from(a[i - 1] != b[j - 1]);
            let mut best = (d[i - 1][j - 1] + sub_cost)
                .min(d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1);
            if i >= 2 && j >= 2 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }
    d[n][m] as usize
}

/// Replay a classified edit script on the correct word.
pub fn apply_edit_script(correct: &str, script: &[ClassifiedEdit]) -> String {
    let chars: Vec<char> = correct.chars().collect();
    let mut out = String::with_capacity(correct.len() + script.len());
    let mut next = 0usize;
    for edit in script {
        while next < edit.position {
            out.push(chars[next]);
            next += 1;
        }
        match edit.kind {
            EditKind::Substitution { replacement, .. } => {
                out.push(replacement);
                next = edit.position + 1;
            }
            EditKind::Deletion(_) => {
                next = edit.position + 1;
            }
            EditKind::Insertion { inserted, .. } => out.push(inserted),
            EditKind::Replication(c) => out.push(c),
            EditKind::Transposition { first, second } => {
                out.push(second);
                out.push(first);
                next = edit.position + 2;
            }
        }
    }
    out.extend(&chars[next..]);
    out
}

/// Controls for accumulation over a parsed seed corpus.
#[derive(Debug, Clone)]
pub struct AlignmentOptions {
    /// Pairs whose minimal alignment needs more edits than this are discarded
    /// as annotation noise.
    pub max_edit_cost: usize,
}

impl Default for AlignmentOptions {
    fn default() -> Self {
        Self { max_edit_cost: 4 }
    }
}

/// Per-corpus accumulation outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentReport {
    pub accepted: usize,
    pub rejected: usize,
    pub total_edits: usize,
}

/// Align every pair and tally counts. Character and bigram frequencies are
/// taken over the correct side of accepted pairs; each classified edit
/// increments exactly one error-family counter.
///
/// Tie-breaking draws are keyed by the pair's own text, so the totals do not
/// depend on pair order or partitioning.
pub fn accumulate_counts(
    pairs: &[TypoPair],
    layout: &KeyboardLayout,
    options: &AlignmentOptions,
) -> Result<(ErrorCounts, AlignmentReport)> {
    let mut counts = ErrorCounts::default();
    let mut report = AlignmentReport::default();
    for pair in pairs {
        let mut rng = keyed_rng(&[&pair.typo, &pair.correct]);
        let script = align_pair(pair, layout, &mut rng)?;
        if script.len() > options.max_edit_cost {
            log::debug!(
                "discarding noisy pair {:?}/{:?} (edit cost {})",
                pair.typo,
                pair.correct,
                script.len()
            );
            report.rejected += 1;
            continue;
        }
        counts.record_word(&pair.correct);
        for edit in &script {
            counts.record_edit(edit);
        }
        report.accepted += 1;
        report.total_edits += script.len();
    }
    Ok((counts, report))
}
