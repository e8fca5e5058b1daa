//! Summary measurements: category mix, per-character error frequencies, the
//! substitution matrix, corrupted-word rate and corpus BLEU.

use std::collections::{BTreeMap, HashMap};

use crate::align::{Category, ErrorCounts};
use crate::dataset::LabeledDocument;
use crate::error::{Error, Result};
use crate::generate::EditLog;

/// The figure-style tables derived from error counts, plus the word-level
/// corruption rate when corpora are available.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub alphabet: Vec<char>,
    /// Proportion of classified edits per category; sums to 1.
    pub category_distribution: BTreeMap<Category, f64>,
    /// Proportion of substitution events per replaced character.
    pub substitution_freq: BTreeMap<char, f64>,
    /// Proportion of insertion events per inserted character.
    pub insertion_freq: BTreeMap<char, f64>,
    /// Proportion of deletion events per deleted character.
    pub deletion_freq: BTreeMap<char, f64>,
    /// P(replacement | original), rows normalized where defined.
    pub substitution_matrix: BTreeMap<char, BTreeMap<char, f64>>,
    pub corrupted_word_rate: Option<f64>,
}

fn proportions(counts: BTreeMap<char, u64>) -> BTreeMap<char, f64> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return BTreeMap::new();
    }
    counts
        .into_iter()
        .filter(|(_, n)| *n > 0)
        .map(|(c, n)| (c, n as f64 / total as f64))
        .collect()
}

impl StatsReport {
    pub fn from_counts(counts: &ErrorCounts, alphabet: &[char]) -> Result<StatsReport> {
        let category_distribution = category_distribution_from_totals(counts.category_totals())?;

        let substitution_freq = proportions(
            counts
                .substitution
                .iter()
                .map(|(&c, row)| (c, row.values().sum()))
                .collect(),
        );
        let deletion_freq = proportions(counts.deletion.clone());
        let mut inserted: BTreeMap<char, u64> = BTreeMap::new();
        for table in [&counts.insertion_before, &counts.insertion_after] {
            for row in table.values() {
                for (&c, &n) in row {
                    *inserted.entry(c).or_insert(0) += n;
                }
            }
        }
        let insertion_freq = proportions(inserted);

        let mut substitution_matrix = BTreeMap::new();
        for (&c, row) in &counts.substitution {
            let total: u64 = row.values().sum();
            if total == 0 {
                continue;
            }
            substitution_matrix.insert(
                c,
                row.iter()
                    .map(|(&r, &n)| (r, n as f64 / total as f64))
                    .collect(),
            );
        }

        Ok(StatsReport {
            alphabet: alphabet.to_vec(),
            category_distribution,
            substitution_freq,
            insertion_freq,
            deletion_freq,
            substitution_matrix,
            corrupted_word_rate: None,
        })
    }
}

fn category_distribution_from_totals(
    totals: BTreeMap<Category, u64>,
) -> Result<BTreeMap<Category, f64>> {
    let total: u64 = totals.values().sum();
    if total == 0 {
        return Err(Error::NoEdits);
    }
    Ok(Category::ALL
        .iter()
        .map(|&cat| {
            let n = totals.get(&cat).copied().unwrap_or(0);
            (cat, n as f64 / total as f64)
        })
        .collect())
}

/// Normalize a collection of edits into per-category proportions.
pub fn category_distribution(
    edits: impl IntoIterator<Item = Category>,
) -> Result<BTreeMap<Category, f64>> {
    let mut totals: BTreeMap<Category, u64> = BTreeMap::new();
    for category in edits {
        *totals.entry(category).or_insert(0) += 1;
    }
    category_distribution_from_totals(totals)
}

/// Fraction of token positions whose surface differs from the original.
pub fn corrupted_word_rate(
    references: &[Vec<String>],
    candidates: &[Vec<String>],
) -> Result<f64> {
    if references.len() != candidates.len() {
        return Err(Error::CorpusLengthMismatch {
            references: references.len(),
            candidates: candidates.len(),
        });
    }
    let mut positions = 0u64;
    let mut changed = 0u64;
    for (doc, (r, c)) in references.iter().zip(candidates).enumerate() {
        if r.len() != c.len() {
            return Err(Error::TokenCountMismatch {
                doc,
                original: r.len(),
                r#final: c.len(),
            });
        }
        positions += r.len() as u64;
        changed += r.iter().zip(c).filter(|(a, b)| a != b).count() as u64;
    }
    if positions == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(changed as f64 / positions as f64)
}

/// Fraction of positively labeled tokens; equals [`corrupted_word_rate`] of
/// the corpora the documents were emitted from.
pub fn positive_label_fraction(documents: &[LabeledDocument]) -> f64 {
    let total: usize = documents.iter().map(|d| d.tokens.len()).sum();
    if total == 0 {
        return 0.0;
    }
    let positives: usize = documents.iter().map(LabeledDocument::positives).sum();
    positives as f64 / total as f64
}

/// Observed character error rate of a corruption run: applied edits per
/// character that received a sampling draw.
pub fn char_error_rate(logs: &[EditLog]) -> f64 {
    let considered: u64 = logs.iter().map(|l| l.considered_chars).sum();
    if considered == 0 {
        return 0.0;
    }
    let edits: usize = logs.iter().map(EditLog::len).sum();
    edits as f64 / considered as f64
}

/// Corpus-level BLEU: geometric mean of modified n-gram precisions for
/// n = 1..=max_n with a brevity penalty, aggregated over the whole corpus.
/// No smoothing: a zero precision at any order gives 0.
pub fn corpus_bleu(
    references: &[Vec<String>],
    candidates: &[Vec<String>],
    max_n: usize,
) -> Result<f64> {
    if references.len() != candidates.len() {
        return Err(Error::CorpusLengthMismatch {
            references: references.len(),
            candidates: candidates.len(),
        });
    }
    if references.is_empty() || max_n == 0 {
        return Err(Error::EmptyCorpus);
    }
    let ref_len: u64 = references.iter().map(|d| d.len() as u64).sum();
    let cand_len: u64 = candidates.iter().map(|d| d.len() as u64).sum();
    if ref_len == 0 || cand_len == 0 {
        return Err(Error::EmptyCorpus);
    }

    let mut log_precision_sum = 0.0;
    for n in 1..=max_n {
        let mut clipped = 0u64;
        let mut total = 0u64;
        for (r, c) in references.iter().zip(candidates) {
            if c.len() < n {
                continue;
            }
            total += (c.len() - n + 1) as u64;
            let mut ref_grams: HashMap<&[String], u64> = HashMap::new();
            for gram in r.windows(n) {
                *ref_grams.entry(gram).or_insert(0) += 1;
            }
            for gram in c.windows(n) {
                if let Some(remaining) = ref_grams.get_mut(gram) {
                    if *remaining > 0 {
                        *remaining -= 1;
                        clipped += 1;
                    }
                }
            }
        }
        if clipped == 0 || total == 0 {
            return Ok(0.0);
        }
        log_precision_sum += (clipped as f64 / total as f64).ln();
    }

    let brevity_penalty = if cand_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    Ok(brevity_penalty * (log_precision_sum / max_n as f64).exp())
}

/// Render the report as one CSV per figure, keyed by file name.
pub fn export_tables(report: &StatsReport) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();

    let mut categories = String::from("category,proportion\n");
    for cat in Category::ALL {
        let p = report.category_distribution.get(&cat).copied().unwrap_or(0.0);
        categories.push_str(&format!("{cat},{p}\n"));
    }
    files.insert("category_distribution.csv".to_string(), categories);

    for (name, table) in [
        ("substitution_freq.csv", &report.substitution_freq),
        ("insertion_freq.csv", &report.insertion_freq),
        ("deletion_freq.csv", &report.deletion_freq),
    ] {
        let mut csv = String::from("char,proportion\n");
        for &c in &report.alphabet {
            let p = table.get(&c).copied().unwrap_or(0.0);
            csv.push_str(&format!("{c},{p}\n"));
        }
        files.insert(name.to_string(), csv);
    }

    let mut matrix = String::from("original");
    for &c in &report.alphabet {
        matrix.push_str(&format!(",{c}"));
    }
    matrix.push('\n');
    for &c in &report.alphabet {
        matrix.push_str(&c.to_string());
        let row = report.substitution_matrix.get(&c);
        for &r in &report.alphabet {
            let p = row.and_then(|m| m.get(&r)).copied().unwrap_or(0.0);
            matrix.push_str(&format!(",{p}"));
        }
        matrix.push('\n');
    }
    files.insert("substitution_matrix.csv".to_string(), matrix);

    if let Some(rate) = report.corrupted_word_rate {
        files.insert(
            "corrupted_word_rate.csv".to_string(),
            format!("metric,value\ncorrupted_word_rate,{rate}\n"),
        );
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{accumulate_counts, AlignmentOptions, TypoPair};
    use crate::dataset::emit;
    use crate::keyboard::KeyboardLayout;

    fn docs(texts: &[&str]) -> Vec<Vec<String>> {
        texts
            .iter()
            .map(|t| t.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn toy_distribution_normalizes() {
        let dist = category_distribution([
            Category::Substitution,
            Category::Substitution,
            Category::Deletion,
            Category::Insertion,
        ])
        .unwrap();
        assert_eq!(dist[&Category::Substitution], 0.5);
        assert_eq!(dist[&Category::Insertion], 0.25);
        assert_eq!(dist[&Category::Replication], 0.0);
        assert_eq!(dist[&Category::Deletion], 0.25);
        assert_eq!(dist[&Category::Transposition], 0.0);
    }

    #[test]
    fn a_single_transposition_is_the_whole_distribution() {
        let dist = category_distribution([Category::Transposition]).unwrap();
        assert_eq!(dist[&Category::Transposition], 1.0);
        assert_eq!(dist[&Category::Substitution], 0.0);
    }

    #[test]
    fn empty_edit_collections_are_an_error() {
        assert!(matches!(category_distribution([]), Err(Error::NoEdits)));
    }

    #[test]
    fn corrupted_word_rate_counts_changed_positions() {
        let refs = docs(&["the cat sat", "a dog"]);
        assert_eq!(corrupted_word_rate(&refs, &refs).unwrap(), 0.0);
        let cands = docs(&["the cta sat", "a dog"]);
        assert_eq!(corrupted_word_rate(&refs, &cands).unwrap(), 0.2);
    }

    #[test]
    fn rate_rejects_misaligned_corpora() {
        let refs = docs(&["a b"]);
        assert!(matches!(
            corrupted_word_rate(&refs, &docs(&["a"])),
            Err(Error::TokenCountMismatch { .. })
        ));
        assert!(matches!(
            corrupted_word_rate(&refs, &docs(&["a b", "c"])),
            Err(Error::CorpusLengthMismatch { .. })
        ));
    }

    #[test]
    fn rate_equals_positive_label_fraction() {
        let refs = docs(&["the cat sat on the mat", "a dog ran"]);
        let cands = docs(&["the cta sat on teh mat", "a dog rn"]);
        let labeled: Vec<_> = refs
            .iter()
            .zip(&cands)
            .enumerate()
            .map(|(i, (r, c))| emit(i, r, c, "<UNK>").unwrap())
            .collect();
        assert_eq!(
            corrupted_word_rate(&refs, &cands).unwrap(),
            positive_label_fraction(&labeled)
        );
    }

    #[test]
    fn bleu_of_identical_corpora_is_one() {
        let refs = docs(&["the cat sat on the mat today", "another fine day here"]);
        assert_eq!(corpus_bleu(&refs, &refs, 4).unwrap(), 1.0);
    }

    #[test]
    fn bleu_with_no_four_gram_matches_is_zero() {
        let refs = docs(&["a b c d e"]);
        let cands = docs(&["a b x d e"]);
        // the substitution in the middle kills every 3-gram and 4-gram
        assert_eq!(corpus_bleu(&refs, &cands, 4).unwrap(), 0.0);
    }

    #[test]
    fn bleu_matches_a_hand_computed_value() {
        let refs = docs(&["a b c d e f"]);
        let cands = docs(&["a b c d f e"]);
        // p1 = 1, p2 = 3/5, p3 = 2/4, p4 = 1/3, BP = 1
        let expected = (0.6f64 * 0.5 * (1.0 / 3.0)).powf(0.25);
        let got = corpus_bleu(&refs, &cands, 4).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn brevity_penalty_punishes_short_candidates() {
        let refs = docs(&["a b c d"]);
        let cands = docs(&["a b c"]);
        let got = corpus_bleu(&refs, &cands, 2).unwrap();
        let expected = (1.0f64 - 4.0 / 3.0).exp();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn bleu_ignores_consistent_document_reordering() {
        let refs = docs(&["the cat sat on a mat", "dogs bark at night loudly"]);
        let cands = docs(&["the cat sta on a mat", "dogs brak at night loudly"]);
        let forward = corpus_bleu(&refs, &cands, 4).unwrap();
        let refs_rev: Vec<_> = refs.iter().rev().cloned().collect();
        let cands_rev: Vec<_> = cands.iter().rev().cloned().collect();
        assert_eq!(forward, corpus_bleu(&refs_rev, &cands_rev, 4).unwrap());
    }

    #[test]
    fn bleu_rejects_empty_or_mismatched_corpora() {
        assert!(matches!(corpus_bleu(&[], &[], 4), Err(Error::EmptyCorpus)));
        assert!(matches!(
            corpus_bleu(&docs(&["a"]), &[], 4),
            Err(Error::CorpusLengthMismatch { .. })
        ));
    }

    #[test]
    fn clipping_limits_repeated_candidate_grams() {
        let refs = docs(&["the cat"]);
        let cands = docs(&["the the the"]);
        // clipped unigram matches: min(3, 1) = 1 of 3
        let got = corpus_bleu(&refs, &cands, 1).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-12);
    }

    fn toy_report() -> StatsReport {
        let pairs: Vec<TypoPair> = [("cst", "cat"), ("caat", "cat"), ("teh", "the"), ("spel", "spell")]
            .iter()
            .map(|&(t, c)| TypoPair { typo: t.into(), correct: c.into() })
            .collect();
        let (counts, _) =
            accumulate_counts(&pairs, &KeyboardLayout::qwerty(), &AlignmentOptions::default())
                .unwrap();
        StatsReport::from_counts(&counts, &['a', 'c', 'e', 'h', 'l', 's', 't']).unwrap()
    }

    #[test]
    fn report_proportions_sum_to_one() {
        let report = toy_report();
        let total: f64 = report.category_distribution.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
        for table in [
            &report.substitution_freq,
            &report.deletion_freq,
        ] {
            let sum: f64 = table.values().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
        for row in report.substitution_matrix.values() {
            let sum: f64 = row.values().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exported_matrix_rows_sum_to_one() {
        let report = toy_report();
        let files = export_tables(&report);
        let matrix = &files["substitution_matrix.csv"];
        for line in matrix.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            let sum: f64 = cells[1..].iter().map(|v| v.parse::<f64>().unwrap()).sum();
            assert!(
                sum == 0.0 || (sum - 1.0).abs() < 1e-6,
                "row {} sums to {sum}",
                cells[0]
            );
        }
        assert!(files.contains_key("category_distribution.csv"));
        assert!(files.contains_key("insertion_freq.csv"));
    }

    #[test]
    fn empty_alphabet_exports_header_only_tables() {
        let mut report = toy_report();
        report.alphabet.clear();
        let files = export_tables(&report);
        assert_eq!(files["substitution_freq.csv"], "char,proportion\n");
        assert_eq!(files["substitution_matrix.csv"], "original\n");
    }
}
