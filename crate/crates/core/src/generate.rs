//! Character-level error generation over clean text.
//!
//! Typing proceeds character by character. At every in-alphabet character the
//! five error categories are shuffled and laid out as segments of a single
//! uniform draw, so each category fires with exactly its weighted probability
//! and at most one error lands on any character. A fired transposition also
//! consumes the following character; both halves of the swapped pair are then
//! exempt from further errors. Non-alphabet characters are copied verbatim.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::align::{apply_edit_script, Category, ClassifiedEdit, EditKind, InsertionSide};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::model::{Coefficients, NoiseModel};
use crate::rng::document_rng;
use crate::suggest::Lexicon;

/// Knobs for one corruption run.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub coefficients: Coefficients,
    pub seed: u64,
    /// Token emitted when corruption erases a word entirely.
    pub placeholder: String,
}

pub const DEFAULT_PLACEHOLDER: &str = "<UNK>";

impl GenerationConfig {
    pub fn new(coefficients: Coefficients, seed: u64) -> Self {
        Self {
            coefficients,
            seed,
            placeholder: DEFAULT_PLACEHOLDER.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for category in Category::ALL {
            let w = self.coefficients.weight(category);
            if !(w >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{category} coefficient {w} must be non-negative"
                )));
            }
        }
        if self.placeholder.is_empty() {
            return Err(Error::InvalidConfig("placeholder token is empty".into()));
        }
        if self.placeholder.chars().any(char::is_whitespace) {
            return Err(Error::InvalidConfig(
                "placeholder token contains whitespace".into(),
            ));
        }
        Ok(())
    }
}

/// One applied edit: which token it hit and where inside that token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppliedEdit {
    pub token: usize,
    pub edit: ClassifiedEdit,
}

/// Everything that happened to one document, in application order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditLog {
    pub edits: Vec<AppliedEdit>,
    /// In-alphabet characters that received a sampling draw (transposition
    /// partners are consumed without one).
    pub considered_chars: u64,
}

impl EditLog {
    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    /// Re-apply the log to the clean tokens; reproduces the corrupted tokens
    /// exactly.
    pub fn replay(&self, tokens: &[&str]) -> Vec<String> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut edits = self.edits.iter().peekable();
        for (ti, token) in tokens.iter().enumerate() {
            let mut script = Vec::new();
            while let Some(applied) = edits.peek() {
                if applied.token != ti {
                    break;
                }
                script.push(applied.edit);
                edits.next();
            }
            out.push(apply_edit_script(token, &script));
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Event {
    Substitute,
    InsertBefore,
    InsertAfter,
    Replicate,
    Delete,
    Transpose,
}

fn sample_choice<R: Rng + ?Sized>(row: &[(char, f64)], rng: &mut R) -> Option<char> {
    if row.is_empty() {
        return None;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(c, p) in row {
        acc += p;
        if u < acc {
            return Some(c);
        }
    }
    Some(row[row.len() - 1].0)
}

/// Corrupt one whitespace-tokenized document with a caller-supplied stream.
pub fn corrupt_tokens<R: Rng + ?Sized>(
    tokens: &[&str],
    model: &NoiseModel,
    config: &GenerationConfig,
    rng: &mut R,
) -> (Vec<String>, EditLog) {
    let alphabet = model.alphabet();
    let w = &config.coefficients;
    let mut log = EditLog::default();
    let mut overflow_warned = false;
    let mut out_tokens = Vec::with_capacity(tokens.len());

    for (ti, token) in tokens.iter().enumerate() {
        let chars: Vec<char> = token.chars().collect();
        let mut out = String::with_capacity(token.len() + 2);
        let mut i = 0usize;
        while i < chars.len() {
            let c = chars[i];
            if !alphabet.contains(c) {
                out.push(c);
                i += 1;
                continue;
            }
            log.considered_chars += 1;
            let next = chars
                .get(i + 1)
                .copied()
                .filter(|&d| alphabet.contains(d));

            let mut order = Category::ALL;
            order.shuffle(rng);
            // lay the (up to six) weighted events out in shuffled category
            // order as segments of one uniform draw
            let mut segments = [(Event::Substitute, 0.0); 6];
            let mut count = 0;
            for category in order {
                match category {
                    Category::Substitution => {
                        segments[count] = (Event::Substitute, w.substitution * model.p_sub(c));
                        count += 1;
                    }
                    Category::Insertion => {
                        segments[count] =
                            (Event::InsertBefore, w.insertion * model.p_ins_before(c));
                        segments[count + 1] =
                            (Event::InsertAfter, w.insertion * model.p_ins_after(c));
                        count += 2;
                    }
                    Category::Replication => {
                        segments[count] = (Event::Replicate, w.replication * model.p_repl(c));
                        count += 1;
                    }
                    Category::Deletion => {
                        segments[count] = (Event::Delete, w.deletion * model.p_del(c));
                        count += 1;
                    }
                    Category::Transposition => {
                        let p = next.map(|d| model.p_trans(c, d)).unwrap_or(0.0);
                        segments[count] = (Event::Transpose, w.transposition * p);
                        count += 1;
                    }
                }
            }
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut fired = None;
            for &(event, q) in &segments[..count] {
                if q <= 0.0 {
                    continue;
                }
                acc += q;
                if u < acc {
                    fired = Some(event);
                    break;
                }
            }
            if acc > 1.0 && !overflow_warned {
                log::warn!(
                    "per-character error mass {acc:.3} exceeds 1 at {c:?}; excess clamped"
                );
                overflow_warned = true;
            }

            let record = |kind: EditKind, position: usize, log: &mut EditLog| {
                log.edits.push(AppliedEdit {
                    token: ti,
                    edit: ClassifiedEdit { kind, position },
                });
            };
            match fired {
                Some(Event::Substitute) => match sample_choice(model.sub_pair_row(c), rng) {
                    Some(r) => {
                        out.push(r);
                        record(
                            EditKind::Substitution { original: c, replacement: r },
                            i,
                            &mut log,
                        );
                        i += 1;
                    }
                    None => {
                        out.push(c);
                        i += 1;
                    }
                },
                Some(Event::InsertBefore) => {
                    match sample_choice(model.ins_pair_before_row(c), rng) {
                        Some(x) => {
                            out.push(x);
                            out.push(c);
                            record(
                                EditKind::Insertion {
                                    inserted: x,
                                    anchor: c,
                                    side: InsertionSide::Before,
                                },
                                i,
                                &mut log,
                            );
                        }
                        None => out.push(c),
                    }
                    i += 1;
                }
                Some(Event::InsertAfter) => {
                    match sample_choice(model.ins_pair_after_row(c), rng) {
                        Some(x) => {
                            out.push(c);
                            out.push(x);
                            record(
                                EditKind::Insertion {
                                    inserted: x,
                                    anchor: c,
                                    side: InsertionSide::After,
                                },
                                i + 1,
                                &mut log,
                            );
                        }
                        None => out.push(c),
                    }
                    i += 1;
                }
                Some(Event::Replicate) => {
                    out.push(c);
                    out.push(c);
                    record(EditKind::Replication(c), i + 1, &mut log);
                    i += 1;
                }
                Some(Event::Delete) => {
                    record(EditKind::Deletion(c), i, &mut log);
                    i += 1;
                }
                Some(Event::Transpose) => {
                    let d = next.expect("transposition fired without a next character");
                    out.push(d);
                    out.push(c);
                    record(EditKind::Transposition { first: c, second: d }, i, &mut log);
                    i += 2;
                }
                None => {
                    out.push(c);
                    i += 1;
                }
            }
        }
        out_tokens.push(out);
    }
    (out_tokens, log)
}

/// Corrupt one document line with the stream derived from (seed, doc index),
/// so output depends only on (model, config, doc_index, text).
pub fn corrupt_document(
    text: &str,
    model: &NoiseModel,
    config: &GenerationConfig,
    doc_index: u64,
) -> (Vec<String>, EditLog) {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut rng = document_rng(config.seed, doc_index);
    corrupt_tokens(&tokens, model, config, &mut rng)
}

/// Why documents were dropped during cleaning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RejectionReport {
    pub kept: usize,
    pub rejected: usize,
    /// (document index in the input, first out-of-vocabulary token)
    pub offending: Vec<(usize, String)>,
}

/// Keep only documents whose alphabetic tokens are all in the vocabulary.
/// Tokens containing non-alphabet characters (numbers, punctuation) are not
/// checked.
pub fn clean_corpus(
    documents: &[String],
    lexicon: &Lexicon,
    alphabet: &Alphabet,
) -> (Vec<String>, RejectionReport) {
    let mut kept = Vec::new();
    let mut report = RejectionReport::default();
    for (idx, doc) in documents.iter().enumerate() {
        let oov = doc.split_whitespace().find(|token| {
            let lower = token.to_lowercase();
            !lower.is_empty() && alphabet.covers(&lower) && !lexicon.contains(&lower)
        });
        match oov {
            Some(token) => {
                report.rejected += 1;
                report.offending.push((idx, token.to_string()));
            }
            None => {
                report.kept += 1;
                kept.push(doc.clone());
            }
        }
    }
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{accumulate_counts, AlignmentOptions, TypoPair};
    use crate::keyboard::KeyboardLayout;

    fn model_for(pairs: &[(&str, &str)]) -> NoiseModel {
        let pairs: Vec<TypoPair> = pairs
            .iter()
            .map(|&(t, c)| TypoPair { typo: t.into(), correct: c.into() })
            .collect();
        let (counts, _) =
            accumulate_counts(&pairs, &KeyboardLayout::qwerty(), &AlignmentOptions::default())
                .unwrap();
        NoiseModel::induce(counts, Alphabet::ascii_lowercase())
    }

    fn config(coefficients: Coefficients) -> GenerationConfig {
        GenerationConfig::new(coefficients, 7)
    }

    #[test]
    fn zero_coefficients_are_the_identity() {
        let model = model_for(&[("cst", "cat"), ("teh", "the")]);
        let cfg = config(Coefficients::zero());
        let (tokens, log) = corrupt_document("the cat sat, ok?", &model, &cfg, 0);
        assert_eq!(tokens, vec!["the", "cat", "sat,", "ok?"]);
        assert!(log.is_empty());
        assert_eq!(log.considered_chars, 11); // the comma and question mark are skipped
    }

    #[test]
    fn certain_deletion_fires_every_time() {
        // counts from (ct, cat): f(a)=1, deletion(a)=1, so p_del('a') = 1
        let model = model_for(&[("ct", "cat")]);
        let cfg = config(Coefficients::default());
        let (tokens, log) = corrupt_document("cat", &model, &cfg, 0);
        assert_eq!(tokens, vec!["ct"]);
        assert_eq!(log.len(), 1);
        assert_eq!(log.edits[0].edit.kind, EditKind::Deletion('a'));
    }

    #[test]
    fn single_character_token_can_vanish() {
        let model = model_for(&[("x", "ax")]); // p_del('a') = 1
        let cfg = config(Coefficients::default());
        let (tokens, log) = corrupt_document("a", &model, &cfg, 0);
        assert_eq!(tokens, vec![""]);
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn certain_transposition_consumes_the_next_character() {
        let model = model_for(&[("teh", "the")]); // p_trans('h','e') = 1
        let cfg = config(Coefficients::default());
        let (tokens, log) = corrupt_document("the", &model, &cfg, 0);
        assert_eq!(tokens, vec!["teh"]);
        assert_eq!(log.len(), 1);
        assert_eq!(log.considered_chars, 2); // 'e' consumed without a draw
        assert_eq!(
            log.edits[0].edit.kind,
            EditKind::Transposition { first: 'h', second: 'e' }
        );
    }

    #[test]
    fn transposition_never_crosses_token_boundaries() {
        let model = model_for(&[("teh", "the")]);
        let cfg = config(Coefficients::default());
        // 'h' ends the first token, so the (h, e) bigram never forms
        let (tokens, log) = corrupt_document("th e", &model, &cfg, 0);
        assert_eq!(tokens, vec!["th", "e"]);
        assert!(log.is_empty());
    }

    #[test]
    fn replay_reproduces_corrupted_tokens() {
        let model = model_for(&[
            ("cst", "cat"),
            ("caat", "cat"),
            ("teh", "the"),
            ("spel", "spell"),
            ("xcat", "cat"),
        ]);
        let cfg = GenerationConfig::new(Coefficients::uniform(0.6), 99);
        for doc_index in 0..50u64 {
            let text = "the cat sat on the mat while another cat slept all day";
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let (corrupted, log) = corrupt_document(text, &model, &cfg, doc_index);
            assert_eq!(log.replay(&tokens), corrupted, "doc {doc_index}");
        }
    }

    #[test]
    fn output_is_deterministic_per_document_index() {
        let model = model_for(&[("cst", "cat"), ("teh", "the")]);
        let cfg = GenerationConfig::new(Coefficients::uniform(0.8), 1234);
        let text = "the cat sat on the mat";
        let (a, log_a) = corrupt_document(text, &model, &cfg, 3);
        let (b, log_b) = corrupt_document(text, &model, &cfg, 3);
        assert_eq!(a, b);
        assert_eq!(log_a, log_b);
    }

    #[test]
    fn marginal_rate_matches_the_segment_probability() {
        let model = model_for(&[("ct", "cat")]); // p_del('a') = 1
        let cfg = GenerationConfig::new(Coefficients::uniform(0.1), 5);
        let text = "a ".repeat(20_000);
        let (_, log) = corrupt_document(&text, &model, &cfg, 0);
        let rate = log.len() as f64 / log.considered_chars as f64;
        assert!((rate - 0.1).abs() < 0.01, "observed {rate}");
    }

    #[test]
    fn at_most_one_edit_per_character_position() {
        let model = model_for(&[("cst", "cat"), ("caat", "cat"), ("teh", "the")]);
        let cfg = GenerationConfig::new(Coefficients::uniform(1.0), 42);
        let text = "the cat that sat on a hat with a bat saw the rat";
        let (_, log) = corrupt_document(text, &model, &cfg, 0);
        // anchored character positions: insertions/replications sit on gaps,
        // so translate each edit to the character index it affects
        let mut seen = std::collections::HashSet::new();
        for applied in &log.edits {
            let positions: Vec<usize> = match applied.edit.kind {
                EditKind::Transposition { .. } => {
                    vec![applied.edit.position, applied.edit.position + 1]
                }
                EditKind::Insertion { side: InsertionSide::After, .. }
                | EditKind::Replication(_) => vec![applied.edit.position - 1],
                _ => vec![applied.edit.position],
            };
            for p in positions {
                assert!(
                    seen.insert((applied.token, p)),
                    "two edits on token {} position {p}",
                    applied.token
                );
            }
        }
    }

    #[test]
    fn validate_rejects_bad_configs() {
        let mut cfg = GenerationConfig::new(Coefficients::uniform(-1.0), 0);
        assert!(cfg.validate().is_err());
        cfg.coefficients = Coefficients::default();
        cfg.placeholder = String::new();
        assert!(cfg.validate().is_err());
        cfg.placeholder = "un k".into();
        assert!(cfg.validate().is_err());
        cfg.placeholder = DEFAULT_PLACEHOLDER.into();
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn clean_corpus_keeps_in_vocabulary_documents() {
        let lexicon = Lexicon::build(
            std::io::Cursor::new("the\t10\ncat\t5\nsat\t2\n"),
            &Alphabet::ascii_lowercase(),
        )
        .unwrap();
        let alphabet = Alphabet::ascii_lowercase();
        let docs = vec!["the cat sat".to_string(), "the qzx sat".to_string()];
        let (kept, report) = clean_corpus(&docs, &lexicon, &alphabet);
        assert_eq!(kept, vec!["the cat sat".to_string()]);
        assert_eq!(report.kept, 1);
        assert_eq!(report.rejected, 1);
        assert_eq!(report.offending, vec![(1, "qzx".to_string())]);
    }

    #[test]
    fn clean_corpus_of_nothing_is_empty() {
        let lexicon =
            Lexicon::build(std::io::Cursor::new("the\t1\n"), &Alphabet::ascii_lowercase())
                .unwrap();
        let (kept, report) = clean_corpus(&[], &lexicon, &Alphabet::ascii_lowercase());
        assert!(kept.is_empty());
        assert_eq!(report, RejectionReport::default());
    }

    #[test]
    fn unchecked_tokens_do_not_cause_rejection() {
        let lexicon =
            Lexicon::build(std::io::Cursor::new("the\t1\ncat\t1\n"), &Alphabet::ascii_lowercase())
                .unwrap();
        let alphabet = Alphabet::ascii_lowercase();
        let docs = vec!["the cat 123 !!".to_string()];
        let (kept, _) = clean_corpus(&docs, &lexicon, &alphabet);
        assert_eq!(kept.len(), 1);
    }
}
