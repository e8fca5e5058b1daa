//! End-to-end corruption: clean → rebase → calibrate → corrupt → confuse →
//! emit.
//!
//! Documents are processed in parallel but every per-document random stream
//! is derived from (seed, document index), so output bytes are identical for
//! any worker count, including sequential runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{emit, LabeledDocument};
use crate::error::{Error, Result};
use crate::generate::{
    clean_corpus, corrupt_document, EditLog, GenerationConfig, RejectionReport,
    DEFAULT_PLACEHOLDER,
};
use crate::model::{CharDistribution, Coefficients, NoiseModel};
use crate::suggest::{best_suggestion, enforce_confusion, Lexicon, DEFAULT_MAX_DISTANCE};

/// How corrupted out-of-vocabulary tokens are replaced by dictionary words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfusionMode {
    /// Highest-ranked suggestion that is not the original word.
    Enforced,
    /// Highest-ranked suggestion, original or not.
    BestSuggestion,
    /// Leave corrupted tokens as they are.
    Off,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Target character error rate in [0, 1).
    pub rate: f64,
    /// Multiplied onto the calibrated uniform coefficient, per category.
    pub coefficient_overrides: Coefficients,
    pub seed: u64,
    pub placeholder: String,
    pub confusion: ConfusionMode,
    pub max_suggest_distance: usize,
    /// Worker threads; `None` uses the global default.
    pub workers: Option<usize>,
}

impl PipelineOptions {
    pub fn new(rate: f64, seed: u64) -> Self {
        Self {
            rate,
            coefficient_overrides: Coefficients::default(),
            seed,
            placeholder: DEFAULT_PLACEHOLDER.to_string(),
            confusion: ConfusionMode::Enforced,
            max_suggest_distance: DEFAULT_MAX_DISTANCE,
            workers: None,
        }
    }
}

/// Everything produced for one kept document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentResult {
    pub original_tokens: Vec<String>,
    /// Raw corruption output; may contain empty or out-of-vocabulary tokens.
    pub corrupted_tokens: Vec<String>,
    /// After confusion; still may contain empty tokens (placeholder is
    /// applied at labeling time).
    pub final_tokens: Vec<String>,
    pub log: EditLog,
    pub labeled: LabeledDocument,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub rejection: RejectionReport,
    /// Effective per-category coefficients after calibration and overrides.
    pub coefficients: Coefficients,
    /// The model actually sampled from (rebased onto the cleaned corpus).
    pub model: NoiseModel,
    pub documents: Vec<DocumentResult>,
}

impl PipelineOutput {
    pub fn labeled_documents(&self) -> Vec<LabeledDocument> {
        self.documents.iter().map(|d| d.labeled.clone()).collect()
    }

    pub fn edit_logs(&self) -> Vec<EditLog> {
        self.documents.iter().map(|d| d.log.clone()).collect()
    }

    /// Emitted surfaces per document (placeholders already substituted).
    pub fn surface_documents(&self) -> Vec<Vec<String>> {
        self.documents
            .iter()
            .map(|d| d.labeled.tokens.iter().map(|t| t.surface.clone()).collect())
            .collect()
    }

    pub fn original_documents(&self) -> Vec<Vec<String>> {
        self.documents.iter().map(|d| d.original_tokens.clone()).collect()
    }
}

fn confuse_token(
    corrupted: &str,
    original: &str,
    lexicon: &Lexicon,
    options: &PipelineOptions,
    alphabet_ok: bool,
) -> String {
    if corrupted == original || corrupted.is_empty() || !alphabet_ok {
        return corrupted.to_string();
    }
    match options.confusion {
        ConfusionMode::Off => corrupted.to_string(),
        ConfusionMode::Enforced => {
            enforce_confusion(corrupted, original, lexicon, options.max_suggest_distance)
        }
        ConfusionMode::BestSuggestion => {
            best_suggestion(corrupted, lexicon, options.max_suggest_distance)
        }
    }
}

/// Run the whole pipeline over one corpus (one document per entry).
pub fn run(
    model: &NoiseModel,
    documents: &[String],
    lexicon: &Lexicon,
    options: &PipelineOptions,
) -> Result<PipelineOutput> {
    let (cleaned, rejection) = clean_corpus(documents, lexicon, model.alphabet());
    if cleaned.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let target =
        CharDistribution::from_documents(cleaned.iter().map(String::as_str), model.alphabet());
    let rebased = model.rebase_frequencies(&target)?;
    let coefficients = rebased
        .calibrate(&target, options.rate)?
        .scaled(&options.coefficient_overrides);
    let config = GenerationConfig {
        coefficients,
        seed: options.seed,
        placeholder: options.placeholder.clone(),
    };
    config.validate()?;

    let process = |(idx, doc): (usize, &String)| -> Result<DocumentResult> {
        let original_tokens: Vec<String> =
            doc.split_whitespace().map(str::to_string).collect();
        let (corrupted_tokens, log) = corrupt_document(doc, &rebased, &config, idx as u64);
        let final_tokens: Vec<String> = corrupted_tokens
            .iter()
            .zip(&original_tokens)
            .map(|(corrupted, original)| {
                let alphabet_ok = rebased.alphabet().covers(corrupted);
                confuse_token(corrupted, original, lexicon, options, alphabet_ok)
            })
            .collect();
        let labeled = emit(idx, &original_tokens, &final_tokens, &config.placeholder)?;
        Ok(DocumentResult {
            original_tokens,
            corrupted_tokens,
            final_tokens,
            log,
            labeled,
        })
    };

    let results: Result<Vec<DocumentResult>> = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(|| cleaned.par_iter().enumerate().map(process).collect()),
        None => cleaned.par_iter().enumerate().map(process).collect(),
    };

    Ok(PipelineOutput {
        rejection,
        coefficients: config.coefficients,
        model: rebased,
        documents: results?,
    })
}

/// Render all applied edits as `doc<TAB>token<TAB>char<TAB>category<TAB>args`
/// lines for audit.
pub fn render_edit_log(documents: &[DocumentResult]) -> String {
    use crate::align::{EditKind, InsertionSide};
    let mut out = String::new();
    for (doc, result) in documents.iter().enumerate() {
        for applied in &result.log.edits {
            let edit = applied.edit;
            let (category, args) = match edit.kind {
                EditKind::Substitution { original, replacement } => {
                    ("substitution", format!("{original},{replacement}"))
                }
                EditKind::Insertion { inserted, anchor, side } => (
                    "insertion",
                    format!(
                        "{inserted},{anchor},{}",
                        match side {
                            InsertionSide::Before => "before",
                            InsertionSide::After => "after",
                        }
                    ),
                ),
                EditKind::Replication(c) => ("replication", c.to_string()),
                EditKind::Deletion(c) => ("deletion", c.to_string()),
                EditKind::Transposition { first, second } => {
                    ("transposition", format!("{first},{second}"))
                }
            };
            out.push_str(&format!(
                "{doc}\t{}\t{}\t{category}\t{args}\n",
                applied.token, edit.position
            ));
        }
    }
    out
}
