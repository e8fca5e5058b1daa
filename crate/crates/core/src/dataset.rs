//! Token-aligned labeled dataset emission and (de)serialization.
//!
//! Every output document carries exactly as many tokens as its clean
//! original. A token whose corruption erased it entirely is emitted as the
//! placeholder. Labels describe the emitted surface: 1 iff it differs from
//! the ground-truth word.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledToken {
    pub surface: String,
    pub original: String,
    pub label: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledDocument {
    pub tokens: Vec<LabeledToken>,
}

impl LabeledDocument {
    pub fn positives(&self) -> usize {
        self.tokens.iter().filter(|t| t.label).count()
    }
}

/// Pair up original and final tokens, substituting the placeholder for
/// vanished tokens and labeling by surface difference.
pub fn emit(
    doc_index: usize,
    original: &[String],
    final_tokens: &[String],
    placeholder: &str,
) -> Result<LabeledDocument> {
    if original.len() != final_tokens.len() {
        return Err(Error::TokenCountMismatch {
            doc: doc_index,
            original: original.len(),
            r#final: final_tokens.len(),
        });
    }
    let tokens = original
        .iter()
        .zip(final_tokens)
        .map(|(orig, fin)| {
            let surface = if fin.is_empty() {
                placeholder.to_string()
            } else {
                fin.clone()
            };
            let label = surface != *orig;
            LabeledToken { surface, original: orig.clone(), label }
        })
        .collect();
    Ok(LabeledDocument { tokens })
}

pub const DATASET_SCHEMA: &str = "labeled-tokens";
pub const DATASET_FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    schema: String,
    version: u64,
}

#[derive(Serialize, Deserialize)]
struct Record {
    surfaces: Vec<String>,
    originals: Vec<String>,
    labels: Vec<u8>,
}

/// Write a schema header line followed by one record per document, each a
/// single line with three parallel arrays.
pub fn serialize(documents: &[LabeledDocument], mut writer: impl Write) -> Result<()> {
    let header = Header {
        schema: DATASET_SCHEMA.to_string(),
        version: DATASET_FORMAT_VERSION,
    };
    writeln!(writer, "{}", serde_json::to_string(&header).expect("header serializes"))?;
    for doc in documents {
        let record = Record {
            surfaces: doc.tokens.iter().map(|t| t.surface.clone()).collect(),
            originals: doc.tokens.iter().map(|t| t.original.clone()).collect(),
            labels: doc.tokens.iter().map(|t| u8::from(t.label)).collect(),
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| Error::MalformedRecord { line: 0, reason: e.to_string() })?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

pub fn deserialize(reader: impl BufRead) -> Result<Vec<LabeledDocument>> {
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::MalformedRecord { line: 1, reason: "missing header".into() })?;
    let header: Header = serde_json::from_str(&header_line)
        .map_err(|e| Error::MalformedRecord { line: 1, reason: e.to_string() })?;
    if header.schema != DATASET_SCHEMA {
        return Err(Error::MalformedRecord {
            line: 1,
            reason: format!("unknown schema {:?}", header.schema),
        });
    }
    if header.version != DATASET_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: header.version,
            expected: DATASET_FORMAT_VERSION,
        });
    }

    let mut documents = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line)
            .map_err(|e| Error::MalformedRecord { line: lineno, reason: e.to_string() })?;
        if record.surfaces.len() != record.originals.len()
            || record.surfaces.len() != record.labels.len()
        {
            return Err(Error::MalformedRecord {
                line: lineno,
                reason: format!(
                    "parallel arrays differ in length ({}/{}/{})",
                    record.surfaces.len(),
                    record.originals.len(),
                    record.labels.len()
                ),
            });
        }
        if let Some(bad) = record.labels.iter().find(|&&l| l > 1) {
            return Err(Error::MalformedRecord {
                line: lineno,
                reason: format!("label {bad} is not binary"),
            });
        }
        let tokens = record
            .surfaces
            .into_iter()
            .zip(record.originals)
            .zip(record.labels)
            .map(|((surface, original), label)| LabeledToken {
                surface,
                original,
                label: label == 1,
            })
            .collect();
        documents.push(LabeledDocument { tokens });
    }
    Ok(documents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn strings(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn labels_mark_changed_surfaces() {
        let doc = emit(0, &strings(&["the", "cat"]), &strings(&["the", "cta"]), "<UNK>").unwrap();
        let labels: Vec<bool> = doc.tokens.iter().map(|t| t.label).collect();
        assert_eq!(labels, vec![false, true]);
        assert_eq!(doc.positives(), 1);
    }

    #[test]
    fn vanished_tokens_become_the_placeholder() {
        let doc = emit(0, &strings(&["a"]), &strings(&[""]), "<UNK>").unwrap();
        assert_eq!(doc.tokens[0].surface, "<UNK>");
        assert_eq!(doc.tokens[0].original, "a");
        assert!(doc.tokens[0].label);
    }

    #[test]
    fn confused_tokens_keep_the_ground_truth() {
        let doc = emit(0, &strings(&["her"]), &strings(&["herb"]), "<UNK>").unwrap();
        assert!(doc.tokens[0].label);
        assert_eq!(doc.tokens[0].original, "her");
        assert_eq!(doc.tokens[0].surface, "herb");
    }

    #[test]
    fn a_restored_token_gets_label_zero() {
        let doc = emit(0, &strings(&["the"]), &strings(&["the"]), "<UNK>").unwrap();
        assert!(!doc.tokens[0].label);
    }

    #[test]
    fn token_count_mismatch_is_an_upstream_bug() {
        let err = emit(3, &strings(&["a", "b"]), &strings(&["a"]), "<UNK>").unwrap_err();
        assert!(matches!(err, Error::TokenCountMismatch { doc: 3, .. }));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let mut rng = crate::rng::document_rng(11, 0);
        let words = ["the", "cat", "sat", "<UNK>", "qzx", ""];
        let documents: Vec<LabeledDocument> = (0..1000)
            .map(|i| {
                let len = rng.random_range(0..8usize);
                let original: Vec<String> = (0..len)
                    .map(|_| words[rng.random_range(0..4usize)].to_string())
                    .collect();
                let final_tokens: Vec<String> = original
                    .iter()
                    .map(|w| {
                        if rng.random::<f64>() < 0.3 {
                            words[rng.random_range(0..words.len())].to_string()
                        } else {
                            w.clone()
                        }
                    })
                    .collect();
                emit(i, &original, &final_tokens, "<UNK>").unwrap()
            })
            .collect();
        let mut first = Vec::new();
        serialize(&documents, &mut first).unwrap();
        let loaded = deserialize(first.as_slice()).unwrap();
        assert_eq!(loaded, documents);
        let mut second = Vec::new();
        serialize(&loaded, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn empty_documents_survive_the_round_trip() {
        let documents = vec![LabeledDocument::default()];
        let mut buf = Vec::new();
        serialize(&documents, &mut buf).unwrap();
        assert_eq!(deserialize(buf.as_slice()).unwrap(), documents);
    }

    #[test]
    fn unequal_parallel_arrays_are_rejected() {
        let text = format!(
            "{}\n{}\n",
            r#"{"schema":"labeled-tokens","version":1}"#,
            r#"{"surfaces":["a","b"],"originals":["a"],"labels":[0,0]}"#
        );
        let err = deserialize(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }));
    }

    #[test]
    fn non_binary_labels_are_rejected() {
        let text = format!(
            "{}\n{}\n",
            r#"{"schema":"labeled-tokens","version":1}"#,
            r#"{"surfaces":["a"],"originals":["a"],"labels":[2]}"#
        );
        assert!(matches!(
            deserialize(text.as_bytes()),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn future_version_is_rejected() {
        let text = r#"{"schema":"labeled-tokens","version":9}"#;
        assert!(matches!(
            deserialize(text.as_bytes()),
            Err(Error::UnsupportedVersion { found: 9, .. })
        ));
    }

    #[test]
    fn garbage_records_report_their_line() {
        let text = format!("{}\nnot json\n", r#"{"schema":"labeled-tokens","version":1}"#);
        let err = deserialize(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }));
    }
}
