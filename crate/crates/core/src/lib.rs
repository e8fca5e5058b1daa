//! Statistical modeling and generation of human typographical errors.
//!
//! The crate induces a character-level noise model from a small annotated
//! corpus of `typo<TAB>correct` word pairs, then applies that model to clean
//! text corpora of arbitrary size. The pipeline is:
//!
//! 1. [`align`] recovers a classified edit script (substitution, insertion,
//!    replication, deletion, transposition) from every annotated pair and
//!    tallies raw frequencies.
//! 2. [`model`] normalizes the counts into per-character event probabilities,
//!    rebases them onto the character distribution of a target corpus, and
//!    calibrates weighting coefficients to a requested overall error rate.
//! 3. [`generate`] walks clean text character by character, sampling at most
//!    one error per character, and records an exact edit log.
//! 4. [`suggest`] manufactures real-word errors by replacing misspelled
//!    tokens with ranked dictionary suggestions (confusion enforcement).
//! 5. [`dataset`] emits token-aligned records with binary labels and
//!    ground-truth words; [`stats`] reproduces the summary measurements
//!    (category mix, per-character tables, corrupted-word rate, corpus BLEU).
//!
//! All sampling is driven by explicit 64-bit seeds; identical inputs produce
//! byte-identical outputs regardless of worker count.

pub mod align;
pub mod alphabet;
pub mod dataset;
pub mod error;
pub mod generate;
pub mod keyboard;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod stats;
pub mod suggest;

pub use align::{Category, ClassifiedEdit, EditKind, ErrorCounts, TypoPair};
pub use alphabet::Alphabet;
pub use error::{Error, Result};
pub use generate::{EditLog, GenerationConfig};
pub use keyboard::KeyboardLayout;
pub use model::{CharDistribution, Coefficients, NoiseModel};
pub use suggest::{Lexicon, Suggestion};
