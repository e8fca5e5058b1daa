//! Normalized noise model: per-character event probabilities, frequency
//! rebasing onto a target corpus, and rate calibration.
//!
//! Every event family is the ratio of its raw count to the frequency of the
//! conditioning character (or bigram, for transpositions). Conditional choice
//! tables — which character replaces `c`, which character gets inserted next
//! to `c` — are row-normalized over observed candidates and are unaffected by
//! rebasing, which only swaps the frequency denominators.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::align::{Category, ErrorCounts};
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Character and bigram occurrence counts of some corpus.
///
/// Bigrams are counted over directly adjacent in-alphabet characters inside a
/// token; a non-alphabet character or a token boundary breaks adjacency.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharDistribution {
    pub freq: BTreeMap<char, u64>,
    pub bigram_freq: BTreeMap<char, BTreeMap<char, u64>>,
}

impl CharDistribution {
    /// The distribution of the correct side of a seed corpus.
    pub fn from_counts(counts: &ErrorCounts) -> Self {
        Self {
            freq: counts.char_freq.clone(),
            bigram_freq: counts.bigram_freq.clone(),
        }
    }

    pub fn from_documents<'a>(
        documents: impl IntoIterator<Item = &'a str>,
        alphabet: &Alphabet,
    ) -> Self {
        let mut dist = Self::default();
        for doc in documents {
            dist.record_document(doc, alphabet);
        }
        dist
    }

    /// Count one whitespace-tokenized document.
    pub fn record_document(&mut self, text: &str, alphabet: &Alphabet) {
        for token in text.split_whitespace() {
            let chars: Vec<char> = token.chars().collect();
            for &c in chars.iter().filter(|c| alphabet.contains(**c)) {
                *self.freq.entry(c).or_insert(0) += 1;
            }
            for pair in chars.windows(2) {
                if alphabet.contains(pair[0]) && alphabet.contains(pair[1]) {
                    *self
                        .bigram_freq
                        .entry(pair[0])
                        .or_default()
                        .entry(pair[1])
                        .or_insert(0) += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &CharDistribution) {
        for (&c, &n) in &other.freq {
            *self.freq.entry(c).or_insert(0) += n;
        }
        for (&c1, row) in &other.bigram_freq {
            let into = self.bigram_freq.entry(c1).or_default();
            for (&c2, &n) in row {
                *into.entry(c2).or_insert(0) += n;
            }
        }
    }

    pub fn count(&self, c: char) -> u64 {
        self.freq.get(&c).copied().unwrap_or(0)
    }

    pub fn bigram_count(&self, c1: char, c2: char) -> u64 {
        self.bigram_freq
            .get(&c1)
            .and_then(|r| r.get(&c2))
            .copied()
            .unwrap_or(0)
    }

    pub fn total_chars(&self) -> u64 {
        self.freq.values().sum()
    }

    pub fn total_bigrams(&self) -> u64 {
        self.bigram_freq.values().map(|r| r.values().sum::<u64>()).sum()
    }

    /// Relative frequency of `c`; sums to 1 over the distribution.
    pub fn rel(&self, c: char) -> f64 {
        let total = self.total_chars();
        if total == 0 {
            0.0
        } else {
            self.count(c) as f64 / total as f64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.total_chars() == 0
    }
}

/// Which corpus the frequency denominators come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreqSource {
    Seed,
    Rebased,
}

/// Per-category weighting coefficients applied on top of induced
/// probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub substitution: f64,
    pub insertion: f64,
    pub replication: f64,
    pub deletion: f64,
    pub transposition: f64,
}

impl Coefficients {
    pub fn uniform(w: f64) -> Self {
        Self {
            substitution: w,
            insertion: w,
            replication: w,
            deletion: w,
            transposition: w,
        }
    }

    pub fn zero() -> Self {
        Self::uniform(0.0)
    }

    pub fn weight(&self, category: Category) -> f64 {
        match category {
            Category::Substitution => self.substitution,
            Category::Insertion => self.insertion,
            Category::Replication => self.replication,
            Category::Deletion => self.deletion,
            Category::Transposition => self.transposition,
        }
    }

    pub fn is_zero(&self) -> bool {
        Category::ALL.iter().all(|&c| self.weight(c) == 0.0)
    }

    /// Scale each category by the matching factor (ablation overrides).
    pub fn scaled(&self, factors: &Coefficients) -> Self {
        Self {
            substitution: self.substitution * factors.substitution,
            insertion: self.insertion * factors.insertion,
            replication: self.replication * factors.replication,
            deletion: self.deletion * factors.deletion,
            transposition: self.transposition * factors.transposition,
        }
    }
}

impl Default for Coefficients {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

/// The induced noise model: event probabilities per character plus
/// conditional choice tables, over a fixed alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    alphabet: Alphabet,
    counts: ErrorCounts,
    rebase_target: Option<CharDistribution>,
    p_sub: Vec<f64>,
    p_ins_before: Vec<f64>,
    p_ins_after: Vec<f64>,
    p_repl: Vec<f64>,
    p_del: Vec<f64>,
    p_trans: BTreeMap<(char, char), f64>,
    sub_pair: Vec<Vec<(char, f64)>>,
    ins_pair_before: Vec<Vec<(char, f64)>>,
    ins_pair_after: Vec<Vec<(char, f64)>>,
}

fn normalized_row(row: Option<&BTreeMap<char, u64>>) -> Vec<(char, f64)> {
    let Some(row) = row else { return Vec::new() };
    let total: u64 = row.values().sum();
    if total == 0 {
        return Vec::new();
    }
    row.iter()
        .filter(|(_, &n)| n > 0)
        .map(|(&c, &n)| (c, n as f64 / total as f64))
        .collect()
}

fn event_probability(numerator: u64, effective_freq: f64, what: &str) -> f64 {
    if numerator == 0 || effective_freq <= 0.0 {
        return 0.0;
    }
    let p = numerator as f64 / effective_freq;
    if p > 1.0 {
        log::warn!("{what}: probability {p:.4} clamped to 1");
        1.0
    } else {
        p
    }
}

impl NoiseModel {
    /// Normalize raw counts into probability tables over `alphabet`.
    /// All-zero counts produce a valid model that never fires.
    pub fn induce(counts: ErrorCounts, alphabet: Alphabet) -> NoiseModel {
        if counts.is_empty() {
            log::warn!("inducing from all-zero counts: model will never fire");
        }
        Self::build(counts, alphabet, None)
    }

    /// Swap the frequency denominators for a target corpus's distribution,
    /// scaled so the error mass expected per typed character is preserved.
    /// Conditional pair tables are unchanged.
    pub fn rebase_frequencies(&self, target: &CharDistribution) -> Result<NoiseModel> {
        if target.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        Ok(Self::build(
            self.counts.clone(),
            self.alphabet.clone(),
            Some(target.clone()),
        ))
    }

    fn build(
        counts: ErrorCounts,
        alphabet: Alphabet,
        rebase_target: Option<CharDistribution>,
    ) -> NoiseModel {
        // Effective frequencies: the seed's own counts, or the target's
        // counts scaled by (seed total / target total) so that identical
        // relative frequency means identical denominator.
        let seed_chars: u64 = counts.char_freq.values().sum();
        let seed_bigrams: u64 = counts
            .bigram_freq
            .values()
            .map(|r| r.values().sum::<u64>())
            .sum();
        let (char_scale, bigram_scale) = match &rebase_target {
            None => (1.0, 1.0),
            Some(t) => {
                let tc = t.total_chars();
                let tb = t.total_bigrams();
                (
                    if tc == 0 { 0.0 } else { seed_chars as f64 / tc as f64 },
                    if tb == 0 { 0.0 } else { seed_bigrams as f64 / tb as f64 },
                )
            }
        };
        let eff_freq = |c: char| -> f64 {
            match &rebase_target {
                None => counts.char_freq(c) as f64,
                Some(t) => t.count(c) as f64 * char_scale,
            }
        };
        let eff_bigram = |c1: char, c2: char| -> f64 {
            match &rebase_target {
                None => counts.bigram_freq(c1, c2) as f64,
                Some(t) => t.bigram_count(c1, c2) as f64 * bigram_scale,
            }
        };

        let chars = alphabet.chars();
        let mut p_sub = Vec::with_capacity(chars.len());
        let mut p_ins_before = Vec::with_capacity(chars.len());
        let mut p_ins_after = Vec::with_capacity(chars.len());
        let mut p_repl = Vec::with_capacity(chars.len());
        let mut p_del = Vec::with_capacity(chars.len());
        let mut sub_pair = Vec::with_capacity(chars.len());
        let mut ins_pair_before = Vec::with_capacity(chars.len());
        let mut ins_pair_after = Vec::with_capacity(chars.len());
        for &c in chars {
            let f = eff_freq(c);
            let ins_before: u64 = counts
                .insertion_before
                .get(&c)
                .map(|r| r.values().sum())
                .unwrap_or(0);
            let ins_after: u64 = counts
                .insertion_after
                .get(&c)
                .map(|r| r.values().sum())
                .unwrap_or(0);
            p_sub.push(event_probability(
                counts.substitution_total(c),
                f,
                &format!("p_sub({c})"),
            ));
            p_ins_before.push(event_probability(ins_before, f, &format!("p_ins_before({c})")));
            p_ins_after.push(event_probability(ins_after, f, &format!("p_ins_after({c})")));
            p_repl.push(event_probability(
                counts.replication_total(c),
                f,
                &format!("p_repl({c})"),
            ));
            p_del.push(event_probability(
                counts.deletion_total(c),
                f,
                &format!("p_del({c})"),
            ));
            sub_pair.push(normalized_row(counts.substitution.get(&c)));
            ins_pair_before.push(normalized_row(counts.insertion_before.get(&c)));
            ins_pair_after.push(normalized_row(counts.insertion_after.get(&c)));
        }

        let mut p_trans = BTreeMap::new();
        for (&c1, row) in &counts.transposition {
            for (&c2, &n) in row {
                let p = event_probability(n, eff_bigram(c1, c2), &format!("p_trans({c1}{c2})"));
                if p > 0.0 {
                    p_trans.insert((c1, c2), p);
                }
            }
        }

        NoiseModel {
            alphabet,
            counts,
            rebase_target,
            p_sub,
            p_ins_before,
            p_ins_after,
            p_repl,
            p_del,
            p_trans,
            sub_pair,
            ins_pair_before,
            ins_pair_after,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn counts(&self) -> &ErrorCounts {
        &self.counts
    }

    pub fn source(&self) -> FreqSource {
        if self.rebase_target.is_some() {
            FreqSource::Rebased
        } else {
            FreqSource::Seed
        }
    }

    fn at(&self, table: &[f64], c: char) -> f64 {
        self.alphabet.index_of(c).map(|i| table[i]).unwrap_or(0.0)
    }

    pub fn p_sub(&self, c: char) -> f64 {
        self.at(&self.p_sub, c)
    }

    pub fn p_ins_before(&self, c: char) -> f64 {
        self.at(&self.p_ins_before, c)
    }

    pub fn p_ins_after(&self, c: char) -> f64 {
        self.at(&self.p_ins_after, c)
    }

    pub fn p_repl(&self, c: char) -> f64 {
        self.at(&self.p_repl, c)
    }

    pub fn p_del(&self, c: char) -> f64 {
        self.at(&self.p_del, c)
    }

    pub fn p_trans(&self, c1: char, c2: char) -> f64 {
        self.p_trans.get(&(c1, c2)).copied().unwrap_or(0.0)
    }

    /// P(replacement | c) for substitutions.
    pub fn p_sub_pair(&self, replacement: char, c: char) -> f64 {
        self.sub_pair_row(c)
            .iter()
            .find(|(r, _)| *r == replacement)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    fn row<'a>(&self, table: &'a [Vec<(char, f64)>], c: char) -> &'a [(char, f64)] {
        self.alphabet
            .index_of(c)
            .map(|i| table[i].as_slice())
            .unwrap_or(&[])
    }

    pub fn sub_pair_row(&self, c: char) -> &[(char, f64)] {
        self.row(&self.sub_pair, c)
    }

    pub fn ins_pair_before_row(&self, c: char) -> &[(char, f64)] {
        self.row(&self.ins_pair_before, c)
    }

    pub fn ins_pair_after_row(&self, c: char) -> &[(char, f64)] {
        self.row(&self.ins_pair_after, c)
    }

    /// Total single-character event probability for `c` (everything except
    /// transposition), with coefficients applied.
    pub fn char_event_mass(&self, c: char, w: &Coefficients) -> f64 {
        w.substitution * self.p_sub(c)
            + w.insertion * (self.p_ins_before(c) + self.p_ins_after(c))
            + w.replication * self.p_repl(c)
            + w.deletion * self.p_del(c)
    }

    /// Largest transposition probability among bigrams starting with `c`.
    pub fn max_trans_from(&self, c: char) -> f64 {
        self.p_trans
            .iter()
            .filter(|((c1, _), _)| *c1 == c)
            .map(|(_, &p)| p)
            .fold(0.0, f64::max)
    }

    /// Expected fraction of processed characters receiving an error, over a
    /// corpus with the given character distribution.
    pub fn expected_rate(&self, target: &CharDistribution, w: &Coefficients) -> f64 {
        let total = target.total_chars();
        if total == 0 {
            return 0.0;
        }
        let mut mass = 0.0;
        for (&c, &n) in &target.freq {
            mass += n as f64 * self.char_event_mass(c, w);
        }
        for (&(c1, c2), &p) in &self.p_trans {
            mass += target.bigram_count(c1, c2) as f64 * w.transposition * p;
        }
        mass / total as f64
    }

    /// Find the uniform coefficient realizing `rate` errors per character in
    /// expectation over `target`, preserving the induced category mix.
    pub fn calibrate(&self, target: &CharDistribution, rate: f64) -> Result<Coefficients> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidRate(rate));
        }
        if rate == 0.0 {
            return Ok(Coefficients::zero());
        }
        let unit = Coefficients::uniform(1.0);
        let base_rate = self.expected_rate(target, &unit);
        if base_rate <= 0.0 {
            return Err(Error::RateUnreachable { requested: rate, max_achievable: 0.0 });
        }
        let w = rate / base_rate;
        // The per-character firing probability w·(event mass + worst-case
        // transposition) must stay below 1, else sampling would clamp and
        // the realized rate would fall short of the expectation.
        let worst = self
            .alphabet
            .chars()
            .iter()
            .map(|&c| self.char_event_mass(c, &unit) + self.max_trans_from(c))
            .fold(0.0, f64::max);
        if worst > 0.0 && w * worst > 1.0 {
            return Err(Error::RateUnreachable {
                requested: rate,
                max_achievable: base_rate / worst,
            });
        }
        Ok(Coefficients::uniform(w))
    }

    /// Write the model as versioned structured text. Counts, not floats, are
    /// stored; probabilities are recomputed on load, so round trips are exact.
    pub fn save(&self, mut writer: impl Write) -> Result<()> {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            char_freq_source: self.source(),
            alphabet: self.alphabet.chars().iter().collect(),
            counts: self.counts.clone(),
            rebase_target: self.rebase_target.clone(),
        };
        serde_json::to_writer_pretty(&mut writer, &file)
            .map_err(|e| Error::MalformedModel(e.to_string()))?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(mut reader: impl Read) -> Result<NoiseModel> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::MalformedModel(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::MalformedModel("missing format_version".into()))?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| Error::MalformedModel(e.to_string()))?;
        Ok(Self::build(
            file.counts,
            Alphabet::new(file.alphabet.chars()),
            file.rebase_target,
        ))
    }
}

pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u64,
    char_freq_source: FreqSource,
    alphabet: String,
    counts: ErrorCounts,
    rebase_target: Option<CharDistribution>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{accumulate_counts, AlignmentOptions, TypoPair};
    use crate::keyboard::KeyboardLayout;

    fn counts_for(pairs: &[(&str, &str)]) -> ErrorCounts {
        let pairs: Vec<TypoPair> = pairs
            .iter()
            .map(|&(t, c)| TypoPair { typo: t.into(), correct: c.into() })
            .collect();
        let (counts, _) =
            accumulate_counts(&pairs, &KeyboardLayout::qwerty(), &AlignmentOptions::default())
                .unwrap();
        counts
    }

    fn toy_model() -> NoiseModel {
        NoiseModel::induce(
            counts_for(&[("cst", "cat"), ("caat", "cat")]),
            Alphabet::ascii_lowercase(),
        )
    }

    #[test]
    fn induce_matches_hand_computed_ratios() {
        let model = toy_model();
        assert_eq!(model.p_sub('a'), 0.5);
        assert_eq!(model.p_sub_pair('s', 'a'), 1.0);
        assert_eq!(model.p_repl('a'), 0.5);
        assert_eq!(model.p_del('t'), 0.0);
        assert_eq!(model.source(), FreqSource::Seed);
    }

    #[test]
    fn induce_from_zero_counts_never_fires() {
        let model = NoiseModel::induce(ErrorCounts::default(), Alphabet::ascii_lowercase());
        for &c in model.alphabet().chars() {
            assert_eq!(model.char_event_mass(c, &Coefficients::default()), 0.0);
        }
        assert!(model.p_trans.is_empty());
    }

    #[test]
    fn transposition_is_normalized_by_bigram_frequency() {
        let model = NoiseModel::induce(counts_for(&[("teh", "the")]), Alphabet::ascii_lowercase());
        assert_eq!(model.p_trans('h', 'e'), 1.0);
        assert_eq!(model.p_trans('t', 'h'), 0.0);
    }

    #[test]
    fn pair_tables_are_normalized() {
        let counts = counts_for(&[
            ("cst", "cat"),
            ("cqt", "cat"),
            ("cwt", "cat"),
            ("xcat", "cat"),
        ]);
        let model = NoiseModel::induce(counts, Alphabet::ascii_lowercase());
        for &c in model.alphabet().chars() {
            for row in [
                model.sub_pair_row(c),
                model.ins_pair_before_row(c),
                model.ins_pair_after_row(c),
            ] {
                if !row.is_empty() {
                    let sum: f64 = row.iter().map(|(_, p)| p).sum();
                    assert!((sum - 1.0).abs() < 1e-9, "row for {c} sums to {sum}");
                }
            }
        }
    }

    #[test]
    fn identity_rebase_changes_nothing() {
        let model = toy_model();
        let target = CharDistribution::from_counts(model.counts());
        let rebased = model.rebase_frequencies(&target).unwrap();
        assert_eq!(rebased.source(), FreqSource::Rebased);
        for &c in model.alphabet().chars() {
            assert!((rebased.p_sub(c) - model.p_sub(c)).abs() < 1e-9);
            assert!((rebased.p_repl(c) - model.p_repl(c)).abs() < 1e-9);
            assert!((rebased.p_del(c) - model.p_del(c)).abs() < 1e-9);
            assert!(
                (rebased.p_ins_before(c) - model.p_ins_before(c)).abs() < 1e-9
            );
            assert!((rebased.p_ins_after(c) - model.p_ins_after(c)).abs() < 1e-9);
        }
        assert_eq!(rebased.p_trans, model.p_trans);
    }

    #[test]
    fn rebase_onto_doubled_frequency_halves_probability() {
        let model = toy_model();
        let seed = CharDistribution::from_counts(model.counts());
        // seed counts are {a: 2, c: 2, t: 2}, so rel('a') = 1/3; this target
        // has rel('a') = 8/12 = 2/3, exactly twice as frequent
        let mut target = seed.clone();
        target.freq.insert('a', 8);
        assert!((target.rel('a') - 2.0 * seed.rel('a')).abs() < 1e-12);
        let rebased = model.rebase_frequencies(&target).unwrap();
        assert!((rebased.p_sub('a') - model.p_sub('a') / 2.0).abs() < 1e-12);
        // expected substitutions per typed character are preserved
        let before = seed.rel('a') * model.p_sub('a');
        let after = target.rel('a') * rebased.p_sub('a');
        assert!((before - after).abs() < 1e-12);
        // conditional tables untouched
        assert_eq!(rebased.sub_pair_row('a'), model.sub_pair_row('a'));
    }

    #[test]
    fn rebase_onto_target_without_a_char_zeroes_it() {
        let model = toy_model();
        let mut target = CharDistribution::from_counts(model.counts());
        target.freq.remove(&'a');
        let rebased = model.rebase_frequencies(&target).unwrap();
        assert_eq!(rebased.p_sub('a'), 0.0);
        assert_eq!(rebased.p_repl('a'), 0.0);
    }

    #[test]
    fn rebase_onto_empty_distribution_is_an_error() {
        let model = toy_model();
        let err = model.rebase_frequencies(&CharDistribution::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyDistribution));
    }

    #[test]
    fn calibrate_zero_rate_gives_zero_coefficients() {
        let model = toy_model();
        let target = CharDistribution::from_counts(model.counts());
        let w = model.calibrate(&target, 0.0).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn calibrate_inverts_the_expected_rate() {
        let model = toy_model();
        let target = CharDistribution::from_counts(model.counts());
        let base = model.expected_rate(&target, &Coefficients::uniform(1.0));
        let w = model.calibrate(&target, 0.04).unwrap();
        assert!((w.substitution - 0.04 / base).abs() < 1e-12);
        assert!((model.expected_rate(&target, &w) - 0.04).abs() < 1e-9);
    }

    #[test]
    fn calibration_is_linear_in_the_rate() {
        let model = toy_model();
        let target = CharDistribution::from_counts(model.counts());
        let low = model.calibrate(&target, 0.0375).unwrap();
        let high = model.calibrate(&target, 0.15).unwrap();
        assert!((high.substitution / low.substitution - 4.0).abs() < 1e-9);
    }

    #[test]
    fn unreachable_rate_reports_the_maximum() {
        let model = toy_model();
        let target = CharDistribution::from_counts(model.counts());
        let err = model.calibrate(&target, 0.9).unwrap_err();
        match err {
            Error::RateUnreachable { requested, max_achievable } => {
                assert_eq!(requested, 0.9);
                assert!(max_achievable > 0.0 && max_achievable < 0.9);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn out_of_range_rates_are_rejected() {
        let model = toy_model();
        let target = CharDistribution::from_counts(model.counts());
        assert!(matches!(model.calibrate(&target, 1.0), Err(Error::InvalidRate(_))));
        assert!(matches!(model.calibrate(&target, -0.1), Err(Error::InvalidRate(_))));
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let model = toy_model();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        let loaded = NoiseModel::load(buf.as_slice()).unwrap();
        assert_eq!(loaded, model);

        let rebased = {
            let mut target = CharDistribution::from_counts(model.counts());
            target.freq.insert('a', 17);
            model.rebase_frequencies(&target).unwrap()
        };
        let mut buf = Vec::new();
        rebased.save(&mut buf).unwrap();
        let loaded = NoiseModel::load(buf.as_slice()).unwrap();
        assert_eq!(loaded, rebased);
    }

    #[test]
    fn truncated_model_file_is_rejected() {
        let model = toy_model();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        buf.truncate(buf.len() / 2);
        assert!(matches!(
            NoiseModel::load(buf.as_slice()),
            Err(Error::MalformedModel(_))
        ));
    }

    #[test]
    fn future_format_version_is_rejected() {
        let text = r#"{"format_version": 99}"#;
        assert!(matches!(
            NoiseModel::load(text.as_bytes()),
            Err(Error::UnsupportedVersion { found: 99, .. })
        ));
    }

    #[test]
    fn distribution_counts_chars_and_bigrams_within_tokens() {
        let alphabet = Alphabet::ascii_lowercase();
        let mut dist = CharDistribution::default();
        dist.record_document("the cat, a cat!", &alphabet);
        assert_eq!(dist.count('t'), 3);
        assert_eq!(dist.count('a'), 3);
        assert_eq!(dist.bigram_count('c', 'a'), 2);
        assert_eq!(dist.bigram_count('t', 'c'), 0); // never across tokens
        assert_eq!(dist.bigram_count('t', ','), 0); // punctuation excluded
        let rel_sum: f64 = dist.freq.keys().map(|&c| dist.rel(c)).sum();
        assert!((rel_sum - 1.0).abs() < 1e-9);
    }
}
