//! Per-word tabular features, exported as `features.csv` for the
//! regression baselines.
//!
//! Columns, in order:
//! `log_freq, distinct_letters, repeated_letters, vowel_count,
//! mean_letter_freq, pos1_rank .. pos5_rank`.
//! Letter frequencies are weighted by word frequency over the whole
//! dictionary; a position rank is 1 for the most common letter at that
//! position, with ties sharing a rank.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Dictionary;
use crate::word::{Word, WORD_LEN};

/// Bumped whenever columns change.
pub const FEATURE_SET_VERSION: u32 = 1;

pub const FEATURE_NAMES: [&str; 10] = [
    "log_freq",
    "distinct_letters",
    "repeated_letters",
    "vowel_count",
    "mean_letter_freq",
    "pos1_rank",
    "pos2_rank",
    "pos3_rank",
    "pos4_rank",
    "pos5_rank",
];

/// Floor applied before taking the log of a zero frequency.
const MIN_FREQ: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("word {0:?} is not in the dictionary")]
    WordNotInDictionary(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureVector {
    pub word: Word,
    pub values: [f64; FEATURE_NAMES.len()],
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.values[i])
    }
}

pub struct FeatureExtractor<'d> {
    dict: &'d Dictionary,
    letter_freq: [f64; 26],
    position_rank: [[u32; 26]; WORD_LEN],
}

impl<'d> FeatureExtractor<'d> {
    pub fn new(dict: &'d Dictionary) -> Self {
        let mut letter_freq = [0.0; 26];
        let mut position_freq = [[0.0; 26]; WORD_LEN];
        for e in dict.entries() {
            for (pos, l) in e.word.letter_indices().into_iter().enumerate() {
                letter_freq[l] += e.freq / WORD_LEN as f64;
                position_freq[pos][l] += e.freq;
            }
        }
        let position_rank =
            position_freq.map(|freqs| freqs.map(|f| 1 + freqs.iter().filter(|&&other| other > f).count() as u32));
        FeatureExtractor { dict, letter_freq, position_rank }
    }

    pub fn extract(&self, word: Word) -> Result<FeatureVector, FeatureError> {
        let freq = self.dict.freq(word).ok_or_else(|| FeatureError::WordNotInDictionary(word.to_string()))?;
        let letters = word.letter_indices();
        let mut seen = [false; 26];
        let mut distinct = 0;
        for &l in &letters {
            if !seen[l] {
                seen[l] = true;
                distinct += 1;
            }
        }
        let vowels = word.bytes().iter().filter(|b| b"aeiou".contains(b)).count();
        let mean_letter_freq = letters.iter().map(|&l| self.letter_freq[l]).sum::<f64>() / WORD_LEN as f64;
        let mut values = [0.0; FEATURE_NAMES.len()];
        values[0] = freq.max(MIN_FREQ).ln();
        values[1] = distinct as f64;
        values[2] = (WORD_LEN - distinct) as f64;
        values[3] = vowels as f64;
        values[4] = mean_letter_freq;
        for (pos, &l) in letters.iter().enumerate() {
            values[5 + pos] = self.position_rank[pos][l] as f64;
        }
        Ok(FeatureVector { word, values })
    }
}

pub fn extract_features(word: Word, dict: &Dictionary) -> Result<FeatureVector, FeatureError> {
    FeatureExtractor::new(dict).extract(word)
}

/// Writes `word,<FEATURE_NAMES...>` rows, one per word in the given order.
pub fn write_features_csv<W: Write>(words: &[Word], dict: &Dictionary, writer: W) -> Result<(), FeatureError> {
    let fx = FeatureExtractor::new(dict);
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["word"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for &word in words {
        let fv = fx.extract(word)?;
        let mut row = vec![word.to_string()];
        row.extend(fv.values.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn dict() -> Dictionary {
        Dictionary::from_weights(
            [("about", 4.0), ("train", 2.0), ("eerie", 1.0), ("query", 1.0)].map(|(s, f)| (w(s), f)),
        )
        .unwrap()
    }

    #[test]
    fn letter_counts() {
        let d = dict();
        let eerie = extract_features(w("eerie"), &d).unwrap();
        assert_eq!(eerie.get("distinct_letters"), Some(3.0));
        assert_eq!(eerie.get("repeated_letters"), Some(2.0));
        assert_eq!(eerie.get("vowel_count"), Some(4.0));
        let train = extract_features(w("train"), &d).unwrap();
        assert_eq!(train.get("distinct_letters"), Some(5.0));
        assert_eq!(train.get("repeated_letters"), Some(0.0));
        assert_eq!(train.get("log_freq"), Some(0.25f64.ln()));
        assert_eq!(train, extract_features(w("train"), &d).unwrap());
    }

    #[test]
    fn position_ranks() {
        let d = dict();
        // position 1: a=0.5, t=0.25, e=q=0.125
        let about = extract_features(w("about"), &d).unwrap();
        assert_eq!(about.get("pos1_rank"), Some(1.0));
        let query = extract_features(w("query"), &d).unwrap();
        assert_eq!(query.get("pos1_rank"), Some(3.0));
        let eerie = extract_features(w("eerie"), &d).unwrap();
        assert_eq!(eerie.get("pos1_rank"), Some(3.0));
    }

    #[test]
    fn unknown_word() {
        assert!(matches!(extract_features(w("zesty"), &dict()), Err(FeatureError::WordNotInDictionary(_))));
    }

    #[test]
    fn csv_header() {
        let mut out = Vec::new();
        write_features_csv(&[w("train")], &dict(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(
            text.starts_with("word,log_freq,distinct_letters,repeated_letters,vowel_count,mean_letter_freq,pos1_rank")
        );
        assert_eq!(text.lines().count(), 2);
    }
}
