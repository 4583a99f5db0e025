//! Loading the word-frequency dictionary and the observed trial
//! distributions.
//!
//! `dictionary.csv` has header `word,frequency`; frequencies may be raw
//! counts or relative values and are normalized to sum to one.
//! `ground_truth.csv` has header
//! `date,word,num_reported,pct_1,pct_2,pct_3,pct_4,pct_5,pct_6,pct_x` with
//! percentages that may be off by rounding; they are renormalized.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::wasserstein::{TrialDistribution, CATEGORIES};
use crate::word::Word;

pub const DICTIONARY_HEADER: [&str; 2] = ["word", "frequency"];
pub const GROUND_TRUTH_HEADER: [&str; 10] =
    ["date", "word", "num_reported", "pct_1", "pct_2", "pct_3", "pct_4", "pct_5", "pct_6", "pct_x"];

/// Reported percentages must sum to 100 within this many points.
pub const PERCENT_SUM_TOLERANCE: f64 = 2.0;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: unexpected header {found:?}, expected {expected:?}")]
    BadHeader { line: u64, found: String, expected: String },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("dictionary has no valid rows")]
    EmptyDictionary,
    #[error("duplicate word {0:?}")]
    DuplicateWord(String),
    #[error("line {line}: percentages sum to {sum}, outside 100 ± 2")]
    PercentSumOutOfTolerance { line: u64, sum: f64 },
}

impl IngestError {
    fn malformed(line: u64, reason: impl Into<String>) -> Self {
        IngestError::MalformedRow { line, reason: reason.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entry {
    pub word: Word,
    pub freq: f64,
}

/// Words with relative frequencies, ordered by descending frequency and
/// then lexicographically.
///
/// A freshly loaded dictionary has frequencies summing to one. Subsets
/// produced by clue filtering keep the original frequencies.
#[derive(Debug, Clone)]
pub struct Dictionary {
    entries: Vec<Entry>,
    index: HashMap<Word, usize>,
}

impl Dictionary {
    /// Builds a normalized dictionary from raw `(word, weight)` pairs.
    pub fn from_weights<I>(pairs: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (Word, f64)>,
    {
        let mut entries: Vec<Entry> = pairs.into_iter().map(|(word, freq)| Entry { word, freq }).collect();
        if entries.is_empty() {
            return Err(IngestError::EmptyDictionary);
        }
        let total: f64 = entries.iter().map(|e| e.freq).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(IngestError::EmptyDictionary);
        }
        for e in &mut entries {
            e.freq /= total;
        }
        Self::from_entries(entries)
    }

    /// Sorts and indexes entries as given, without renormalizing.
    pub(crate) fn from_entries(mut entries: Vec<Entry>) -> Result<Self, IngestError> {
        entries.sort_by(|a, b| b.freq.total_cmp(&a.freq).then_with(|| a.word.cmp(&b.word)));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.word, i).is_some() {
                return Err(IngestError::DuplicateWord(e.word.to_string()));
            }
        }
        Ok(Dictionary { entries, index })
    }

    /// Keeps the entries accepted by `keep`, preserving order and
    /// frequencies.
    pub fn retain_by(&self, mut keep: impl FnMut(&Entry) -> bool) -> Dictionary {
        let entries: Vec<Entry> = self.entries.iter().copied().filter(|e| keep(e)).collect();
        let index = entries.iter().enumerate().map(|(i, e)| (e.word, i)).collect();
        Dictionary { entries, index }
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
        let mut rows = rdr.records();
        check_header(rows.next(), &DICTIONARY_HEADER)?;

        let mut pairs = Vec::new();
        let mut seen = HashMap::new();
        for row in rows {
            let row = row.map_err(csv_error)?;
            let line = line_of(&row);
            if row.len() != DICTIONARY_HEADER.len() {
                return Err(IngestError::malformed(line, format!("expected 2 fields, got {}", row.len())));
            }
            let word = Word::parse(row[0].trim()).map_err(|e| IngestError::malformed(line, e.to_string()))?;
            let freq: f64 = row[1]
                .trim()
                .parse()
                .map_err(|_| IngestError::malformed(line, format!("bad frequency {:?}", &row[1])))?;
            if !freq.is_finite() || freq < 0.0 {
                return Err(IngestError::malformed(line, format!("frequency {freq} must be finite and >= 0")));
            }
            if seen.insert(word, line).is_some() {
                return Err(IngestError::DuplicateWord(word.to_string()));
            }
            pairs.push((word, freq));
        }
        Self::from_weights(pairs)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(DICTIONARY_HEADER).map_err(csv_error)?;
        for e in &self.entries {
            w.write_record([e.word.as_str(), &e.freq.to_string()]).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, word: Word) -> Option<usize> {
        self.index.get(&word).copied()
    }

    pub fn contains(&self, word: Word) -> bool {
        self.index.contains_key(&word)
    }

    pub fn freq(&self, word: Word) -> Option<f64> {
        self.position(word).map(|i| self.entries[i].freq)
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.entries.iter().map(|e| e.word)
    }

    /// Frequency of the most common word, or 0 when empty.
    pub fn max_freq(&self) -> f64 {
        self.entries.first().map_or(0.0, |e| e.freq)
    }
}

/// Reads `dictionary.csv`.
pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary, IngestError> {
    Dictionary::from_reader(open(path.as_ref())?)
}

/// One observed day: the target word and its reported trial distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WordRecord {
    pub date: NaiveDate,
    pub word: Word,
    pub num_reported: u64,
    pub dist: TrialDistribution,
}

/// Reads ground-truth records from CSV, sorted by date then word.
///
/// Words missing from `dict` are kept but logged, since they cannot be
/// simulated; see [`split_known`].
pub fn read_ground_truth<R: Read>(reader: R, dict: &Dictionary) -> Result<Vec<WordRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut rows = rdr.records();
    check_header(rows.next(), &GROUND_TRUTH_HEADER)?;

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = line_of(&row);
        if row.len() != GROUND_TRUTH_HEADER.len() {
            return Err(IngestError::malformed(line, format!("expected 10 fields, got {}", row.len())));
        }
        let date = NaiveDate::parse_from_str(row[0].trim(), "%Y-%m-%d")
            .map_err(|e| IngestError::malformed(line, format!("bad date {:?}: {e}", &row[0])))?;
        let word = Word::parse(row[1].trim()).map_err(|e| IngestError::malformed(line, e.to_string()))?;
        let num_reported: u64 = row[2]
            .trim()
            .parse()
            .map_err(|_| IngestError::malformed(line, format!("bad num_reported {:?}", &row[2])))?;
        let mut pct = [0.0; CATEGORIES];
        for (k, slot) in pct.iter_mut().enumerate() {
            let raw = row[3 + k].trim();
            let v: f64 = raw.parse().map_err(|_| IngestError::malformed(line, format!("bad percentage {raw:?}")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(IngestError::malformed(line, format!("percentage {v} must be finite and >= 0")));
            }
            *slot = v;
        }
        let sum: f64 = pct.iter().sum();
        if (sum - 100.0).abs() > PERCENT_SUM_TOLERANCE {
            return Err(IngestError::PercentSumOutOfTolerance { line, sum });
        }
        let dist = TrialDistribution::from_weights(pct).map_err(|e| IngestError::malformed(line, e.to_string()))?;
        if !dict.contains(word) {
            log::warn!("line {line}: word {word} is not in the dictionary and will be skipped when fitting");
        }
        records.push(WordRecord { date, word, num_reported, dist });
    }
    records.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.word.cmp(&b.word)));
    log::info!("loaded {} ground-truth records", records.len());
    Ok(records)
}

/// Reads `ground_truth.csv`.
pub fn load_ground_truth(path: impl AsRef<Path>, dict: &Dictionary) -> Result<Vec<WordRecord>, IngestError> {
    read_ground_truth(open(path.as_ref())?, dict)
}

pub fn write_ground_truth<W: Write>(records: &[WordRecord], writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GROUND_TRUTH_HEADER).map_err(csv_error)?;
    for r in records {
        let mut row = vec![r.date.format("%Y-%m-%d").to_string(), r.word.to_string(), r.num_reported.to_string()];
        row.extend(r.dist.mass().iter().map(|m| (m * 100.0).to_string()));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Splits records into those whose word is in `dict` and the words that
/// are not.
pub fn split_known(records: &[WordRecord], dict: &Dictionary) -> (Vec<WordRecord>, Vec<Word>) {
    let (known, unknown): (Vec<_>, Vec<_>) = records.iter().partition(|r| dict.contains(r.word));
    if !unknown.is_empty() {
        log::warn!("excluding {} record(s) whose word is not in the dictionary", unknown.len());
    }
    (known, unknown.into_iter().map(|r| r.word).collect())
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IngestError::MissingFile(path.to_path_buf()),
        _ => IngestError::Io(e),
    })
}

fn check_header(row: Option<csv::Result<csv::StringRecord>>, expected: &[&str]) -> Result<(), IngestError> {
    let row = match row {
        Some(r) => r.map_err(csv_error)?,
        None => return Err(IngestError::BadHeader { line: 1, found: String::new(), expected: expected.join(",") }),
    };
    let found: Vec<String> = row.iter().map(|f| f.trim().trim_start_matches('\u{feff}').to_ascii_lowercase()).collect();
    if found != expected {
        return Err(IngestError::BadHeader {
            line: line_of(&row),
            found: row.iter().collect::<Vec<_>>().join(","),
            expected: expected.join(","),
        });
    }
    Ok(())
}

fn line_of(row: &csv::StringRecord) -> u64 {
    row.position().map_or(0, |p| p.line())
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        kind => IngestError::malformed(line, format!("{kind:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict(csv: &str) -> Result<Dictionary, IngestError> {
        Dictionary::from_reader(csv.as_bytes())
    }

    #[test]
    fn normalizes_and_sorts() {
        let d = dict("word,frequency\nquery,25\neerie,25\ntrain,50\nabout,100\n").unwrap();
        let words: Vec<_> = d.words().map(|w| w.to_string()).collect();
        assert_eq!(words, ["about", "train", "eerie", "query"]);
        let freqs: Vec<_> = d.entries().iter().map(|e| e.freq).collect();
        assert_eq!(freqs, [0.5, 0.25, 0.125, 0.125]);
    }

    #[test]
    fn rejects_long_word_with_line() {
        let err = dict("word,frequency\nabout,3\nabcdef,10\n").unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn case_folded_duplicates() {
        let err = dict("word,frequency\ntrain,10\nTRAIN,20\n").unwrap_err();
        assert!(matches!(err, IngestError::DuplicateWord(ref w) if w == "train"), "{err:?}");
    }

    #[test]
    fn empty_and_zero_mass() {
        assert!(matches!(dict("word,frequency\n"), Err(IngestError::EmptyDictionary)));
        assert!(matches!(dict("word,frequency\nabout,0\n"), Err(IngestError::EmptyDictionary)));
    }

    #[test]
    fn crlf_and_header_check() {
        assert_eq!(dict("word,frequency\r\nabout,1\r\ntrain,1\r\n").unwrap().len(), 2);
        assert!(matches!(dict("w,f\nabout,1\n"), Err(IngestError::BadHeader { .. })));
    }

    #[test]
    fn missing_file() {
        let err = load_dictionary("/nonexistent/dict.csv").unwrap_err();
        assert!(matches!(err, IngestError::MissingFile(_)));
    }

    const GT_HEADER: &str = "date,word,num_reported,pct_1,pct_2,pct_3,pct_4,pct_5,pct_6,pct_x\n";

    fn small_dict() -> Dictionary {
        dict("word,frequency\nabout,100\ntrain,50\neerie,25\nquery,25\n").unwrap()
    }

    #[test]
    fn ground_truth_renormalizes() {
        let csv = format!("{GT_HEADER}2022-03-01,eerie,150000,1,5,20,34,26,12,2\n");
        let recs = read_ground_truth(csv.as_bytes(), &small_dict()).unwrap();
        assert_eq!(recs.len(), 1);
        let expected = [0.01, 0.05, 0.20, 0.34, 0.26, 0.12, 0.02];
        for (a, b) in recs[0].dist.mass().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(recs[0].num_reported, 150000);
    }

    #[test]
    fn ground_truth_tolerance() {
        let csv = format!("{GT_HEADER}2022-03-01,eerie,10,1,5,20,34,26,12,4\n");
        let recs = read_ground_truth(csv.as_bytes(), &small_dict()).unwrap();
        assert!((recs[0].dist.mass()[6] - 4.0 / 102.0).abs() < 1e-15);

        let csv = format!("{GT_HEADER}2022-03-01,eerie,10,1,5,20,34,26,12,5\n");
        let err = read_ground_truth(csv.as_bytes(), &small_dict()).unwrap_err();
        assert!(matches!(err, IngestError::PercentSumOutOfTolerance { sum, .. } if sum == 103.0));

        let csv = format!("{GT_HEADER}2022-03-01,eerie,10,1,5,20,34,26,2,2\n");
        let err = read_ground_truth(csv.as_bytes(), &small_dict()).unwrap_err();
        assert!(matches!(err, IngestError::PercentSumOutOfTolerance { line: 2, sum } if sum == 90.0));
    }

    #[test]
    fn ground_truth_sorted_and_unknown_kept() {
        let csv = format!("{GT_HEADER}2022-03-02,zesty,10,0,0,0,100,0,0,0\n2022-03-01,train,10,0,0,100,0,0,0,0\n");
        let d = small_dict();
        let recs = read_ground_truth(csv.as_bytes(), &d).unwrap();
        assert_eq!(recs[0].word.as_str(), "train");
        let (known, unknown) = split_known(&recs, &d);
        assert_eq!(known.len(), 1);
        assert_eq!(unknown, [Word::parse("zesty").unwrap()]);
    }

    #[test]
    fn ground_truth_malformed() {
        for row in [
            "2022-13-01,eerie,1,0,0,0,100,0,0,0",
            "2022-03-01,eerie,-1,0,0,0,100,0,0,0",
            "2022-03-01,eerie,1,0,0,0,100,0,0",
            "2022-03-01,eeri,1,0,0,0,100,0,0,0",
            "2022-03-01,eerie,1,0,0,-5,105,0,0,0",
        ] {
            let csv = format!("{GT_HEADER}{row}\n");
            let err = read_ground_truth(csv.as_bytes(), &small_dict()).unwrap_err();
            assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }), "{row}: {err:?}");
        }
    }
}
