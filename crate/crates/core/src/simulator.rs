//! Simulated Wordle players.
//!
//! A player recalls only the `K` most frequent words still consistent with
//! the clues seen so far and picks one at random, weighted by frequency.
//! After each miss the remaining dictionary is narrowed by the clue. The
//! number of guesses until the target comes up is one trial; many trials
//! binned into `1..6, X` give the word's trial distribution.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dictionary;
use crate::wasserstein::{TrialDistribution, CATEGORIES};
use crate::word::Word;
use crate::wordle::{score_guess, FeedbackTable};

/// Samples per trial distribution unless configured otherwise.
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("dictionary is empty")]
    EmptyDictionary,
    #[error("target {0:?} is not in the dictionary")]
    TargetNotInDictionary(String),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("number of samples must be at least 1")]
    ZeroSamples,
}

/// Cognitive hyperparameters of the simulated player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyperparams")]
pub struct Hyperparams {
    /// Recall limit: how many of the most frequent remaining words are
    /// candidates at each guess.
    k: usize,
    /// Frequency scale factor.
    t: f64,
}

#[derive(Deserialize)]
struct RawHyperparams {
    k: usize,
    t: f64,
}

impl TryFrom<RawHyperparams> for Hyperparams {
    type Error = SimError;

    fn try_from(raw: RawHyperparams) -> Result<Self, Self::Error> {
        Hyperparams::new(raw.k, raw.t)
    }
}

impl Hyperparams {
    pub fn new(k: usize, t: f64) -> Result<Self, SimError> {
        if k == 0 {
            return Err(SimError::InvalidHyperparams("K must be >= 1".into()));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(SimError::InvalidHyperparams(format!("T must be finite and > 0, got {t}")));
        }
        Ok(Hyperparams { k, t })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// How candidate words are weighted at each guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// `min(p, T * p_max)`: frequencies above `T` times the top frequency
    /// are capped, flattening the head of the distribution when `T < 1`.
    #[default]
    Cap,
    /// `max(0, p * T)`: after normalization `T` cancels, so it has no
    /// effect on which word is drawn.
    Plain,
}

impl Weighting {
    #[inline]
    pub fn weight(self, freq: f64, t: f64, max_freq: f64) -> f64 {
        match self {
            Weighting::Cap => freq.min(t * max_freq),
            Weighting::Plain => (freq * t).max(0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Weighting::Cap => "cap",
            Weighting::Plain => "plain",
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cap" => Ok(Weighting::Cap),
            "plain" => Ok(Weighting::Plain),
            other => Err(format!("unknown weighting {other:?}, expected cap or plain")),
        }
    }
}

/// Seed plus stream selector for a ChaCha8 generator.
///
/// The same pair yields the same sequence on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream_id: 0 }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream keyed by `tag`; same seed, mixed stream id.
    pub fn substream(&self, tag: u64) -> RngSeed {
        RngSeed { seed: self.seed, stream_id: splitmix64(self.stream_id ^ splitmix64(tag)) }
    }

    /// Stream for sample `index` of `word`. Depends only on the seed, the
    /// word, and the index, never on hyperparameters or scheduling.
    pub fn for_sample(&self, word: Word, index: u64) -> RngSeed {
        self.substream(word_tag(word)).substream(index)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn word_tag(word: Word) -> u64 {
    // FNV-1a
    word.bytes().iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Maps a guess count to its category 1..=7, with 7 and above as X.
pub fn category_of(trials: u32) -> usize {
    (trials as usize).clamp(1, CATEGORIES)
}

/// Draws one word from `dict` using the top-`K` candidate rule, with the
/// cap measured against `dict`'s own top frequency.
pub fn choose_word<R: Rng + ?Sized>(
    dict: &Dictionary,
    hp: &Hyperparams,
    weighting: Weighting,
    rng: &mut R,
) -> Result<Word, SimError> {
    if dict.is_empty() {
        return Err(SimError::EmptyDictionary);
    }
    let freqs: Vec<f64> = dict.entries().iter().map(|e| e.freq).collect();
    let pick = pick_candidate(&freqs, hp, weighting, dict.max_freq(), rng);
    Ok(dict.entries()[pick].word)
}

/// Index of the chosen candidate among the first `min(K, len)` entries of
/// `freqs` (which must be in descending order).
fn pick_candidate<R: Rng + ?Sized>(
    freqs: &[f64],
    hp: &Hyperparams,
    weighting: Weighting,
    max_freq: f64,
    rng: &mut R,
) -> usize {
    let n = hp.k.min(freqs.len());
    let candidates = &freqs[..n];
    let total: f64 = candidates.iter().map(|&p| weighting.weight(p, hp.t, max_freq)).sum();
    let u: f64 = rng.random();
    if total.is_nan() || total <= 0.0 {
        // every candidate has zero weight: fall back to uniform
        return ((u * n as f64) as usize).min(n - 1);
    }
    let threshold = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in candidates.iter().enumerate() {
        let w = weighting.weight(p, hp.t, max_freq);
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if threshold < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Runs simulated players against one dictionary.
///
/// Construction precomputes the clue for every word pair when the
/// dictionary is small enough, which makes each filtering step a table scan.
pub struct Simulator<'d> {
    dict: &'d Dictionary,
    weighting: Weighting,
    table: Option<FeedbackTable>,
    freqs: Vec<f64>,
}

impl<'d> Simulator<'d> {
    pub fn new(dict: &'d Dictionary, weighting: Weighting) -> Self {
        Simulator {
            dict,
            weighting,
            table: FeedbackTable::build(dict),
            freqs: dict.entries().iter().map(|e| e.freq).collect(),
        }
    }

    pub fn dictionary(&self) -> &'d Dictionary {
        self.dict
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    fn target_index(&self, target: Word) -> Result<usize, SimError> {
        self.dict.position(target).ok_or_else(|| SimError::TargetNotInDictionary(target.to_string()))
    }

    fn clue(&self, guess: usize, target: usize) -> u8 {
        match &self.table {
            Some(t) => t.code(guess, target),
            None => {
                let entries = self.dict.entries();
                score_guess(entries[guess].word, entries[target].word).code()
            }
        }
    }

    /// Plays one game and returns the guesses made, ending with the target.
    pub fn play<R: Rng + ?Sized>(&self, target: Word, hp: &Hyperparams, rng: &mut R) -> Result<Vec<Word>, SimError> {
        let target = self.target_index(target)?;
        let mut guesses = Vec::new();
        self.run(target, hp, rng, |g| guesses.push(self.dict.entries()[g].word));
        Ok(guesses)
    }

    /// Number of guesses one simulated player needs to find `target`.
    pub fn simulate_trial<R: Rng + ?Sized>(
        &self,
        target: Word,
        hp: &Hyperparams,
        rng: &mut R,
    ) -> Result<u32, SimError> {
        let target = self.target_index(target)?;
        Ok(self.run(target, hp, rng, |_| {}))
    }

    fn run<R: Rng + ?Sized>(
        &self,
        target: usize,
        hp: &Hyperparams,
        rng: &mut R,
        mut on_guess: impl FnMut(usize),
    ) -> u32 {
        let n = self.dict.len();
        let max_freq = self.dict.max_freq();
        // positions into the dictionary, kept in frequency order
        let mut remaining: Vec<u32> = (0..n as u32).collect();
        let mut cand_freqs: Vec<f64> = Vec::with_capacity(hp.k.min(n));
        let mut count = 0u32;
        loop {
            count += 1;
            assert!(count as usize <= n, "simulation exceeded {n} guesses; remaining set failed to shrink");
            cand_freqs.clear();
            cand_freqs.extend(remaining.iter().take(hp.k).map(|&i| self.freqs[i as usize]));
            let guess = remaining[pick_candidate(&cand_freqs, hp, self.weighting, max_freq, rng)] as usize;
            on_guess(guess);
            if guess == target {
                return count;
            }
            let clue = self.clue(guess, target);
            let before = remaining.len();
            remaining.retain(|&w| self.clue(guess, w as usize) == clue);
            debug_assert!(remaining.len() < before);
        }
    }

    /// Raw guess counts of `n_samples` independent players. Sample `i` uses
    /// the stream [`RngSeed::for_sample`]`(target, i)`.
    pub fn trial_counts(
        &self,
        target: Word,
        hp: &Hyperparams,
        n_samples: usize,
        seed: RngSeed,
    ) -> Result<Vec<u32>, SimError> {
        let target_idx = self.target_index(target)?;
        if n_samples == 0 {
            return Err(SimError::ZeroSamples);
        }
        Ok((0..n_samples as u64)
            .into_par_iter()
            .map(|i| self.run(target_idx, hp, &mut seed.for_sample(target, i).rng(), |_| {}))
            .collect())
    }

    /// Monte Carlo trial distribution of `target` over `n_samples` players.
    pub fn trial_distribution(
        &self,
        target: Word,
        hp: &Hyperparams,
        n_samples: usize,
        seed: RngSeed,
    ) -> Result<TrialDistribution, SimError> {
        let counts = self.trial_counts(target, hp, n_samples, seed)?;
        let mut bins = [0u64; CATEGORIES];
        for c in counts {
            bins[category_of(c) - 1] += 1;
        }
        Ok(TrialDistribution::from_counts(&bins).expect("at least one sample"))
    }
}

/// One-off version of [`Simulator::simulate_trial`].
pub fn simulate_trial<R: Rng + ?Sized>(
    target: Word,
    dict: &Dictionary,
    hp: &Hyperparams,
    weighting: Weighting,
    rng: &mut R,
) -> Result<u32, SimError> {
    Simulator::new(dict, weighting).simulate_trial(target, hp, rng)
}

/// One-off version of [`Simulator::trial_distribution`].
pub fn trial_distribution(
    target: Word,
    dict: &Dictionary,
    hp: &Hyperparams,
    weighting: Weighting,
    n_samples: usize,
    seed: RngSeed,
) -> Result<TrialDistribution, SimError> {
    Simulator::new(dict, weighting).trial_distribution(target, hp, n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn dict(pairs: &[(&str, f64)]) -> Dictionary {
        Dictionary::from_weights(pairs.iter().map(|&(s, f)| (w(s), f))).unwrap()
    }

    fn hp(k: usize, t: f64) -> Hyperparams {
        Hyperparams::new(k, t).unwrap()
    }

    #[test]
    fn hyperparam_validation() {
        assert!(Hyperparams::new(0, 1.0).is_err());
        assert!(Hyperparams::new(1, 0.0).is_err());
        assert!(Hyperparams::new(1, f64::INFINITY).is_err());
        // deserialization goes through the same check
        assert!(Hyperparams::try_from(RawHyperparams { k: 0, t: 1.0 }).is_err());
    }

    #[test]
    fn singleton_dictionary() {
        let d = dict(&[("eerie", 1.0)]);
        let mut rng = RngSeed::new(1).rng();
        for _ in 0..10 {
            assert_eq!(choose_word(&d, &hp(50, 0.3), Weighting::Cap, &mut rng).unwrap(), w("eerie"));
        }
        let dist = trial_distribution(w("eerie"), &d, &hp(3, 0.5), Weighting::Cap, 100, RngSeed::new(4)).unwrap();
        assert_eq!(dist.mass(), &[1., 0., 0., 0., 0., 0., 0.]);
    }

    #[test]
    fn k_one_is_deterministic_top_pick() {
        let d = dict(&[("about", 5.), ("train", 3.), ("eerie", 1.)]);
        let mut rng = RngSeed::new(9).rng();
        for _ in 0..20 {
            assert_eq!(choose_word(&d, &hp(1, 0.01), Weighting::Cap, &mut rng).unwrap(), w("about"));
        }
        assert_eq!(simulate_trial(w("about"), &d, &hp(1, 1.0), Weighting::Cap, &mut rng).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let d = dict(&[("about", 5.)]);
        let mut rng = RngSeed::new(0).rng();
        assert_eq!(
            simulate_trial(w("zesty"), &d, &hp(1, 1.0), Weighting::Cap, &mut rng),
            Err(SimError::TargetNotInDictionary("zesty".into()))
        );
        let sim = Simulator::new(&d, Weighting::Cap);
        assert_eq!(sim.trial_distribution(w("about"), &hp(1, 1.0), 0, RngSeed::new(0)), Err(SimError::ZeroSamples));
        let empty = d.retain_by(|_| false);
        assert_eq!(choose_word(&empty, &hp(1, 1.0), Weighting::Cap, &mut rng), Err(SimError::EmptyDictionary));
    }

    #[test]
    fn cap_weights() {
        assert_eq!(Weighting::Cap.weight(0.5, 0.6, 0.5), 0.3);
        assert_eq!(Weighting::Cap.weight(0.2, 0.6, 0.5), 0.2);
        assert_eq!(Weighting::Plain.weight(0.2, 3.0, 0.5), 0.2 * 3.0);
        assert_eq!("plain".parse::<Weighting>().unwrap(), Weighting::Plain);
        assert!("hot".parse::<Weighting>().is_err());
    }

    #[test]
    fn zero_frequency_candidates_fall_back_to_uniform() {
        let d = Dictionary::from_entries(vec![
            crate::ingest::Entry { word: w("about"), freq: 0.0 },
            crate::ingest::Entry { word: w("train"), freq: 0.0 },
        ])
        .unwrap();
        let mut rng = RngSeed::new(2).rng();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..64 {
            seen.insert(choose_word(&d, &hp(2, 1.0), Weighting::Cap, &mut rng).unwrap());
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn categories() {
        assert_eq!(category_of(1), 1);
        assert_eq!(category_of(6), 6);
        assert_eq!(category_of(7), 7);
        assert_eq!(category_of(40), 7);
    }

    #[test]
    fn substreams_differ() {
        let s = RngSeed::new(42);
        assert_ne!(s.for_sample(w("eerie"), 0), s.for_sample(w("eerie"), 1));
        assert_ne!(s.for_sample(w("eerie"), 0), s.for_sample(w("train"), 0));
        assert_eq!(s.for_sample(w("eerie"), 7), s.for_sample(w("eerie"), 7));
    }
}
