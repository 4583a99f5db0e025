//! Wordle clue coloring and clue-consistent filtering.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::ingest::Dictionary;
use crate::word::{InvalidWord, Word, WORD_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Grey,
    Yellow,
    Green,
}

impl Color {
    fn symbol(self) -> char {
        match self {
            Color::Grey => '-',
            Color::Yellow => 'Y',
            Color::Green => 'G',
        }
    }
}

/// Per-position clue for one guess. Displays as e.g. `-G-YG`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Feedback([Color; WORD_LEN]);

impl Feedback {
    pub const ALL_GREEN: Feedback = Feedback([Color::Green; WORD_LEN]);

    pub fn new(colors: [Color; WORD_LEN]) -> Self {
        Feedback(colors)
    }

    pub fn colors(&self) -> &[Color; WORD_LEN] {
        &self.0
    }

    pub fn is_solved(&self) -> bool {
        *self == Self::ALL_GREEN
    }

    /// Base-3 encoding in `0..243`.
    pub fn code(&self) -> u8 {
        self.0.iter().rev().fold(0u8, |acc, c| acc * 3 + *c as u8)
    }
}

impl fmt::Display for Feedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|c| write!(f, "{}", c.symbol()))
    }
}

impl FromStr for Feedback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != WORD_LEN {
            return Err(format!("feedback {s:?} must have 5 symbols"));
        }
        let mut colors = [Color::Grey; WORD_LEN];
        for (slot, ch) in colors.iter_mut().zip(chars) {
            *slot = match ch.to_ascii_uppercase() {
                'G' => Color::Green,
                'Y' => Color::Yellow,
                '-' | '.' | 'X' => Color::Grey,
                other => return Err(format!("unknown feedback symbol {other:?}")),
            };
        }
        Ok(Feedback(colors))
    }
}

impl Serialize for Feedback {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Colors `guess` against `target` with the standard duplicate-letter
/// rule: exact matches go Green first and consume their target letter,
/// then remaining letters go Yellow left to right while unconsumed copies
/// remain, otherwise Grey.
pub fn score_guess(guess: Word, target: Word) -> Feedback {
    let g = guess.letter_indices();
    let t = target.letter_indices();
    let mut colors = [Color::Grey; WORD_LEN];
    let mut unused = [0u8; 26];
    for i in 0..WORD_LEN {
        if g[i] == t[i] {
            colors[i] = Color::Green;
        } else {
            unused[t[i]] += 1;
        }
    }
    for i in 0..WORD_LEN {
        if colors[i] != Color::Green && unused[g[i]] > 0 {
            unused[g[i]] -= 1;
            colors[i] = Color::Yellow;
        }
    }
    Feedback(colors)
}

/// String form of [`score_guess`] that validates both words.
pub fn score_guess_str(guess: &str, target: &str) -> Result<Feedback, InvalidWord> {
    Ok(score_guess(Word::parse(guess)?, Word::parse(target)?))
}

/// Words of `dict` that would have produced `fb` had they been the target,
/// in dictionary order with their original frequencies.
pub fn filter_dictionary(dict: &Dictionary, guess: Word, fb: Feedback) -> Dictionary {
    dict.retain_by(|e| score_guess(guess, e.word) == fb)
}

/// Dense table of clue codes for every (guess, target) pair of a
/// dictionary, indexed by dictionary position.
pub(crate) struct FeedbackTable {
    n: usize,
    codes: Vec<u8>,
}

impl FeedbackTable {
    /// Table size cap in entries (n²); larger dictionaries score on the fly.
    pub(crate) const MAX_CELLS: usize = 1 << 24;

    pub(crate) fn build(dict: &Dictionary) -> Option<Self> {
        let n = dict.len();
        if n.checked_mul(n)? > Self::MAX_CELLS {
            return None;
        }
        let words: Vec<Word> = dict.words().collect();
        let mut codes = Vec::with_capacity(n * n);
        for &g in &words {
            codes.extend(words.iter().map(|&t| score_guess(g, t).code()));
        }
        Some(FeedbackTable { n, codes })
    }

    #[inline]
    pub(crate) fn code(&self, guess: usize, target: usize) -> u8 {
        self.codes[guess * self.n + target]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    /// Independent scorer: counts letter multiplicities directly instead of
    /// consuming a multiset.
    fn oracle(guess: &str, target: &str) -> [Color; 5] {
        let g: Vec<char> = guess.chars().collect();
        let t: Vec<char> = target.chars().collect();
        let mut out = [Grey; 5];
        for i in 0..5 {
            if g[i] == t[i] {
                out[i] = Green;
                continue;
            }
            let c = g[i];
            let in_target = t.iter().filter(|&&x| x == c).count();
            let greens = (0..5).filter(|&j| g[j] == c && t[j] == c).count();
            let earlier_yellows = (0..i).filter(|&j| g[j] == c && t[j] != c).count();
            if earlier_yellows + greens < in_target {
                out[i] = Yellow;
            }
        }
        out
    }

    #[test]
    fn identity_is_all_green() {
        assert!(score_guess(w("crane"), w("crane")).is_solved());
    }

    #[test]
    fn duplicate_letters() {
        assert_eq!(score_guess(w("melee"), w("eerie")).colors(), &[Grey, Green, Grey, Yellow, Green]);
        assert_eq!(oracle("melee", "eerie"), [Grey, Green, Grey, Yellow, Green]);
        // 'train' has its only 'a' at index 2 (0-based), so that position is
        // Green and every other 'a' is Grey.
        assert_eq!(oracle("aaaaa", "train"), [Grey, Grey, Green, Grey, Grey]);
        assert_eq!(score_guess(w("aaaaa"), w("train")).colors(), &oracle("aaaaa", "train"));
        assert_eq!(score_guess(w("speed"), w("abide")).to_string(), "--Y-Y");
        assert_eq!(score_guess(w("eerie"), w("melee")).to_string(), "YG--G");
    }

    #[test]
    fn matches_oracle_on_letter_heavy_words() {
        let words = ["eerie", "melee", "geese", "levee", "sheep", "train", "aaaaa", "llama", "label", "belle"];
        for g in words {
            for t in words {
                assert_eq!(score_guess(w(g), w(t)).colors(), &oracle(g, t), "{g} vs {t}");
            }
        }
    }

    #[test]
    fn feedback_roundtrip_and_code() {
        let fb: Feedback = "-G-YG".parse().unwrap();
        assert_eq!(fb.to_string(), "-G-YG");
        assert_eq!(Feedback::ALL_GREEN.code(), 242);
        assert!("GGG".parse::<Feedback>().is_err());
        assert!(score_guess_str("abc", "train").is_err());
    }

    #[test]
    fn filter_small_dictionary() {
        let d = Dictionary::from_weights(["about", "train", "eerie", "query"].map(|s| (w(s), 1.0))).unwrap();
        let fb = score_guess(w("about"), w("train"));
        let out = filter_dictionary(&d, w("about"), fb);
        assert!(!out.contains(w("about")));
        assert!(out.contains(w("train")));
        // original frequencies survive
        assert_eq!(out.freq(w("train")), d.freq(w("train")));

        let solved = filter_dictionary(&d, w("eerie"), Feedback::ALL_GREEN);
        assert_eq!(solved.words().collect::<Vec<_>>(), [w("eerie")]);
    }
}
