//! Lexical density: share of content words times mean TF-IDF novelty per utterance.
//!
//! Every utterance is its own document. Stopwords are removed before TF-IDF,
//! so they only ever move the content ratio.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const BUNDLED: &str = include_str!("../../data/stopwords.txt");

/// SHA-256 of the bundled list file.
pub const BUNDLED_SHA256: &str = "d2dbd6ddebbf8a751f9d36dfcd0a765ce41f7289f8b4e6c790c6b084a1debc37";

const CLITICS: [&str; 6] = ["s", "d", "ll", "m", "re", "ve"];

#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    pub fn bundled() -> Self {
        Self::from_text(BUNDLED)
    }

    /// One term per line; blank lines ignored.
    pub fn from_text(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| l.trim().to_lowercase().replace(['\u{2019}', '`'], "'"))
            .filter(|l| !l.is_empty())
            .collect();
        Self { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn bundled_checksum() -> String {
        Sha256::digest(BUNDLED.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::bundled()
    }
}

/// Lower-cases, keeps word characters and intra-word apostrophes, and splits
/// clitics off their host ("don't" becomes "do" and "n't").
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase().replace(['\u{2019}', '\u{2018}', '`'], "'");
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '\'' { c } else { ' ' })
        .collect();
    let mut out = Vec::new();
    for raw in cleaned.split_whitespace() {
        let word = raw.trim_matches('\'');
        if word.is_empty() {
            continue;
        }
        if let Some(stem) = word.strip_suffix("n't").filter(|s| !s.is_empty()) {
            push_clean(&mut out, stem);
            out.push("n't".to_string());
            continue;
        }
        match word.rfind('\'') {
            Some(pos) if pos > 0 && CLITICS.contains(&&word[pos + 1..]) => {
                push_clean(&mut out, &word[..pos]);
                out.push(word[pos..].to_string());
            }
            _ => push_clean(&mut out, word),
        }
    }
    out
}

fn push_clean(out: &mut Vec<String>, word: &str) {
    let w = word.trim_matches('\'');
    if !w.is_empty() {
        out.push(w.to_string());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexicalScores {
    pub content_ratio: f64,
    pub novelty: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Default)]
pub struct LexicalDensity {
    pub stopwords: StopwordList,
    /// `None` means natural log.
    pub log_base: Option<f64>,
}

impl LexicalDensity {
    fn log(&self, x: f64) -> f64 {
        match self.log_base {
            Some(b) => x.ln() / b.ln(),
            None => x.ln(),
        }
    }

    fn content_terms(&self, utterance: &str) -> Vec<String> {
        tokenize(utterance)
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .collect()
    }

    /// Content tokens over all tokens, pooled across the dialogue. Zero when there are no tokens.
    pub fn content_ratio<S: AsRef<str>>(&self, utterances: &[S]) -> f64 {
        let (mut all, mut content) = (0usize, 0usize);
        for u in utterances {
            for t in tokenize(u.as_ref()) {
                all += 1;
                if !self.stopwords.contains(&t) {
                    content += 1;
                }
            }
        }
        if all == 0 {
            0.0
        } else {
            content as f64 / all as f64
        }
    }

    /// One weight map per utterance: raw term count times log(n / df).
    pub fn tfidf<S: AsRef<str>>(&self, utterances: &[S]) -> Vec<BTreeMap<String, f64>> {
        let n = utterances.len();
        let counts: Vec<BTreeMap<String, u32>> = utterances
            .iter()
            .map(|u| {
                let mut m = BTreeMap::new();
                for t in self.content_terms(u.as_ref()) {
                    *m.entry(t).or_insert(0) += 1;
                }
                m
            })
            .collect();
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for c in &counts {
            for term in c.keys() {
                *df.entry(term.as_str()).or_insert(0) += 1;
            }
        }
        counts
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(term, &tf)| {
                        let idf = self.log(n as f64 / df[term.as_str()] as f64);
                        (term.clone(), tf as f64 * idf)
                    })
                    .collect()
            })
            .collect()
    }

    /// Mean over utterances of the mean non-zero weight (0 for an utterance with none).
    pub fn novelty<S: AsRef<str>>(&self, utterances: &[S]) -> f64 {
        if utterances.is_empty() {
            return 0.0;
        }
        let weights = self.tfidf(utterances);
        let total: f64 = weights
            .iter()
            .map(|w| {
                let nz: Vec<f64> = w.values().copied().filter(|v| *v != 0.0).collect();
                if nz.is_empty() {
                    0.0
                } else {
                    nz.iter().sum::<f64>() / nz.len() as f64
                }
            })
            .sum();
        total / utterances.len() as f64
    }

    pub fn score<S: AsRef<str>>(&self, utterances: &[S]) -> LexicalScores {
        let content_ratio = self.content_ratio(utterances);
        let novelty = self.novelty(utterances);
        LexicalScores {
            content_ratio,
            novelty,
            density: 100.0 * content_ratio * novelty,
        }
    }

    pub fn lexical_density<S: AsRef<str>>(&self, utterances: &[S]) -> f64 {
        self.score(utterances).density
    }

    /// Joint dialogue of both speakers, one utterance per turn.
    pub fn score_transcript(&self, transcript: &crate::Transcript) -> LexicalScores {
        let texts: Vec<&str> = transcript.turns.iter().map(|t| t.text.as_str()).collect();
        self.score(&texts)
    }
}
