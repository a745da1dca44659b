//! Centering-theory coherence over dialogue turns.
//!
//! Noun phrases come from a deterministic shallow chunker: a small closed-class
//! lexicon plus suffix guesses for open-class words. Each turn is one utterance.
//! Centers are compared by normalized string identity (or head noun, if asked).

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

const LEXICON: &str = include_str!("../../data/lexicon.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Subject,
    Object,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounPhrase {
    /// Lower-cased, punctuation and leading determiners removed.
    pub text: String,
    pub role: Role,
    /// Token offset of the phrase start within the utterance.
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    Start,
    Continue,
    Retain,
    SmoothShift,
    RoughShift,
}

impl Transition {
    pub const SCORED: [Transition; 4] = [
        Transition::Continue,
        Transition::Retain,
        Transition::SmoothShift,
        Transition::RoughShift,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Transition::Start => "start",
            Transition::Continue => "continue",
            Transition::Retain => "retain",
            Transition::SmoothShift => "smooth_shift",
            Transition::RoughShift => "rough_shift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransitionWeights {
    #[serde(rename = "continue")]
    pub cont: f64,
    pub retain: f64,
    pub smooth_shift: f64,
    pub rough_shift: f64,
}

impl Default for TransitionWeights {
    fn default() -> Self {
        Self {
            cont: 3.0,
            retain: 2.0,
            smooth_shift: 1.0,
            rough_shift: 0.0,
        }
    }
}

impl TransitionWeights {
    pub fn weight(&self, t: Transition) -> f64 {
        match t {
            Transition::Start => 0.0,
            Transition::Continue => self.cont,
            Transition::Retain => self.retain,
            Transition::SmoothShift => self.smooth_shift,
            Transition::RoughShift => self.rough_shift,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CenteringConfig {
    /// An undefined previous Cb counts as equal to any defined Cb.
    pub undefined_prev_matches: bool,
    /// Compare phrases by their last word instead of the full chunk.
    pub head_match: bool,
    pub weights: TransitionWeights,
}

impl Default for CenteringConfig {
    fn default() -> Self {
        Self {
            undefined_prev_matches: true,
            head_match: false,
            weights: TransitionWeights::default(),
        }
    }
}

impl CenteringConfig {
    fn key<'a>(&self, text: &'a str) -> &'a str {
        if self.head_match {
            text.rsplit(' ').next().unwrap_or(text)
        } else {
            text
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterState {
    /// Ranked: subjects, then objects, then the rest.
    pub cf: Vec<NounPhrase>,
    pub cp: Option<String>,
    pub cb: Option<String>,
}

/// Strips literal escape sequences, markdown emphasis, turn numbers and speaker labels.
pub fn preprocess(text: &str) -> String {
    static ESCAPES: OnceLock<Regex> = OnceLock::new();
    static LABEL: OnceLock<Regex> = OnceLock::new();
    let escapes = ESCAPES.get_or_init(|| Regex::new(r"\\+[nrt]").unwrap());
    let label = LABEL.get_or_init(|| {
        Regex::new(
            r"(?im)^[ \t]*(?:\d+\.[ \t]*)?(?:(?:alice|bob|me|you|user|assistant|player ?[12])[ \t]*:[ \t]*)?",
        )
        .unwrap()
    });
    let s = escapes.replace_all(text, " ");
    let s: String = s
        .chars()
        .filter(|c| !matches!(c, '*' | '_' | '#' | '`'))
        .collect();
    let s = label.replace_all(&s, "");
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Det,
    Pron,
    Prep,
    Conj,
    Wh,
    Aux,
    Verb,
    VerbNoun,
    VerbPrep,
    Adv,
    Adj,
    Interj,
    Noun,
}

impl Class {
    fn parse(s: &str) -> Option<Class> {
        Some(match s {
            "det" => Class::Det,
            "pron" => Class::Pron,
            "prep" => Class::Prep,
            "conj" => Class::Conj,
            "wh" => Class::Wh,
            "aux" => Class::Aux,
            "verb" => Class::Verb,
            "vn" => Class::VerbNoun,
            "vp" => Class::VerbPrep,
            "adv" => Class::Adv,
            "adj" => Class::Adj,
            "interj" => Class::Interj,
            "noun" => Class::Noun,
            _ => return None,
        })
    }
}

/// Context-resolved part of speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Det,
    Adj,
    Noun,
    Num,
    Pron,
    /// `finite` is false for suffix-guessed participles.
    Verb {
        finite: bool,
    },
    Prep,
    Boundary,
    Other,
}

impl Tag {
    fn in_np(self) -> bool {
        matches!(self, Tag::Det | Tag::Adj | Tag::Noun | Tag::Num | Tag::Pron)
    }

    fn is_head(self) -> bool {
        matches!(self, Tag::Noun | Tag::Num | Tag::Pron)
    }
}

const PRONOUN_DETS: &[&str] = &[
    "this", "that", "these", "those", "all", "both", "each", "either", "neither", "some", "any", "many",
    "few", "much", "more", "most", "another", "several",
];
const SUBJECT_PRONOUNS: &[&str] = &["i", "you", "he", "she", "it", "we", "they"];

#[derive(Debug, Clone)]
pub struct Chunker {
    lexicon: HashMap<String, Class>,
}

impl Default for Chunker {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Chunker {
    pub fn bundled() -> Self {
        Self::from_lexicon(LEXICON)
    }

    /// Lines of `class: word word ...`; `#` starts a comment. The first class listed for a word wins.
    pub fn from_lexicon(text: &str) -> Self {
        let mut lexicon = HashMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            let Some((class, words)) = line.split_once(':') else {
                continue;
            };
            let Some(class) = Class::parse(class.trim()) else {
                continue;
            };
            for w in words.split_whitespace() {
                lexicon.entry(w.to_lowercase()).or_insert(class);
            }
        }
        Self { lexicon }
    }

    pub fn lexicon_len(&self) -> usize {
        self.lexicon.len()
    }

    fn class_of(&self, word: &str, sentence_initial: bool) -> Option<Class> {
        if let Some(c) = self.lexicon.get(&word.to_lowercase()) {
            return Some(*c);
        }
        if word.chars().all(|c| c.is_ascii_digit() || c == ',' || c == '.') {
            return None;
        }
        let capitalized = word.chars().next().is_some_and(char::is_uppercase);
        if capitalized && !sentence_initial {
            return Some(Class::Noun);
        }
        Some(guess(&word.to_lowercase()))
    }

    /// Noun phrases of one cleaned utterance with their grammatical roles.
    pub fn extract_nps(&self, utterance: &str) -> Vec<NounPhrase> {
        let mut tokens = tokenize(utterance);
        // A leading "WORD:" is a label, not content.
        if tokens.len() >= 2 && tokens[1] == ":" && is_word(&tokens[0]) {
            tokens.drain(..2);
        }
        let mut out = Vec::new();
        let mut start = 0;
        for i in 0..=tokens.len() {
            let end_of_sentence = i == tokens.len() || matches!(tokens[i].as_str(), "." | "?" | "!" | "\n");
            if end_of_sentence {
                if i > start {
                    self.sentence_nps(&tokens[start..i], start, &mut out);
                }
                start = i + 1;
            }
        }
        out
    }

    fn tag_sentence(&self, toks: &[String]) -> Vec<Tag> {
        let classes: Vec<Option<Class>> = toks
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if is_word(t) {
                    self.class_of(t, i == 0)
                } else {
                    None
                }
            })
            .collect();
        let np_like = |j: usize| -> bool {
            match classes.get(j).copied().flatten() {
                Some(Class::Adj | Class::Noun | Class::Det | Class::VerbNoun) => true,
                None => toks.get(j).is_some_and(|t| is_number(t)),
                _ => false,
            }
        };
        let mut tags: Vec<Tag> = Vec::with_capacity(toks.len());
        let mut clause_has_verb = false;
        for (i, tok) in toks.iter().enumerate() {
            let lc = tok.to_lowercase();
            let tag = match classes[i] {
                None if is_number(tok) => Tag::Num,
                None => match tok.as_str() {
                    "," | ";" | ":" | "(" | ")" | "-" | "\u{2014}" | "\u{2013}" => Tag::Boundary,
                    _ => Tag::Other,
                },
                Some(Class::Det) => {
                    if np_like(i + 1) {
                        Tag::Det
                    } else if PRONOUN_DETS.contains(&lc.as_str()) {
                        Tag::Pron
                    } else if matches!(lc.as_str(), "which" | "what" | "whatever") {
                        Tag::Boundary
                    } else {
                        Tag::Other
                    }
                }
                Some(Class::Pron) => {
                    if lc == "her" && np_like(i + 1) {
                        Tag::Det
                    } else {
                        Tag::Pron
                    }
                }
                Some(Class::Prep) => Tag::Prep,
                Some(Class::Conj | Class::Wh) => Tag::Boundary,
                Some(Class::Aux | Class::Verb) => Tag::Verb { finite: true },
                Some(c @ (Class::VerbNoun | Class::VerbPrep)) => {
                    let prev = i.checked_sub(1).map(|p| (tags[p], toks[p].to_lowercase()));
                    let verbal = match prev {
                        Some((Tag::Pron, ref w)) => SUBJECT_PRONOUNS.contains(&w.as_str()),
                        Some((Tag::Verb { .. }, ref w)) => is_modal_or_do(w),
                        Some((Tag::Noun | Tag::Num, _)) => !clause_has_verb,
                        Some((_, ref w)) => w == "to",
                        None => false,
                    };
                    match (verbal, c) {
                        (true, _) => Tag::Verb { finite: true },
                        (false, Class::VerbNoun) => Tag::Noun,
                        _ => Tag::Prep,
                    }
                }
                Some(Class::Adv | Class::Interj) => Tag::Other,
                Some(Class::Adj) => Tag::Adj,
                Some(Class::Noun) => {
                    // Suffix guesses for participles land here as verbs.
                    let proper = i > 0 && tok.chars().next().is_some_and(char::is_uppercase);
                    if self.lexicon.contains_key(&lc) || !is_participle(&lc) || proper {
                        Tag::Noun
                    } else {
                        Tag::Verb { finite: false }
                    }
                }
            };
            match tag {
                Tag::Boundary => clause_has_verb = false,
                Tag::Verb { .. } => clause_has_verb = true,
                _ => {}
            }
            tags.push(tag);
        }
        tags
    }

    fn sentence_nps(&self, toks: &[String], offset: usize, out: &mut Vec<NounPhrase>) {
        let tags = self.tag_sentence(toks);
        let sentence_has_verb = tags.iter().any(|t| matches!(t, Tag::Verb { .. }));

        // Clause spans split at boundaries.
        let mut clauses = Vec::new();
        let mut cs = 0;
        for i in 0..=tags.len() {
            if i == tags.len() || tags[i] == Tag::Boundary {
                if i > cs {
                    clauses.push(cs..i);
                }
                cs = i + 1;
            }
        }

        let mut first_in_sentence = true;
        for clause in clauses {
            let first_finite = clause.clone().find(|&i| tags[i] == Tag::Verb { finite: true });
            let mut i = clause.start;
            while i < clause.end {
                if !tags[i].in_np() {
                    i += 1;
                    continue;
                }
                let mut j = i;
                // Pronouns stand alone; other NP tokens extend the run.
                if tags[i] == Tag::Pron {
                    j = i + 1;
                } else {
                    while j < clause.end && tags[j].in_np() && tags[j] != Tag::Pron {
                        j += 1;
                    }
                }
                let span = i..j;
                i = j;
                if !span.clone().any(|k| tags[k].is_head()) {
                    continue;
                }
                let Some(text) = normalize(&toks[span.clone()], &tags[span.clone()]) else {
                    continue;
                };
                let prev = span
                    .start
                    .checked_sub(1)
                    .filter(|&p| p >= clause.start)
                    .map(|p| tags[p]);
                let role = if !sentence_has_verb && first_in_sentence {
                    Role::Object
                } else if first_finite.is_some_and(|v| span.end <= v) {
                    Role::Subject
                } else if matches!(prev, Some(Tag::Verb { .. } | Tag::Prep)) {
                    Role::Object
                } else {
                    Role::Other
                };
                first_in_sentence = false;
                out.push(NounPhrase {
                    text,
                    role,
                    position: offset + span.start,
                });
            }
        }
    }
}

fn is_modal_or_do(w: &str) -> bool {
    matches!(
        w,
        "do" | "does"
            | "did"
            | "can"
            | "could"
            | "will"
            | "would"
            | "shall"
            | "should"
            | "may"
            | "might"
            | "must"
            | "don't"
            | "doesn't"
            | "didn't"
            | "can't"
            | "won't"
    )
}

fn is_participle(w: &str) -> bool {
    (w.len() > 5 && w.ends_with("ing")) || (w.len() > 4 && w.ends_with("ed"))
}

fn guess(w: &str) -> Class {
    const ADJ: &[&str] = &["ous", "ful", "ive", "able", "ible", "ish", "less", "ic"];
    if w.len() > 4 && w.ends_with("ly") {
        Class::Adv
    } else if w.len() > 5 && ADJ.iter().any(|s| w.ends_with(s)) {
        Class::Adj
    } else {
        // Participles are split out after tagging; everything else is a noun guess.
        Class::Noun
    }
}

fn is_word(t: &str) -> bool {
    t.chars().any(char::is_alphabetic) || t.starts_with('\'')
}

fn is_number(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_ascii_digit())
}

fn tokenize(text: &str) -> Vec<String> {
    static TOKEN: OnceLock<Regex> = OnceLock::new();
    let re = TOKEN.get_or_init(|| Regex::new(r"[\p{L}\p{N}]+(?:['\u{2019}-][\p{L}\p{N}]+)*|\S").unwrap());
    let mut out = Vec::new();
    for m in re.find_iter(&text.replace('\u{2019}', "'")) {
        let t = m.as_str();
        // Split possessive and verbal clitics ("it's" -> "it" "'s"); keep negated auxiliaries whole.
        match t.rfind('\'') {
            Some(p) if p > 0 && !t.to_lowercase().ends_with("n't") => {
                out.push(t[..p].to_string());
                out.push(t[p..].to_string());
            }
            _ => out.push(t.to_string()),
        }
    }
    out
}

fn normalize(toks: &[String], tags: &[Tag]) -> Option<String> {
    let skip = tags.iter().take_while(|t| **t == Tag::Det).count();
    let words: Vec<String> = toks[skip..]
        .iter()
        .map(|t| {
            t.to_lowercase()
                .chars()
                .filter(|c| c.is_alphanumeric() || *c == ' ' || *c == '-')
                .collect::<String>()
        })
        .filter(|w| !w.is_empty())
        .collect();
    (!words.is_empty()).then(|| words.join(" "))
}

/// Cf, Cp and Cb of the current turn given the previous turn's Cf.
pub fn centers(nps: &[NounPhrase], prev_cf: &[NounPhrase], config: &CenteringConfig) -> CenterState {
    let mut cf: Vec<NounPhrase> = Vec::with_capacity(nps.len());
    for role in [Role::Subject, Role::Object, Role::Other] {
        for np in nps.iter().filter(|n| n.role == role) {
            if !cf.iter().any(|c| config.key(&c.text) == config.key(&np.text)) {
                cf.push(np.clone());
            }
        }
    }
    let cp = nps
        .iter()
        .find(|n| n.role == Role::Subject)
        .or_else(|| nps.iter().find(|n| n.role == Role::Object))
        .map(|n| n.text.clone());
    let cb = prev_cf
        .iter()
        .find(|p| cf.iter().any(|c| config.key(&c.text) == config.key(&p.text)))
        .map(|p| p.text.clone());
    CenterState { cf, cp, cb }
}

/// Transition for a non-initial turn.
pub fn classify(
    prev_cb: Option<&str>,
    cb: Option<&str>,
    cp: Option<&str>,
    config: &CenteringConfig,
) -> Transition {
    let Some(cb) = cb else {
        return Transition::RoughShift;
    };
    let same_cb = match prev_cb {
        Some(p) => config.key(p) == config.key(cb),
        None => config.undefined_prev_matches,
    };
    let cb_is_cp = cp.is_some_and(|cp| config.key(cp) == config.key(cb));
    match (same_cb, cb_is_cp) {
        (true, true) => Transition::Continue,
        (true, false) => Transition::Retain,
        (false, true) => Transition::SmoothShift,
        (false, false) => Transition::RoughShift,
    }
}

/// Weighted mean over non-Start transitions; `None` when there are none.
pub fn coherence_score(transitions: &[Transition], weights: &TransitionWeights) -> Option<f64> {
    let scored: Vec<f64> = transitions
        .iter()
        .filter(|t| **t != Transition::Start)
        .map(|t| weights.weight(*t))
        .collect();
    (!scored.is_empty()).then(|| scored.iter().sum::<f64>() / scored.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringAnalysis {
    pub states: Vec<CenterState>,
    pub transitions: Vec<Transition>,
    pub score: Option<f64>,
}

impl CenteringAnalysis {
    pub fn count(&self, t: Transition) -> usize {
        self.transitions.iter().filter(|x| **x == t).count()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Centering {
    pub chunker: Chunker,
    pub config: CenteringConfig,
}

impl Centering {
    pub fn analyze<S: AsRef<str>>(&self, turns: &[S]) -> CenteringAnalysis {
        let mut states: Vec<CenterState> = Vec::with_capacity(turns.len());
        let mut transitions = Vec::with_capacity(turns.len());
        for (i, turn) in turns.iter().enumerate() {
            let nps = self.chunker.extract_nps(&preprocess(turn.as_ref()));
            let prev = states.last();
            let state = centers(&nps, prev.map_or(&[][..], |p| &p.cf), &self.config);
            let t = match prev {
                None => Transition::Start,
                Some(p) => classify(
                    p.cb.as_deref(),
                    state.cb.as_deref(),
                    state.cp.as_deref(),
                    &self.config,
                ),
            };
            debug_assert!(i > 0 || t == Transition::Start);
            transitions.push(t);
            states.push(state);
        }
        let score = coherence_score(&transitions, &self.config.weights);
        CenteringAnalysis {
            states,
            transitions,
            score,
        }
    }

    /// `None` for dialogues shorter than two turns.
    pub fn dialogue_cs(&self, transcript: &crate::Transcript) -> Option<f64> {
        if transcript.turns.len() < 2 {
            return None;
        }
        let texts: Vec<&str> = transcript.turns.iter().map(|t| t.text.as_str()).collect();
        self.analyze(&texts).score
    }
}
