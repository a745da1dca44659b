//! Exhaustive interactivity levels for tiny two-player games.
//!
//! Player 1 holds `x1` and answers; player 2 holds `x2`. A level-k exchange is
//! k messages, alternating, with player 2 always speaking last. Every message is
//! one of the `|V|^n` strings of the message space and may depend on the
//! speaker's private label and on the full history so far.
//!
//! Only deterministic encodings are searched. The objective is linear in any
//! mixture of deterministic strategy profiles, so its maximum over mixtures is
//! reached at a pure profile and randomization cannot help.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_GUARD: u64 = 10_000_000;
const EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum InteractivityError {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("search space of {cardinality:.3e} encoding tuples exceeds the guard of {guard}")]
    SearchTooLarge { cardinality: f64, guard: u64 },
    #[error("reading game file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing game file: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractGame {
    pub x1: Vec<String>,
    pub x2: Vec<String>,
    pub answers: Vec<String>,
    /// `p[i][j]` is the probability of `(x1[i], x2[j])`.
    pub p: Vec<Vec<f64>>,
    /// `payoff[i][j][a]`.
    pub payoff: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageSpace {
    pub vocab: Vec<String>,
    pub n: u32,
}

impl MessageSpace {
    pub fn new(vocab: &[&str], n: u32) -> Self {
        Self {
            vocab: vocab.iter().map(|s| s.to_string()).collect(),
            n,
        }
    }

    pub fn size(&self) -> usize {
        self.vocab.len().pow(self.n)
    }

    /// The `idx`-th string, most significant symbol first, space separated.
    pub fn message(&self, mut idx: usize) -> String {
        let v = self.vocab.len();
        let mut syms = vec![""; self.n as usize];
        for slot in syms.iter_mut().rev() {
            *slot = &self.vocab[idx % v];
            idx /= v;
        }
        syms.join(" ")
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl AbstractGame {
    pub fn validate(&self) -> Result<(), InteractivityError> {
        let bad = |m: &str| Err(InteractivityError::InvalidGame(m.to_string()));
        if self.x1.is_empty() || self.x2.is_empty() || self.answers.is_empty() {
            return bad("label sets must be non-empty");
        }
        if self.p.len() != self.x1.len() || self.p.iter().any(|r| r.len() != self.x2.len()) {
            return bad("p must be |X1| x |X2|");
        }
        if self.p.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("probabilities must be non-negative");
        }
        let total: f64 = self.p.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(&format!("probabilities sum to {total}, not 1"));
        }
        let shape_ok = self.payoff.len() == self.x1.len()
            && self
                .payoff
                .iter()
                .all(|r| r.len() == self.x2.len() && r.iter().all(|c| c.len() == self.answers.len()));
        if !shape_ok {
            return bad("payoff must be |X1| x |X2| x |A|");
        }
        if self.payoff.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return bad("payoffs must be finite");
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, InteractivityError> {
        let g: AbstractGame = toml::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    /// Player 1 must answer with `x2`.
    pub fn identity(n: usize) -> Self {
        let x2 = labels("v", n);
        let p = vec![vec![1.0 / n as f64; n]];
        let payoff = vec![(0..n)
            .map(|j| (0..n).map(|a| f64::from(u8::from(a == j))).collect())
            .collect()];
        Self {
            x1: vec!["_".into()],
            answers: x2.clone(),
            x2,
            p,
            payoff,
        }
    }

    /// Every answer pays 1.
    pub fn constant() -> Self {
        Self {
            x1: vec!["a".into(), "b".into()],
            x2: vec!["c".into(), "d".into()],
            answers: vec!["yes".into(), "no".into()],
            p: vec![vec![0.25; 2]; 2],
            payoff: vec![vec![vec![1.0; 2]; 2]; 2],
        }
    }

    /// `x1` picks which bit of the two-bit `x2` is the answer.
    pub fn pointer() -> Self {
        let x2 = ["00", "01", "10", "11"];
        Self {
            x1: vec!["1".into(), "2".into()],
            x2: x2.iter().map(|s| s.to_string()).collect(),
            answers: vec!["0".into(), "1".into()],
            p: vec![vec![0.125; 4]; 2],
            payoff: (0..2)
                .map(|i| {
                    x2.iter()
                        .map(|bits| {
                            let bit = bits.as_bytes()[i] - b'0';
                            (0..2).map(|a| f64::from(u8::from(a == bit))).collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Uniform-ish random game with payoffs in [0, 1].
    pub fn random<R: Rng>(rng: &mut R, n1: usize, n2: usize, na: usize) -> Self {
        let raw: Vec<Vec<f64>> = (0..n1)
            .map(|_| (0..n2).map(|_| rng.random_range(0.05..1.0)).collect())
            .collect();
        let total: f64 = raw.iter().flatten().sum();
        let p = raw
            .into_iter()
            .map(|r| r.into_iter().map(|v| v / total).collect())
            .collect();
        let payoff = (0..n1)
            .map(|_| {
                (0..n2)
                    .map(|_| (0..na).map(|_| rng.random_range(0.0..=1.0)).collect())
                    .collect()
            })
            .collect();
        Self {
            x1: labels("a", n1),
            x2: labels("b", n2),
            answers: labels("z", na),
            p,
            payoff,
        }
    }
}

/// On-disk game file: the game tables plus the message space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    #[serde(flatten)]
    pub game: AbstractGame,
    pub message_space: MessageSpace,
}

impl GameFile {
    pub fn load(path: &Path) -> Result<Self, InteractivityError> {
        let f: GameFile = toml::from_str(&std::fs::read_to_string(path)?)?;
        f.game.validate()?;
        if f.message_space.vocab.is_empty() {
            return Err(InteractivityError::InvalidGame("empty vocabulary".into()));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    One,
    Two,
}

/// Speakers of a level-k exchange, in order. Player 2 always speaks last.
pub fn speakers(k: u32) -> Vec<Player> {
    (0..k)
        .map(|s| {
            if (k - s) % 2 == 1 {
                Player::Two
            } else {
                Player::One
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingEntry {
    pub private: String,
    pub history: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingStep {
    pub speaker: Player,
    pub table: Vec<EncodingEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerEntry {
    pub x1: String,
    pub history: Vec<String>,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub steps: Vec<EncodingStep>,
    /// Only reachable (x1, history) pairs with positive probability.
    pub answers: Vec<AnswerEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelValue {
    pub level: u32,
    pub value: f64,
    pub witness: Witness,
    pub tuples_searched: u64,
}

/// Layout of one encoding tuple as a flat digit vector in base `m`.
struct Layout {
    m: usize,
    n1: usize,
    n2: usize,
    speakers: Vec<Player>,
    /// Start of each step's block of digits.
    offsets: Vec<usize>,
    digits: usize,
}

impl Layout {
    fn new(game: &AbstractGame, m: usize, k: u32) -> Self {
        let speakers = speakers(k);
        let mut offsets = Vec::with_capacity(speakers.len());
        let mut digits = 0;
        for (s, who) in speakers.iter().enumerate() {
            offsets.push(digits);
            let private = match who {
                Player::One => game.x1.len(),
                Player::Two => game.x2.len(),
            };
            digits += private * m.pow(s as u32);
        }
        Self {
            m,
            n1: game.x1.len(),
            n2: game.x2.len(),
            speakers,
            offsets,
            digits,
        }
    }

    fn cardinality(&self) -> f64 {
        (self.m as f64).powi(self.digits as i32)
    }

    /// Message sent at step `s` by a speaker with private index `x`, given history code `h`.
    fn message(&self, tuple: &[usize], s: usize, x: usize, h: usize) -> usize {
        let stride = self.m.pow(s as u32);
        tuple[self.offsets[s] + x * stride + h]
    }

    fn history(&self, tuple: &[usize], i: usize, j: usize) -> usize {
        let mut h = 0;
        for s in 0..self.speakers.len() {
            let x = match self.speakers[s] {
                Player::One => i,
                Player::Two => j,
            };
            h = h * self.m + self.message(tuple, s, x, h);
        }
        h
    }

    fn histories(&self) -> usize {
        self.m.pow(self.speakers.len() as u32)
    }
}

struct Evaluator<'a> {
    game: &'a AbstractGame,
    layout: Layout,
    /// Support of p, as (i, j, p).
    support: Vec<(usize, usize, f64)>,
}

impl Evaluator<'_> {
    /// Value under the greedy answer policy, with the scratch table left filled.
    fn value(&self, tuple: &[usize], scratch: &mut [f64], touched: &mut Vec<usize>) -> f64 {
        let na = self.game.answers.len();
        let hs = self.layout.histories();
        for &cell in touched.iter() {
            scratch[cell * na..(cell + 1) * na].fill(0.0);
        }
        touched.clear();
        for &(i, j, p) in &self.support {
            let cell = i * hs + self.layout.history(tuple, i, j);
            let row = &mut scratch[cell * na..(cell + 1) * na];
            if row.iter().all(|v| *v == 0.0) && !touched.contains(&cell) {
                touched.push(cell);
            }
            for (a, slot) in row.iter_mut().enumerate() {
                *slot += p * self.game.payoff[i][j][a];
            }
        }
        touched
            .iter()
            .map(|&cell| {
                scratch[cell * na..(cell + 1) * na]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    }

    fn witness(&self, tuple: &[usize], space: &MessageSpace) -> Witness {
        let l = &self.layout;
        let history_strings = |h: usize, len: usize| -> Vec<String> {
            let mut out = vec![String::new(); len];
            let mut h = h;
            for slot in out.iter_mut().rev() {
                *slot = space.message(h % l.m);
                h /= l.m;
            }
            out
        };
        let steps = l
            .speakers
            .iter()
            .enumerate()
            .map(|(s, who)| {
                let privates = match who {
                    Player::One => &self.game.x1,
                    Player::Two => &self.game.x2,
                };
                let mut table = Vec::new();
                for (x, label) in privates.iter().enumerate() {
                    for h in 0..l.m.pow(s as u32) {
                        table.push(EncodingEntry {
                            private: label.clone(),
                            history: history_strings(h, s),
                            message: space.message(l.message(tuple, s, x, h)),
                        });
                    }
                }
                EncodingStep { speaker: *who, table }
            })
            .collect();

        let na = self.game.answers.len();
        let mut cells: Vec<(usize, usize)> = self
            .support
            .iter()
            .map(|&(i, j, _)| (i, l.history(tuple, i, j)))
            .collect();
        cells.sort_unstable();
        cells.dedup();
        let answers = cells
            .into_iter()
            .map(|(i, h)| {
                let mut row = vec![0.0; na];
                for &(si, j, p) in &self.support {
                    if si == i && l.history(tuple, i, j) == h {
                        for (a, slot) in row.iter_mut().enumerate() {
                            *slot += p * self.game.payoff[i][j][a];
                        }
                    }
                }
                let best = argmax(&row);
                AnswerEntry {
                    x1: self.game.x1[i].clone(),
                    history: history_strings(h, l.speakers.len()),
                    answer: self.game.answers[best].clone(),
                }
            })
            .collect();
        Witness { steps, answers }
    }
}

/// First index of the maximum.
fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in xs.iter().enumerate() {
        if *v > xs[best] + EPS {
            best = i;
        }
    }
    best
}

fn decode(mut idx: u64, m: usize, digits: usize) -> Vec<usize> {
    let mut t = vec![0; digits];
    for d in t.iter_mut().rev() {
        *d = (idx % m as u64) as usize;
        idx /= m as u64;
    }
    t
}

/// Increment in base `m`, least significant digit last. Returns false on wrap.
fn step(t: &mut [usize], m: usize) -> bool {
    for d in t.iter_mut().rev() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}

/// Best achievable expected payoff with player 1 answering alone.
pub fn best_value_level0(game: &AbstractGame) -> f64 {
    game.x1
        .iter()
        .enumerate()
        .map(|(i, _)| {
            (0..game.answers.len())
                .map(|a| {
                    (0..game.x2.len())
                        .map(|j| game.p[i][j] * game.payoff[i][j][a])
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// Exhaustive maximum over all level-k encoding tuples.
pub fn best_value_level_k(
    game: &AbstractGame,
    space: &MessageSpace,
    k: u32,
    guard: u64,
) -> Result<LevelValue, InteractivityError> {
    game.validate()?;
    let m = space.size();
    if m == 0 {
        return Err(InteractivityError::InvalidGame("empty message space".into()));
    }
    let layout = Layout::new(game, m, k);
    let cardinality = layout.cardinality();
    if cardinality > guard as f64 {
        return Err(InteractivityError::SearchTooLarge { cardinality, guard });
    }
    let total = cardinality as u64;
    let digits = layout.digits;
    let support = game
        .p
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, p)| (i, j, *p)))
        .filter(|(_, _, p)| *p > 0.0)
        .collect();
    let eval = Evaluator {
        game,
        layout,
        support,
    };
    let cells = eval.layout.n1 * eval.layout.histories() * game.answers.len();
    debug_assert!(eval.layout.n2 == game.x2.len());

    let chunk = 4096u64;
    let chunks = total.div_ceil(chunk);
    let (value, index) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut t = decode(start, m, digits);
            let mut scratch = vec![0.0; cells];
            let mut touched = Vec::new();
            let mut best = (f64::NEG_INFINITY, start);
            for idx in start..end {
                let v = eval.value(&t, &mut scratch, &mut touched);
                if v > best.0 + EPS {
                    best = (v, idx);
                }
                step(&mut t, m);
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 + EPS || ((b.0 - a.0).abs() <= EPS && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let tuple = decode(index, m, digits);
    Ok(LevelValue {
        level: k,
        value,
        witness: eval.witness(&tuple, space),
        tuples_searched: total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    /// Smallest level whose value exceeds `c`, if any up to `k_max`.
    pub level: Option<u32>,
    pub achieved_value: f64,
    pub witness: Option<Witness>,
    /// Best value at each level searched, starting at 0.
    pub values: Vec<f64>,
}

pub fn interactivity_level(
    game: &AbstractGame,
    space: &MessageSpace,
    c: f64,
    k_max: u32,
    guard: u64,
) -> Result<LevelResult, InteractivityError> {
    let mut values = Vec::new();
    let mut last = None;
    for k in 0..=k_max {
        let lv = best_value_level_k(game, space, k, guard)?;
        values.push(lv.value);
        if lv.value > c {
            return Ok(LevelResult {
                level: Some(k),
                achieved_value: lv.value,
                witness: Some(lv.witness),
                values,
            });
        }
        last = Some(lv);
    }
    Ok(LevelResult {
        level: None,
        achieved_value: last.as_ref().map_or(f64::NAN, |l| l.value),
        witness: None,
        values,
    })
}
