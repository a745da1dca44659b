//! Deterministic baseline policies. They read only the history, their own view and the context seed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{Agent, AgentContext, AgentError};
use crate::budget::{token_count, tokenize};
use crate::games::chess::{board_summary, Board, BoardSummary, ChessAnswer, Color};
use crate::games::covr::{answer_from_flags, scene_flags};
use crate::games::namegame::{describe, guess_one_sequence};
use crate::games::PlayerView;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptedPolicy {
    /// Whichever policy below fits the player's view.
    #[default]
    Auto,
    ChessSummary,
    GuessOne,
    SelectionDescriber,
    SelectionGuesser,
    CovrFlags,
    /// Emits `words` filler tokens and never answers.
    Babble {
        words: u32,
    },
}

impl ScriptedPolicy {
    pub fn name(&self) -> String {
        match self {
            ScriptedPolicy::Auto => "auto".into(),
            ScriptedPolicy::ChessSummary => "chess-summary".into(),
            ScriptedPolicy::GuessOne => "guess-one".into(),
            ScriptedPolicy::SelectionDescriber => "selection-describer".into(),
            ScriptedPolicy::SelectionGuesser => "selection-guesser".into(),
            ScriptedPolicy::CovrFlags => "covr-flags".into(),
            ScriptedPolicy::Babble { words } => format!("babble-{words}"),
        }
    }

    fn resolve(self, view: &PlayerView<'_>) -> ScriptedPolicy {
        if self != ScriptedPolicy::Auto {
            return self;
        }
        match view {
            PlayerView::Chess { .. } => ScriptedPolicy::ChessSummary,
            PlayerView::NameGame { .. } => ScriptedPolicy::GuessOne,
            PlayerView::SelectionDescriber { .. } => ScriptedPolicy::SelectionDescriber,
            PlayerView::SelectionGuesser { .. } => ScriptedPolicy::SelectionGuesser,
            PlayerView::Covr { .. } => ScriptedPolicy::CovrFlags,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScriptedAgent {
    pub policy: ScriptedPolicy,
}

impl ScriptedAgent {
    pub fn new(policy: ScriptedPolicy) -> Self {
        ScriptedAgent { policy }
    }
}

impl Agent for ScriptedAgent {
    fn id(&self) -> String {
        format!("scripted:{}", self.policy.name())
    }

    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError> {
        let policy = self.policy.resolve(&ctx.view);
        let text = match (policy, ctx.view) {
            (ScriptedPolicy::Babble { words }, _) => return Ok(vec!["la"; words as usize].join(" ")),
            (ScriptedPolicy::ChessSummary, PlayerView::Chess { board }) => chess_turn(ctx, board),
            (ScriptedPolicy::GuessOne, PlayerView::NameGame { db }) => guess_one_turn(ctx, db),
            (ScriptedPolicy::SelectionDescriber, PlayerView::SelectionDescriber { space, target }) => {
                describer_turn(ctx, space, target)
            }
            (ScriptedPolicy::SelectionGuesser, PlayerView::SelectionGuesser { space, candidates }) => {
                guesser_turn(ctx, space, candidates)
            }
            (ScriptedPolicy::CovrFlags, PlayerView::Covr { .. }) => covr_turn(ctx),
            (p, _) => {
                return Err(AgentError::Config(format!(
                    "policy {} does not fit this game view",
                    p.name()
                )))
            }
        };
        Ok(fit_words(&text, ctx.word_limit))
    }
}

/// Keep at most `limit` whitespace words (at least one).
fn fit_words(text: &str, limit: u32) -> String {
    let limit = limit.max(1) as usize;
    if token_count(text) <= limit {
        text.to_string()
    } else {
        tokenize(text)[..limit].join(" ")
    }
}

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("valid regex"))
}

// ---- chess ----

fn rank_word(r: Option<u8>, none: &str) -> String {
    r.map_or(none.to_string(), |r| r.to_string())
}

/// Ten words in full form, two in the compact fallback.
pub fn summary_text(s: &BoardSummary, word_limit: u32) -> String {
    if word_limit >= 10 {
        format!(
            "Pieces: white {}, black {}. Pawns: white {}, black {}.",
            s.white_count,
            s.black_count,
            rank_word(s.white_pawn_max_rank, "none"),
            rank_word(s.black_pawn_min_rank, "none")
        )
    } else {
        format!(
            "{}/{} {}/{}",
            s.white_count,
            s.black_count,
            rank_word(s.white_pawn_max_rank, "-"),
            rank_word(s.black_pawn_min_rank, "-")
        )
    }
}

pub fn parse_summary(text: &str) -> Option<BoardSummary> {
    static FULL: OnceLock<Regex> = OnceLock::new();
    static COMPACT: OnceLock<Regex> = OnceLock::new();
    let rank = |s: &str| s.parse::<u8>().ok();
    let caps = re(
        &FULL,
        r"Pieces: white (\d+), black (\d+)\. Pawns: white (\d+|none), black (\d+|none)\.",
    )
    .captures_iter(text)
    .last()
    .or_else(|| {
        re(&COMPACT, r"(?:^|\s)(\d+)/(\d+) (\d+|-)/(\d+|-)(?:\s|$)")
            .captures_iter(text)
            .last()
    })?;
    Some(BoardSummary {
        white_count: caps[1].parse().ok()?,
        black_count: caps[2].parse().ok()?,
        white_pawn_max_rank: rank(&caps[3]),
        black_pawn_min_rank: rank(&caps[4]),
    })
}

/// Which board came first, judged from the two summaries. `None` when they tie.
pub fn compare_summaries(mine: &BoardSummary, theirs: &BoardSummary) -> Option<ChessAnswer> {
    // A later board has fewer pieces, more advanced white pawns, more advanced black pawns.
    let later = |o: Ordering| match o {
        Ordering::Less => Some(ChessAnswer::Yours),
        Ordering::Greater => Some(ChessAnswer::Mine),
        Ordering::Equal => None,
    };
    let my_total = mine.white_count + mine.black_count;
    let their_total = theirs.white_count + theirs.black_count;
    if let Some(a) = later(my_total.cmp(&their_total)) {
        return Some(a);
    }
    if let (Some(m), Some(t)) = (mine.white_pawn_max_rank, theirs.white_pawn_max_rank) {
        if let Some(a) = later(t.cmp(&m)) {
            return Some(a);
        }
    }
    if let (Some(m), Some(t)) = (mine.black_pawn_min_rank, theirs.black_pawn_min_rank) {
        if let Some(a) = later(m.cmp(&t)) {
            return Some(a);
        }
    }
    None
}

/// Pieces of each colour still on their own back rank.
pub fn back_rank_counts(board: &Board) -> (u32, u32) {
    let mut white = 0;
    let mut black = 0;
    for (sq, p) in board.pieces() {
        match (p.color, sq.rank()) {
            (Color::White, 0) => white += 1,
            (Color::Black, 7) => black += 1,
            _ => {}
        }
    }
    (white, black)
}

fn parse_back_ranks(text: &str) -> Option<(u32, u32)> {
    static FULL: OnceLock<Regex> = OnceLock::new();
    static COMPACT: OnceLock<Regex> = OnceLock::new();
    let caps = re(&FULL, r"Back ranks: white (\d+), black (\d+)\.")
        .captures_iter(text)
        .last()
        .or_else(|| re(&COMPACT, r"BR (\d+)/(\d+)").captures_iter(text).last())?;
    Some((caps[1].parse().ok()?, caps[2].parse().ok()?))
}

fn chess_turn(ctx: &AgentContext<'_>, board: &Board) -> String {
    let mine = board_summary(board);
    let my_back = back_rank_counts(board);
    let partner_back = ctx.partner_turns().rev().find_map(|t| parse_back_ranks(&t.text));
    if let Some((w, b)) = partner_back {
        // More pieces still at home means an earlier board.
        return match (my_back.0 + my_back.1).cmp(&(w + b)) {
            Ordering::Less => ChessAnswer::Yours,
            _ => ChessAnswer::Mine,
        }
        .sentinel()
        .to_string();
    }
    match ctx.partner_turns().rev().find_map(|t| parse_summary(&t.text)) {
        Some(theirs) => match compare_summaries(&mine, &theirs) {
            Some(answer) => answer.sentinel().to_string(),
            None if ctx.is_final_own_turn() => ChessAnswer::MINE.to_string(),
            None if ctx.word_limit >= 9 => format!(
                "Summaries tie. Back ranks: white {}, black {}. Back ranks?",
                my_back.0, my_back.1
            ),
            None => format!("BR {}/{}", my_back.0, my_back.1),
        },
        None if ctx.is_final_own_turn() => ChessAnswer::MINE.to_string(),
        None => summary_text(&mine, ctx.word_limit),
    }
}

// ---- name game ----

fn guess_one_turn(ctx: &AgentContext<'_>, db: &[crate::games::namegame::PersonRecord]) -> String {
    if let Some(last) = ctx.partner_turns().last() {
        let proposal = last
            .text
            .trim()
            .trim_start_matches("No match.")
            .trim()
            .trim_end_matches('?');
        if let Some(row) = db.iter().position(|r| describe(r) == proposal) {
            return format!("SELECT ROW {}", row + 1);
        }
    }
    let j = ctx.own_turns_taken();
    let order = guess_one_sequence(db.len() as u32, j + 1, ctx.seed);
    let Some(&row) = order.get(j) else {
        return "No match.".to_string();
    };
    let record = format!("{}?", describe(&db[row as usize - 1]));
    let prefixed = format!("No match. {record}");
    if j > 0 && token_count(&prefixed) <= ctx.word_limit as usize {
        prefixed
    } else {
        record
    }
}

// ---- selection ----

fn statements(text: &str) -> impl Iterator<Item = (String, String)> + '_ {
    static STMT: OnceLock<Regex> = OnceLock::new();
    re(&STMT, r"\b([a-z]+(?:-[a-z]+)?) is ([a-z]+)\.")
        .captures_iter(text)
        .map(|c| (c[1].to_string(), c[2].to_string()))
}

fn per_turn_features(word_limit: u32) -> usize {
    (word_limit as usize / 3).max(1)
}

fn describer_turn(
    ctx: &AgentContext<'_>,
    space: &crate::games::selection::FeatureSpace,
    target: &crate::games::selection::Item,
) -> String {
    static ASK: OnceLock<Regex> = OnceLock::new();
    let given: Vec<usize> = ctx
        .own_turns()
        .flat_map(|t| statements(&t.text).collect::<Vec<_>>())
        .filter_map(|(f, _)| space.index_of(&f))
        .collect();
    let requested: Vec<usize> = ctx
        .partner_turns()
        .last()
        .and_then(|t| re(&ASK, r"Tell me ([a-z\- ]+)\.").captures(&t.text))
        .map(|c| {
            c[1].split_whitespace()
                .filter_map(|f| space.index_of(f))
                .collect()
        })
        .unwrap_or_default();
    let mut order: Vec<usize> = Vec::new();
    for i in requested
        .into_iter()
        .chain((0..space.len()).filter(|i| !given.contains(i)))
    {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    order.truncate(per_turn_features(ctx.word_limit));
    if order.is_empty() {
        return "All features given.".to_string();
    }
    order
        .iter()
        .map(|&i| format!("{} is {}.", space.features[i].name, target.values[i]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn guesser_turn(
    ctx: &AgentContext<'_>,
    space: &crate::games::selection::FeatureSpace,
    candidates: &[crate::games::selection::Item],
) -> String {
    let mut described: BTreeMap<usize, String> = BTreeMap::new();
    for t in ctx.partner_turns() {
        for (f, v) in statements(&t.text) {
            if let Some(i) = space.index_of(&f) {
                described.insert(i, v);
            }
        }
    }
    let remaining: Vec<usize> = (0..candidates.len())
        .filter(|&c| described.iter().all(|(&i, v)| candidates[c].values[i] == *v))
        .collect();
    let all_described = described.len() == space.len();
    match remaining.as_slice() {
        [] => return "ANSWER: No match".to_string(),
        [only] if all_described || ctx.is_final_own_turn() => return format!("ANSWER: Image {only}"),
        [first, ..] if ctx.is_final_own_turn() => return format!("ANSWER: Image {first}"),
        _ => {}
    }
    // Most discriminating undescribed features first; the rest still need checking for a no-match.
    let mut open: Vec<(usize, usize)> = (0..space.len())
        .filter(|i| !described.contains_key(i))
        .map(|i| {
            let mut values: Vec<&String> = remaining.iter().map(|&c| &candidates[c].values[i]).collect();
            values.sort();
            values.dedup();
            (i, values.len())
        })
        .collect();
    open.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let n = per_turn_features(ctx.word_limit).min((ctx.word_limit as usize).saturating_sub(2).max(1));
    let names: Vec<&str> = open
        .iter()
        .take(n)
        .map(|(i, _)| space.features[*i].name.as_str())
        .collect();
    format!("Tell me {}.", names.join(" "))
}

// ---- covr ----

fn parse_flags(text: &str) -> Option<Vec<bool>> {
    static FLAGS: OnceLock<Regex> = OnceLock::new();
    let caps = re(&FLAGS, r"My image: ((?:yes|no)(?:, (?:yes|no))*)\.")
        .captures_iter(text)
        .last()?;
    Some(caps[1].split(", ").map(|w| w == "yes").collect())
}

fn covr_turn(ctx: &AgentContext<'_>) -> String {
    let PlayerView::Covr {
        scene,
        query,
        semantics,
        ..
    } = ctx.view
    else {
        unreachable!("dispatched on the covr view");
    };
    let mine = scene_flags(query, scene);
    let theirs = ctx
        .partner_turns()
        .rev()
        .find_map(|t| parse_flags(&t.text))
        .filter(|f| f.len() == mine.len());
    match theirs {
        Some(theirs) => format!("ANSWER: {}", answer_from_flags(query, &mine, &theirs, semantics)),
        None if ctx.is_final_own_turn() => {
            let unknown = vec![false; mine.len()];
            format!("ANSWER: {}", answer_from_flags(query, &mine, &unknown, semantics))
        }
        None => {
            let words: Vec<&str> = mine.iter().map(|&b| if b { "yes" } else { "no" }).collect();
            format!("My image: {}.", words.join(", "))
        }
    }
}
