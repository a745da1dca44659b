//! Whitespace tokenization and isotoken budget arithmetic.
//!
//! Budgets are counted in whitespace-delimited tokens. A dialogue with a
//! per-player budget `T` and a turn budget `t` gives every turn exactly
//! `⌊T/t⌋` tokens; unused tokens are never carried over.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default ratio between the stated word limit and the per-turn allowance.
/// `⌊a × 11/16⌋` reproduces the published prompt limits (32→22, 64→44, 16→11).
pub const DEFAULT_WORD_LIMIT_RATIO: (u32, u32) = (11, 16);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BudgetError {
    #[error("turn budget must be at least 1 (got {0})")]
    ZeroTurns(u32),
    #[error("turn budget must be even and at least 2 (got {0})")]
    OddTurns(u32),
    #[error("token budget {tokens} is smaller than the turn budget {turns}")]
    TooFewTokens { tokens: u32, turns: u32 },
    #[error("word limit ratio denominator must be non-zero")]
    BadRatio,
}

/// Split on maximal runs of Unicode whitespace. Never yields empty tokens.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// `⌊T/t⌋`, rejecting `t = 0` and `T < t`.
pub fn per_turn_allowance(tokens: u32, turns: u32) -> Result<u32, BudgetError> {
    if turns == 0 {
        return Err(BudgetError::ZeroTurns(turns));
    }
    if tokens < turns {
        return Err(BudgetError::TooFewTokens { tokens, turns });
    }
    Ok(tokens / turns)
}

/// Word limit written into prompts: `⌊allowance × 11/16⌋`.
pub fn stated_word_limit(allowance: u32) -> u32 {
    stated_word_limit_with(allowance, DEFAULT_WORD_LIMIT_RATIO)
}

pub fn stated_word_limit_with(allowance: u32, (num, den): (u32, u32)) -> u32 {
    ((allowance as u64 * num as u64) / den.max(1) as u64) as u32
}

/// Cut `text` down to its first `allowance` tokens.
///
/// Text already within budget is returned unchanged; otherwise the kept tokens
/// are re-joined with single spaces.
pub fn truncate_to_allowance(text: &str, allowance: u32) -> (String, bool) {
    let tokens = tokenize(text);
    if tokens.len() <= allowance as usize {
        return (text.to_string(), false);
    }
    (tokens[..allowance as usize].join(" "), true)
}

/// Budget for one dialogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetConfig {
    /// Per-player token budget `T`.
    pub tokens_per_player: u32,
    /// Total dialogue turns `t`.
    pub turn_budget: u32,
    /// `⌊T/t⌋`.
    pub allowance: u32,
    /// Word count shown in prompts.
    pub stated_word_limit: u32,
}

impl BudgetConfig {
    pub fn new(tokens_per_player: u32, turn_budget: u32) -> Result<Self, BudgetError> {
        Self::with_ratio(tokens_per_player, turn_budget, DEFAULT_WORD_LIMIT_RATIO)
    }

    pub fn with_ratio(
        tokens_per_player: u32,
        turn_budget: u32,
        ratio: (u32, u32),
    ) -> Result<Self, BudgetError> {
        if turn_budget == 0 {
            return Err(BudgetError::ZeroTurns(0));
        }
        if !turn_budget.is_multiple_of(2) {
            return Err(BudgetError::OddTurns(turn_budget));
        }
        if ratio.1 == 0 {
            return Err(BudgetError::BadRatio);
        }
        let allowance = per_turn_allowance(tokens_per_player, turn_budget)?;
        Ok(BudgetConfig {
            tokens_per_player,
            turn_budget,
            allowance,
            stated_word_limit: stated_word_limit_with(allowance, ratio),
        })
    }

    /// Upper bound on the tokens one player can spend: `⌈t/2⌉ × allowance`.
    pub fn max_tokens_per_speaker(&self) -> u32 {
        self.turn_budget.div_ceil(2) * self.allowance
    }
}

/// Speaker for a 1-based turn index: odd turns are Alice's, even turns Bob's.
pub fn speaker_for_turn(index: u32) -> Result<crate::Speaker, BudgetError> {
    match index {
        0 => Err(BudgetError::ZeroTurns(0)),
        i if i % 2 == 1 => Ok(crate::Speaker::Alice),
        _ => Ok(crate::Speaker::Bob),
    }
}
