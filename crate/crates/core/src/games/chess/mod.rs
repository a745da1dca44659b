//! Board-ordering game: two positions from one random game, which came first?

mod board;
mod movegen;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use board::{Board, CastlingRights, Color, Piece, PieceKind, Square};
pub use movegen::{apply_move, in_check, is_attacked, legal_moves, perft, Move};

use crate::{seed, Speaker};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChessError {
    #[error("invalid board: {0}")]
    InvalidBoard(String),
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no usable game after {retries} retries")]
    GenerationFailed { retries: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChessAnswer {
    Mine,
    Yours,
}

impl ChessAnswer {
    pub const MINE: &'static str = "_MINE_";
    pub const YOURS: &'static str = "_YOURS_";

    pub fn sentinel(self) -> &'static str {
        match self {
            ChessAnswer::Mine => Self::MINE,
            ChessAnswer::Yours => Self::YOURS,
        }
    }

    /// The same claim stated by the other player.
    pub fn flipped(self) -> ChessAnswer {
        match self {
            ChessAnswer::Mine => ChessAnswer::Yours,
            ChessAnswer::Yours => ChessAnswer::Mine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChessParams {
    pub min_gap: u32,
    pub max_gap: u32,
    pub max_plies: u32,
    pub retries: u32,
}

impl Default for ChessParams {
    fn default() -> Self {
        ChessParams {
            min_gap: 6,
            max_gap: 16,
            max_plies: 80,
            retries: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChessInstance {
    pub board_a: Board,
    pub board_b: Board,
    /// Holder of the lower-ply board.
    pub earlier: Speaker,
    pub move_list: Vec<Move>,
    pub gap_plies: u32,
    pub seed: u64,
}

impl ChessInstance {
    /// Build an instance from two known positions with no move record.
    pub fn from_positions(board_a: Board, board_b: Board, earlier: Speaker, seed: u64) -> Self {
        let gap_plies = board_a.ply.abs_diff(board_b.ply);
        ChessInstance {
            board_a,
            board_b,
            earlier,
            move_list: Vec::new(),
            gap_plies,
            seed,
        }
    }

    pub fn board(&self, speaker: Speaker) -> &Board {
        match speaker {
            Speaker::Alice => &self.board_a,
            Speaker::Bob => &self.board_b,
        }
    }
}

/// Play `moves` from the initial position and return the position after `plies` of them.
pub fn board_after(moves: &[Move], plies: usize) -> Result<Board, ChessError> {
    let mut b = Board::initial();
    for mv in moves.iter().take(plies) {
        b = apply_move(&b, *mv)?;
    }
    Ok(b)
}

/// A random game with each move drawn uniformly from the legal moves.
pub fn sample_game(seed: u64, max_plies: u32) -> Vec<Move> {
    let mut rng = seed::rng(seed);
    let mut board = Board::initial();
    let mut moves = Vec::new();
    while moves.len() < max_plies as usize {
        let mut legal = movegen::legal_moves_unchecked(&board);
        legal.sort();
        let Some(&mv) = legal.choose(&mut rng) else {
            break;
        };
        board = movegen::make_unchecked(&board, mv);
        moves.push(mv);
    }
    moves
}

pub fn make_instance(seed: u64, params: &ChessParams) -> Result<ChessInstance, ChessError> {
    let ChessParams {
        min_gap,
        max_gap,
        max_plies,
        retries,
    } = *params;
    if min_gap == 0 || min_gap > max_gap || max_gap >= max_plies {
        return Err(ChessError::InvalidParams(format!(
            "need 1 <= min_gap <= max_gap < max_plies, got {min_gap}, {max_gap}, {max_plies}"
        )));
    }
    for attempt in 0..=retries {
        let sub = seed::derive(seed, attempt as u64);
        let moves = sample_game(seed::derive(sub, 0), max_plies);
        let len = moves.len() as u32;
        if len < min_gap {
            continue;
        }
        let mut rng = seed::rng(seed::derive(sub, 1));
        let gap = rng.random_range(min_gap..=max_gap.min(len));
        let first = rng.random_range(0..=len - gap);
        let early = board_after(&moves, first as usize)?;
        let late = board_after(&moves, (first + gap) as usize)?;
        if early.to_ascii() == late.to_ascii() {
            continue;
        }
        let earlier = if rng.random_bool(0.5) {
            Speaker::Alice
        } else {
            Speaker::Bob
        };
        let (board_a, board_b) = match earlier {
            Speaker::Alice => (early, late),
            Speaker::Bob => (late, early),
        };
        return Ok(ChessInstance {
            board_a,
            board_b,
            earlier,
            move_list: moves,
            gap_plies: gap,
            seed,
        });
    }
    Err(ChessError::GenerationFailed { retries })
}

pub fn render_ascii(board: &Board) -> String {
    board.to_ascii()
}

/// Find the committed answer in an utterance. When both sentinels occur, the later one wins.
pub fn parse_answer(utterance: &str) -> Option<ChessAnswer> {
    let mine = utterance.rfind(ChessAnswer::MINE);
    let yours = utterance.rfind(ChessAnswer::YOURS);
    match (mine, yours) {
        (None, None) => None,
        (Some(_), None) => Some(ChessAnswer::Mine),
        (None, Some(_)) => Some(ChessAnswer::Yours),
        (Some(m), Some(y)) => Some(if m > y {
            ChessAnswer::Mine
        } else {
            ChessAnswer::Yours
        }),
    }
}

pub fn score(instance: &ChessInstance, by: Speaker, answer: ChessAnswer) -> bool {
    match answer {
        ChessAnswer::Mine => by == instance.earlier,
        ChessAnswer::Yours => by != instance.earlier,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardSummary {
    pub white_count: u32,
    pub black_count: u32,
    /// 1-based rank of White's most advanced pawn.
    pub white_pawn_max_rank: Option<u8>,
    /// 1-based rank of Black's most advanced pawn.
    pub black_pawn_min_rank: Option<u8>,
}

pub fn board_summary(board: &Board) -> BoardSummary {
    let pawn_ranks = |color: Color| {
        board
            .pieces()
            .filter(move |(_, p)| *p == Piece::new(PieceKind::Pawn, color))
            .map(|(s, _)| s.rank() + 1)
    };
    BoardSummary {
        white_count: board.count(Color::White) as u32,
        black_count: board.count(Color::Black) as u32,
        white_pawn_max_rank: pawn_ranks(Color::White).max(),
        black_pawn_min_rank: pawn_ranks(Color::Black).min(),
    }
}
