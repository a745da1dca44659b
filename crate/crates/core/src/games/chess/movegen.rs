use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::board::{Board, CastlingRights, Color, Piece, PieceKind, Square};
use super::ChessError;

/// A move in long algebraic coordinates, e.g. `e2e4` or `e7e8q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
}

const PROMOTIONS: [PieceKind; 4] = [
    PieceKind::Queen,
    PieceKind::Rook,
    PieceKind::Bishop,
    PieceKind::Knight,
];

impl Move {
    pub fn new(from: Square, to: Square) -> Move {
        Move {
            from,
            to,
            promotion: None,
        }
    }

    pub fn promoting(from: Square, to: Square, kind: PieceKind) -> Move {
        Move {
            from,
            to,
            promotion: Some(kind),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.from, self.to)?;
        if let Some(p) = self.promotion {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for Move {
    type Err = ChessError;

    fn from_str(s: &str) -> Result<Move, ChessError> {
        let bad = || ChessError::Parse(format!("bad move {s:?}"));
        if !s.is_ascii() || !(4..=5).contains(&s.len()) {
            return Err(bad());
        }
        let from = Square::parse(&s[0..2]).ok_or_else(bad)?;
        let to = Square::parse(&s[2..4]).ok_or_else(bad)?;
        let promotion = match s[4..].chars().next() {
            None => None,
            Some(c) => match PieceKind::from_letter(c) {
                Some(k) if PROMOTIONS.contains(&k) => Some(k),
                _ => return Err(bad()),
            },
        };
        Ok(Move { from, to, promotion })
    }
}

impl Serialize for Move {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Move, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const KNIGHT: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
const KING: [(i8, i8); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const ORTHO: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const DIAG: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn pawn_dir(color: Color) -> i8 {
    match color {
        Color::White => 1,
        Color::Black => -1,
    }
}

fn home_rank(color: Color) -> u8 {
    match color {
        Color::White => 0,
        Color::Black => 7,
    }
}

/// Whether any piece of colour `by` attacks `sq`.
pub fn is_attacked(board: &Board, sq: Square, by: Color) -> bool {
    let hits = |s: Option<Square>, kinds: &[PieceKind]| {
        s.and_then(|s| board.get(s))
            .is_some_and(|p| p.color == by && kinds.contains(&p.kind))
    };
    // A pawn of colour `by` attacks diagonally forward, so look backwards from `sq`.
    let back = -pawn_dir(by);
    if hits(sq.offset(1, back), &[PieceKind::Pawn]) || hits(sq.offset(-1, back), &[PieceKind::Pawn]) {
        return true;
    }
    if KNIGHT
        .iter()
        .any(|&(df, dr)| hits(sq.offset(df, dr), &[PieceKind::Knight]))
    {
        return true;
    }
    if KING
        .iter()
        .any(|&(df, dr)| hits(sq.offset(df, dr), &[PieceKind::King]))
    {
        return true;
    }
    let slides = |dirs: &[(i8, i8)], kinds: &[PieceKind]| {
        dirs.iter().any(|&(df, dr)| {
            let mut cur = sq;
            while let Some(next) = cur.offset(df, dr) {
                if let Some(p) = board.get(next) {
                    return p.color == by && kinds.contains(&p.kind);
                }
                cur = next;
            }
            false
        })
    };
    slides(&ORTHO, &[PieceKind::Rook, PieceKind::Queen])
        || slides(&DIAG, &[PieceKind::Bishop, PieceKind::Queen])
}

pub fn in_check(board: &Board, color: Color) -> bool {
    board
        .king_square(color)
        .is_some_and(|k| is_attacked(board, k, color.opponent()))
}

fn push_pawn_move(out: &mut Vec<Move>, from: Square, to: Square, color: Color) {
    let last = match color {
        Color::White => 7,
        Color::Black => 0,
    };
    if to.rank() == last {
        for p in PROMOTIONS {
            out.push(Move {
                from,
                to,
                promotion: Some(p),
            });
        }
    } else {
        out.push(Move::new(from, to));
    }
}

fn pseudo_legal(board: &Board) -> Vec<Move> {
    let us = board.side_to_move;
    let mut out = Vec::with_capacity(48);
    for (from, piece) in board.pieces().filter(|(_, p)| p.color == us) {
        match piece.kind {
            PieceKind::Pawn => {
                let dir = pawn_dir(us);
                if let Some(one) = from.offset(0, dir) {
                    if board.get(one).is_none() {
                        push_pawn_move(&mut out, from, one, us);
                        let start = if us == Color::White { 1 } else { 6 };
                        if from.rank() == start {
                            if let Some(two) = one.offset(0, dir) {
                                if board.get(two).is_none() {
                                    out.push(Move::new(from, two));
                                }
                            }
                        }
                    }
                }
                for df in [-1, 1] {
                    if let Some(to) = from.offset(df, dir) {
                        let capture = board.get(to).is_some_and(|p| p.color != us);
                        if capture || board.en_passant == Some(to) {
                            push_pawn_move(&mut out, from, to, us);
                        }
                    }
                }
            }
            PieceKind::Knight | PieceKind::King => {
                let offsets = if piece.kind == PieceKind::Knight {
                    &KNIGHT
                } else {
                    &KING
                };
                for &(df, dr) in offsets {
                    if let Some(to) = from.offset(df, dr) {
                        if board.get(to).is_none_or(|p| p.color != us) {
                            out.push(Move::new(from, to));
                        }
                    }
                }
            }
            PieceKind::Bishop | PieceKind::Rook | PieceKind::Queen => {
                let dirs: &[(i8, i8)] = match piece.kind {
                    PieceKind::Bishop => &DIAG,
                    PieceKind::Rook => &ORTHO,
                    _ => &KING,
                };
                for &(df, dr) in dirs {
                    let mut cur = from;
                    while let Some(to) = cur.offset(df, dr) {
                        match board.get(to) {
                            None => out.push(Move::new(from, to)),
                            Some(p) => {
                                if p.color != us {
                                    out.push(Move::new(from, to));
                                }
                                break;
                            }
                        }
                        cur = to;
                    }
                }
            }
        }
    }
    castling_moves(board, &mut out);
    out
}

fn castling_moves(board: &Board, out: &mut Vec<Move>) {
    let us = board.side_to_move;
    let them = us.opponent();
    let r = home_rank(us);
    let king_from = Square::new(4, r);
    if board.get(king_from) != Some(Piece::new(PieceKind::King, us)) {
        return;
    }
    let (king_side, queen_side) = match us {
        Color::White => (board.castling.white_king, board.castling.white_queen),
        Color::Black => (board.castling.black_king, board.castling.black_queen),
    };
    if !(king_side || queen_side) || is_attacked(board, king_from, them) {
        return;
    }
    let rook = Some(Piece::new(PieceKind::Rook, us));
    let empty = |files: &[u8]| files.iter().all(|&f| board.get(Square::new(f, r)).is_none());
    let safe = |files: &[u8]| {
        files
            .iter()
            .all(|&f| !is_attacked(board, Square::new(f, r), them))
    };
    if king_side && board.get(Square::new(7, r)) == rook && empty(&[5, 6]) && safe(&[5, 6]) {
        out.push(Move::new(king_from, Square::new(6, r)));
    }
    if queen_side && board.get(Square::new(0, r)) == rook && empty(&[1, 2, 3]) && safe(&[2, 3]) {
        out.push(Move::new(king_from, Square::new(2, r)));
    }
}

fn clear_rights_for_square(rights: &mut CastlingRights, sq: Square) {
    match (sq.file(), sq.rank()) {
        (0, 0) => rights.white_queen = false,
        (7, 0) => rights.white_king = false,
        (0, 7) => rights.black_queen = false,
        (7, 7) => rights.black_king = false,
        _ => {}
    }
}

/// Play `mv` without checking legality. `mv` must at least be pseudo-legal.
pub(crate) fn make_unchecked(board: &Board, mv: Move) -> Board {
    let mut next = board.clone();
    let piece = board.get(mv.from).expect("move from an empty square");
    let us = piece.color;

    if piece.kind == PieceKind::Pawn && mv.from.file() != mv.to.file() && board.get(mv.to).is_none() {
        next.set(Square::new(mv.to.file(), mv.from.rank()), None);
    }

    next.set(mv.from, None);
    let placed = match mv.promotion {
        Some(p) => Piece::new(p, us),
        None => piece,
    };
    next.set(mv.to, Some(placed));

    if piece.kind == PieceKind::King && mv.from.file().abs_diff(mv.to.file()) == 2 {
        let r = mv.from.rank();
        let (rook_from, rook_to) = if mv.to.file() == 6 { (7, 5) } else { (0, 3) };
        let rook = next.get(Square::new(rook_from, r));
        next.set(Square::new(rook_from, r), None);
        next.set(Square::new(rook_to, r), rook);
    }

    if piece.kind == PieceKind::King {
        match us {
            Color::White => {
                next.castling.white_king = false;
                next.castling.white_queen = false;
            }
            Color::Black => {
                next.castling.black_king = false;
                next.castling.black_queen = false;
            }
        }
    }
    clear_rights_for_square(&mut next.castling, mv.from);
    clear_rights_for_square(&mut next.castling, mv.to);

    next.en_passant = (piece.kind == PieceKind::Pawn && mv.from.rank().abs_diff(mv.to.rank()) == 2)
        .then(|| Square::new(mv.from.file(), (mv.from.rank() + mv.to.rank()) / 2));
    next.side_to_move = us.opponent();
    next.ply += 1;
    next
}

/// Legal moves without validating the board first. Used on positions known to be
/// reachable.
pub(crate) fn legal_moves_unchecked(board: &Board) -> Vec<Move> {
    let us = board.side_to_move;
    pseudo_legal(board)
        .into_iter()
        .filter(|&mv| !in_check(&make_unchecked(board, mv), us))
        .collect()
}

/// All fully legal moves for the side to move, sorted by coordinates.
pub fn legal_moves(board: &Board) -> Result<Vec<Move>, ChessError> {
    board.validate()?;
    let mut moves = legal_moves_unchecked(board);
    moves.sort();
    Ok(moves)
}

pub fn apply_move(board: &Board, mv: Move) -> Result<Board, ChessError> {
    if !legal_moves(board)?.contains(&mv) {
        return Err(ChessError::IllegalMove(mv.to_string()));
    }
    Ok(make_unchecked(board, mv))
}

/// Leaf count of the legal-move tree to `depth`.
pub fn perft(board: &Board, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = legal_moves_unchecked(board);
    if depth == 1 {
        return moves.len() as u64;
    }
    moves
        .into_iter()
        .map(|mv| perft(&make_unchecked(board, mv), depth - 1))
        .sum()
}
