use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub fn letter(self) -> char {
        match self {
            PieceKind::Pawn => 'p',
            PieceKind::Knight => 'n',
            PieceKind::Bishop => 'b',
            PieceKind::Rook => 'r',
            PieceKind::Queen => 'q',
            PieceKind::King => 'k',
        }
    }

    pub fn from_letter(c: char) -> Option<PieceKind> {
        Some(match c.to_ascii_lowercase() {
            'p' => PieceKind::Pawn,
            'n' => PieceKind::Knight,
            'b' => PieceKind::Bishop,
            'r' => PieceKind::Rook,
            'q' => PieceKind::Queen,
            'k' => PieceKind::King,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Piece {
    pub kind: PieceKind,
    pub color: Color,
}

impl Piece {
    pub const fn new(kind: PieceKind, color: Color) -> Self {
        Piece { kind, color }
    }

    /// Diagram letter: upper-case for White, lower-case for Black.
    pub fn symbol(self) -> char {
        let c = self.kind.letter();
        match self.color {
            Color::White => c.to_ascii_uppercase(),
            Color::Black => c,
        }
    }

    pub fn from_symbol(c: char) -> Option<Piece> {
        let kind = PieceKind::from_letter(c)?;
        let color = if c.is_ascii_uppercase() {
            Color::White
        } else {
            Color::Black
        };
        Some(Piece { kind, color })
    }
}

/// Square index 0..64 with a1 = 0, b1 = 1, ..., h8 = 63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square(pub u8);

impl Square {
    pub fn new(file: u8, rank: u8) -> Square {
        debug_assert!(file < 8 && rank < 8);
        Square(rank * 8 + file)
    }

    pub fn file(self) -> u8 {
        self.0 % 8
    }

    /// 0-based rank (rank 1 is 0).
    pub fn rank(self) -> u8 {
        self.0 / 8
    }

    pub fn offset(self, df: i8, dr: i8) -> Option<Square> {
        let f = self.file() as i8 + df;
        let r = self.rank() as i8 + dr;
        ((0..8).contains(&f) && (0..8).contains(&r)).then(|| Square::new(f as u8, r as u8))
    }

    pub fn parse(s: &str) -> Option<Square> {
        let mut it = s.chars();
        let f = it.next()?.to_ascii_lowercase();
        let r = it.next()?;
        if it.next().is_some() || !('a'..='h').contains(&f) || !('1'..='8').contains(&r) {
            return None;
        }
        Some(Square::new(f as u8 - b'a', r as u8 - b'1'))
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file()) as char, self.rank() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CastlingRights {
    pub white_king: bool,
    pub white_queen: bool,
    pub black_king: bool,
    pub black_queen: bool,
}

impl CastlingRights {
    pub const ALL: CastlingRights = CastlingRights {
        white_king: true,
        white_queen: true,
        black_king: true,
        black_queen: true,
    };

    pub fn to_fen(self) -> String {
        let mut s = String::new();
        for (on, c) in [
            (self.white_king, 'K'),
            (self.white_queen, 'Q'),
            (self.black_king, 'k'),
            (self.black_queen, 'q'),
        ] {
            if on {
                s.push(c);
            }
        }
        if s.is_empty() {
            s.push('-');
        }
        s
    }

    pub fn from_fen(s: &str) -> Option<CastlingRights> {
        let mut r = CastlingRights::default();
        if s == "-" {
            return Some(r);
        }
        for c in s.chars() {
            match c {
                'K' => r.white_king = true,
                'Q' => r.white_queen = true,
                'k' => r.black_king = true,
                'q' => r.black_queen = true,
                _ => return None,
            }
        }
        Some(r)
    }
}

/// A chess position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Board {
    squares: [Option<Piece>; 64],
    pub side_to_move: Color,
    pub castling: CastlingRights,
    pub en_passant: Option<Square>,
    pub ply: u32,
}

const BACK_RANK: [PieceKind; 8] = [
    PieceKind::Rook,
    PieceKind::Knight,
    PieceKind::Bishop,
    PieceKind::Queen,
    PieceKind::King,
    PieceKind::Bishop,
    PieceKind::Knight,
    PieceKind::Rook,
];

impl Board {
    pub fn empty() -> Board {
        Board {
            squares: [None; 64],
            side_to_move: Color::White,
            castling: CastlingRights::default(),
            en_passant: None,
            ply: 0,
        }
    }

    pub fn initial() -> Board {
        let mut b = Board::empty();
        for (file, kind) in BACK_RANK.iter().enumerate() {
            let f = file as u8;
            b.set(Square::new(f, 0), Some(Piece::new(*kind, Color::White)));
            b.set(Square::new(f, 1), Some(Piece::new(PieceKind::Pawn, Color::White)));
            b.set(Square::new(f, 6), Some(Piece::new(PieceKind::Pawn, Color::Black)));
            b.set(Square::new(f, 7), Some(Piece::new(*kind, Color::Black)));
        }
        b.castling = CastlingRights::ALL;
        b
    }

    pub fn get(&self, sq: Square) -> Option<Piece> {
        self.squares[sq.0 as usize]
    }

    pub fn set(&mut self, sq: Square, piece: Option<Piece>) {
        self.squares[sq.0 as usize] = piece;
    }

    pub fn pieces(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        self.squares
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (Square(i as u8), p)))
    }

    pub fn king_square(&self, color: Color) -> Option<Square> {
        self.pieces()
            .find(|(_, p)| p.kind == PieceKind::King && p.color == color)
            .map(|(s, _)| s)
    }

    pub fn count(&self, color: Color) -> usize {
        self.pieces().filter(|(_, p)| p.color == color).count()
    }

    /// Check the structural invariants every reachable position satisfies.
    pub fn validate(&self) -> Result<(), ChessError> {
        for color in [Color::White, Color::Black] {
            let kings = self
                .pieces()
                .filter(|(_, p)| p.kind == PieceKind::King && p.color == color)
                .count();
            if kings != 1 {
                return Err(ChessError::InvalidBoard(format!("{color:?} has {kings} kings")));
            }
        }
        if let Some((sq, _)) = self
            .pieces()
            .find(|(s, p)| p.kind == PieceKind::Pawn && (s.rank() == 0 || s.rank() == 7))
        {
            return Err(ChessError::InvalidBoard(format!("pawn on back rank at {sq}")));
        }
        if let Some(ep) = self.en_passant {
            // White just double-pushed => target on rank 3, Black to move (and vice versa).
            let (want_rank, pawn_rank, pusher) = match self.side_to_move {
                Color::Black => (2, 3, Color::White),
                Color::White => (5, 4, Color::Black),
            };
            let pawn = self.get(Square::new(ep.file(), pawn_rank));
            if ep.rank() != want_rank
                || self.get(ep).is_some()
                || pawn != Some(Piece::new(PieceKind::Pawn, pusher))
            {
                return Err(ChessError::InvalidBoard(format!(
                    "en passant target {ep} does not follow a double pawn push"
                )));
            }
        }
        Ok(())
    }

    /// Eight lines, rank 8 first, squares separated by single spaces.
    pub fn to_ascii(&self) -> String {
        let mut lines = Vec::with_capacity(8);
        for rank in (0..8).rev() {
            let row: Vec<String> = (0..8)
                .map(|file| {
                    self.get(Square::new(file, rank))
                        .map_or('.', Piece::symbol)
                        .to_string()
                })
                .collect();
            lines.push(row.join(" "));
        }
        lines.join("\n")
    }

    /// Parse a diagram produced by [`Board::to_ascii`]. Only the placement is
    /// recovered; the remaining fields take their defaults.
    pub fn from_ascii(diagram: &str) -> Result<Board, ChessError> {
        let rows: Vec<&str> = diagram.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if rows.len() != 8 {
            return Err(ChessError::Parse(format!(
                "expected 8 diagram rows, found {}",
                rows.len()
            )));
        }
        let mut b = Board::empty();
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != 8 {
                return Err(ChessError::Parse(format!(
                    "row {} has {} cells",
                    i + 1,
                    cells.len()
                )));
            }
            let rank = 7 - i as u8;
            for (file, cell) in cells.iter().enumerate() {
                let mut chars = cell.chars();
                let c = chars.next().unwrap_or('.');
                if chars.next().is_some() {
                    return Err(ChessError::Parse(format!("bad cell {cell:?}")));
                }
                let piece = match c {
                    '.' => None,
                    c => Some(
                        Piece::from_symbol(c).ok_or_else(|| ChessError::Parse(format!("bad piece {c:?}")))?,
                    ),
                };
                b.set(Square::new(file as u8, rank), piece);
            }
        }
        Ok(b)
    }

    pub fn to_fen(&self) -> String {
        let mut placement = Vec::new();
        for rank in (0..8).rev() {
            let mut row = String::new();
            let mut gap = 0;
            for file in 0..8 {
                match self.get(Square::new(file, rank)) {
                    None => gap += 1,
                    Some(p) => {
                        if gap > 0 {
                            row.push_str(&gap.to_string());
                            gap = 0;
                        }
                        row.push(p.symbol());
                    }
                }
            }
            if gap > 0 {
                row.push_str(&gap.to_string());
            }
            placement.push(row);
        }
        let side = match self.side_to_move {
            Color::White => "w",
            Color::Black => "b",
        };
        let ep = self.en_passant.map_or("-".to_string(), |s| s.to_string());
        format!(
            "{} {} {} {} 0 {}",
            placement.join("/"),
            side,
            self.castling.to_fen(),
            ep,
            self.ply / 2 + 1
        )
    }

    pub fn from_fen(fen: &str) -> Result<Board, ChessError> {
        let bad = || ChessError::Parse(format!("bad FEN {fen:?}"));
        let fields: Vec<&str> = fen.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(bad());
        }
        let mut b = Board::empty();
        let rows: Vec<&str> = fields[0].split('/').collect();
        if rows.len() != 8 {
            return Err(bad());
        }
        for (i, row) in rows.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    file += d as u8;
                } else {
                    if file >= 8 {
                        return Err(bad());
                    }
                    b.set(
                        Square::new(file, rank),
                        Some(Piece::from_symbol(c).ok_or_else(bad)?),
                    );
                    file += 1;
                }
            }
            if file != 8 {
                return Err(bad());
            }
        }
        b.side_to_move = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            _ => return Err(bad()),
        };
        b.castling = CastlingRights::from_fen(fields[2]).ok_or_else(bad)?;
        b.en_passant = match fields[3] {
            "-" => None,
            s => Some(Square::parse(s).ok_or_else(bad)?),
        };
        let fullmove: u32 = fields.get(5).and_then(|s| s.parse().ok()).unwrap_or(1);
        b.ply = (fullmove.max(1) - 1) * 2 + u32::from(b.side_to_move == Color::Black);
        Ok(b)
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

#[derive(Serialize, Deserialize)]
struct BoardRecord {
    diagram: String,
    side_to_move: Color,
    castling: String,
    en_passant: Option<String>,
    ply: u32,
}

impl Serialize for Board {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BoardRecord {
            diagram: self.to_ascii(),
            side_to_move: self.side_to_move,
            castling: self.castling.to_fen(),
            en_passant: self.en_passant.map(|s| s.to_string()),
            ply: self.ply,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Board {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Board, D::Error> {
        use serde::de::Error;
        let rec = BoardRecord::deserialize(d)?;
        let mut b = Board::from_ascii(&rec.diagram).map_err(D::Error::custom)?;
        b.side_to_move = rec.side_to_move;
        b.castling =
            CastlingRights::from_fen(&rec.castling).ok_or_else(|| D::Error::custom("bad castling rights"))?;
        b.en_passant = match rec.en_passant {
            None => None,
            Some(s) => Some(Square::parse(&s).ok_or_else(|| D::Error::custom("bad square"))?),
        };
        b.ply = rec.ply;
        Ok(b)
    }
}
