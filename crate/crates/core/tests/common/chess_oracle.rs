//! A deliberately naive 0x88 move generator used only to cross-check the engine.
//! It shares nothing with the library except the FEN text it is fed.

const N: i8 = 2;
const B: i8 = 3;
const R: i8 = 4;
const Q: i8 = 5;
const K: i8 = 6;

const KNIGHT: [i32; 8] = [33, 31, 18, 14, -33, -31, -18, -14];
const KING: [i32; 8] = [1, -1, 16, -16, 15, 17, -15, -17];
const DIAG: [i32; 4] = [15, 17, -15, -17];
const ORTH: [i32; 4] = [1, -1, 16, -16];

#[derive(Clone)]
pub struct Pos {
    b: [i8; 128],
    white: bool,
    // K, Q, k, q
    castle: [bool; 4],
    ep: Option<i32>,
}

#[derive(Clone, Copy)]
pub struct OMove {
    from: i32,
    to: i32,
    promo: i8,
}

fn on(sq: i32) -> bool {
    (0..128).contains(&sq) && sq & 0x88 == 0
}

fn sq_name(sq: i32) -> String {
    let f = (b'a' + (sq & 7) as u8) as char;
    let r = (b'1' + (sq >> 4) as u8) as char;
    format!("{f}{r}")
}

impl OMove {
    pub fn uci(&self) -> String {
        let mut s = sq_name(self.from) + &sq_name(self.to);
        if self.promo != 0 {
            s.push(['?', 'p', 'n', 'b', 'r', 'q', 'k'][self.promo.unsigned_abs() as usize]);
        }
        s
    }
}

impl Pos {
    pub fn from_fen(fen: &str) -> Pos {
        let f: Vec<&str> = fen.split_whitespace().collect();
        let mut b = [0i8; 128];
        for (i, row) in f[0].split('/').enumerate() {
            let rank = 7 - i as i32;
            let mut file = 0;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    file += d as i32;
                    continue;
                }
                let v = match c.to_ascii_lowercase() {
                    'p' => 1,
                    'n' => N,
                    'b' => B,
                    'r' => R,
                    'q' => Q,
                    'k' => K,
                    _ => panic!("bad fen piece {c}"),
                };
                b[(rank * 16 + file) as usize] = if c.is_ascii_uppercase() { v } else { -v };
                file += 1;
            }
        }
        let c = f[2];
        let ep = (f[3] != "-").then(|| {
            let bytes = f[3].as_bytes();
            (bytes[1] - b'1') as i32 * 16 + (bytes[0] - b'a') as i32
        });
        Pos {
            b,
            white: f[1] == "w",
            castle: [c.contains('K'), c.contains('Q'), c.contains('k'), c.contains('q')],
            ep,
        }
    }

    fn at(&self, sq: i32) -> i8 {
        self.b[sq as usize]
    }

    fn attacked(&self, sq: i32, by_white: bool) -> bool {
        let s = if by_white { 1 } else { -1 };
        let pawn_from: [i32; 2] = if by_white { [-15, -17] } else { [15, 17] };
        for d in pawn_from {
            if on(sq + d) && self.at(sq + d) == s {
                return true;
            }
        }
        for d in KNIGHT {
            if on(sq + d) && self.at(sq + d) == s * N {
                return true;
            }
        }
        for d in KING {
            if on(sq + d) && self.at(sq + d) == s * K {
                return true;
            }
        }
        for (dirs, a, b2) in [(&DIAG, B, Q), (&ORTH, R, Q)] {
            for &d in dirs.iter() {
                let mut t = sq + d;
                while on(t) {
                    let p = self.at(t);
                    if p != 0 {
                        if p == s * a || p == s * b2 {
                            return true;
                        }
                        break;
                    }
                    t += d;
                }
            }
        }
        false
    }

    fn pseudo(&self) -> Vec<OMove> {
        let s: i8 = if self.white { 1 } else { -1 };
        let mut out = Vec::new();
        let mine = |p: i8| p * s > 0;
        let theirs = |p: i8| p * s < 0;
        for from in 0..128 {
            if !on(from) || !mine(self.at(from)) {
                continue;
            }
            let kind = self.at(from).abs();
            match kind {
                1 => {
                    let dir = if self.white { 16 } else { -16 };
                    let start = if self.white { 1 } else { 6 };
                    let last = if self.white { 7 } else { 0 };
                    let push = |to: i32, out: &mut Vec<OMove>| {
                        if to >> 4 == last {
                            for p in [Q, R, B, N] {
                                out.push(OMove {
                                    from,
                                    to,
                                    promo: p * s,
                                });
                            }
                        } else {
                            out.push(OMove { from, to, promo: 0 });
                        }
                    };
                    let one = from + dir;
                    if on(one) && self.at(one) == 0 {
                        push(one, &mut out);
                        let two = one + dir;
                        if from >> 4 == start && self.at(two) == 0 {
                            out.push(OMove {
                                from,
                                to: two,
                                promo: 0,
                            });
                        }
                    }
                    for side in [-1, 1] {
                        let to = from + dir + side;
                        if on(to) && (theirs(self.at(to)) || self.ep == Some(to)) {
                            push(to, &mut out);
                        }
                    }
                }
                N | K => {
                    let dirs: &[i32] = if kind == N { &KNIGHT } else { &KING };
                    for &d in dirs {
                        let to = from + d;
                        if on(to) && !mine(self.at(to)) {
                            out.push(OMove { from, to, promo: 0 });
                        }
                    }
                }
                _ => {
                    let dirs: Vec<i32> = match kind {
                        B => DIAG.to_vec(),
                        R => ORTH.to_vec(),
                        _ => DIAG.iter().chain(ORTH.iter()).copied().collect(),
                    };
                    for d in dirs {
                        let mut to = from + d;
                        while on(to) && !mine(self.at(to)) {
                            out.push(OMove { from, to, promo: 0 });
                            if self.at(to) != 0 {
                                break;
                            }
                            to += d;
                        }
                    }
                }
            }
        }
        // Castling, with every square checked explicitly.
        let (home, rights, enemy_white) = if self.white {
            (0, [self.castle[0], self.castle[1]], false)
        } else {
            (112, [self.castle[2], self.castle[3]], true)
        };
        let king = home + 4;
        if self.at(king) == s * K && !self.attacked(king, enemy_white) {
            if rights[0]
                && self.at(home + 7) == s * R
                && self.at(home + 5) == 0
                && self.at(home + 6) == 0
                && !self.attacked(home + 5, enemy_white)
                && !self.attacked(home + 6, enemy_white)
            {
                out.push(OMove {
                    from: king,
                    to: home + 6,
                    promo: 0,
                });
            }
            if rights[1]
                && self.at(home) == s * R
                && self.at(home + 1) == 0
                && self.at(home + 2) == 0
                && self.at(home + 3) == 0
                && !self.attacked(home + 3, enemy_white)
                && !self.attacked(home + 2, enemy_white)
            {
                out.push(OMove {
                    from: king,
                    to: home + 2,
                    promo: 0,
                });
            }
        }
        out
    }

    fn make(&self, m: OMove) -> Pos {
        let mut p = self.clone();
        let piece = p.at(m.from);
        p.b[m.from as usize] = 0;
        if piece.abs() == 1 && Some(m.to) == self.ep {
            let victim = if self.white { m.to - 16 } else { m.to + 16 };
            p.b[victim as usize] = 0;
        }
        p.b[m.to as usize] = if m.promo != 0 { m.promo } else { piece };
        if piece.abs() == K && (m.to - m.from).abs() == 2 {
            let (rf, rt) = if m.to > m.from {
                (m.from + 3, m.from + 1)
            } else {
                (m.from - 4, m.from - 1)
            };
            p.b[rt as usize] = p.b[rf as usize];
            p.b[rf as usize] = 0;
        }
        for sq in [m.from, m.to] {
            match sq {
                4 => {
                    p.castle[0] = false;
                    p.castle[1] = false;
                }
                7 => p.castle[0] = false,
                0 => p.castle[1] = false,
                116 => {
                    p.castle[2] = false;
                    p.castle[3] = false;
                }
                119 => p.castle[2] = false,
                112 => p.castle[3] = false,
                _ => {}
            }
        }
        p.ep = (piece.abs() == 1 && (m.to - m.from).abs() == 32).then(|| (m.to + m.from) / 2);
        p.white = !self.white;
        p
    }

    fn king(&self, white: bool) -> i32 {
        let k = if white { K } else { -K };
        (0..128)
            .find(|&s| on(s) && self.at(s) == k)
            .expect("king on board")
    }

    pub fn legal(&self) -> Vec<OMove> {
        self.pseudo()
            .into_iter()
            .filter(|&m| {
                let next = self.make(m);
                !next.attacked(next.king(self.white), next.white)
            })
            .collect()
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        self.legal()
            .into_iter()
            .map(|m| self.make(m).perft(depth - 1))
            .sum()
    }
}
