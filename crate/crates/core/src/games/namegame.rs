//! Mutual-acquaintance game over two small person databases.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{seed, Speaker};

pub const SIZES: [u32; 3] = [9, 16, 25];

pub const HEADER: &str = "row,name,astrological sign,company,favorite musician,allergies";

const NAMES: &[&str] = &[
    "Michael",
    "Andrew",
    "Ethan",
    "Asher",
    "Lucas",
    "Charlotte",
    "Isabella",
    "Lily",
    "Chloe",
    "Sophia",
    "Aurora",
    "Sofia",
    "Ella",
    "Samuel",
    "Noah",
    "Joshua",
    "James",
    "Madison",
    "Elizabeth",
    "Owen",
    "David",
    "Mia",
    "Hazel",
    "Mateo",
    "Olivia",
    "Amelia",
    "Henry",
    "Grace",
    "Nora",
    "Daniel",
    "Levi",
    "Ezra",
];
const SIGNS: &[&str] = &[
    "Aries",
    "Taurus",
    "Gemini",
    "Cancer",
    "Leo",
    "Virgo",
    "Libra",
    "Scorpio",
    "Sagittarius",
    "Capricorn",
    "Aquarius",
    "Pisces",
];
const COMPANIES: &[&str] = &[
    "Cisco",
    "Amazon",
    "Tesla",
    "Sony",
    "Google",
    "HP",
    "Oracle",
    "Qualcomm",
    "Samsung",
    "Apple",
    "IBM",
    "Foxconn",
    "Microsoft",
    "Intel",
    "Nvidia",
    "Adobe",
];
const MUSICIANS: &[&str] = &[
    "John Coltrane",
    "Count Basie",
    "Miles Davis",
    "Ella Fitzgerald",
    "Art Blakey",
    "Nina Simone",
    "Herbie Hancock",
    "Louis Armstrong",
    "Wes Montgomery",
    "Billie Holiday",
    "Thelonious Monk",
    "Charlie Parker",
    "Charles Mingus",
    "Duke Ellington",
    "Dizzy Gillespie",
    "Sarah Vaughan",
];
const ALLERGIES: &[&str] = &[
    "Corn",
    "Shellfish",
    "Eggs",
    "Fish",
    "Mustard",
    "Soy",
    "Gelatin",
    "Peanuts",
    "Sesame",
    "Tree Nuts",
    "Milk",
    "Wheat",
];

/// Value pools in column order.
pub const POOLS: [&[&str]; 5] = [NAMES, SIGNS, COMPANIES, MUSICIANS, ALLERGIES];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameGameError {
    #[error("database size must be 9, 16 or 25 (got {0})")]
    InvalidSize(u32),
    #[error("could not satisfy the near-miss quota after {0} retries")]
    QuotaUnsatisfiable(u32),
    #[error("every row has already been proposed")]
    Exhausted,
    #[error("bad table: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PersonRecord {
    pub name: String,
    pub sign: String,
    pub company: String,
    pub musician: String,
    pub allergies: String,
}

impl PersonRecord {
    pub fn new(fields: [&str; 5]) -> Self {
        let [name, sign, company, musician, allergies] = fields.map(str::to_string);
        PersonRecord {
            name,
            sign,
            company,
            musician,
            allergies,
        }
    }

    pub fn fields(&self) -> [&str; 5] {
        [
            &self.name,
            &self.sign,
            &self.company,
            &self.musician,
            &self.allergies,
        ]
    }

    fn set(&mut self, i: usize, v: &str) {
        let slot = match i {
            0 => &mut self.name,
            1 => &mut self.sign,
            2 => &mut self.company,
            3 => &mut self.musician,
            _ => &mut self.allergies,
        };
        *slot = v.to_string();
    }

    /// Number of fields on which two records agree.
    pub fn shared_fields(&self, other: &PersonRecord) -> usize {
        self.fields()
            .iter()
            .zip(other.fields())
            .filter(|(a, b)| **a == *b)
            .count()
    }

    fn random(rng: &mut seed::Rng) -> Self {
        let f = POOLS.map(|p| *p.choose(rng).expect("non-empty pool"));
        PersonRecord::new(f)
    }
}

/// Distractor records that agree with the common record on exactly four or three fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearMissQuota {
    pub four: u32,
    pub three: u32,
}

impl NearMissQuota {
    /// Split a total quota, one third at four shared fields.
    pub fn total(n: u32) -> Self {
        NearMissQuota {
            four: n / 3,
            three: n - n / 3,
        }
    }

    /// Two four-field and four three-field distractors per nine rows.
    pub fn scaled(size: u32) -> Self {
        NearMissQuota {
            four: 2 * size / 9,
            three: 4 * size / 9,
        }
    }

    pub fn sum(&self) -> u32 {
        self.four + self.three
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameGameInstance {
    pub db_a: Vec<PersonRecord>,
    pub db_b: Vec<PersonRecord>,
    /// 1-based.
    pub common_row_a: u32,
    /// 1-based.
    pub common_row_b: u32,
    pub seed: u64,
    pub size: u32,
}

impl NameGameInstance {
    pub fn db(&self, speaker: Speaker) -> &[PersonRecord] {
        match speaker {
            Speaker::Alice => &self.db_a,
            Speaker::Bob => &self.db_b,
        }
    }

    pub fn common_row(&self, speaker: Speaker) -> u32 {
        match speaker {
            Speaker::Alice => self.common_row_a,
            Speaker::Bob => self.common_row_b,
        }
    }
}

const RETRIES: u32 = 32;

pub fn generate_instance(
    seed: u64,
    size: u32,
    quota: NearMissQuota,
) -> Result<NameGameInstance, NameGameError> {
    if !SIZES.contains(&size) {
        return Err(NameGameError::InvalidSize(size));
    }
    if quota.sum() > 2 * (size - 1) {
        return Err(NameGameError::QuotaUnsatisfiable(0));
    }
    for attempt in 0..RETRIES {
        let mut rng = seed::rng(seed::derive(seed, attempt as u64));
        if let Some(inst) = try_generate(&mut rng, seed, size, quota) {
            return Ok(inst);
        }
    }
    Err(NameGameError::QuotaUnsatisfiable(RETRIES))
}

fn mutate(rng: &mut seed::Rng, base: &PersonRecord, changes: usize) -> PersonRecord {
    let mut cols: Vec<usize> = (0..5).collect();
    cols.shuffle(rng);
    let mut rec = base.clone();
    for &c in &cols[..changes] {
        let current = base.fields()[c];
        let options: Vec<&str> = POOLS[c].iter().copied().filter(|v| *v != current).collect();
        rec.set(c, options.choose(rng).expect("pool has alternatives"));
    }
    rec
}

fn try_generate(rng: &mut seed::Rng, seed: u64, size: u32, quota: NearMissQuota) -> Option<NameGameInstance> {
    let n = size as usize;
    let common = PersonRecord::random(rng);
    let mut a: Vec<PersonRecord> = Vec::with_capacity(n);
    let mut b: Vec<PersonRecord> = Vec::with_capacity(n);
    let near =
        std::iter::repeat_n(1, quota.four as usize).chain(std::iter::repeat_n(2, quota.three as usize));
    for (i, changes) in near.enumerate() {
        let rec = mutate(rng, &common, changes);
        let side = if (i % 2 == 0 && a.len() < n - 1) || b.len() >= n - 1 {
            &mut a
        } else {
            &mut b
        };
        side.push(rec);
    }
    while a.len() < n - 1 {
        a.push(PersonRecord::random(rng));
    }
    while b.len() < n - 1 {
        b.push(PersonRecord::random(rng));
    }
    a.push(common.clone());
    b.push(common);
    a.shuffle(rng);
    b.shuffle(rng);

    let unique = |db: &[PersonRecord]| db.iter().collect::<BTreeSet<_>>().len() == db.len();
    if !unique(&a) || !unique(&b) {
        return None;
    }
    let pairs = common_pairs(&a, &b);
    if pairs.len() != 1 {
        return None;
    }
    let (ra, rb) = pairs[0];
    let near_pairs = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x.shared_fields(y)))
        .filter(|s| *s == 3 || *s == 4)
        .count();
    if near_pairs < quota.sum() as usize {
        return None;
    }
    Some(NameGameInstance {
        db_a: a,
        db_b: b,
        common_row_a: ra as u32 + 1,
        common_row_b: rb as u32 + 1,
        seed,
        size,
    })
}

/// All 0-based index pairs whose records agree on every field.
pub fn common_pairs(a: &[PersonRecord], b: &[PersonRecord]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if x == y {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn render_table(db: &[PersonRecord]) -> String {
    let mut lines = vec![HEADER.to_string()];
    for (i, r) in db.iter().enumerate() {
        lines.push(format!("{},{}", i + 1, r.fields().join(",")));
    }
    lines.join("\n")
}

/// Inverse of [`render_table`].
pub fn parse_table(text: &str) -> Result<Vec<PersonRecord>, NameGameError> {
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(NameGameError::Parse("missing header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 6 || cells[0] != (i + 1).to_string() {
                return Err(NameGameError::Parse(format!("bad row {line:?}")));
            }
            Ok(PersonRecord::new([
                cells[1], cells[2], cells[3], cells[4], cells[5],
            ]))
        })
        .collect()
}

/// One record spelled out as a comma-separated list of its values.
pub fn describe(record: &PersonRecord) -> String {
    record.fields().join(", ")
}

fn select_row_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)select\s+row\s+(\d+)").expect("valid regex"))
}

/// The row named by the last `SELECT ROW i` in the utterance.
pub fn parse_answer(utterance: &str) -> Option<u32> {
    select_row_re()
        .captures_iter(utterance)
        .last()
        .map(|c| c[1].parse().unwrap_or(u32::MAX))
}

/// Row numbers refer to the answering player's own database.
pub fn score(instance: &NameGameInstance, by: Speaker, row: u32) -> bool {
    row == instance.common_row(by)
}

/// Next row for the guess-one baseline: uniform over rows not yet proposed.
pub fn guess_one_next(size: u32, already_proposed: &BTreeSet<u32>, seed: u64) -> Result<u32, NameGameError> {
    let remaining: Vec<u32> = (1..=size).filter(|r| !already_proposed.contains(r)).collect();
    if remaining.is_empty() {
        return Err(NameGameError::Exhausted);
    }
    let mut rng = seed::rng(seed::derive(seed, already_proposed.len() as u64));
    Ok(remaining[rng.random_range(0..remaining.len())])
}

/// The first `count` proposals of the guess-one baseline, in order.
pub fn guess_one_sequence(size: u32, count: usize, seed: u64) -> Vec<u32> {
    let mut proposed = BTreeSet::new();
    let mut order = Vec::new();
    while order.len() < count {
        match guess_one_next(size, &proposed, seed) {
            Ok(r) => {
                proposed.insert(r);
                order.push(r);
            }
            Err(_) => break,
        }
    }
    order
}
