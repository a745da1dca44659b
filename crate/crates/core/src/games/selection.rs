//! Describer/guesser selection over symbolic items.
//!
//! Items are feature vectors standing in for images. The guesser holds `k`
//! candidates; the describer holds one target that may be absent from them.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("candidate count must be 4 or 6 (got {0})")]
    BadK(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("feature space too small for {k} distinct confusable items")]
    SpaceTooSmall { k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub features: Vec<Feature>,
}

const ASPECTS: [(&str, [&str; 4]); 12] = [
    ("color", ["red", "blue", "green", "yellow"]),
    ("shape", ["circle", "square", "triangle", "star"]),
    ("size", ["tiny", "small", "medium", "large"]),
    ("texture", ["smooth", "rough", "dotted", "grainy"]),
    ("stripes", ["none", "horizontal", "vertical", "diagonal"]),
    ("border", ["none", "thin", "thick", "double"]),
    ("shade", ["light", "pale", "dark", "deep"]),
    ("count", ["one", "two", "three", "four"]),
    ("tilt", ["upright", "left", "right", "flat"]),
    ("fill", ["solid", "hatched", "empty", "gradient"]),
    ("outline", ["sharp", "soft", "dashed", "dotted"]),
    ("glow", ["none", "faint", "bright", "pulsing"]),
];
const REGIONS: [&str; 4] = ["top", "bottom", "left", "right"];

impl FeatureSpace {
    fn build(features: impl IntoIterator<Item = (String, Vec<&'static str>)>) -> Self {
        FeatureSpace {
            features: features
                .into_iter()
                .map(|(name, values)| Feature {
                    name,
                    values: values.into_iter().map(str::to_string).collect(),
                })
                .collect(),
        }
    }

    /// Five features, small enough to describe in one short turn.
    pub fn small() -> Self {
        Self::build([
            ("motif".into(), vec!["bird", "flower", "star", "wave"]),
            (
                "stripes".into(),
                vec!["none", "horizontal", "vertical", "diagonal"],
            ),
            ("symmetry".into(), vec!["none", "mirror", "radial"]),
            ("fill".into(), vec!["solid", "hatched", "empty"]),
            ("count".into(), vec!["one", "two", "three", "four"]),
        ])
    }

    /// 48 region-qualified features. A full description runs to 144 tokens.
    pub fn rich() -> Self {
        Self::build(REGIONS.iter().flat_map(|region| {
            ASPECTS
                .iter()
                .map(move |(aspect, values)| (format!("{region}-{aspect}"), values.to_vec()))
        }))
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn contains(&self, item: &Item) -> bool {
        item.values.len() == self.len()
            && self
                .features
                .iter()
                .zip(&item.values)
                .all(|(f, v)| f.values.contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    /// One value per feature, in feature-space order.
    pub values: Vec<String>,
}

impl Item {
    fn random(space: &FeatureSpace, rng: &mut seed::Rng) -> Item {
        Item {
            values: space
                .features
                .iter()
                .map(|f| f.values.choose(rng).expect("non-empty domain").clone())
                .collect(),
        }
    }

    fn mutated(&self, space: &FeatureSpace, changes: usize, rng: &mut seed::Rng) -> Item {
        let mut idx: Vec<usize> = (0..space.len()).collect();
        idx.shuffle(rng);
        let mut out = self.clone();
        for &i in &idx[..changes] {
            let options: Vec<&String> = space.features[i]
                .values
                .iter()
                .filter(|v| **v != self.values[i])
                .collect();
            out.values[i] = (*options.choose(rng).expect("domain has two values")).clone();
        }
        out
    }

    pub fn shared_features(&self, other: &Item) -> usize {
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a == b)
            .count()
    }
}

/// Opaque payload slot for real-image variants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub media_type: String,
    pub data: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectionGold {
    Image(usize),
    NoMatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectionAnswer {
    Image(usize),
    NoMatch,
    /// An image number outside `0..k`; always scored wrong.
    OutOfRange(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub k: usize,
    pub p_nomatch: f64,
    /// Minimum number of features every distractor shares with the target.
    pub min_confusability: usize,
    pub space: FeatureSpace,
}

impl SelectionParams {
    /// Rich feature space with distractors one or two features away from the target.
    pub fn with_k(k: usize) -> Self {
        let space = FeatureSpace::rich();
        SelectionParams {
            k,
            p_nomatch: 0.25,
            min_confusability: space.len() - 2,
            space,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionInstance {
    pub space: FeatureSpace,
    pub target: Item,
    pub candidates: Vec<Item>,
    pub gold: SelectionGold,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attachments: Vec<Attachment>,
}

const RETRIES: u32 = 64;

pub fn generate_instance(seed: u64, params: &SelectionParams) -> Result<SelectionInstance, SelectionError> {
    let SelectionParams {
        k,
        p_nomatch,
        min_confusability,
        ref space,
    } = *params;
    if k != 4 && k != 6 {
        return Err(SelectionError::BadK(k));
    }
    if !(0.0..=1.0).contains(&p_nomatch) {
        return Err(SelectionError::InvalidParams(format!("p_nomatch {p_nomatch}")));
    }
    if min_confusability >= space.len() || space.features.iter().any(|f| f.values.len() < 2) {
        return Err(SelectionError::InvalidParams(
            "min_confusability must leave at least one feature free, and every feature needs two values"
                .into(),
        ));
    }
    let max_changes = space.len() - min_confusability;
    let mut rng = seed::rng(seed);
    let no_match = rng.random_bool(p_nomatch);
    let target = Item::random(space, &mut rng);
    let gold = if no_match {
        SelectionGold::NoMatch
    } else {
        SelectionGold::Image(rng.random_range(0..k))
    };
    for _ in 0..RETRIES {
        let candidates: Vec<Item> = (0..k)
            .map(|i| match gold {
                SelectionGold::Image(g) if g == i => target.clone(),
                _ => {
                    let changes = rng.random_range(1..=max_changes);
                    target.mutated(space, changes, &mut rng)
                }
            })
            .collect();
        if candidates.iter().collect::<BTreeSet<_>>().len() == k {
            return Ok(SelectionInstance {
                space: space.clone(),
                target,
                candidates,
                gold,
                seed,
                attachments: Vec::new(),
            });
        }
    }
    Err(SelectionError::SpaceTooSmall { k })
}

/// `key: value` pairs in feature order.
pub fn render_item(space: &FeatureSpace, item: &Item) -> String {
    space
        .features
        .iter()
        .zip(&item.values)
        .map(|(f, v)| format!("{}: {}", f.name, v))
        .collect::<Vec<_>>()
        .join(", ")
}

fn answer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)ANSWER:\s*(?:image\s*(\d+)|(no\s+match))").expect("valid regex"))
}

pub fn parse_answer(utterance: &str, k: usize) -> Option<SelectionAnswer> {
    let caps = answer_re().captures_iter(utterance).last()?;
    if caps.get(2).is_some() {
        return Some(SelectionAnswer::NoMatch);
    }
    let n: u64 = caps[1].parse().unwrap_or(u64::MAX);
    Some(if n < k as u64 {
        SelectionAnswer::Image(n as usize)
    } else {
        SelectionAnswer::OutOfRange(n)
    })
}

pub fn score(instance: &SelectionInstance, answer: SelectionAnswer) -> bool {
    match (instance.gold, answer) {
        (SelectionGold::Image(g), SelectionAnswer::Image(a)) => g == a,
        (SelectionGold::NoMatch, SelectionAnswer::NoMatch) => true,
        _ => false,
    }
}
