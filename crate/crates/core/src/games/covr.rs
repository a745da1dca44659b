//! Two-scene compositional question answering over symbolic scenes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{seed, Speaker};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CovrError {
    #[error("answer balance must have non-negative weights over True/False/0/1/2 summing to 1")]
    BadBalance,
    #[error("no instance matched the requested answer after {0} attempts")]
    GenerationFailed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    On,
    In,
    Near,
    Wearing,
    Watching,
    Holding,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::On,
        Relation::In,
        Relation::Near,
        Relation::Wearing,
        Relation::Watching,
        Relation::Holding,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Relation::On => "on",
            Relation::In => "in",
            Relation::Near => "near",
            Relation::Wearing => "wearing",
            Relation::Watching => "watching",
            Relation::Holding => "holding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Person,
    Animal,
    Wearable,
    Furniture,
    Object,
}

const CATEGORIES: &[(&str, Class)] = &[
    ("woman", Class::Person),
    ("man", Class::Person),
    ("child", Class::Person),
    ("dog", Class::Animal),
    ("cat", Class::Animal),
    ("helmet", Class::Wearable),
    ("hat", Class::Wearable),
    ("table", Class::Furniture),
    ("desk", Class::Furniture),
    ("chair", Class::Furniture),
    ("bed", Class::Furniture),
    ("sofa", Class::Furniture),
    ("fireplace", Class::Furniture),
    ("display cabinet", Class::Furniture),
    ("coffee table", Class::Furniture),
    ("bowl", Class::Object),
    ("paper towel", Class::Object),
    ("cup", Class::Object),
    ("plate", Class::Object),
    ("lamp", Class::Object),
    ("book", Class::Object),
    ("ball", Class::Object),
];

pub const ATTRIBUTES: &[&str] = &[
    "red", "blue", "green", "white", "black", "wooden", "metal", "small", "large", "young", "old", "striped",
    "empty", "full", "round",
];

pub const SCENE_TYPES: &[&str] = &[
    "bedroom",
    "cafeteria",
    "living room",
    "kitchen",
    "office",
    "park",
    "street",
    "bathroom",
];

fn class_of(category: &str) -> Class {
    CATEGORIES
        .iter()
        .find(|(c, _)| *c == category)
        .map_or(Class::Object, |(_, k)| *k)
}

/// Relations a subject of class `s` may hold toward an object of class `o`.
fn allowed(s: Class, o: Class) -> &'static [Relation] {
    use Class::*;
    match (s, o) {
        (Person, Wearable) => &[Relation::Wearing, Relation::Holding],
        (Person | Animal, Person | Animal) => &[Relation::Watching, Relation::Near],
        (Person, Object) => &[Relation::Holding, Relation::Watching],
        (Person | Animal, Furniture) => &[Relation::On, Relation::Near],
        (Object | Wearable, Furniture) => &[Relation::On, Relation::In],
        (Object | Wearable, Object | Wearable) => &[Relation::Near],
        (Furniture, Furniture) => &[Relation::Near],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub category: String,
    pub attributes: BTreeSet<String>,
    /// `(relation, index of another entity in the same scene)`.
    pub relations: Vec<(Relation, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scene {
    pub scene_type: String,
    pub entities: Vec<Entity>,
}

impl Scene {
    pub fn validate(&self) -> bool {
        self.entities.iter().enumerate().all(|(i, e)| {
            e.relations
                .iter()
                .all(|(_, j)| *j < self.entities.len() && *j != i)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Entity(Box<Descriptor>),
    SceneType(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptor {
    pub category: String,
    #[serde(default)]
    pub attributes: Vec<String>,
    #[serde(default)]
    pub relation: Option<(Relation, Target)>,
}

impl Descriptor {
    pub fn new(category: &str) -> Self {
        Descriptor {
            category: category.to_string(),
            attributes: Vec::new(),
            relation: None,
        }
    }

    pub fn with_attr(mut self, attr: &str) -> Self {
        self.attributes.push(attr.to_string());
        self
    }

    pub fn related(mut self, rel: Relation, target: Descriptor) -> Self {
        self.relation = Some((rel, Target::Entity(Box::new(target))));
        self
    }

    pub fn in_scene(mut self, scene_type: &str) -> Self {
        self.relation = Some((Relation::In, Target::SceneType(scene_type.to_string())));
        self
    }

    /// Number of relations along the chain.
    pub fn depth(&self) -> usize {
        match &self.relation {
            None => 0,
            Some((_, Target::SceneType(_))) => 1,
            Some((_, Target::Entity(d))) => 1 + d.depth(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Query {
    ExistsEither(Descriptor),
    ExistsBoth(Descriptor, Descriptor),
    CountImages(Descriptor),
}

impl Query {
    pub fn descriptors(&self) -> Vec<&Descriptor> {
        match self {
            Query::ExistsEither(d) | Query::CountImages(d) => vec![d],
            Query::ExistsBoth(a, b) => vec![a, b],
        }
    }
}

/// How `ExistsBoth` treats its two conjuncts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BothSemantics {
    /// Each conjunct may be satisfied by either scene.
    #[default]
    Union,
    /// The two conjuncts must be satisfied by different scenes.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovrInstance {
    pub scene_a: Scene,
    pub scene_b: Scene,
    pub query: Query,
    pub surface_text: String,
    pub gold: String,
    pub seed: u64,
    #[serde(default)]
    pub semantics: BothSemantics,
}

impl CovrInstance {
    pub fn scene(&self, speaker: Speaker) -> &Scene {
        match speaker {
            Speaker::Alice => &self.scene_a,
            Speaker::Bob => &self.scene_b,
        }
    }
}

pub fn eval_descriptor(d: &Descriptor, s: &Scene) -> BTreeSet<usize> {
    s.entities
        .iter()
        .enumerate()
        .filter(|(_, e)| matches_entity(d, e, s))
        .map(|(i, _)| i)
        .collect()
}

fn matches_entity(d: &Descriptor, e: &Entity, s: &Scene) -> bool {
    if e.category != d.category || !d.attributes.iter().all(|a| e.attributes.contains(a)) {
        return false;
    }
    match &d.relation {
        None => true,
        Some((Relation::In, Target::SceneType(t))) => s.scene_type == *t,
        Some((_, Target::SceneType(_))) => false,
        Some((rel, Target::Entity(inner))) => e
            .relations
            .iter()
            .any(|(r, j)| r == rel && matches_entity(inner, &s.entities[*j], s)),
    }
}

/// Per-descriptor presence flags for one scene.
pub fn scene_flags(q: &Query, s: &Scene) -> Vec<bool> {
    q.descriptors()
        .into_iter()
        .map(|d| !eval_descriptor(d, s).is_empty())
        .collect()
}

/// Combine both scenes' presence flags into the answer string.
pub fn answer_from_flags(q: &Query, a: &[bool], b: &[bool], semantics: BothSemantics) -> String {
    let tf = |v: bool| if v { "True" } else { "False" }.to_string();
    match q {
        Query::ExistsEither(_) => tf(a[0] || b[0]),
        Query::ExistsBoth(..) => tf(match semantics {
            BothSemantics::Union => (a[0] || b[0]) && (a[1] || b[1]),
            BothSemantics::Strict => (a[0] && b[1]) || (b[0] && a[1]),
        }),
        Query::CountImages(_) => (u8::from(a[0]) + u8::from(b[0])).to_string(),
    }
}

pub fn eval_query(q: &Query, a: &Scene, b: &Scene, semantics: BothSemantics) -> String {
    answer_from_flags(q, &scene_flags(q, a), &scene_flags(q, b), semantics)
}

fn plural(noun: &str) -> String {
    let (head, last) = match noun.rsplit_once(' ') {
        Some((h, l)) => (format!("{h} "), l),
        None => (String::new(), noun),
    };
    let p = match last {
        "woman" => "women".to_string(),
        "man" => "men".to_string(),
        "child" => "children".to_string(),
        w if w.ends_with('s') || w.ends_with('x') || w.ends_with("ch") || w.ends_with("sh") => {
            format!("{w}es")
        }
        w => format!("{w}s"),
    };
    head + &p
}

fn article(phrase: &str) -> &'static str {
    match phrase.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Style {
    /// "a bowl that is on a table"
    Singular,
    /// "women that are watching child that is wearing helmet"
    Bare { plural_head: bool },
}

fn phrase(d: &Descriptor, style: Style) -> String {
    let mut head = d.attributes.clone();
    let plural_head = matches!(style, Style::Bare { plural_head: true });
    head.push(if plural_head {
        plural(&d.category)
    } else {
        d.category.clone()
    });
    let head = head.join(" ");
    let mut out = match style {
        Style::Singular => format!("{} {head}", article(&head)),
        Style::Bare { .. } => head,
    };
    if let Some((rel, target)) = &d.relation {
        let copula = if plural_head { "are" } else { "is" };
        let inner_style = match style {
            Style::Singular => Style::Singular,
            Style::Bare { .. } => Style::Bare { plural_head: false },
        };
        let target = match target {
            Target::Entity(inner) => phrase(inner, inner_style),
            Target::SceneType(t) => match style {
                Style::Singular => format!("{} {t}", article(t)),
                Style::Bare { .. } => t.clone(),
            },
        };
        out.push_str(&format!(" that {copula} {} {target}", rel.word()));
    }
    out
}

pub fn realize_question(q: &Query) -> String {
    match q {
        Query::ExistsEither(d) => format!("Is there {}?", phrase(d, Style::Singular)),
        Query::ExistsBoth(a, b) => format!(
            "Is there both {} and {}?",
            phrase(a, Style::Singular),
            phrase(b, Style::Singular)
        ),
        Query::CountImages(d) => format!(
            "How many images contain at least 1 {}?",
            phrase(d, Style::Bare { plural_head: true })
        ),
    }
}

/// Normalized text after the last `ANSWER:` marker.
pub fn parse_answer(utterance: &str) -> Option<String> {
    let at = utterance.rfind("ANSWER:")?;
    let raw = utterance[at + "ANSWER:".len()..]
        .trim()
        .trim_end_matches(['.', '!', '?'])
        .trim();
    let norm = match raw.to_lowercase().as_str() {
        "true" => "True".to_string(),
        "false" => "False".to_string(),
        "zero" => "0".to_string(),
        "one" => "1".to_string(),
        "two" => "2".to_string(),
        _ => raw.to_string(),
    };
    Some(norm)
}

pub fn score(instance: &CovrInstance, answer: &str) -> bool {
    answer == instance.gold
}

/// A scene with an entity count drawn from `sizes`.
pub fn generate_scene(rng: &mut seed::Rng, sizes: std::ops::RangeInclusive<usize>) -> Scene {
    let n = rng.random_range(sizes);
    let scene_type = SCENE_TYPES.choose(rng).expect("non-empty").to_string();
    let mut entities: Vec<Entity> = Vec::with_capacity(n);
    for i in 0..n {
        let (category, class) = *CATEGORIES.choose(rng).expect("non-empty");
        let mut attributes = BTreeSet::new();
        for _ in 0..rng.random_range(0..=2) {
            attributes.insert(ATTRIBUTES.choose(rng).expect("non-empty").to_string());
        }
        let mut relations = Vec::new();
        if i > 0 && rng.random_bool(0.7) {
            let j = rng.random_range(0..i);
            if let Some(rel) = allowed(class, class_of(&entities[j].category)).choose(rng) {
                relations.push((*rel, j));
            }
        }
        entities.push(Entity {
            category: category.to_string(),
            attributes,
            relations,
        });
    }
    Scene { scene_type, entities }
}

/// A descriptor that picks out entity `i` of `s`, up to `depth` relations deep.
fn describe_entity(rng: &mut seed::Rng, s: &Scene, i: usize, depth: usize) -> Descriptor {
    let e = &s.entities[i];
    let mut d = Descriptor::new(&e.category);
    if !e.attributes.is_empty() && rng.random_bool(0.4) {
        let attrs: Vec<&String> = e.attributes.iter().collect();
        d.attributes
            .push((*attrs.choose(rng).expect("non-empty")).clone());
    }
    if depth > 0 {
        if let Some(&(rel, j)) = e.relations.first() {
            if rng.random_bool(0.8) {
                return d.related(rel, describe_entity(rng, s, j, depth - 1));
            }
        }
        if rng.random_bool(0.3) {
            return d.in_scene(&s.scene_type);
        }
    }
    d
}

fn random_descriptor(rng: &mut seed::Rng, a: &Scene, b: &Scene) -> Descriptor {
    let s = if rng.random_bool(0.5) { a } else { b };
    if !s.entities.is_empty() && rng.random_bool(0.75) {
        let i = rng.random_range(0..s.entities.len());
        return describe_entity(rng, s, i, 2);
    }
    let (category, _) = *CATEGORIES.choose(rng).expect("non-empty");
    let mut d = Descriptor::new(category);
    if rng.random_bool(0.3) {
        d = d.with_attr(ATTRIBUTES.choose(rng).expect("non-empty"));
    }
    if rng.random_bool(0.3) {
        d = d.in_scene(SCENE_TYPES.choose(rng).expect("non-empty"));
    }
    d
}

pub type AnswerBalance = BTreeMap<String, f64>;

pub fn default_balance() -> AnswerBalance {
    [
        ("True", 0.35),
        ("False", 0.35),
        ("0", 0.1),
        ("1", 0.1),
        ("2", 0.1),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

const GOLD_VALUES: [&str; 5] = ["True", "False", "0", "1", "2"];
const RETRIES: u32 = 500;

pub fn generate_instance(
    seed: u64,
    balance: &AnswerBalance,
    semantics: BothSemantics,
) -> Result<CovrInstance, CovrError> {
    let total: f64 = balance.values().sum();
    if (total - 1.0).abs() > 1e-9
        || balance
            .iter()
            .any(|(k, v)| *v < 0.0 || !GOLD_VALUES.contains(&k.as_str()))
    {
        return Err(CovrError::BadBalance);
    }
    let mut rng = seed::rng(seed);
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    let mut stratum = balance.keys().last().cloned().unwrap_or_default();
    for (k, v) in balance {
        acc += v;
        if draw < acc {
            stratum = k.clone();
            break;
        }
    }
    let boolean = stratum == "True" || stratum == "False";
    for _ in 0..RETRIES {
        let scene_a = generate_scene(&mut rng, 3..=8);
        let scene_b = generate_scene(&mut rng, 3..=8);
        let query = if !boolean {
            Query::CountImages(random_descriptor(&mut rng, &scene_a, &scene_b))
        } else if rng.random_bool(0.5) {
            Query::ExistsEither(random_descriptor(&mut rng, &scene_a, &scene_b))
        } else {
            Query::ExistsBoth(
                random_descriptor(&mut rng, &scene_a, &scene_b),
                random_descriptor(&mut rng, &scene_a, &scene_b),
            )
        };
        let gold = eval_query(&query, &scene_a, &scene_b, semantics);
        if gold == stratum {
            return Ok(CovrInstance {
                surface_text: realize_question(&query),
                scene_a,
                scene_b,
                query,
                gold,
                seed,
                semantics,
            });
        }
    }
    Err(CovrError::GenerationFailed(RETRIES))
}

impl fmt::Display for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A {} containing:", self.scene_type)?;
        for (i, e) in self.entities.iter().enumerate() {
            let mut words: Vec<&str> = e.attributes.iter().map(String::as_str).collect();
            words.push(&e.category);
            write!(f, "\n({}) {}", i + 1, words.join(" "))?;
            for (rel, j) in &e.relations {
                write!(f, ", {} ({})", rel.word(), j + 1)?;
            }
        }
        Ok(())
    }
}
