//! The four private-information games and a uniform wrapper over them.

pub mod chess;
pub mod covr;
pub mod namegame;
pub mod selection;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Speaker;
use chess::{Board, ChessAnswer, ChessInstance};
use covr::{CovrInstance, Query, Scene};
use namegame::{NameGameInstance, PersonRecord};
use selection::{Attachment, FeatureSpace, Item, SelectionAnswer, SelectionInstance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error(transparent)]
    Chess(#[from] chess::ChessError),
    #[error(transparent)]
    NameGame(#[from] namegame::NameGameError),
    #[error(transparent)]
    Selection(#[from] selection::SelectionError),
    #[error(transparent)]
    Covr(#[from] covr::CovrError),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskId {
    #[serde(rename = "chess")]
    Chess,
    #[serde(rename = "covr")]
    Covr,
    #[serde(rename = "md3")]
    Md3,
    #[serde(rename = "tangram")]
    Tangram,
    #[serde(rename = "name-game-9")]
    NameGame9,
    #[serde(rename = "name-game-16")]
    NameGame16,
    #[serde(rename = "name-game-25")]
    NameGame25,
}

impl TaskId {
    pub const ALL: [TaskId; 7] = [
        TaskId::Chess,
        TaskId::Covr,
        TaskId::Md3,
        TaskId::Tangram,
        TaskId::NameGame9,
        TaskId::NameGame16,
        TaskId::NameGame25,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::Chess => "chess",
            TaskId::Covr => "covr",
            TaskId::Md3 => "md3",
            TaskId::Tangram => "tangram",
            TaskId::NameGame9 => "name-game-9",
            TaskId::NameGame16 => "name-game-16",
            TaskId::NameGame25 => "name-game-25",
        }
    }

    pub fn name_game(size: u32) -> Result<TaskId, GameError> {
        match size {
            9 => Ok(TaskId::NameGame9),
            16 => Ok(TaskId::NameGame16),
            25 => Ok(TaskId::NameGame25),
            n => Err(namegame::NameGameError::InvalidSize(n).into()),
        }
    }

    /// Candidate count for selection tasks.
    pub fn selection_k(self) -> Option<usize> {
        match self {
            TaskId::Md3 => Some(6),
            TaskId::Tangram => Some(4),
            _ => None,
        }
    }

    /// Instance for `seed` under default generator settings.
    pub fn generate(self, seed: u64) -> Result<GameInstance, GameError> {
        Ok(match self {
            TaskId::Chess => GameInstance::Chess(chess::make_instance(seed, &chess::ChessParams::default())?),
            TaskId::Covr => GameInstance::Covr(covr::generate_instance(
                seed,
                &covr::default_balance(),
                covr::BothSemantics::default(),
            )?),
            TaskId::Md3 | TaskId::Tangram => {
                let k = self.selection_k().expect("selection task");
                GameInstance::Selection(selection::generate_instance(
                    seed,
                    &selection::SelectionParams::with_k(k),
                )?)
            }
            TaskId::NameGame9 | TaskId::NameGame16 | TaskId::NameGame25 => {
                let size = match self {
                    TaskId::NameGame9 => 9,
                    TaskId::NameGame16 => 16,
                    _ => 25,
                };
                GameInstance::NameGame(namegame::generate_instance(
                    seed,
                    size,
                    namegame::NearMissQuota::scaled(size),
                )?)
            }
        })
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskId {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| GameError::UnknownTask(s.to_string()))
    }
}

/// What one player is allowed to see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlayerView<'a> {
    Chess {
        board: &'a Board,
    },
    NameGame {
        db: &'a [PersonRecord],
    },
    SelectionDescriber {
        space: &'a FeatureSpace,
        target: &'a Item,
    },
    SelectionGuesser {
        space: &'a FeatureSpace,
        candidates: &'a [Item],
    },
    Covr {
        scene: &'a Scene,
        query: &'a Query,
        question: &'a str,
        semantics: covr::BothSemantics,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ParsedAnswer {
    Chess(ChessAnswer),
    Row(u32),
    Selection(SelectionAnswer),
    Covr(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", content = "instance", rename_all = "snake_case")]
pub enum GameInstance {
    Chess(ChessInstance),
    NameGame(NameGameInstance),
    Selection(SelectionInstance),
    Covr(CovrInstance),
}

impl GameInstance {
    pub fn task(&self) -> TaskId {
        match self {
            GameInstance::Chess(_) => TaskId::Chess,
            GameInstance::Covr(_) => TaskId::Covr,
            GameInstance::Selection(s) if s.candidates.len() == 6 => TaskId::Md3,
            GameInstance::Selection(_) => TaskId::Tangram,
            GameInstance::NameGame(n) => match n.size {
                9 => TaskId::NameGame9,
                16 => TaskId::NameGame16,
                _ => TaskId::NameGame25,
            },
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            GameInstance::Chess(g) => g.seed,
            GameInstance::NameGame(g) => g.seed,
            GameInstance::Selection(g) => g.seed,
            GameInstance::Covr(g) => g.seed,
        }
    }

    pub fn instance_id(&self) -> String {
        format!("{}-{:016x}", self.task(), self.seed())
    }

    pub fn view(&self, speaker: Speaker) -> PlayerView<'_> {
        match self {
            GameInstance::Chess(g) => PlayerView::Chess {
                board: g.board(speaker),
            },
            GameInstance::NameGame(g) => PlayerView::NameGame { db: g.db(speaker) },
            GameInstance::Selection(g) => match speaker {
                Speaker::Alice => PlayerView::SelectionDescriber {
                    space: &g.space,
                    target: &g.target,
                },
                Speaker::Bob => PlayerView::SelectionGuesser {
                    space: &g.space,
                    candidates: &g.candidates,
                },
            },
            GameInstance::Covr(g) => PlayerView::Covr {
                scene: g.scene(speaker),
                query: &g.query,
                question: &g.surface_text,
                semantics: g.semantics,
            },
        }
    }

    pub fn attachments(&self, speaker: Speaker) -> &[Attachment] {
        match (self, speaker) {
            (GameInstance::Selection(g), Speaker::Bob) => &g.attachments,
            _ => &[],
        }
    }

    /// Whether `speaker` may end the dialogue with an answer.
    pub fn eligible(&self, speaker: Speaker) -> bool {
        match self {
            GameInstance::Selection(_) => speaker == Speaker::Bob,
            _ => true,
        }
    }

    pub fn parse_answer(&self, text: &str) -> Option<ParsedAnswer> {
        match self {
            GameInstance::Chess(_) => chess::parse_answer(text).map(ParsedAnswer::Chess),
            GameInstance::NameGame(_) => namegame::parse_answer(text).map(ParsedAnswer::Row),
            GameInstance::Selection(g) => {
                selection::parse_answer(text, g.candidates.len()).map(ParsedAnswer::Selection)
            }
            GameInstance::Covr(_) => covr::parse_answer(text).map(ParsedAnswer::Covr),
        }
    }

    pub fn score(&self, by: Speaker, answer: &ParsedAnswer) -> bool {
        match (self, answer) {
            (GameInstance::Chess(g), ParsedAnswer::Chess(a)) => chess::score(g, by, *a),
            (GameInstance::NameGame(g), ParsedAnswer::Row(r)) => namegame::score(g, by, *r),
            (GameInstance::Selection(g), ParsedAnswer::Selection(a)) => selection::score(g, *a),
            (GameInstance::Covr(g), ParsedAnswer::Covr(a)) => covr::score(g, a),
            _ => false,
        }
    }
}
