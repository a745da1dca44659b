//! Dialogue records and their line-delimited JSON persistence.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::BudgetConfig;
use crate::games::{ParsedAnswer, TaskId};
use crate::{PerSpeaker, Speaker, Turn};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: schema_version {found} (expected {expected})")]
    SchemaVersion { line: usize, found: u32, expected: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// Text of the answering turn, or of the last turn when nobody answered.
    pub raw_answer: String,
    pub parsed_answer: Option<ParsedAnswer>,
    pub answering_player: Option<Speaker>,
    /// `None` exactly when no answer was parsed.
    pub correct: Option<bool>,
    pub turns_used: u32,
    pub tokens_used: PerSpeaker<u32>,
    /// The turn budget ran out without a parseable answer.
    #[serde(default)]
    pub unparseable: bool,
    /// Error message when an agent failed mid-dialogue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

impl Outcome {
    /// Correctness for aggregation: anything but a scored correct answer counts as wrong.
    pub fn success(&self) -> bool {
        self.correct == Some(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallClock {
    pub started_unix_ms: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema_version: u32,
    pub task: TaskId,
    pub instance_id: String,
    pub seed: u64,
    pub budget: BudgetConfig,
    pub agents: PerSpeaker<String>,
    pub turns: Vec<Turn>,
    pub outcome: Outcome,
    /// Left empty unless timing is requested, so repeated runs stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock: Option<WallClock>,
}

impl Transcript {
    /// Turns spoken by `speaker`, in order.
    pub fn turns_of(&self, speaker: Speaker) -> impl Iterator<Item = &Turn> {
        self.turns.iter().filter(move |t| t.speaker == speaker)
    }
}

pub fn write_jsonl<W: Write>(mut out: W, transcripts: &[Transcript]) -> Result<(), TranscriptError> {
    for t in transcripts {
        let line = serde_json::to_string(t).map_err(|source| TranscriptError::Json { line: 0, source })?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one transcript per non-blank line. All lines must carry the current schema version.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<Transcript>, TranscriptError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|source| TranscriptError::Json { line: n, source })?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as u32;
        if found != SCHEMA_VERSION {
            return Err(TranscriptError::SchemaVersion {
                line: n,
                found,
                expected: SCHEMA_VERSION,
            });
        }
        out.push(serde_json::from_value(value).map_err(|source| TranscriptError::Json { line: n, source })?);
    }
    Ok(out)
}

pub fn write_jsonl_file(path: &std::path::Path, transcripts: &[Transcript]) -> Result<(), TranscriptError> {
    let file = std::fs::File::create(path)?;
    write_jsonl(std::io::BufWriter::new(file), transcripts)
}

pub fn read_jsonl_file(path: &std::path::Path) -> Result<Vec<Transcript>, TranscriptError> {
    let file = std::fs::File::open(path)?;
    read_jsonl(std::io::BufReader::new(file))
}
