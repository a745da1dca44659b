use super::{Agent, AgentContext, AgentError};
use crate::{Speaker, Transcript};

/// Plays back one speaker's recorded turns, byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayAgent {
    speaker: Speaker,
    turns: Vec<String>,
    label: String,
}

impl ReplayAgent {
    pub fn new(speaker: Speaker, turns: Vec<String>, label: impl Into<String>) -> Self {
        ReplayAgent {
            speaker,
            turns,
            label: label.into(),
        }
    }

    pub fn from_transcript(transcript: &Transcript, speaker: Speaker) -> Self {
        Self::new(
            speaker,
            transcript.turns_of(speaker).map(|t| t.text.clone()).collect(),
            transcript.instance_id.clone(),
        )
    }

    /// Split an alternating script (Alice first) into one agent per speaker.
    pub fn pair_from_script(script: &[&str], label: &str) -> (ReplayAgent, ReplayAgent) {
        let pick = |parity: usize| -> Vec<String> {
            script
                .iter()
                .skip(parity)
                .step_by(2)
                .map(|s| s.to_string())
                .collect()
        };
        (
            Self::new(Speaker::Alice, pick(0), label),
            Self::new(Speaker::Bob, pick(1), label),
        )
    }

    pub fn recorded(&self) -> usize {
        self.turns.len()
    }
}

impl Agent for ReplayAgent {
    fn id(&self) -> String {
        format!("replay:{}", self.label)
    }

    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError> {
        if ctx.speaker != self.speaker {
            return Err(AgentError::Config(format!(
                "replay recorded for {} asked to speak as {}",
                self.speaker, ctx.speaker
            )));
        }
        let j = ctx.own_turns_taken();
        self.turns.get(j).cloned().ok_or(AgentError::Exhausted {
            speaker: self.speaker,
            requested: j + 1,
            recorded: self.turns.len(),
        })
    }
}
