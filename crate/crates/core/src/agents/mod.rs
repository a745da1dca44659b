//! Agents: anything that turns a prompt and a private view into the next utterance.

pub mod remote;
pub mod replay;
pub mod scripted;

use thiserror::Error;

use crate::games::selection::Attachment;
use crate::games::PlayerView;
use crate::{Speaker, Turn};

pub use remote::{RemoteAgent, RemoteAgentConfig, RemoteClient, TextModel};
pub use replay::ReplayAgent;
pub use scripted::{ScriptedAgent, ScriptedPolicy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("credential rejected or missing: {0}")]
    Auth(String),
    #[error("rate limited after {retries} retries")]
    RateLimited { retries: u32 },
    #[error("timed out after {retries} retries")]
    Timeout { retries: u32 },
    #[error("server error {status} after {retries} retries")]
    Server { status: u16, retries: u32 },
    #[error("response had no text candidate: {body}")]
    MalformedResponse { body: String },
    #[error("transport: {0}")]
    Transport(String),
    #[error("{speaker} has no recorded turn {requested} ({recorded} recorded)")]
    Exhausted {
        speaker: Speaker,
        requested: usize,
        recorded: usize,
    },
    #[error("agent misconfigured: {0}")]
    Config(String),
}

impl AgentError {
    /// Errors that should stop a whole sweep rather than one dialogue.
    pub fn is_fatal(&self) -> bool {
        matches!(self, AgentError::Auth(_))
    }
}

/// Everything an agent may look at when producing its next turn.
#[derive(Debug, Clone)]
pub struct AgentContext<'a> {
    pub speaker: Speaker,
    /// Exactly what a remote model would receive.
    pub prompt: String,
    pub view: PlayerView<'a>,
    pub history: &'a [Turn],
    pub turn_index: u32,
    pub turn_budget: u32,
    pub turns_left: u32,
    pub allowance: u32,
    pub word_limit: u32,
    pub seed: u64,
    pub attachments: &'a [Attachment],
}

impl AgentContext<'_> {
    /// No later turn belongs to this speaker.
    pub fn is_final_own_turn(&self) -> bool {
        crate::orchestrator::is_final_own_turn(self.turn_index, self.turn_budget)
    }

    /// How many turns this speaker has already taken.
    pub fn own_turns_taken(&self) -> usize {
        self.history.iter().filter(|t| t.speaker == self.speaker).count()
    }

    pub fn partner_turns(&self) -> impl DoubleEndedIterator<Item = &Turn> {
        let me = self.speaker;
        self.history.iter().filter(move |t| t.speaker != me)
    }

    pub fn own_turns(&self) -> impl DoubleEndedIterator<Item = &Turn> {
        let me = self.speaker;
        self.history.iter().filter(move |t| t.speaker == me)
    }
}

pub trait Agent: Send + Sync {
    fn id(&self) -> String;
    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError>;
}

impl<A: Agent + ?Sized> Agent for std::sync::Arc<A> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError> {
        (**self).next_utterance(ctx)
    }
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError> {
        (**self).next_utterance(ctx)
    }
}
