use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the two players. Alice always opens the dialogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Speaker {
    Alice,
    Bob,
}

impl Speaker {
    pub const BOTH: [Speaker; 2] = [Speaker::Alice, Speaker::Bob];

    pub fn other(self) -> Speaker {
        match self {
            Speaker::Alice => Speaker::Bob,
            Speaker::Bob => Speaker::Alice,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Speaker::Alice => "Alice",
            Speaker::Bob => "Bob",
        }
    }

    /// Index into per-player arrays: Alice = 0, Bob = 1.
    pub fn index(self) -> usize {
        match self {
            Speaker::Alice => 0,
            Speaker::Bob => 1,
        }
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single utterance in a dialogue, after budget enforcement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    /// 1-based position in the dialogue.
    pub index: u32,
    pub speaker: Speaker,
    pub text: String,
    /// Whitespace-token count of `text`.
    pub token_count: u32,
    /// Whether the agent's reply was cut down to the per-turn allowance.
    pub truncated: bool,
}

impl Turn {
    pub fn new(index: u32, speaker: Speaker, text: impl Into<String>, truncated: bool) -> Self {
        let text = text.into();
        let token_count = crate::budget::token_count(&text) as u32;
        Turn {
            index,
            speaker,
            text,
            token_count,
            truncated,
        }
    }
}

/// Per-player values, indexed by [`Speaker`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerSpeaker<T> {
    pub alice: T,
    pub bob: T,
}

impl<T> PerSpeaker<T> {
    pub fn new(alice: T, bob: T) -> Self {
        PerSpeaker { alice, bob }
    }

    pub fn get(&self, s: Speaker) -> &T {
        match s {
            Speaker::Alice => &self.alice,
            Speaker::Bob => &self.bob,
        }
    }

    pub fn get_mut(&mut self, s: Speaker) -> &mut T {
        match s {
            Speaker::Alice => &mut self.alice,
            Speaker::Bob => &mut self.bob,
        }
    }
}
