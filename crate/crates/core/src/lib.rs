//! Self-play harness for collaborative private-information dialogue games under a fixed token budget.

pub mod agents;
pub mod budget;
pub mod games;
pub mod interactivity;
pub mod metrics;
pub mod orchestrator;
pub mod report;
pub mod seed;
pub mod transcript;
mod types;

pub use budget::BudgetConfig;
pub use games::{GameInstance, ParsedAnswer, PlayerView, TaskId};
pub use transcript::{Outcome, Transcript};
pub use types::{PerSpeaker, Speaker, Turn};
