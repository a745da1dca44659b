//! Dialogue-level text metrics.

pub mod centering;
pub mod lexical;
pub mod sycophancy;

pub use centering::{Centering, CenteringConfig, Transition};
pub use lexical::{LexicalDensity, LexicalScores, StopwordList};
