//! Oracles, fixtures and acceptance checks shared by the integration tests.
// Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

pub mod checks;
pub mod chess_oracle;
pub mod fixtures;
pub mod interactivity_oracle;
