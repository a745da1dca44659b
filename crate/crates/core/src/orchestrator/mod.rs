//! Runs isotoken dialogues: turn alternation, truncation, answer detection and scoring.

mod prompt;
mod sweep;

pub use prompt::{
    build_prompt, is_final_own_turn, is_penultimate_own_turn, render_history, render_view, substitute,
    turns_left, PromptSet, PromptTemplate,
};
pub use sweep::{run_sweep, run_sweep_with, AgentSpec, SweepConfig, SweepError, SweepOutput};

use thiserror::Error;

use crate::agents::{Agent, AgentContext, AgentError};
use crate::budget::{speaker_for_turn, truncate_to_allowance, BudgetConfig};
use crate::games::GameInstance;
use crate::transcript::{Outcome, Transcript, SCHEMA_VERSION};
use crate::{PerSpeaker, Turn};

/// An agent failed mid-dialogue. The partial transcript is kept for persistence.
#[derive(Debug, Error)]
#[error("{} aborted at turn {turn}: {source}", transcript.instance_id)]
pub struct DialogueAborted {
    pub transcript: Transcript,
    pub turn: u32,
    #[source]
    pub source: AgentError,
}

pub struct Players<'a> {
    pub alice: &'a dyn Agent,
    pub bob: &'a dyn Agent,
    /// Seed handed to each agent's context.
    pub seeds: PerSpeaker<u64>,
}

pub fn run_dialogue(
    instance: &GameInstance,
    players: &Players<'_>,
    budget: &BudgetConfig,
    prompts: &PromptSet,
) -> Result<Transcript, Box<DialogueAborted>> {
    let t = budget.turn_budget;
    let mut turns: Vec<Turn> = Vec::with_capacity(t as usize);
    let mut tokens = PerSpeaker::new(0u32, 0u32);
    let mut outcome: Option<Outcome> = None;

    let finish = |turns: Vec<Turn>, outcome: Outcome| Transcript {
        schema_version: SCHEMA_VERSION,
        task: instance.task(),
        instance_id: instance.instance_id(),
        seed: instance.seed(),
        budget: *budget,
        agents: PerSpeaker::new(players.alice.id(), players.bob.id()),
        turns,
        outcome,
        wall_clock: None,
    };

    for k in 1..=t {
        let speaker = speaker_for_turn(k).expect("k starts at 1");
        let agent = match speaker {
            crate::Speaker::Alice => players.alice,
            crate::Speaker::Bob => players.bob,
        };
        let view = instance.view(speaker);
        let ctx = AgentContext {
            speaker,
            prompt: build_prompt(prompts, speaker, &view, &turns, k, budget),
            view,
            history: &turns,
            turn_index: k,
            turn_budget: t,
            turns_left: turns_left(k, t),
            allowance: budget.allowance,
            word_limit: budget.stated_word_limit,
            seed: *players.seeds.get(speaker),
            attachments: instance.attachments(speaker),
        };
        let reply = match agent.next_utterance(&ctx) {
            Ok(r) => r,
            Err(source) => {
                let outcome = Outcome {
                    raw_answer: turns.last().map(|t| t.text.clone()).unwrap_or_default(),
                    parsed_answer: None,
                    answering_player: None,
                    correct: None,
                    turns_used: turns.len() as u32,
                    tokens_used: tokens,
                    unparseable: false,
                    aborted: Some(source.to_string()),
                };
                return Err(Box::new(DialogueAborted {
                    transcript: finish(turns, outcome),
                    turn: k,
                    source,
                }));
            }
        };
        let (text, truncated) = truncate_to_allowance(&reply, budget.allowance);
        let turn = Turn::new(k, speaker, text, truncated);
        *tokens.get_mut(speaker) += turn.token_count;
        let parsed = instance
            .eligible(speaker)
            .then(|| instance.parse_answer(&turn.text))
            .flatten();
        turns.push(turn);
        if let Some(answer) = parsed {
            outcome = Some(Outcome {
                raw_answer: turns[turns.len() - 1].text.clone(),
                correct: Some(instance.score(speaker, &answer)),
                parsed_answer: Some(answer),
                answering_player: Some(speaker),
                turns_used: k,
                tokens_used: tokens,
                unparseable: false,
                aborted: None,
            });
            break;
        }
    }

    let outcome = outcome.unwrap_or_else(|| Outcome {
        raw_answer: turns.last().map(|t| t.text.clone()).unwrap_or_default(),
        parsed_answer: None,
        answering_player: None,
        correct: None,
        turns_used: turns.len() as u32,
        tokens_used: tokens,
        unparseable: true,
        aborted: None,
    });
    Ok(finish(turns, outcome))
}
