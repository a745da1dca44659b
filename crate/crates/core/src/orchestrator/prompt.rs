//! Prompt assembly: game instructions, the shared conversation section, and turn reminders.

use serde::{Deserialize, Serialize};

use crate::budget::BudgetConfig;
use crate::games::chess::render_ascii;
use crate::games::namegame::render_table;
use crate::games::selection::render_item;
use crate::games::PlayerView;
use crate::{Speaker, Turn};

/// Instruction text for one role, with `{placeholder}` slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub instructions: String,
    /// Replaces the turn cue on the recipient's last turn.
    pub final_block: String,
    /// Added after the turns-left line one own turn before the last.
    pub penultimate: String,
    /// Appended after `k. YOU:`.
    #[serde(default)]
    pub cue_suffix: String,
}

impl PromptTemplate {
    fn bundled(instructions: &str, final_block: &str, cue_suffix: &str) -> Self {
        PromptTemplate {
            instructions: instructions.trim_end().to_string(),
            final_block: final_block.trim_end().to_string(),
            penultimate: include_str!("../../data/prompts/penultimate.txt")
                .trim_end()
                .to_string(),
            cue_suffix: cue_suffix.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSet {
    pub chess: PromptTemplate,
    pub covr: PromptTemplate,
    pub name_game: PromptTemplate,
    pub describer: PromptTemplate,
    pub guesser: PromptTemplate,
}

impl Default for PromptSet {
    fn default() -> Self {
        PromptSet {
            chess: PromptTemplate::bundled(
                include_str!("../../data/prompts/chess.txt"),
                include_str!("../../data/prompts/chess_final.txt"),
                " ",
            ),
            covr: PromptTemplate::bundled(
                include_str!("../../data/prompts/covr.txt"),
                include_str!("../../data/prompts/covr_final.txt"),
                "",
            ),
            name_game: PromptTemplate::bundled(
                include_str!("../../data/prompts/namegame.txt"),
                include_str!("../../data/prompts/namegame_final.txt"),
                "",
            ),
            describer: PromptTemplate::bundled(
                include_str!("../../data/prompts/describer.txt"),
                include_str!("../../data/prompts/describer_final.txt"),
                "",
            ),
            guesser: PromptTemplate::bundled(
                include_str!("../../data/prompts/guesser.txt"),
                include_str!("../../data/prompts/guesser_final.txt"),
                "",
            ),
        }
    }
}

impl PromptSet {
    pub fn for_view(&self, view: &PlayerView<'_>) -> &PromptTemplate {
        match view {
            PlayerView::Chess { .. } => &self.chess,
            PlayerView::NameGame { .. } => &self.name_game,
            PlayerView::SelectionDescriber { .. } => &self.describer,
            PlayerView::SelectionGuesser { .. } => &self.guesser,
            PlayerView::Covr { .. } => &self.covr,
        }
    }
}

/// Dialogue turns remaining, counting the one about to be taken.
pub fn turns_left(turn_index: u32, turn_budget: u32) -> u32 {
    turn_budget + 1 - turn_index
}

/// The speaker of `turn_index` will not speak again within the budget.
pub fn is_final_own_turn(turn_index: u32, turn_budget: u32) -> bool {
    turn_index + 2 > turn_budget
}

/// The speaker's next turn will be their last.
pub fn is_penultimate_own_turn(turn_index: u32, turn_budget: u32) -> bool {
    turn_index + 2 <= turn_budget && turn_budget < turn_index + 4
}

/// The private data one player sees, as prompt text.
pub fn render_view(view: &PlayerView<'_>) -> String {
    match view {
        PlayerView::Chess { board } => render_ascii(board),
        PlayerView::NameGame { db } => render_table(db),
        PlayerView::SelectionDescriber { space, target } => render_item(space, target),
        PlayerView::SelectionGuesser { space, candidates } => candidates
            .iter()
            .enumerate()
            .map(|(i, c)| format!("Image {i}: {}", render_item(space, c)))
            .collect::<Vec<_>>()
            .join("\n"),
        PlayerView::Covr { scene, .. } => scene.to_string(),
    }
}

/// Replace each `{key}` with its value in a single left-to-right pass.
pub fn substitute(template: &str, vars: &[(&str, String)]) -> String {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let key = &after[..close];
            vars.iter().find(|(k, _)| *k == key).map(|(_, v)| (v, close))
        });
        match hit {
            Some((value, close)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// History from `recipient`'s side: their turns are `YOU`, the partner's are `ME`.
pub fn render_history(history: &[Turn], recipient: Speaker) -> String {
    history
        .iter()
        .map(|t| {
            let who = if t.speaker == recipient { "YOU" } else { "ME" };
            format!("{}. {who}: {}", t.index, t.text)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Full prompt for the speaker of `turn_index`.
pub fn build_prompt(
    templates: &PromptSet,
    recipient: Speaker,
    view: &PlayerView<'_>,
    history: &[Turn],
    turn_index: u32,
    budget: &BudgetConfig,
) -> String {
    let template = templates.for_view(view);
    let (my_side, partner_side) = match recipient {
        Speaker::Alice => ("left", "right"),
        Speaker::Bob => ("right", "left"),
    };
    let mut vars = vec![
        ("me", recipient.name().to_string()),
        ("partner", recipient.other().name().to_string()),
        ("word_limit", budget.stated_word_limit.to_string()),
        ("private_view", render_view(view)),
        ("my_side", my_side.to_string()),
        ("partner_side", partner_side.to_string()),
    ];
    match view {
        PlayerView::NameGame { db } => vars.push(("n", db.len().to_string())),
        PlayerView::Covr { question, .. } => vars.push(("question", question.to_string())),
        _ => {}
    }

    let mut out = substitute(&template.instructions, &vars);
    out.push_str("\n\n# CONVERSATION\n\nHere is our conversation history.\n\n");
    if !history.is_empty() {
        out.push_str(&render_history(history, recipient));
        out.push_str("\n\n");
    }
    let t = budget.turn_budget;
    if is_final_own_turn(turn_index, t) {
        out.push_str(&substitute(&template.final_block, &vars));
    } else {
        out.push_str(&format!("You have {} turns left.", turns_left(turn_index, t)));
        if is_penultimate_own_turn(turn_index, t) {
            out.push_str("\n\n");
            out.push_str(&template.penultimate);
        }
        out.push_str(&format!("\n\n{turn_index}. YOU:{}", template.cue_suffix));
    }
    out
}
