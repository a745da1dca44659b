//! One check per acceptance criterion. Each returns a verdict with a short detail line.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pings_core::agents::{Agent, AgentContext, AgentError, ReplayAgent, ScriptedAgent, ScriptedPolicy};
use pings_core::budget::{per_turn_allowance, token_count, BudgetConfig};
use pings_core::games::chess::{self, board_after, legal_moves, perft, sample_game, Board, ChessParams};
use pings_core::games::selection::{FeatureSpace, Item};
use pings_core::games::{GameInstance, TaskId};
use pings_core::interactivity::{
    best_value_level_k, interactivity_level, AbstractGame, MessageSpace, DEFAULT_GUARD,
};
use pings_core::metrics::centering::{classify, Centering, CenteringConfig, Transition};
use pings_core::metrics::sycophancy::{
    count_apologies, detect_acceptance, detect_proposals, ProposalRuleSet,
};
use pings_core::metrics::LexicalDensity;
use pings_core::orchestrator::{build_prompt, run_dialogue, run_sweep_with, Players, PromptSet, SweepConfig};
use pings_core::report::{self, Interval, ReportFormat};
use pings_core::transcript::write_jsonl;
use pings_core::{seed, PerSpeaker, Speaker, Transcript, Turn};

use super::chess_oracle::Pos;
use super::fixtures::{self, DialogueFixture};
use super::interactivity_oracle;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn scripted() -> Arc<dyn Agent> {
    Arc::new(ScriptedAgent::new(ScriptedPolicy::Auto))
}

fn sweep(task: TaskId, turns: &[u32], n: usize, seed: u64, parallelism: usize) -> SweepConfig {
    SweepConfig {
        task,
        turns: turns.to_vec(),
        tokens: 256,
        n,
        seed,
        parallelism,
        out: None,
        agents: PerSpeaker::new(
            pings_core::orchestrator::AgentSpec::Scripted {
                policy: ScriptedPolicy::Auto,
            },
            pings_core::orchestrator::AgentSpec::Scripted {
                policy: ScriptedPolicy::Auto,
            },
        ),
        record_wall_clock: false,
    }
}

fn replay(instance: &GameInstance, script: &[&str], turn_budget: u32) -> Transcript {
    let (alice, bob) = ReplayAgent::pair_from_script(script, "fixture");
    let players = Players {
        alice: &alice,
        bob: &bob,
        seeds: PerSpeaker::new(0, 0),
    };
    let budget = BudgetConfig::new(256, turn_budget).expect("valid budget");
    match run_dialogue(instance, &players, &budget, &PromptSet::default()) {
        Ok(t) => t,
        Err(aborted) => aborted.transcript,
    }
}

// ---- 1 ----

pub fn midgame_positions() -> Vec<(String, Board)> {
    [(7u64, 30u32), (2024, 44)]
        .into_iter()
        .map(|(s, plies)| {
            let moves = sample_game(s, plies);
            let b = board_after(&moves, moves.len()).expect("legal game");
            (format!("seed {s} after {} plies", moves.len()), b)
        })
        .collect()
}

pub fn perft_against_oracle(board: &Board, max_depth: u32) -> Result<Vec<u64>, String> {
    let oracle = Pos::from_fen(&board.to_fen());
    let mut ours: Vec<String> = legal_moves(board)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|m| m.to_string().to_lowercase())
        .collect();
    let mut theirs: Vec<String> = oracle.legal().iter().map(|m| m.uci()).collect();
    ours.sort();
    theirs.sort();
    if ours != theirs {
        return Err(format!("root moves differ: {ours:?} vs {theirs:?}"));
    }
    let mut counts = Vec::new();
    for d in 1..=max_depth {
        let (a, b) = (perft(board, d), oracle.perft(d));
        if a != b {
            return Err(format!("perft({d}) = {a}, oracle {b}"));
        }
        counts.push(a);
    }
    Ok(counts)
}

pub fn c1_chess_perft() -> Verdict {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    let mut positions = vec![("initial".to_string(), Board::initial())];
    positions.extend(midgame_positions());
    for (label, board) in &positions {
        match perft_against_oracle(board, 3) {
            Ok(c) => {
                if label == "initial" && c != [20, 400, 8902] {
                    pass = false;
                }
                details.push(format!("{label}: {c:?}"));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{label}: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(pass && secs < 10.0, format!("{}; {secs:.2}s", details.join("; ")))
}

// ---- 2 ----

pub fn c2_chess_instances() -> Verdict {
    let params = ChessParams::default();
    let mut bad = Vec::new();
    let mut alice_earlier = 0;
    const N: u64 = 1000;
    for s in 0..N {
        let inst = match chess::make_instance(s, &params) {
            Ok(i) => i,
            Err(e) => {
                bad.push(format!("seed {s}: {e}"));
                continue;
            }
        };
        let (early, late) = match inst.earlier {
            Speaker::Alice => (&inst.board_a, &inst.board_b),
            Speaker::Bob => (&inst.board_b, &inst.board_a),
        };
        if inst.earlier == Speaker::Alice {
            alice_earlier += 1;
        }
        let gap = late.ply.checked_sub(early.ply);
        if gap != Some(inst.gap_plies) || !(params.min_gap..=params.max_gap).contains(&inst.gap_plies) {
            bad.push(format!("seed {s}: gap {:?} vs {}", gap, inst.gap_plies));
        }
        let replays = board_after(&inst.move_list, early.ply as usize).ok().as_ref() == Some(early)
            && board_after(&inst.move_list, late.ply as usize).ok().as_ref() == Some(late);
        if !replays {
            bad.push(format!("seed {s}: prefix replay mismatch"));
        }
    }
    let share = alice_earlier as f64 / N as f64;
    Verdict::new(
        bad.is_empty() && (share - 0.5).abs() <= 0.03,
        format!(
            "{} of {N} valid, Alice earlier {:.1}%{}",
            N as usize - bad.len(),
            100.0 * share,
            bad.first()
                .map(|b| format!("; first failure {b}"))
                .unwrap_or_default()
        ),
    )
}

// ---- 3 ----

/// Scripted play interleaved with over-long babble, chosen per turn from the context seed.
pub struct MixedAgent;

impl Agent for MixedAgent {
    fn id(&self) -> String {
        "mixed".into()
    }

    fn next_utterance(&self, ctx: &AgentContext<'_>) -> Result<String, AgentError> {
        let roll = seed::derive(ctx.seed, ctx.turn_index as u64) % 3;
        let policy = if roll == 0 {
            ScriptedPolicy::Babble { words: 400 }
        } else {
            ScriptedPolicy::Auto
        };
        ScriptedAgent::new(policy).next_utterance(ctx)
    }
}

pub fn c3_budget_protocol() -> Verdict {
    let mut turns = 0usize;
    let mut dialogues = 0usize;
    let mut violations = Vec::new();
    let mut truncated = 0usize;
    for (k, task) in TaskId::ALL.into_iter().enumerate() {
        let cfg = sweep(task, &[2, 4, 8, 16], 40, 300 + k as u64, 0);
        let pairs: [(Arc<dyn Agent>, Arc<dyn Agent>); 3] = [
            (Arc::new(MixedAgent), scripted()),
            (scripted(), Arc::new(MixedAgent)),
            (Arc::new(MixedAgent), Arc::new(MixedAgent)),
        ];
        for (a, b) in pairs {
            let out = run_sweep_with(&cfg, a, b).expect("sweep runs");
            for tr in &out.transcripts {
                dialogues += 1;
                let allowance =
                    per_turn_allowance(tr.budget.tokens_per_player, tr.budget.turn_budget).unwrap();
                if tr.outcome.turns_used > tr.budget.turn_budget
                    || tr.turns.len() as u32 > tr.budget.turn_budget
                {
                    violations.push(format!("{} used {} turns", tr.instance_id, tr.outcome.turns_used));
                }
                for t in &tr.turns {
                    turns += 1;
                    truncated += t.truncated as usize;
                    if token_count(&t.text) as u32 > allowance || t.token_count > allowance {
                        violations.push(format!(
                            "{} turn {} has {} tokens",
                            tr.instance_id, t.index, t.token_count
                        ));
                    }
                }
            }
        }
    }
    Verdict::new(
        violations.is_empty() && truncated > 0,
        format!(
            "{dialogues} dialogues, {turns} turns ({truncated} truncated), {} violations",
            violations.len()
        ),
    )
}

// ---- 4 ----

pub fn c4_prompt_fidelity() -> Verdict {
    let prompts = PromptSet::default();
    let limits: Vec<u32> = [4, 8, 16]
        .iter()
        .map(|&t| BudgetConfig::new(256, t).unwrap().stated_word_limit)
        .collect();
    let mut failures = Vec::new();
    if limits != [44, 22, 11] {
        failures.push(format!("word limits {limits:?}"));
    }
    let history = |texts: &[&str]| -> Vec<Turn> {
        texts
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let sp = if i % 2 == 0 { Speaker::Alice } else { Speaker::Bob };
                Turn::new(i as u32 + 1, sp, *s, false)
            })
            .collect()
    };

    let chess = TaskId::Chess.generate(1).unwrap();
    let opener = "Hello Bob. On my board, all black pieces are on their starting squares. White has moved the d-pawn to d4. No other white pieces";
    let p = build_prompt(
        &prompts,
        Speaker::Bob,
        &chess.view(Speaker::Bob),
        &history(&[opener]),
        2,
        &BudgetConfig::new(256, 8).unwrap(),
    );
    if !p.contains("You can use only 22 words per turn, so you cannot fully specify the locations of all pieces.")
        || !p.ends_with(&format!(
            "# CONVERSATION\n\nHere is our conversation history.\n\n1. ME: {opener}\n\nYou have 7 turns left.\n\n2. YOU: "
        ))
    {
        failures.push("chess turn 2 of 8".into());
    }

    let names = TaskId::NameGame9.generate(1).unwrap();
    let p = build_prompt(
        &prompts,
        Speaker::Bob,
        &names.view(Speaker::Bob),
        &history(&[
            "I know Chloe from Microsoft who loves crimson and Charles Mingus, based in Paris. Do you know her? Or someone else with matching details?",
            "I don't know Chloe. No one in my database matches Microsoft, crimson, Charles Mingus, and Paris. Do you know anyone else with those traits?",
            "I know David from Sony, mustard yellow, Art Blakey, Berlin. Do you know him? Or any other with exact same traits?",
        ]),
        4,
        &BudgetConfig::new(256, 4).unwrap(),
    );
    if !p.contains("You can use only 44 words per turn, so be concise.")
        || !p.ends_with(
            "Or any other with exact same traits?\n\nThis is your final turn, so you must give a final answer. Based on the conversation, make a guess and output `SELECT ROW i'. Don't say anything else: do not explain or ask any questions. Your next words **must** be `SELECT ROW' and your last word must be a number between 1 and 9.",
        )
    {
        failures.push("name-game final turn of 4".into());
    }

    let tangram = TaskId::Tangram.generate(1).unwrap();
    let p = build_prompt(
        &prompts,
        Speaker::Bob,
        &tangram.view(Speaker::Bob),
        &history(&[
            "Black and white abstract pattern with diagonal stripes and geometric shapes.",
            "Is the pattern mostly diagonal or horizontal?",
            "Pattern has both diagonal and horizontal stripes, forming intersecting shapes.",
        ]),
        4,
        &BudgetConfig::new(256, 16).unwrap(),
    );
    if !p.contains("In each turn you can use no more than 11 words, so be concise.")
        || !p.ends_with(
            "3. ME: Pattern has both diagonal and horizontal stripes, forming intersecting shapes.\n\nYou have 13 turns left.\n\n4. YOU:",
        )
    {
        failures.push("tangram turn 4 of 16".into());
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!("word limits {limits:?}; three prompt tails byte-identical")
        } else {
            format!("mismatch: {}", failures.join(", "))
        },
    )
}

// ---- 5 ----

pub fn replay_fixture(f: &DialogueFixture) -> Result<Transcript, String> {
    let tr = replay(&f.instance, f.script, f.turn_budget);
    if tr.outcome.correct != Some(f.successful) || tr.outcome.turns_used != f.ends_at {
        return Err(format!(
            "{}: correct {:?} after {} turns, expected {} after {}",
            f.name, tr.outcome.correct, tr.outcome.turns_used, f.successful, f.ends_at
        ));
    }
    Ok(tr)
}

pub fn c5_replay_fidelity() -> Verdict {
    let results: Vec<Result<Transcript, String>> =
        fixtures::replay_fixtures().iter().map(replay_fixture).collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    Verdict::new(
        errors.is_empty(),
        if errors.is_empty() {
            "covr, md3, tangram, name-game and chess outcomes match their captions".to_string()
        } else {
            errors.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")
        },
    )
}

// ---- 6 ----

pub const NAME_GAME_SIZES: [TaskId; 3] = [TaskId::NameGame9, TaskId::NameGame16, TaskId::NameGame25];

pub fn c6_name_game_uniqueness() -> Verdict {
    const N: u64 = 10_000;
    let bad: Vec<u64> = (0..N)
        .into_par_iter()
        .filter(|&i| {
            let task = NAME_GAME_SIZES[(i % 3) as usize];
            let Ok(GameInstance::NameGame(g)) = task.generate(seed::derive(0x6a6e, i)) else {
                return true;
            };
            let mut hits = Vec::new();
            for (a, ra) in g.db_a.iter().enumerate() {
                for (b, rb) in g.db_b.iter().enumerate() {
                    if ra.fields() == rb.fields() {
                        hits.push((a as u32 + 1, b as u32 + 1));
                    }
                }
            }
            hits != [(g.common_row_a, g.common_row_b)]
        })
        .collect();
    Verdict::new(
        bad.is_empty(),
        format!(
            "{} of {N} instances have exactly one common record",
            N as usize - bad.len()
        ),
    )
}

// ---- 7 ----

/// Closed form for the guess-one protocol on `n` rows: each player walks a uniform
/// permutation of its own rows, Alice on odd turns and Bob on even ones, and the partner
/// selects on the turn after the shared record is named.
pub fn guess_one_analytic(n: u32, t: u32) -> f64 {
    // Alice names the shared record on turn 2i+1 for i uniform in 0..n; Bob on 2j+2.
    let n = n as f64;
    let alice_late = (0..n as u32).filter(|i| 2 * i + 1 >= t).count() as f64 / n;
    let bob_late = (0..n as u32).filter(|j| 2 * j + 2 >= t).count() as f64 / n;
    1.0 - alice_late * bob_late
}

pub fn guess_one_simulated(t: u32, dialogues: u64) -> (f64, f64) {
    let agent = ScriptedAgent::new(ScriptedPolicy::GuessOne);
    let budget = BudgetConfig::new(256, t).unwrap();
    let prompts = PromptSet::default();
    let wins: u64 = (0..dialogues)
        .into_par_iter()
        .map(|i| {
            let task = NAME_GAME_SIZES[(i % 3) as usize];
            let s = seed::derive(0x6e31, i);
            let g = task.generate(s).expect("name-game instance");
            let players = Players {
                alice: &agent,
                bob: &agent,
                seeds: PerSpeaker::new(seed::derive(s, 1), seed::derive(s, 2)),
            };
            let tr = run_dialogue(&g, &players, &budget, &prompts).expect("scripted agents do not fail");
            (tr.outcome.correct == Some(true)) as u64
        })
        .sum();
    let mut expected = 0.0;
    for i in 0..3u64 {
        let share = (dialogues + 2 - i) / 3;
        let size = [9, 16, 25][i as usize];
        expected += guess_one_analytic(size, t) * share as f64;
    }
    (wins as f64 / dialogues as f64, expected / dialogues as f64)
}

pub fn c7_guess_one() -> Verdict {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut last = -1.0;
    for t in [2, 4, 8, 16] {
        let (sim, oracle) = guess_one_simulated(t, 10_000);
        pass &= (sim - oracle).abs() <= 0.02 && sim > last;
        last = sim;
        rows.push(format!("t={t} {sim:.3} vs {oracle:.3}"));
    }
    Verdict::new(pass, rows.join(", "))
}

// ---- 8 ----

/// The target spelled out the way the scripted describer states features.
pub fn spoken_description(space: &FeatureSpace, item: &Item) -> String {
    space
        .features
        .iter()
        .zip(&item.values)
        .map(|(f, v)| format!("{} is {v}.", f.name))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn c8_interactive_scaling() -> Verdict {
    let cfg = sweep(TaskId::Md3, &[2, 16], 400, 88, 0);
    let out = run_sweep_with(&cfg, scripted(), scripted()).expect("sweep runs");
    let two_turn = per_turn_allowance(256, 2).unwrap() as usize;
    let mut acc: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for tr in &out.transcripts {
        let Ok(GameInstance::Selection(g)) = tr.task.generate(tr.seed) else {
            continue;
        };
        if token_count(&spoken_description(&g.space, &g.target)) <= two_turn {
            continue;
        }
        let e = acc.entry(tr.budget.turn_budget).or_default();
        e.0 += (tr.outcome.correct == Some(true)) as usize;
        e.1 += 1;
    }
    let rate = |t: u32| acc.get(&t).map_or(0.0, |(k, n)| *k as f64 / (*n).max(1) as f64);
    let (lo, hi) = (rate(2), rate(16));
    Verdict::new(
        hi - lo >= 0.10,
        format!(
            "accuracy t=2 {lo:.3}, t=16 {hi:.3} on {} long-description instances",
            acc.get(&2).map_or(0, |e| e.1)
        ),
    )
}

// ---- 9 ----

pub fn c9_lexical() -> Verdict {
    let ld = LexicalDensity::default();
    let mut failures = Vec::new();
    if ld.lexical_density(&["The red bowl is on the big table."]) != 0.0 {
        failures.push("single utterance");
    }
    if ld.lexical_density(&["the of and", "is it to the"]) != 0.0 {
        failures.push("all stopwords");
    }
    let f1 = ld.score(&["red bowl bowl", "blue cup"]);
    if (f1.novelty - 1.25 * 2f64.ln()).abs() > 1e-9 || (f1.density - 125.0 * 2f64.ln()).abs() > 1e-9 {
        failures.push("two-utterance fixture");
    }
    let f2 = ["The bowl is yellow.", "Is the bowl big?", "Okay, green plate."];
    let s2 = ld.score(&f2);
    let novelty = (1.5f64.ln() + 2.0 * 3f64.ln()) / 3.0;
    if (s2.content_ratio - 6.0 / 11.0).abs() > 1e-9
        || (s2.novelty - novelty).abs() > 1e-9
        || (s2.density - 100.0 * 6.0 / 11.0 * novelty).abs() > 1e-9
    {
        failures.push("three-utterance fixture");
    }
    let padded = [
        "The bowl is so very yellow, you know.",
        "Is the bowl big at all?",
        "Okay, a green plate then.",
    ];
    if ld.novelty(&padded) != ld.novelty(&f2) {
        failures.push("stopword insertion");
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            "trivial cases 0, fixtures within 1e-9, insertion-invariant".into()
        } else {
            failures.join(", ")
        },
    )
}

// ---- 10 ----

pub fn c10_centering() -> Verdict {
    use Transition::*;
    let c = Centering::default();
    let same = [
        "The lamp is red.",
        "The lamp is tall.",
        "The lamp is old.",
        "The lamp is bright.",
    ];
    let disjoint = [
        "The lamp is red.",
        "A cat sits.",
        "The river is cold.",
        "My uncle knows.",
    ];
    let (hi, lo) = (c.analyze(&same).score, c.analyze(&disjoint).score);
    let cfg = CenteringConfig::default();
    let table = [
        ((Some("x"), Some("x"), Some("x")), Continue),
        ((Some("x"), Some("x"), Some("y")), Retain),
        ((Some("y"), Some("x"), Some("x")), SmoothShift),
        ((Some("y"), Some("x"), Some("z")), RoughShift),
        ((None, Some("x"), Some("x")), Continue),
        ((None, Some("x"), Some("y")), Retain),
    ];
    let table_ok = table
        .iter()
        .all(|&((prev, cb, cp), want)| classify(prev, cb, cp, &cfg) == want);
    let pasta = c.analyze(&fixtures::PASTA);
    let turn7 = pasta.transitions.get(6).copied();
    Verdict::new(
        hi == Some(3.0) && lo == Some(0.0) && table_ok && turn7 == Some(Continue),
        format!(
            "extremes {hi:?}/{lo:?}, table {}, pasta 6->7 {}",
            if table_ok { "ok" } else { "MISMATCH" },
            turn7.map_or("none", |t| t.as_str())
        ),
    )
}

// ---- 11 ----

pub fn sycophancy_transcript() -> Transcript {
    let inst = TaskId::Chess.generate(11).expect("chess instance");
    replay(&inst, fixtures::CHESS_SYCOPHANCY_SCRIPT, 8)
}

pub fn c11_sycophancy() -> Verdict {
    let tr = sycophancy_transcript();
    let events = detect_proposals(&tr, &ProposalRuleSet::default());
    let apologies = count_apologies(&tr);
    let accepted = events.first().and_then(|e| detect_acceptance(&tr, e));
    let shape_ok = events.len() == 1
        && events[0].turn == 6
        && events[0].proposer == Speaker::Bob
        && events[0].direction == chess::ChessAnswer::Yours;
    Verdict::new(
        shape_ok && accepted == Some(true) && apologies == 1,
        format!(
            "{} event(s) {:?}, accepted {:?}, apologies {apologies}",
            events.len(),
            events
                .iter()
                .map(|e| (e.turn, e.proposer, e.direction))
                .collect::<Vec<_>>(),
            accepted
        ),
    )
}

// ---- 12 ----

pub fn c12_interactivity() -> Verdict {
    let start = Instant::now();
    let bits = MessageSpace::new(&["0", "1"], 1);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut monotone = 0;
    let mut oracle_agree = 0;
    for _ in 0..50 {
        let g = AbstractGame::random(&mut rng, 2, 2, 2);
        let vals: Vec<f64> = (0..=3)
            .map(|k| {
                best_value_level_k(&g, &bits, k, DEFAULT_GUARD)
                    .expect("small search")
                    .value
            })
            .collect();
        if vals.windows(2).all(|w| w[1] >= w[0] - 1e-12) {
            monotone += 1;
        }
        if (0..=3).all(|k| (interactivity_oracle::value(&g, 2, k) - vals[k as usize]).abs() < 1e-9) {
            oracle_agree += 1;
        }
    }
    let pointer = AbstractGame::pointer();
    let level = interactivity_level(&pointer, &bits, 0.9, 2, DEFAULT_GUARD).expect("pointer search");
    let oracle_pointer: Vec<f64> = (0..=2)
        .map(|k| interactivity_oracle::value(&pointer, 2, k))
        .collect();
    let pointer_agrees = oracle_pointer.len() == level.values.len()
        && oracle_pointer
            .iter()
            .zip(&level.values)
            .all(|(a, b)| (a - b).abs() < 1e-12);
    let secs = start.elapsed().as_secs_f64();
    let exact_two = level.level == Some(2) && level.values[1] <= 0.9 && level.values[2] > 0.9;
    Verdict::new(
        monotone == 50 && oracle_agree == 50 && exact_two && pointer_agrees && secs < 60.0,
        format!(
            "monotone {monotone}/50, oracle agrees {oracle_agree}/50, pointer values {:?} level {:?}; {secs:.2}s",
            level.values, level.level
        ),
    )
}

// ---- 13 ----

pub const DETERMINISM_TASKS: [TaskId; 4] = [TaskId::Chess, TaskId::Covr, TaskId::Md3, TaskId::NameGame9];

/// Transcripts and every report format for the full scripted sweep, as bytes.
pub fn full_sweep_bytes(parallelism: usize) -> (Vec<u8>, Vec<u8>) {
    let mut transcripts = Vec::new();
    let mut all = Vec::new();
    for (k, task) in DETERMINISM_TASKS.into_iter().enumerate() {
        let cfg = sweep(task, &[2, 4, 8, 16], 100, 1300 + k as u64, parallelism);
        let out = run_sweep_with(&cfg, scripted(), scripted()).expect("sweep runs");
        write_jsonl(&mut transcripts, &out.transcripts).expect("serialize");
        all.extend(out.transcripts);
    }
    let mut reports = Vec::new();
    let rows = report::aggregate(&all, Interval::Wilson).expect("aggregate");
    for format in [
        ReportFormat::Csv,
        ReportFormat::Markdown,
        ReportFormat::PlotSeries,
    ] {
        reports.extend(report::emit_report(&rows, format).expect("report").into_bytes());
    }
    let boot = report::aggregate(
        &all,
        Interval::Bootstrap {
            resamples: 500,
            seed: 3,
        },
    )
    .expect("aggregate");
    reports.extend(
        report::emit_report(&boot, ReportFormat::Csv)
            .expect("report")
            .into_bytes(),
    );
    reports.extend(
        report::to_csv(&report::analyze(&all))
            .expect("metrics")
            .into_bytes(),
    );
    (transcripts, reports)
}

pub fn c13_determinism() -> Verdict {
    let start = Instant::now();
    let (t1, r1) = full_sweep_bytes(0);
    let (t2, r2) = full_sweep_bytes(2);
    let secs = start.elapsed().as_secs_f64();
    let lines = t1.iter().filter(|&&b| b == b'\n').count();
    Verdict::new(
        t1 == t2 && r1 == r2 && lines == 1600 && secs < 300.0,
        format!(
            "{lines} transcripts, transcripts {}, reports {}; {secs:.1}s for both runs",
            if t1 == t2 { "identical" } else { "DIFFER" },
            if r1 == r2 { "identical" } else { "DIFFER" }
        ),
    )
}

pub type Check = (u32, &'static str, fn() -> Verdict);

pub const ALL: [Check; 13] = [
    (
        1,
        "chess move generation matches brute-force oracle",
        c1_chess_perft,
    ),
    (2, "chess instances replay and balance", c2_chess_instances),
    (
        3,
        "per-turn allowance and turn budget are never exceeded",
        c3_budget_protocol,
    ),
    (4, "prompt word limits and turn counters", c4_prompt_fidelity),
    (
        5,
        "example dialogues replay to their captioned outcomes",
        c5_replay_fidelity,
    ),
    (
        6,
        "name-game instances share exactly one record",
        c6_name_game_uniqueness,
    ),
    (7, "guess-one baseline matches its closed form", c7_guess_one),
    (
        8,
        "scripted selection pair gains from more turns",
        c8_interactive_scaling,
    ),
    (9, "lexical density fixtures", c9_lexical),
    (10, "centering extremes, table and figure fixture", c10_centering),
    (
        11,
        "sycophancy fixture proposal, acceptance and apology",
        c11_sycophancy,
    ),
    (
        12,
        "interactivity monotonicity and pointer level",
        c12_interactivity,
    ),
    (
        13,
        "scripted sweeps are byte-identical across runs",
        c13_determinism,
    ),
];
