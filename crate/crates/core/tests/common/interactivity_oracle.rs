//! Brute force over every deterministic message policy, written without reference to the
//! library's search. Each (speaker, private value, history) slot gets its own message, the
//! answer is chosen per (x1, history) by maximizing expected payoff.

use std::collections::HashMap;

use pings_core::interactivity::AbstractGame;

/// Who speaks at step `s` of a `k`-message dialogue; player two always speaks last.
fn player_two_speaks(k: u32, s: u32) -> bool {
    (k - 1 - s).is_multiple_of(2)
}

fn slots(game: &AbstractGame, m: usize, k: u32) -> Vec<(u32, usize, Vec<usize>)> {
    let mut out = Vec::new();
    for s in 0..k {
        let privates = if player_two_speaks(k, s) {
            game.x2.len()
        } else {
            game.x1.len()
        };
        let mut histories: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..s {
            histories = histories
                .into_iter()
                .flat_map(|h| {
                    (0..m).map(move |msg| {
                        let mut h = h.clone();
                        h.push(msg);
                        h
                    })
                })
                .collect();
        }
        for x in 0..privates {
            for h in &histories {
                out.push((s, x, h.clone()));
            }
        }
    }
    out
}

/// Best expected payoff over all `k`-message policies with `m` symbols per message.
pub fn value(game: &AbstractGame, m: usize, k: u32) -> f64 {
    let slots = slots(game, m, k);
    let index: HashMap<(u32, usize, Vec<usize>), usize> =
        slots.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut policy = vec![0usize; slots.len()];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut table: HashMap<(usize, Vec<usize>), Vec<f64>> = HashMap::new();
        for (i, row) in game.p.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                let mut h = Vec::new();
                for s in 0..k {
                    let x = if player_two_speaks(k, s) { j } else { i };
                    h.push(policy[index[&(s, x, h.clone())]]);
                }
                let cell = table
                    .entry((i, h))
                    .or_insert_with(|| vec![0.0; game.answers.len()]);
                for (a, v) in cell.iter_mut().enumerate() {
                    *v += p * game.payoff[i][j][a];
                }
            }
        }
        let total: f64 = table
            .values()
            .map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .sum();
        best = best.max(total);
        // Next policy in lexicographic order.
        let mut pos = 0;
        loop {
            if pos == policy.len() {
                return best;
            }
            policy[pos] += 1;
            if policy[pos] < m {
                break;
            }
            policy[pos] = 0;
            pos += 1;
        }
    }
}
