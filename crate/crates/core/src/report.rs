//! Aggregation of transcripts into accuracy and usage rows, and report emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::games::TaskId;
use crate::metrics::centering::{Centering, Transition};
use crate::metrics::lexical::LexicalDensity;
use crate::metrics::sycophancy::{count_apologies, detect_proposals, ProposalRuleSet};
use crate::{Speaker, Transcript};

pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("transcripts mix schema versions {0} and {1}")]
    MixedSchema(u32, u32),
    #[error("unknown report format {0:?} (expected csv, markdown or plot-series)")]
    UnknownFormat(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Percentile bootstrap interval of the mean of 0/1 outcomes.
pub fn bootstrap(outcomes: &[bool], resamples: u32, seed: u64) -> (f64, f64) {
    if outcomes.is_empty() {
        return (0.0, 1.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = outcomes.len();
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..n).filter(|_| outcomes[rng.random_range(0..n)]).count() as f64 / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let q = |f: f64| means[((means.len() - 1) as f64 * f).round() as usize];
    (q(0.025), q(0.975))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Interval {
    #[default]
    Wilson,
    Bootstrap {
        resamples: u32,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub task: TaskId,
    /// `alice-id/bob-id`.
    pub agents: String,
    pub t: u32,
    #[serde(rename = "T")]
    pub tokens: u32,
    pub n: usize,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_turns_used: f64,
    pub mean_tokens_alice: f64,
    pub mean_tokens_bob: f64,
    pub unparseable_rate: f64,
}

/// One row per (task, agents, t, T), sorted by that key. Unparseable dialogues count as failures.
pub fn aggregate(transcripts: &[Transcript], interval: Interval) -> Result<Vec<AggregateRow>, ReportError> {
    if let Some(first) = transcripts.first() {
        if let Some(other) = transcripts
            .iter()
            .find(|t| t.schema_version != first.schema_version)
        {
            return Err(ReportError::MixedSchema(
                first.schema_version,
                other.schema_version,
            ));
        }
    }
    let mut groups: BTreeMap<(TaskId, String, u32, u32), Vec<&Transcript>> = BTreeMap::new();
    for tr in transcripts {
        let agents = format!("{}/{}", tr.agents.alice, tr.agents.bob);
        groups
            .entry((
                tr.task,
                agents,
                tr.budget.turn_budget,
                tr.budget.tokens_per_player,
            ))
            .or_default()
            .push(tr);
    }
    Ok(groups
        .into_iter()
        .map(|((task, agents, t, tokens), trs)| {
            let n = trs.len();
            let outcomes: Vec<bool> = trs.iter().map(|t| t.outcome.correct == Some(true)).collect();
            let k = outcomes.iter().filter(|c| **c).count();
            let (ci_low, ci_high) = match interval {
                Interval::Wilson => wilson(k, n, Z95),
                Interval::Bootstrap { resamples, seed } => bootstrap(&outcomes, resamples, seed),
            };
            let mean = |f: &dyn Fn(&Transcript) -> f64| trs.iter().map(|t| f(t)).sum::<f64>() / n as f64;
            let tokens_of =
                |tr: &Transcript, s: Speaker| tr.turns_of(s).map(|x| f64::from(x.token_count)).sum::<f64>();
            AggregateRow {
                task,
                agents,
                t,
                tokens,
                n,
                accuracy: k as f64 / n as f64,
                ci_low,
                ci_high,
                mean_turns_used: mean(&|tr| tr.turns.len() as f64),
                mean_tokens_alice: mean(&|tr| tokens_of(tr, Speaker::Alice)),
                mean_tokens_bob: mean(&|tr| tokens_of(tr, Speaker::Bob)),
                unparseable_rate: mean(&|tr| f64::from(u8::from(tr.outcome.unparseable))),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Markdown,
    PlotSeries,
}

impl ReportFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Csv => "report.csv",
            ReportFormat::Markdown => "report.md",
            ReportFormat::PlotSeries => "series.json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "plot-series" => Ok(ReportFormat::PlotSeries),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: u32,
    pub y: f64,
    pub ylo: f64,
    pub yhi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub task: TaskId,
    pub agents: String,
    #[serde(rename = "T")]
    pub tokens: u32,
    pub points: Vec<SeriesPoint>,
}

/// Accuracy against turn budget, one series per (task, agents, T).
pub fn plot_series(rows: &[AggregateRow]) -> Vec<Series> {
    let mut out: BTreeMap<(TaskId, String, u32), Vec<SeriesPoint>> = BTreeMap::new();
    for r in rows {
        out.entry((r.task, r.agents.clone(), r.tokens))
            .or_default()
            .push(SeriesPoint {
                x: r.t,
                y: r.accuracy,
                ylo: r.ci_low,
                yhi: r.ci_high,
            });
    }
    out.into_iter()
        .map(|((task, agents, tokens), mut points)| {
            points.sort_by_key(|p| p.x);
            Series {
                task,
                agents,
                tokens,
                points,
            }
        })
        .collect()
}

pub fn emit_report(rows: &[AggregateRow], format: ReportFormat) -> Result<String, ReportError> {
    match format {
        ReportFormat::Csv => to_csv(rows),
        ReportFormat::Markdown => Ok(to_markdown(rows)),
        ReportFormat::PlotSeries => Ok(serde_json::to_string_pretty(&plot_series(rows))? + "\n"),
    }
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn to_markdown(rows: &[AggregateRow]) -> String {
    let mut s = String::from(
        "| task | agents | t | T | n | accuracy | ci_low | ci_high | turns | tokens_alice | tokens_bob | unparseable |\n\
         |---|---|---|---|---|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} | {:.3} |",
            r.task,
            r.agents,
            r.t,
            r.tokens,
            r.n,
            r.accuracy,
            r.ci_low,
            r.ci_high,
            r.mean_turns_used,
            r.mean_tokens_alice,
            r.mean_tokens_bob,
            r.unparseable_rate
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub instance_id: String,
    pub task: TaskId,
    pub t: u32,
    pub content_ratio: f64,
    pub novelty: f64,
    pub density: f64,
    /// Empty for dialogues shorter than two turns.
    pub cs: Option<f64>,
    pub continues: usize,
    pub retains: usize,
    pub smooth_shifts: usize,
    pub rough_shifts: usize,
    pub apologies: usize,
    /// Chess only.
    pub proposals: Option<usize>,
}

pub fn analyze(transcripts: &[Transcript]) -> Vec<MetricRow> {
    let lexical = LexicalDensity::default();
    let centering = Centering::default();
    let rules = ProposalRuleSet::default();
    transcripts
        .par_iter()
        .map(|tr| {
            let texts: Vec<&str> = tr.turns.iter().map(|t| t.text.as_str()).collect();
            let lex = lexical.score(&texts);
            let c = centering.analyze(&texts);
            MetricRow {
                instance_id: tr.instance_id.clone(),
                task: tr.task,
                t: tr.budget.turn_budget,
                content_ratio: lex.content_ratio,
                novelty: lex.novelty,
                density: lex.density,
                cs: if texts.len() >= 2 { c.score } else { None },
                continues: c.count(Transition::Continue),
                retains: c.count(Transition::Retain),
                smooth_shifts: c.count(Transition::SmoothShift),
                rough_shifts: c.count(Transition::RoughShift),
                apologies: count_apologies(tr),
                proposals: (tr.task == TaskId::Chess).then(|| detect_proposals(tr, &rules).len()),
            }
        })
        .collect()
}
