use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{run_dialogue, Players, PromptSet};
use crate::agents::{
    Agent, AgentError, RemoteAgent, RemoteAgentConfig, RemoteClient, ReplayAgent, ScriptedAgent,
    ScriptedPolicy,
};
use crate::budget::BudgetConfig;
use crate::games::{GameInstance, TaskId};
use crate::transcript::{self, Transcript, TranscriptError, WallClock};
use crate::{seed, PerSpeaker, Speaker};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error("sweep stopped: {0}")]
    Fatal(AgentError),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AgentSpec {
    Scripted {
        #[serde(default)]
        policy: ScriptedPolicy,
    },
    Remote(RemoteAgentConfig),
    /// Recorded transcripts, matched by instance id and turn budget.
    Replay {
        path: PathBuf,
    },
}

fn default_turns() -> Vec<u32> {
    vec![2, 4, 8, 16]
}

fn default_tokens() -> u32 {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub task: TaskId,
    #[serde(default = "default_turns")]
    pub turns: Vec<u32>,
    /// Per-player token budget.
    #[serde(default = "default_tokens")]
    pub tokens: u32,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub agents: PerSpeaker<AgentSpec>,
    /// Stamp transcripts with wall-clock timing. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_wall_clock: bool,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| SweepError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.n == 0 {
            return Err(SweepError::Config("n must be at least 1".into()));
        }
        if self.turns.is_empty() {
            return Err(SweepError::Config("turns must not be empty".into()));
        }
        for &t in &self.turns {
            BudgetConfig::new(self.tokens, t).map_err(|e| SweepError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Seed of the `i`-th instance, shared by every turn budget.
    pub fn instance_seed(&self, i: usize) -> u64 {
        seed::derive(self.seed, i as u64)
    }
}

#[derive(Debug, Default)]
pub struct SweepOutput {
    /// Ordered by turn budget, then instance.
    pub transcripts: Vec<Transcript>,
    pub aborted: usize,
    /// Instance seeds the generator could not satisfy.
    pub skipped: Vec<(u64, String)>,
}

enum Factory {
    Fixed(Arc<dyn Agent>),
    Replay(Arc<BTreeMap<(String, u32), Transcript>>),
}

impl Factory {
    fn build(spec: &AgentSpec) -> Result<Factory, SweepError> {
        Ok(match spec {
            AgentSpec::Scripted { policy } => Factory::Fixed(Arc::new(ScriptedAgent::new(*policy))),
            AgentSpec::Remote(cfg) => {
                let client = RemoteClient::new(cfg.clone()).map_err(|e| SweepError::Config(e.to_string()))?;
                Factory::Fixed(Arc::new(RemoteAgent::new(Arc::new(client))))
            }
            AgentSpec::Replay { path } => {
                let map = transcript::read_jsonl_file(path)?
                    .into_iter()
                    .map(|t| ((t.instance_id.clone(), t.budget.turn_budget), t))
                    .collect();
                Factory::Replay(Arc::new(map))
            }
        })
    }

    fn agent(&self, speaker: Speaker, instance_id: &str, t: u32) -> Arc<dyn Agent> {
        match self {
            Factory::Fixed(a) => a.clone(),
            Factory::Replay(map) => match map.get(&(instance_id.to_string(), t)) {
                Some(tr) => Arc::new(ReplayAgent::from_transcript(tr, speaker)),
                None => Arc::new(ReplayAgent::new(
                    speaker,
                    Vec::new(),
                    format!("missing:{instance_id}"),
                )),
            },
        }
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput, SweepError> {
    cfg.validate()?;
    let alice = Factory::build(&cfg.agents.alice)?;
    let bob = Factory::build(&cfg.agents.bob)?;
    let out = run(cfg, &alice, &bob)?;
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        transcript::write_jsonl_file(&dir.join("transcripts.jsonl"), &out.transcripts)?;
    }
    Ok(out)
}

/// Sweep with caller-supplied agents; `cfg.agents` and `cfg.out` are ignored.
pub fn run_sweep_with(
    cfg: &SweepConfig,
    alice: Arc<dyn Agent>,
    bob: Arc<dyn Agent>,
) -> Result<SweepOutput, SweepError> {
    cfg.validate()?;
    run(cfg, &Factory::Fixed(alice), &Factory::Fixed(bob))
}

fn run(cfg: &SweepConfig, alice: &Factory, bob: &Factory) -> Result<SweepOutput, SweepError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| SweepError::Config(e.to_string()))?;
    let prompts = PromptSet::default();

    let instances: Vec<Result<GameInstance, String>> = pool.install(|| {
        (0..cfg.n)
            .into_par_iter()
            .map(|i| cfg.task.generate(cfg.instance_seed(i)).map_err(|e| e.to_string()))
            .collect()
    });
    let mut out = SweepOutput::default();
    for (i, inst) in instances.iter().enumerate() {
        if let Err(e) = inst {
            log::warn!("skipping instance {i}: {e}");
            out.skipped.push((cfg.instance_seed(i), e.clone()));
        }
    }

    let jobs: Vec<(u32, usize)> = cfg
        .turns
        .iter()
        .flat_map(|&t| (0..cfg.n).map(move |i| (t, i)))
        .filter(|&(_, i)| instances[i].is_ok())
        .collect();
    let stop = AtomicBool::new(false);
    let fatal: Mutex<Option<AgentError>> = Mutex::new(None);

    let results: Vec<Option<(Transcript, bool)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(t, i)| {
                if stop.load(Ordering::Relaxed) {
                    return None;
                }
                let instance = instances[i].as_ref().expect("filtered");
                let budget = BudgetConfig::new(cfg.tokens, t).expect("validated");
                let id = instance.instance_id();
                let a = alice.agent(Speaker::Alice, &id, t);
                let b = bob.agent(Speaker::Bob, &id, t);
                let s = cfg.instance_seed(i);
                let players = Players {
                    alice: a.as_ref(),
                    bob: b.as_ref(),
                    seeds: PerSpeaker::new(
                        seed::derive_path(s, &[t as u64, 0]),
                        seed::derive_path(s, &[t as u64, 1]),
                    ),
                };
                let started = cfg.record_wall_clock.then(std::time::SystemTime::now);
                let (mut tr, aborted) = match run_dialogue(instance, &players, &budget, &prompts) {
                    Ok(tr) => (tr, false),
                    Err(e) => {
                        if e.source.is_fatal() {
                            stop.store(true, Ordering::Relaxed);
                            fatal
                                .lock()
                                .unwrap_or_else(|p| p.into_inner())
                                .get_or_insert(e.source.clone());
                        }
                        log::warn!("{e}");
                        (e.transcript, true)
                    }
                };
                if let Some(start) = started {
                    tr.wall_clock = Some(WallClock {
                        started_unix_ms: start
                            .duration_since(std::time::UNIX_EPOCH)
                            .map_or(0, |d| d.as_millis() as u64),
                        elapsed_ms: start.elapsed().map_or(0, |d| d.as_millis() as u64),
                    });
                }
                Some((tr, aborted))
            })
            .collect()
    });

    if let Some(e) = fatal.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(SweepError::Fatal(e));
    }
    for (tr, aborted) in results.into_iter().flatten() {
        out.aborted += usize::from(aborted);
        out.transcripts.push(tr);
    }
    log::info!(
        "{}: {} dialogues, {} aborted, {} instances skipped",
        cfg.task,
        out.transcripts.len(),
        out.aborted,
        out.skipped.len()
    );
    Ok(out)
}
