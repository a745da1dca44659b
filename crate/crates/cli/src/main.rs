use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pings_core::games::TaskId;
use pings_core::interactivity::{interactivity_level, GameFile, DEFAULT_GUARD};
use pings_core::orchestrator::{run_dialogue, run_sweep, Players, PromptSet, SweepConfig};
use pings_core::report::{self, Interval, ReportFormat};
use pings_core::transcript::{read_jsonl_file, write_jsonl_file};
use pings_core::{seed, PerSpeaker, Speaker, Transcript};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "pings", version, about = "Isotoken self-play dialogue games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated game instances as JSON files.
    Gen(GenArgs),
    /// Run a sweep described by a TOML config.
    Run(RunArgs),
    /// Compute lexical, centering and sycophancy metrics per transcript.
    Analyze(InOut),
    /// Aggregate transcripts into accuracy and usage tables.
    Report(ReportArgs),
    /// Re-run stored transcripts through the orchestrator and re-score them.
    Replay(InOut),
    /// Find the interactivity level of a small game.
    Level(LevelArgs),
}

#[derive(Args)]
struct GenArgs {
    /// chess, covr, md3, tangram, name-game, or name-game-{9,16,25}.
    #[arg(long)]
    task: String,
    /// Name-game population size.
    #[arg(long)]
    size: Option<u32>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InOut {
    /// A transcripts file, or a directory of `.jsonl` files.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    io: InOut,
    /// csv, markdown or plot-series.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Use percentile bootstrap intervals with this many resamples instead of Wilson.
    #[arg(long)]
    bootstrap: Option<u32>,
    #[arg(long, default_value_t = 0)]
    bootstrap_seed: u64,
}

#[derive(Args)]
struct LevelArgs {
    /// TOML game file.
    #[arg(long)]
    game: PathBuf,
    /// Expected-score threshold.
    #[arg(long, default_value_t = 0.9)]
    c: f64,
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Analyze(a) => analyze(a),
        Command::Report(a) => report_cmd(a),
        Command::Replay(a) => replay(a),
        Command::Level(a) => level(a),
    }
}

fn parse_task(name: &str, size: Option<u32>) -> Result<TaskId> {
    match (name, size) {
        ("name-game", Some(s)) => Ok(TaskId::name_game(s)?),
        ("name-game", None) => Err("name-game needs --size".into()),
        (other, _) => Ok(other.parse::<TaskId>()?),
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let task = parse_task(&a.task, a.size)?;
    fs::create_dir_all(&a.out)?;
    for i in 0..a.n {
        let inst = task.generate(seed::derive(a.seed, i as u64))?;
        let path = a.out.join(format!("{}.json", inst.instance_id()));
        fs::write(path, serde_json::to_string_pretty(&inst)? + "\n")?;
    }
    println!("wrote {} {} instances to {}", a.n, task, a.out.display());
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let mut cfg = SweepConfig::from_toml(&fs::read_to_string(&a.config)?)?;
    if a.out.is_some() {
        cfg.out = a.out;
    }
    let out = run_sweep(&cfg)?;
    let correct = out
        .transcripts
        .iter()
        .filter(|t| t.outcome.correct == Some(true))
        .count();
    let n = out.transcripts.len();
    println!(
        "{} dialogues, {} correct ({:.3}), {} aborted, {} instances skipped",
        n,
        correct,
        if n == 0 { 0.0 } else { correct as f64 / n as f64 },
        out.aborted,
        out.skipped.len()
    );
    Ok(())
}

/// All transcripts under `path`, files in name order.
fn load(path: &Path) -> Result<Vec<Transcript>> {
    if path.is_file() {
        return Ok(read_jsonl_file(path)?);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "jsonl"));
    files.sort();
    if files.is_empty() {
        return Err(format!("no .jsonl files in {}", path.display()).into());
    }
    let mut all = Vec::new();
    for f in files {
        all.extend(read_jsonl_file(&f)?);
    }
    Ok(all)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn analyze(a: InOut) -> Result<()> {
    let rows = report::analyze(&load(&a.input)?);
    emit(a.out.as_deref(), &report::to_csv(&rows)?)
}

fn report_cmd(a: ReportArgs) -> Result<()> {
    let format: ReportFormat = a.format.parse()?;
    let interval = match a.bootstrap {
        Some(resamples) => Interval::Bootstrap {
            resamples,
            seed: a.bootstrap_seed,
        },
        None => Interval::Wilson,
    };
    let rows = report::aggregate(&load(&a.io.input)?, interval)?;
    emit(a.io.out.as_deref(), &report::emit_report(&rows, format)?)
}

fn replay(a: InOut) -> Result<()> {
    let stored = load(&a.input)?;
    let prompts = PromptSet::default();
    let mut rescored = Vec::with_capacity(stored.len());
    let mut changed = 0;
    for tr in &stored {
        let inst = tr.task.generate(tr.seed)?;
        if inst.instance_id() != tr.instance_id {
            return Err(format!("{} does not regenerate from seed {}", tr.instance_id, tr.seed).into());
        }
        let alice = pings_core::agents::ReplayAgent::from_transcript(tr, Speaker::Alice);
        let bob = pings_core::agents::ReplayAgent::from_transcript(tr, Speaker::Bob);
        let players = Players {
            alice: &alice,
            bob: &bob,
            seeds: PerSpeaker::new(0, 0),
        };
        let mut fresh = match run_dialogue(&inst, &players, &tr.budget, &prompts) {
            Ok(t) => t,
            Err(aborted) => aborted.transcript,
        };
        fresh.agents = tr.agents.clone();
        if fresh.outcome.correct != tr.outcome.correct {
            changed += 1;
        }
        rescored.push(fresh);
    }
    if let Some(out) = &a.out {
        write_jsonl_file(out, &rescored)?;
    }
    eprintln!(
        "replayed {} transcripts, {} outcomes changed",
        rescored.len(),
        changed
    );
    Ok(())
}

fn level(a: LevelArgs) -> Result<()> {
    let file = GameFile::load(&a.game)?;
    let r = interactivity_level(&file.game, &file.message_space, a.c, a.k_max, a.guard)?;
    match r.level {
        Some(k) => println!("level {k} (value {:.6} > c = {})", r.achieved_value, a.c),
        None => println!(
            "no level <= {} exceeds c = {} (best {:.6})",
            a.k_max, a.c, r.achieved_value
        ),
    }
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
