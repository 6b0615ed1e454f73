use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use egt_core::checker::BestStrategyCriterion;
use egt_core::simulator::{batch_absorption, simulate};

use egt::config::{parse_player_list, GamePreset, OUT_DIR_ENV};
use egt::export::{self, ArtifactWriter, RunMetadata};
use egt::report::PropositionRun;
use egt::{Experiment, RunConfig};

/// Finite-population evolutionary game chains: build, analyze, simulate and
/// draw them.
#[derive(Debug, Parser)]
#[command(name = "egt", version)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the meta-game payoff matrix.
    BuildB(RunArgs),
    /// Build and classify the transition matrix.
    Chain(RunArgs),
    /// Solve for absorption probabilities and write the full artifact set.
    Absorb(RunArgs),
    /// Sample a trajectory, or estimate absorption frequencies with --runs.
    Simulate(SimulateArgs),
    /// Write the state transition graph (with the full artifact set).
    Stg(RunArgs),
    /// Check the best-strategy and absorption conjectures over a range of N.
    CheckProps(CheckArgs),
    /// Run the full pipeline for every combination of parameter bindings.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Default)]
struct RunArgs {
    /// ipd, stag_hunt, rps or custom.
    #[arg(long)]
    game: Option<String>,
    /// Upper-left payoff of the base game.
    #[arg(long)]
    a: Option<f64>,
    /// Comma-separated strategy names (allc, alld, tft).
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Rounds per match.
    #[arg(long)]
    rounds: Option<u64>,
    /// Number of players N.
    #[arg(long, short = 'n')]
    players: Option<String>,
    /// br, ppc, pc, cap or logit.
    #[arg(long)]
    protocol: Option<String>,
    /// Logit noise parameter.
    #[arg(long)]
    eta: Option<f64>,
    /// Output directory (default: $EGT_OUT_DIR/<label>, root `out`).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Draw self-loops in the DOT graph.
    #[arg(long)]
    self_loops: bool,
    /// DOT layout units per player.
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Generations J (also the horizon of each batch run).
    #[arg(long, short = 'j')]
    generations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Initial state as s1,s2,s3.
    #[arg(long, value_delimiter = ',')]
    init: Option<Vec<usize>>,
    /// Independent runs for a batch absorption estimate.
    #[arg(long)]
    runs: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Criterion {
    /// Per-player payoff q.
    Q,
    /// Strategy total Q = s q.
    Total,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Best-strategy notion.
    #[arg(long, value_enum, default_value = "q")]
    criterion: Criterion,
    /// Exit nonzero when any check fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Binding `key=v1,v2,...` for key a, players, protocol, eta or rounds.
    #[arg(long = "param", short = 'p')]
    params: Vec<String>,
    /// Bindings run in parallel.
    #[arg(long)]
    jobs: Option<usize>,
}

const EXIT_VIOLATIONS: u8 = 2;

fn parse_list<T: std::str::FromStr>(key: &str, values: &str) -> anyhow::Result<Vec<T>> {
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("bad value `{v}` for sweep parameter `{key}`"))
        })
        .collect()
}

impl RunArgs {
    /// Merges flags over the config file. Returns the config and the player
    /// list when `--players` names several values.
    fn resolve(&self, file: Option<&PathBuf>) -> anyhow::Result<(RunConfig, Option<Vec<usize>>)> {
        let mut cfg = match file {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(game) = &self.game {
            cfg.game = GamePreset::parse(game)?;
        }
        if self.a.is_some() {
            cfg.a = self.a;
        }
        if let Some(s) = &self.strategies {
            cfg.strategies = s.clone();
        }
        if let Some(t) = self.rounds {
            cfg.rounds = t;
        }
        let mut players = None;
        if let Some(text) = &self.players {
            let list = parse_player_list(text)?;
            cfg.players = list[0];
            if list.len() > 1 {
                players = Some(list);
            }
        }
        if let Some(p) = &self.protocol {
            cfg.protocol = p.clone();
        }
        if self.eta.is_some() {
            cfg.eta = self.eta;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.self_loops {
            cfg.self_loops = true;
        }
        if let Some(scale) = self.scale {
            cfg.scale = scale;
        }
        cfg.validate()?;
        Ok((cfg, players))
    }

    fn single(&self, file: Option<&PathBuf>) -> anyhow::Result<RunConfig> {
        let (cfg, players) = self.resolve(file)?;
        if players.is_some() {
            bail!("this command takes a single --players value; use `sweep` for several");
        }
        Ok(cfg)
    }
}

fn build_b(cfg: &RunConfig) -> anyhow::Result<()> {
    let exp = Experiment::new(cfg)?;
    let dir = cfg.output_dir();
    let mut w = ArtifactWriter::create(&dir)?;
    let csv = export::b_matrix_csv(&exp.meta);
    print!("{csv}");
    w.write(export::B_MATRIX_CSV, &csv)?;
    w.finish(RunMetadata::new("build-b", &exp))?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn chain(cfg: &RunConfig) -> anyhow::Result<()> {
    let exp = Experiment::new(cfg)?;
    let dir = cfg.output_dir();
    let p = exp.transitions()?;
    let cls = egt_core::chain::classify_states(&p);
    let mut w = ArtifactWriter::create(&dir)?;
    w.write(export::STATES_CSV, &export::states_csv(&exp.space))?;
    w.write(export::B_MATRIX_CSV, &export::b_matrix_csv(&exp.meta))?;
    w.write(export::TRANSITIONS_CSV, &export::transitions_csv(&p))?;
    let mut meta = RunMetadata::new("chain", &exp);
    meta.transient_states = Some(cls.transient().len());
    meta.recurrent_classes = Some(cls.recurrent_classes().to_vec());
    meta.absorbing_states = Some(cls.absorbing_states());
    w.finish(meta)?;
    println!(
        "{} states, {} transitions, {} recurrent classes, {} transient states",
        exp.space.len(),
        p.nnz(),
        cls.recurrent_classes().len(),
        cls.transient().len()
    );
    for s in cls.absorbing_states() {
        println!("absorbing: {}", exp.space.state(s));
    }
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn analyze(command: &str, cfg: &RunConfig) -> anyhow::Result<()> {
    let exp = Experiment::new(cfg)?;
    let analysis = exp.analyze()?;
    let dir = cfg.output_dir();
    export::export_all(command, &exp, &analysis, &dir)?;
    println!(
        "{} states, {} recurrent classes, residual {:.3e}",
        exp.space.len(),
        analysis.classification.recurrent_classes().len(),
        analysis.absorption.residual()
    );
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn simulate_cmd(args: &SimulateArgs, file: Option<&PathBuf>) -> anyhow::Result<()> {
    let mut cfg = args.run.single(file)?;
    if let Some(j) = args.generations {
        cfg.generations = j;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.init.is_some() {
        cfg.init = args.init.clone();
    }
    if args.runs.is_some() {
        cfg.runs = args.runs;
    }
    let exp = Experiment::new(&cfg)?;
    let start = cfg.initial_state()?;
    let p = exp.transitions()?;
    let dir = cfg.output_dir();
    let mut w = ArtifactWriter::create(&dir)?;
    let mut meta = RunMetadata::new("simulate", &exp);
    meta.seed = Some(cfg.seed);
    meta.generations = Some(cfg.generations);
    match cfg.runs {
        Some(runs) => {
            let cls = egt_core::chain::classify_states(&p);
            let batch = batch_absorption(&p, &cls, &start, runs, cfg.generations, cfg.seed)?;
            w.write(export::BATCH_CSV, &export::batch_csv(&batch))?;
            for (k, f) in batch.frequencies().iter().enumerate() {
                let members: Vec<String> = cls.recurrent_classes()[k]
                    .iter()
                    .map(|&i| exp.space.state(i).to_string())
                    .collect();
                println!("class {k} [{}]: {f:.6}", members.join(" "));
            }
            println!("non-absorbed: {}", batch.non_absorbed);
            meta.recurrent_classes = Some(cls.recurrent_classes().to_vec());
        }
        None => {
            let t = simulate(&p, &start, cfg.generations, cfg.seed)?;
            w.write(export::TRAJECTORY_CSV, &export::trajectory_csv(&t))?;
            if let Some(last) = t.states.last() {
                println!("s({}) = {last}", cfg.generations);
            }
        }
    }
    w.finish(meta)?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn check_props(args: &CheckArgs, file: Option<&PathBuf>) -> anyhow::Result<ExitCode> {
    let (cfg, players) = args.run.resolve(file)?;
    let players = players.unwrap_or_else(|| vec![cfg.players]);
    let meta = cfg.meta_game()?;
    let criterion = match args.criterion {
        Criterion::Q => BestStrategyCriterion::PlayerPayoff,
        Criterion::Total => BestStrategyCriterion::StrategyTotal,
    };
    let run = PropositionRun::new(&players, cfg.rounds, &meta, criterion)?;
    let dir = cfg.out.clone().unwrap_or_else(|| {
        let root =
            std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from);
        root.join(format!("check_props_{}_T{}", cfg.game, cfg.rounds))
    });
    run.write_to(&dir)?;
    print!("{}", run.summary());
    eprintln!("wrote {}", dir.display());
    if args.strict && !(run.prop1_passed() && run.prop2_passed()) {
        return Ok(ExitCode::from(EXIT_VIOLATIONS));
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &SweepArgs, file: Option<&PathBuf>) -> anyhow::Result<()> {
    let (mut cfg, players) = args.run.resolve(file)?;
    if let Some(list) = players {
        cfg.sweep.players = list;
    }
    for param in &args.params {
        let (key, values) = param
            .split_once('=')
            .with_context(|| format!("sweep parameter `{param}` must look like key=v1,v2"))?;
        match key.trim() {
            "a" => cfg.sweep.a = parse_list(key, values)?,
            "players" | "n" | "N" => cfg.sweep.players = parse_player_list(values)?,
            "protocol" => cfg.sweep.protocol = parse_list(key, values)?,
            "eta" => cfg.sweep.eta = parse_list(key, values)?,
            "rounds" | "T" => cfg.sweep.rounds = parse_list(key, values)?,
            other => bail!(
                "unknown sweep parameter `{other}` (expected a, players, protocol, eta or rounds)"
            ),
        }
    }
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    let root = cfg.output_dir();
    let bindings = cfg.expand_sweep();
    for (_, c) in &bindings {
        c.validate()?;
    }
    let next = AtomicUsize::new(0);
    let failures = Mutex::new(Vec::new());
    let jobs = cfg.jobs.clamp(1, bindings.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((label, binding)) = bindings.get(i) else {
                    break;
                };
                let mut binding = binding.clone();
                binding.out = Some(root.join(label));
                if let Err(e) = analyze("sweep", &binding) {
                    failures.lock().unwrap().push(format!("{label}: {e:#}"));
                }
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    if !failures.is_empty() {
        bail!(
            "{} of {} bindings failed:\n{}",
            failures.len(),
            bindings.len(),
            failures.join("\n")
        );
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let file = cli.config.as_ref();
    match &cli.command {
        Command::BuildB(a) => build_b(&a.single(file)?)?,
        Command::Chain(a) => chain(&a.single(file)?)?,
        Command::Absorb(a) => analyze("absorb", &a.single(file)?)?,
        Command::Stg(a) => analyze("stg", &a.single(file)?)?,
        Command::Simulate(a) => simulate_cmd(a, file)?,
        Command::CheckProps(a) => return check_props(a, file),
        Command::Sweep(a) => sweep(a, file)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
