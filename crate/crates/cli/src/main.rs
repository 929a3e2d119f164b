//! Command-line entry points for the toolkit.
//!
//! Exit codes: 0 on success, 1 on evaluation failures (corpus
//! violations, calibration misses), 2 on configuration or input errors.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use guiact::actions::UnificationTable;
use guiact::chat::{ChatClient, HttpChatClient, StubChatClient};
use guiact::fixtures::{bundled_grounding_suite, bundled_trajectories, read_trajectories};
use guiact::harness::{
    eval_grounding, read_grounding_suite, run_episode, success_rate, write_grounding_suite,
    AgentBackend, ChatClientAgent, ConstantPointAgent, EpisodeResult, GroundingOracleAgent,
    ParsePolicy, RandomAgent, ScriptedAgent,
};
use guiact::mockenv::{oracle_agent, scripts::bundled_apps, AppScript, MockEnv};
use guiact::synthesis::{
    read_corpus, run_synthesis, standardize_record, validate_corpus, write_corpus, RawRecord,
    SynthesisManifest, TemplateSet,
};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "guiact", about = "GUI-agent toolkit: standardization, synthesis, evaluation")]
struct Cli {
    /// Synthesis manifest (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized agents and sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Chat-completion endpoint (OpenAI-compatible).
    #[arg(long, global = true)]
    endpoint: Option<String>,
    /// Use the deterministic stub client instead of an endpoint.
    #[arg(long, global = true)]
    stub: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standardize stage-1 records (JSONL in, SFT samples out).
    Standardize(StandardizeArgs),
    /// Synthesize stage-2 reasoning samples from trajectories.
    Synth(SynthArgs),
    /// Evaluate grounding accuracy on a case suite.
    EvalGrounding(EvalGroundingArgs),
    /// Run episodes against the scripted environments.
    RunEpisodes(RunEpisodesArgs),
    /// Re-validate an SFT corpus.
    ValidateCorpus(ValidateCorpusArgs),
    /// Write the bundled fixtures (scripts, suites, trajectories).
    MakeFixtures(MakeFixturesArgs),
}

#[derive(Args)]
struct StandardizeArgs {
    /// Raw records, newline-delimited JSON.
    #[arg(long)]
    input: PathBuf,
    /// Output corpus path.
    #[arg(long)]
    output: PathBuf,
    /// Unification table file; builtin table when omitted.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Trajectories, newline-delimited JSON. Bundled corpus when omitted.
    #[arg(long)]
    trajectories: Option<PathBuf>,
    /// Output corpus path.
    #[arg(long)]
    output: PathBuf,
    /// Unification table file; builtin table when omitted.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Prompt templates file; builtin templates when omitted.
    #[arg(long)]
    templates: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AgentKind {
    Oracle,
    Random,
    Corner,
    Chat,
}

#[derive(Args)]
struct EvalGroundingArgs {
    /// Grounding suite, newline-delimited JSON. Bundled suite when omitted.
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "oracle")]
    agent: AgentKind,
    /// Write the report as JSON here.
    #[arg(long)]
    report_json: Option<PathBuf>,
}

#[derive(Args)]
struct RunEpisodesArgs {
    /// Directory of app-script JSON files. Bundled apps when omitted.
    #[arg(long)]
    scripts: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "oracle")]
    agent: AgentKind,
    #[arg(long, default_value_t = 30)]
    budget: usize,
    #[arg(long, default_value_t = 2)]
    window: usize,
    /// Policy for unparseable model output.
    #[arg(long, value_enum, default_value = "abort")]
    on_parse_error: PolicyArg,
    #[arg(long)]
    report_json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Abort,
    Skip,
}

impl From<PolicyArg> for ParsePolicy {
    fn from(value: PolicyArg) -> Self {
        match value {
            PolicyArg::Abort => ParsePolicy::AbortAsFailure,
            PolicyArg::Skip => ParsePolicy::SkipStep,
        }
    }
}

#[derive(Args)]
struct ValidateCorpusArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct MakeFixturesArgs {
    /// Output directory; created if missing.
    #[arg(long)]
    output: PathBuf,
}

/// Errors that are evaluation outcomes, not configuration problems.
#[derive(Debug)]
struct EvalFailure(String);

impl std::fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for EvalFailure {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<EvalFailure>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn load_manifest(cli: &Cli) -> Result<SynthesisManifest> {
    let mut manifest = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => SynthesisManifest::default(),
    };
    if let Some(seed) = cli.seed {
        manifest.seed = seed;
    }
    if let Some(endpoint) = &cli.endpoint {
        manifest.endpoint = Some(endpoint.clone());
    }
    Ok(manifest)
}

fn build_client(cli: &Cli, manifest: &SynthesisManifest) -> Result<Box<dyn ChatClient>> {
    if cli.stub {
        return Ok(Box::new(StubChatClient::templated()));
    }
    match manifest.endpoint.as_deref() {
        Some(endpoint) => {
            let model = manifest.model.clone().unwrap_or_else(|| "default".to_string());
            Ok(Box::new(HttpChatClient::new(endpoint, model)))
        }
        None => {
            log::info!("no endpoint configured; using the deterministic stub client");
            Ok(Box::new(StubChatClient::templated()))
        }
    }
}

fn load_table(path: Option<&Path>) -> Result<UnificationTable> {
    match path {
        Some(path) => UnificationTable::from_path(path)
            .with_context(|| format!("loading table {}", path.display())),
        None => Ok(UnificationTable::builtin()),
    }
}

fn load_templates(path: Option<&Path>) -> Result<TemplateSet> {
    match path {
        Some(path) => TemplateSet::from_path(path)
            .with_context(|| format!("loading templates {}", path.display())),
        None => Ok(TemplateSet::builtin()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Standardize(args) => standardize(args),
        Command::Synth(args) => synth(&cli, args),
        Command::EvalGrounding(args) => eval_grounding_cmd(&cli, args),
        Command::RunEpisodes(args) => run_episodes(&cli, args),
        Command::ValidateCorpus(args) => validate_corpus_cmd(args),
        Command::MakeFixtures(args) => make_fixtures(args),
    }
}

fn standardize(args: &StandardizeArgs) -> Result<()> {
    let table = load_table(args.table.as_deref())?;
    let templates = load_templates(None)?;
    let input = File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))?;
    let mut samples = Vec::new();
    let mut skipped = 0usize;
    for (index, line) in std::io::BufRead::lines(BufReader::new(input)).enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line)
            .with_context(|| format!("line {}: invalid record", index + 1))?;
        match standardize_record(&record, &table, &templates) {
            Ok(sample) => samples.push(sample),
            Err(err) => {
                log::warn!("line {}: skipped: {err}", index + 1);
                skipped += 1;
            }
        }
    }
    let output = File::create(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    write_corpus(BufWriter::new(output), &samples)?;
    println!(
        "standardized {} records ({} skipped) -> {}",
        samples.len(),
        skipped,
        args.output.display()
    );
    Ok(())
}

fn synth(cli: &Cli, args: &SynthArgs) -> Result<()> {
    let manifest = load_manifest(cli)?;
    let table = load_table(args.table.as_deref())?;
    let templates = load_templates(args.templates.as_deref())?;
    let client = build_client(cli, &manifest)?;
    let trajectories = match &args.trajectories {
        Some(path) => {
            let file =
                File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_trajectories(BufReader::new(file))?
        }
        None => bundled_trajectories(),
    };
    let report = run_synthesis(&manifest, &trajectories, client.as_ref(), &table, &templates)?;
    let output = File::create(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    write_corpus(BufWriter::new(output), &report.samples)?;
    println!(
        "synthesized {} samples from {} trajectories ({} steps skipped) -> {}",
        report.samples.len(),
        trajectories.len(),
        report.skipped.len(),
        args.output.display()
    );
    Ok(())
}

fn eval_grounding_cmd(cli: &Cli, args: &EvalGroundingArgs) -> Result<()> {
    let manifest = load_manifest(cli)?;
    let client = build_client(cli, &manifest)?;
    let suite = match &args.suite {
        Some(path) => {
            let file =
                File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_grounding_suite(BufReader::new(file))?
        }
        None => bundled_grounding_suite(),
    };
    let agent: Box<dyn AgentBackend> = match args.agent {
        AgentKind::Oracle => Box::new(GroundingOracleAgent),
        AgentKind::Random => Box::new(RandomAgent { seed: cli.seed.unwrap_or(0) }),
        AgentKind::Corner => {
            Box::new(ConstantPointAgent { point: guiact::fixtures::corner_point() })
        }
        AgentKind::Chat => Box::new(ChatClientAgent::new(client.as_ref())),
    };
    let report = eval_grounding(&suite, agent.as_ref())
        .map_err(|e| EvalFailure(e.to_string()))
        .context("grounding evaluation failed")?;
    print!("{}", report.render_table());
    println!("cases: {}   parse misses: {}", report.total().total, report.parse_misses);
    if let Some(path) = &args.report_json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn load_scripts(dir: &Path) -> Result<Vec<AppScript>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|path| path.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut scripts = Vec::new();
    for path in paths {
        scripts.push(
            AppScript::from_path(&path)
                .with_context(|| format!("loading {}", path.display()))?,
        );
    }
    if scripts.is_empty() {
        bail!("no .json app scripts in {}", dir.display());
    }
    Ok(scripts)
}

fn run_episodes(cli: &Cli, args: &RunEpisodesArgs) -> Result<()> {
    let manifest = load_manifest(cli)?;
    let client = build_client(cli, &manifest)?;
    let scripts = match &args.scripts {
        Some(dir) => load_scripts(dir)?,
        None => bundled_apps(),
    };
    let mut results: Vec<EpisodeResult> = Vec::new();
    for script in &scripts {
        for task in &script.tasks {
            let env = MockEnv::reset(script.clone(), &task.id)?;
            let agent: Box<dyn AgentBackend> = match args.agent {
                AgentKind::Oracle => Box::new(ScriptedAgent::new(
                    oracle_agent(script, &task.id)
                        .with_context(|| format!("task {} has no oracle", task.id))?,
                )),
                AgentKind::Random => Box::new(RandomAgent { seed: cli.seed.unwrap_or(0) }),
                AgentKind::Corner => Box::new(ConstantPointAgent {
                    point: guiact::fixtures::corner_point(),
                }),
                AgentKind::Chat => Box::new(ChatClientAgent::new(client.as_ref())),
            };
            let result = run_episode(
                env,
                agent.as_ref(),
                args.budget,
                args.window,
                args.on_parse_error.into(),
            )?;
            println!(
                "{:<22} {:<7} success={} steps={} terminal={:?}",
                result.task_id,
                result.difficulty.as_str(),
                result.success,
                result.steps_used,
                result.terminal
            );
            results.push(result);
        }
    }
    let rates = success_rate(&results);
    print!("{}", rates.render_table());
    if let Some(path) = &args.report_json {
        #[derive(serde::Serialize)]
        struct EpisodeReport<'a> {
            results: &'a [EpisodeResult],
            rates: guiact::harness::SuccessReport,
        }
        std::fs::write(
            path,
            serde_json::to_string_pretty(&EpisodeReport { results: &results, rates })?,
        )
        .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn validate_corpus_cmd(args: &ValidateCorpusArgs) -> Result<()> {
    let file = File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))?;
    let samples = read_corpus(BufReader::new(file))?;
    let report = validate_corpus(&samples);
    println!("samples: {}", report.total);
    for (kind, count) in &report.by_kind {
        println!("  {kind}: {count}");
    }
    if report.is_clean() {
        println!("corpus is clean");
        Ok(())
    } else {
        for violation in &report.violations {
            eprintln!("violation: {violation}");
        }
        Err(EvalFailure(format!("{} corpus violations", report.violations.len())).into())
    }
}

fn make_fixtures(args: &MakeFixturesArgs) -> Result<()> {
    let dir = &args.output;
    std::fs::create_dir_all(dir.join("scripts"))
        .with_context(|| format!("creating {}", dir.display()))?;

    for script in bundled_apps() {
        let path = dir.join("scripts").join(format!("{}.json", script.name));
        std::fs::write(&path, serde_json::to_string_pretty(&script)?)?;
        println!("wrote {}", path.display());
    }

    let suite_path = dir.join("grounding_suite.jsonl");
    let suite = bundled_grounding_suite();
    let file = File::create(&suite_path)?;
    write_grounding_suite(BufWriter::new(file), &suite)?;
    println!("wrote {} ({} cases)", suite_path.display(), suite.len());

    let traj_path = dir.join("trajectories.jsonl");
    let trajectories = bundled_trajectories();
    let file = File::create(&traj_path)?;
    guiact::fixtures::write_trajectories(BufWriter::new(file), &trajectories)?;
    println!("wrote {} ({} trajectories)", traj_path.display(), trajectories.len());

    let manifest_path = dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&SynthesisManifest::default())?)?;
    println!("wrote {}", manifest_path.display());

    let table_path = dir.join("unification_table.json");
    let mut out = File::create(&table_path)?;
    out.write_all(include_str!("../../core/data/unification_table.json").as_bytes())?;
    println!("wrote {}", table_path.display());

    let templates_path = dir.join("prompt_templates.json");
    let mut out = File::create(&templates_path)?;
    out.write_all(include_str!("../../core/data/prompt_templates.json").as_bytes())?;
    println!("wrote {}", templates_path.display());

    Ok(())
}
