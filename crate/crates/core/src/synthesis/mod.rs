//! SFT data synthesis.
//!
//! Two pipelines over existing interaction data:
//!
//! - **Stage 1** ([`standardize_record`]): foreign grounding/QA/
//!   understanding records become canonical chat samples — coordinates
//!   on the `[0, 1000]` grid, templated instructions, annotated
//!   responses.
//! - **Stage 2** ([`build_step_sample`], [`TrajectoryPipeline`]):
//!   trajectories gain synthesized reasoning. Per step, in order: a
//!   screen description replaces the screenshot, a reflection checks the
//!   previous expectation, the strategic summary is written without
//!   seeing the step's action while the plan is aligned with it, the
//!   tactical layer grounds the action, and the expectation is produced
//!   from step-`t` data only — the next state never reaches that prompt,
//!   by construction of the call signature.
//!
//! Every emitted stage-2 sample re-parses through the protocol and
//! action grammars before it leaves the pipeline; failures are skipped
//! and logged, never silently emitted.

mod standardize;
mod templates;

pub use standardize::{standardize_record, RawRecord, RawTarget, RecordKind};
pub use templates::TemplateSet;

use crate::actions::{
    serialize_action, unify_action, Action, ActionSpaceConfig, UnificationTable, UnifyError,
};
use crate::chat::{ChatClient, ChatMessage, ClientError, DecodeParams};
use crate::geometry::{GeometryError, ParseMode, ScreenDims};
use crate::protocol::{
    parse_step_output, render_step_output, render_step_prompt, HistoryObservation, HistoryStep,
    Observation, ProtocolError, ReasoningRecord, Scene, StepInput,
};
use crate::raa::{parse_raa, RaaError};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("record field '{path}': {reason}")]
    Standardize { path: String, reason: String },
    #[error("step {t} out of range for trajectory of {len} steps")]
    StepOutOfRange { t: usize, len: usize },
    #[error("no next step after {t} in trajectory of {len} steps")]
    NoNextStep { t: usize, len: usize },
    #[error("reflection requires the previous step's expectation")]
    MissingPrevExpectation,
    #[error("empty description for observation '{0}'")]
    EmptyDescription(String),
    #[error("invalid template: {0}")]
    Template(String),
    #[error("sample failed self-validation: {0}")]
    SelfValidation(String),
    #[error(transparent)]
    Unify(#[from] UnifyError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Raa(#[from] RaaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("corpus io: {0}")]
    Io(String),
}

/// Provenance of a sample: dataset, trajectory (or record) id, step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSource {
    pub dataset: String,
    pub trajectory: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Stage1Grounding,
    Stage1Qa,
    Stage1Understanding,
    Stage2Step,
    NextStatePrediction,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Stage1Grounding => "stage1_grounding",
            TaskKind::Stage1Qa => "stage1_qa",
            TaskKind::Stage1Understanding => "stage1_understanding",
            TaskKind::Stage2Step => "stage2_step",
            TaskKind::NextStatePrediction => "next_state_prediction",
        }
    }
}

/// One chat-format training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SFTSample {
    pub messages: Vec<ChatMessage>,
    pub source: SampleSource,
    pub task_kind: TaskKind,
}

impl SFTSample {
    /// The assistant turn that closes the sample.
    pub fn assistant_content(&self) -> Option<&str> {
        match self.messages.last() {
            Some(m) if m.role == crate::chat::Role::Assistant => Some(&m.content),
            _ => None,
        }
    }
}

/// A screen description generated to stand in for the screenshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenDescription {
    pub step: usize,
    pub text: String,
}

/// One step of a source trajectory, in the dialect's own vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTrajStep {
    pub dims: ScreenDims,
    pub scene: Scene,
    pub action: RawAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAction {
    pub name: String,
    #[serde(default)]
    pub arguments: Value,
}

/// A source trajectory: goal plus ordered steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTrajectory {
    pub id: String,
    pub dialect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub goal: String,
    pub steps: Vec<RawTrajStep>,
}

/// A trajectory after unification: typed observations and canonical actions.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTrajectory {
    pub id: String,
    pub dataset: String,
    pub goal: String,
    pub steps: Vec<(Observation, Action)>,
}

/// Unifies a raw trajectory onto the canonical action space and typed
/// observations. Coordinates are re-normalized per the dialect.
pub fn canonicalize_trajectory(
    raw: &RawTrajectory,
    table: &UnificationTable,
) -> Result<CanonicalTrajectory, SynthesisError> {
    if raw.steps.is_empty() {
        return Err(SynthesisError::Standardize {
            path: "steps".into(),
            reason: "trajectory must have at least one step".into(),
        });
    }
    let mut steps = Vec::with_capacity(raw.steps.len());
    for (t, step) in raw.steps.iter().enumerate() {
        let observation = Observation {
            id: format!("{}#{t}", raw.id),
            dims: step.dims,
            scene: step.scene.clone(),
            timestamp: t as u64,
        };
        let action = unify_action(
            table,
            &step.action.name,
            &step.action.arguments,
            &raw.dialect,
            Some(step.dims),
        )?;
        steps.push((observation, action));
    }
    Ok(CanonicalTrajectory {
        id: raw.id.clone(),
        dataset: raw.dataset.clone().unwrap_or_else(|| raw.dialect.clone()),
        goal: raw.goal.clone(),
        steps,
    })
}

/// Shared description cache with get-or-compute semantics, keyed by
/// observation id. One writer per key; reads return the cached value.
#[derive(Debug, Default)]
pub struct DescriptionCache {
    entries: Mutex<BTreeMap<String, String>>,
}

impl DescriptionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<String, SynthesisError>,
    ) -> Result<String, SynthesisError> {
        if let Some(hit) = self.entries.lock().expect("cache poisoned").get(key) {
            return Ok(hit.clone());
        }
        let value = compute()?;
        let mut entries = self.entries.lock().expect("cache poisoned");
        Ok(entries.entry(key.to_string()).or_insert(value).clone())
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn complete_trimmed(
    client: &dyn ChatClient,
    system: &str,
    user: String,
) -> Result<String, SynthesisError> {
    let messages = vec![ChatMessage::system(system), ChatMessage::user(user)];
    let output = client.complete(&messages, &DecodeParams::default())?;
    Ok(output.trim().to_string())
}

/// Generates (or recalls) the detailed description standing in for the
/// screenshot of `observation`.
pub fn describe_screenshot(
    observation: &Observation,
    goal: &str,
    client: &dyn ChatClient,
    templates: &TemplateSet,
    cache: &DescriptionCache,
) -> Result<ScreenDescription, SynthesisError> {
    let text = cache.get_or_compute(&observation.id, || {
        let mut vars = BTreeMap::new();
        vars.insert("goal", goal.to_string());
        vars.insert("scene", observation.describe());
        let user = templates.render_user("describe_screen", &vars)?;
        let output =
            complete_trimmed(client, templates.system_prompt("describe_screen"), user)?;
        if output.is_empty() {
            return Err(SynthesisError::EmptyDescription(observation.id.clone()));
        }
        Ok(output)
    })?;
    Ok(ScreenDescription { step: observation.timestamp as usize, text })
}

/// Generates the reflection on the previous step's expectation. Rejected
/// at the first step, where no expectation exists yet.
pub fn synth_reflection(
    prev_expectation: Option<&str>,
    description: &str,
    client: &dyn ChatClient,
    templates: &TemplateSet,
) -> Result<String, SynthesisError> {
    let expectation = prev_expectation.ok_or(SynthesisError::MissingPrevExpectation)?;
    let mut vars = BTreeMap::new();
    vars.insert("expectation", expectation.to_string());
    vars.insert("description", description.to_string());
    let user = templates.render_user("reflection", &vars)?;
    complete_trimmed(client, templates.system_prompt("default"), user)
}

/// Inputs to the strategic layer.
pub struct StrategicInputs<'a> {
    pub goal: &'a str,
    /// Rendered history block (one line per previous step).
    pub history: &'a str,
    /// Number of completed steps.
    pub steps: usize,
    pub description: &'a str,
    pub action: &'a Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategicLayer {
    pub summary: String,
    pub planning: String,
}

/// Generates the strategic layer in two calls: the summary prompt never
/// sees the step's action; the planning prompt is aligned with it.
pub fn synth_strategic(
    inputs: &StrategicInputs<'_>,
    client: &dyn ChatClient,
    templates: &TemplateSet,
) -> Result<StrategicLayer, SynthesisError> {
    let mut vars = BTreeMap::new();
    vars.insert("goal", inputs.goal.to_string());
    vars.insert("steps", inputs.steps.to_string());
    vars.insert(
        "history",
        if inputs.history.is_empty() { "(no previous steps)".to_string() } else { inputs.history.to_string() },
    );
    vars.insert("description", inputs.description.to_string());
    let summary_user = templates.render_user("summary", &vars)?;
    let summary = complete_trimmed(client, templates.system_prompt("default"), summary_user)?;

    let mut vars = BTreeMap::new();
    vars.insert("goal", inputs.goal.to_string());
    vars.insert("action", serialize_action(inputs.action));
    vars.insert("summary", summary.clone());
    vars.insert("description", inputs.description.to_string());
    let planning_user = templates.render_user("planning", &vars)?;
    let planning = complete_trimmed(client, templates.system_prompt("default"), planning_user)?;

    Ok(StrategicLayer { summary, planning })
}

/// Generates the tactical layer from the reflection and strategic output,
/// incorporating the trajectory's actual action.
pub fn synth_tactical(
    reflection: Option<&str>,
    strategic: &StrategicLayer,
    action: &Action,
    client: &dyn ChatClient,
    templates: &TemplateSet,
) -> Result<String, SynthesisError> {
    let mut vars = BTreeMap::new();
    vars.insert("action", serialize_action(action));
    vars.insert(
        "reflection",
        reflection.unwrap_or("(first step; nothing to reflect on)").to_string(),
    );
    vars.insert("planning", strategic.planning.clone());
    let user = templates.render_user("tactical", &vars)?;
    complete_trimmed(client, templates.system_prompt("default"), user)
}

/// Generates the expectation for the step. The signature admits only
/// step-`t` data: there is no parameter through which the next
/// observation could reach this prompt.
pub fn synth_expectation(
    description: &str,
    tactical: &str,
    action: &Action,
    client: &dyn ChatClient,
    templates: &TemplateSet,
) -> Result<String, SynthesisError> {
    let mut vars = BTreeMap::new();
    vars.insert("action", serialize_action(action));
    vars.insert("description", description.to_string());
    vars.insert("tactical", tactical.to_string());
    let user = templates.render_user("expectation", &vars)?;
    complete_trimmed(client, templates.system_prompt("default"), user)
}

/// Outcome of a response refinement pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineOutcome {
    pub text: String,
    /// False when validation failed and the original was retained.
    pub refined: bool,
    pub flag: Option<String>,
}

/// Reformulates a response through the client, keeping the original
/// (flagged, not fatal) whenever the rewrite fails validation: it must
/// be non-empty, parse strictly as annotated text, and stay within a
/// sane length bound.
pub fn refine_response(
    response: &str,
    client: &dyn ChatClient,
    templates: &TemplateSet,
) -> Result<RefineOutcome, SynthesisError> {
    let mut vars = BTreeMap::new();
    vars.insert("response", response.to_string());
    let user = templates.render_user("refine", &vars)?;
    let rewritten = complete_trimmed(client, templates.system_prompt("refine"), user)?;

    let max_len = (response.len() * 4).max(400);
    let verdict = if rewritten.is_empty() {
        Err("rewrite is empty".to_string())
    } else if rewritten.len() > max_len {
        Err(format!("rewrite length {} exceeds bound {max_len}", rewritten.len()))
    } else {
        parse_raa(&rewritten, ParseMode::Strict)
            .map(|_| ())
            .map_err(|e| format!("rewrite failed annotation validation: {e}"))
    };
    match verdict {
        Ok(()) => Ok(RefineOutcome { text: rewritten, refined: true, flag: None }),
        Err(flag) => {
            log::warn!("refinement rejected, keeping original: {flag}");
            Ok(RefineOutcome { text: response.to_string(), refined: false, flag: Some(flag) })
        }
    }
}

/// Stage-2 synthesis over one trajectory, with per-step caching of
/// descriptions and reasoning records.
pub struct TrajectoryPipeline<'a> {
    traj: CanonicalTrajectory,
    client: &'a dyn ChatClient,
    templates: &'a TemplateSet,
    window: usize,
    action_space: ActionSpaceConfig,
    cache: DescriptionCache,
    records: BTreeMap<usize, ReasoningRecord>,
}

impl<'a> TrajectoryPipeline<'a> {
    pub fn new(
        raw: &RawTrajectory,
        table: &UnificationTable,
        client: &'a dyn ChatClient,
        templates: &'a TemplateSet,
        window: usize,
        action_space: ActionSpaceConfig,
    ) -> Result<Self, SynthesisError> {
        Ok(Self {
            traj: canonicalize_trajectory(raw, table)?,
            client,
            templates,
            window,
            action_space,
            cache: DescriptionCache::new(),
            records: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.traj.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traj.steps.is_empty()
    }

    pub fn trajectory(&self) -> &CanonicalTrajectory {
        &self.traj
    }

    fn description(&self, t: usize) -> Result<String, SynthesisError> {
        let (observation, _) = &self.traj.steps[t];
        Ok(describe_screenshot(observation, &self.traj.goal, self.client, self.templates, &self.cache)?
            .text)
    }

    /// One line per history step for the summary prompt.
    fn history_block(&self, t: usize) -> Result<String, SynthesisError> {
        let from = t.saturating_sub(self.window);
        let mut lines = Vec::new();
        for i in from..t {
            let (_, action) = &self.traj.steps[i];
            let description = self.description(i)?;
            let first_line = description.lines().next().unwrap_or_default();
            lines.push(format!("step {i}: {} — after observing: {first_line}", action.name()));
        }
        Ok(lines.join("\n"))
    }

    /// Synthesizes (or recalls) the reasoning record for step `t`,
    /// building earlier expectations first when needed.
    pub fn record(&mut self, t: usize) -> Result<ReasoningRecord, SynthesisError> {
        if t >= self.len() {
            return Err(SynthesisError::StepOutOfRange { t, len: self.len() });
        }
        for i in 0..=t {
            if self.records.contains_key(&i) {
                continue;
            }
            let record = self.build_record(i)?;
            self.records.insert(i, record);
        }
        Ok(self.records[&t].clone())
    }

    fn build_record(&mut self, t: usize) -> Result<ReasoningRecord, SynthesisError> {
        let description = self.description(t)?;
        let action = self.traj.steps[t].1.clone();

        let reflection = if t == 0 {
            None
        } else {
            let prev_expectation = self.records[&(t - 1)].expectation.clone();
            Some(synth_reflection(
                Some(&prev_expectation),
                &description,
                self.client,
                self.templates,
            )?)
        };

        let history = self.history_block(t)?;
        let strategic = synth_strategic(
            &StrategicInputs {
                goal: &self.traj.goal,
                history: &history,
                steps: t,
                description: &description,
                action: &action,
            },
            self.client,
            self.templates,
        )?;
        let tactical = synth_tactical(
            reflection.as_deref(),
            &strategic,
            &action,
            self.client,
            self.templates,
        )?;
        let expectation =
            synth_expectation(&description, &tactical, &action, self.client, self.templates)?;

        let record = ReasoningRecord {
            reflection,
            strategic_summary: strategic.summary,
            strategic_planning: strategic.planning,
            tactical,
            expectation,
        };
        record.validate(t)?;
        Ok(record)
    }

    /// Builds the stage-2 training sample for step `t`: prompt turns
    /// over the windowed history of descriptions, assistant turn holding
    /// the synthesized reasoning plus the step's action envelope. The
    /// sample must re-parse to exactly what was rendered.
    pub fn step_sample(&mut self, t: usize) -> Result<SFTSample, SynthesisError> {
        if t >= self.len() {
            return Err(SynthesisError::StepOutOfRange { t, len: self.len() });
        }
        let record = self.record(t)?;
        let action = self.traj.steps[t].1.clone();

        let from = t.saturating_sub(self.window);
        let mut history = Vec::with_capacity(t - from);
        for i in from..t {
            history.push(HistoryStep {
                observation: HistoryObservation::Text(self.description(i)?),
                reasoning: self.records[&i].clone(),
                action: self.traj.steps[i].1.clone(),
            });
        }
        let input = StepInput {
            goal: self.traj.goal.clone(),
            step_index: t,
            action_space: self.action_space.clone(),
            observation: self.traj.steps[t].0.clone(),
            history,
        };
        let mut messages = render_step_prompt(&input);
        let assistant = render_step_output(&record, &action);

        // Self-validation: the emitted turn must round-trip through the
        // protocol and action grammars.
        let (reparsed, reparsed_action) = parse_step_output(&assistant, t, ParseMode::Strict)
            .map_err(|e| SynthesisError::SelfValidation(e.to_string()))?;
        if reparsed != record || reparsed_action != action {
            return Err(SynthesisError::SelfValidation(
                "re-parsed assistant turn differs from the rendered record".into(),
            ));
        }

        messages.push(ChatMessage::assistant(assistant));
        Ok(SFTSample {
            messages,
            source: SampleSource {
                dataset: self.traj.dataset.clone(),
                trajectory: self.traj.id.clone(),
                step: Some(t),
            },
            task_kind: TaskKind::Stage2Step,
        })
    }

    /// Builds the auxiliary next-state prediction sample for step `t`:
    /// the user turn carries the step description and the action, the
    /// assistant turn is the next step's description.
    pub fn next_state_sample(&mut self, t: usize) -> Result<SFTSample, SynthesisError> {
        if t + 1 >= self.len() {
            return Err(SynthesisError::NoNextStep { t, len: self.len() });
        }
        let current = self.description(t)?;
        let next = self.description(t + 1)?;
        let action = &self.traj.steps[t].1;
        let user = format!(
            "Current screen:\n{current}\n\nAction taken:\n{}\n\nPredict the next screen state.",
            serialize_action(action)
        );
        Ok(SFTSample {
            messages: vec![
                ChatMessage::system("You predict the next screen state after a GUI action."),
                ChatMessage::user(user),
                ChatMessage::assistant(next),
            ],
            source: SampleSource {
                dataset: self.traj.dataset.clone(),
                trajectory: self.traj.id.clone(),
                step: Some(t),
            },
            task_kind: TaskKind::NextStatePrediction,
        })
    }
}

/// Builds one stage-2 step sample. Standalone form of
/// [`TrajectoryPipeline::step_sample`]; earlier steps' reasoning is
/// synthesized on the way.
pub fn build_step_sample(
    traj: &RawTrajectory,
    t: usize,
    client: &dyn ChatClient,
    window: usize,
    table: &UnificationTable,
    templates: &TemplateSet,
) -> Result<SFTSample, SynthesisError> {
    TrajectoryPipeline::new(traj, table, client, templates, window, ActionSpaceConfig::full())?
        .step_sample(t)
}

/// Builds one next-state prediction sample. Standalone form of
/// [`TrajectoryPipeline::next_state_sample`].
pub fn build_next_state_sample(
    traj: &RawTrajectory,
    t: usize,
    client: &dyn ChatClient,
    table: &UnificationTable,
    templates: &TemplateSet,
) -> Result<SFTSample, SynthesisError> {
    TrajectoryPipeline::new(traj, table, client, templates, 1, ActionSpaceConfig::full())?
        .next_state_sample(t)
}

fn default_window() -> usize {
    crate::protocol::DEFAULT_WINDOW
}

fn default_task_kinds() -> Vec<TaskKind> {
    vec![TaskKind::Stage2Step, TaskKind::NextStatePrediction]
}

fn default_platform() -> String {
    "full".to_string()
}

fn default_templates_version() -> String {
    "v1".to_string()
}

/// Synthesis run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisManifest {
    #[serde(default = "default_templates_version")]
    pub templates_version: String,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Reserved for sampling policies; recorded for reproducibility.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_task_kinds")]
    pub task_kinds: Vec<TaskKind>,
    #[serde(default = "default_platform")]
    pub platform: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl Default for SynthesisManifest {
    fn default() -> Self {
        Self {
            templates_version: default_templates_version(),
            window: default_window(),
            seed: 0,
            task_kinds: default_task_kinds(),
            platform: default_platform(),
            endpoint: None,
            model: None,
        }
    }
}

/// A step the pipeline gave up on, with the reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedStep {
    pub trajectory: String,
    pub step: usize,
    pub reason: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub samples: Vec<SFTSample>,
    pub skipped: Vec<SkippedStep>,
}

/// Runs stage-2 synthesis over a corpus of trajectories. Failing steps
/// are skipped and logged; the pipeline keeps going.
pub fn run_synthesis(
    manifest: &SynthesisManifest,
    trajectories: &[RawTrajectory],
    client: &dyn ChatClient,
    table: &UnificationTable,
    templates: &TemplateSet,
) -> Result<SynthesisReport, SynthesisError> {
    if manifest.templates_version != templates.version() {
        return Err(SynthesisError::Template(format!(
            "manifest wants templates '{}' but '{}' are loaded",
            manifest.templates_version,
            templates.version()
        )));
    }
    let action_space = ActionSpaceConfig::preset(&manifest.platform)
        .ok_or_else(|| SynthesisError::Template(format!("unknown platform '{}'", manifest.platform)))?;

    let mut report = SynthesisReport::default();
    for raw in trajectories {
        let mut pipeline = match TrajectoryPipeline::new(
            raw,
            table,
            client,
            templates,
            manifest.window,
            action_space.clone(),
        ) {
            Ok(pipeline) => pipeline,
            Err(err) => {
                log::warn!("skipping trajectory '{}': {err}", raw.id);
                report.skipped.push(SkippedStep {
                    trajectory: raw.id.clone(),
                    step: 0,
                    reason: err.to_string(),
                });
                continue;
            }
        };
        for t in 0..pipeline.len() {
            if manifest.task_kinds.contains(&TaskKind::Stage2Step) {
                match pipeline.step_sample(t) {
                    Ok(sample) => report.samples.push(sample),
                    Err(err) => {
                        log::warn!("skipping {}#{t}: {err}", raw.id);
                        report.skipped.push(SkippedStep {
                            trajectory: raw.id.clone(),
                            step: t,
                            reason: err.to_string(),
                        });
                    }
                }
            }
            if manifest.task_kinds.contains(&TaskKind::NextStatePrediction)
                && t + 1 < pipeline.len()
            {
                match pipeline.next_state_sample(t) {
                    Ok(sample) => report.samples.push(sample),
                    Err(err) => {
                        log::warn!("skipping next-state {}#{t}: {err}", raw.id);
                        report.skipped.push(SkippedStep {
                            trajectory: raw.id.clone(),
                            step: t,
                            reason: err.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Writes a corpus as newline-delimited JSON.
pub fn write_corpus<W: Write>(mut writer: W, samples: &[SFTSample]) -> std::io::Result<()> {
    for sample in samples {
        serde_json::to_writer(&mut writer, sample)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a newline-delimited corpus.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<SFTSample>, SynthesisError> {
    let mut samples = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| SynthesisError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: SFTSample = serde_json::from_str(&line)
            .map_err(|e| SynthesisError::Io(format!("line {}: {e}", index + 1)))?;
        samples.push(sample);
    }
    Ok(samples)
}

/// Corpus integrity report.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct CorpusReport {
    pub total: usize,
    pub by_kind: BTreeMap<String, usize>,
    pub violations: Vec<String>,
}

impl CorpusReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates a corpus: chat shape, provenance, stage-2 re-parse through
/// the protocol and action grammars, and annotation coordinate hygiene
/// across all message content.
pub fn validate_corpus(samples: &[SFTSample]) -> CorpusReport {
    let mut report = CorpusReport { total: samples.len(), ..CorpusReport::default() };
    for (index, sample) in samples.iter().enumerate() {
        let tag = format!(
            "sample {index} ({}/{}#{:?})",
            sample.source.dataset, sample.source.trajectory, sample.source.step
        );
        *report.by_kind.entry(sample.task_kind.as_str().to_string()).or_default() += 1;

        let Some(assistant) = sample.assistant_content() else {
            report.violations.push(format!("{tag}: last turn is not an assistant turn"));
            continue;
        };
        if sample.source.dataset.is_empty() || sample.source.trajectory.is_empty() {
            report.violations.push(format!("{tag}: incomplete provenance"));
        }
        match sample.task_kind {
            TaskKind::Stage2Step => match sample.source.step {
                Some(step) => {
                    if let Err(err) = parse_step_output(assistant, step, ParseMode::Strict) {
                        report.violations.push(format!("{tag}: assistant turn re-parse: {err}"));
                    }
                }
                None => report.violations.push(format!("{tag}: stage2 sample without step index")),
            },
            TaskKind::NextStatePrediction if assistant.trim().is_empty() => {
                report.violations.push(format!("{tag}: empty next-state description"));
            }
            _ => {}
        }
        for (m, message) in sample.messages.iter().enumerate() {
            if let Err(err) = parse_raa(&message.content, ParseMode::Strict) {
                report
                    .violations
                    .push(format!("{tag}: message {m} annotation hygiene: {err}"));
            }
        }
    }
    report
}
