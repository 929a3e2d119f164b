//! Episode protocol: the agent-environment interface and the
//! reflection / hierarchical-reasoning / action / expectation cycle.
//!
//! An episode tracks a goal, a bounded history window of
//! (observation, reasoning, action) triples, and a status that moves
//! from `running` to exactly one terminal value. Each step's reasoning
//! record carries a reflection on the previous step's expectation
//! (absent only at step 0), a strategic summary and plan, a tactical
//! layer, and an expectation to be checked at the next step.

mod output;
mod step_log;

pub use output::{parse_reasoning, parse_step_output, render_step_output};
pub use step_log::{episode_log, read_step_log, write_step_log, StepLogEntry};

use crate::actions::{validate_action, Action, ActionError, ActionSpaceConfig, TaskStatus};
use crate::chat::ChatMessage;
use crate::geometry::{NormBox, ScreenDims};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("episode goal must be non-empty")]
    EmptyGoal,
    #[error("history window size must be at least 1")]
    ZeroWindow,
    #[error("episode is terminal ({status}); the state can no longer change")]
    Terminal { status: EpisodeStatus },
    #[error("reflection must be absent at step 0")]
    ReflectionAtStart,
    #[error("reflection must be present and non-empty at step {t}")]
    MissingReflection { t: usize },
    #[error("missing section '{0}' in step output")]
    MissingSection(&'static str),
    #[error("section '{0}' must be non-empty")]
    EmptySection(&'static str),
    #[error("duplicate section '{0}'")]
    DuplicateSection(String),
    #[error("unknown section label '{0}'")]
    UnknownSection(String),
    #[error("sections out of canonical order: {0}")]
    SectionOrder(String),
    #[error("content before the first section label")]
    LeadingContent,
    #[error("missing [Action] envelope section")]
    MissingAction,
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("duplicate observation id '{0}' within the episode")]
    DuplicateObservation(String),
}

/// One interactive element of a screen descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneElement {
    pub id: String,
    pub role: String,
    pub label: String,
    pub bounds: NormBox,
    #[serde(default)]
    pub editable: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
}

impl SceneElement {
    /// Deterministic one-line rendering used in prompts and descriptions.
    pub fn render_line(&self) -> String {
        let mut line = format!(
            "- {} \"{}\" at {}",
            self.role,
            self.label,
            serde_json::to_string(&self.bounds).expect("box serializes infallibly")
        );
        if self.editable {
            line.push_str(" (editable)");
        }
        if !self.text.is_empty() {
            line.push_str(&format!(" text=\"{}\"", self.text));
        }
        line
    }
}

/// What the agent can see of a screen: a structured element list or an
/// opaque text description. Observations never carry pixels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scene {
    Elements(Vec<SceneElement>),
    Text(String),
}

/// A step observation: unique id, screen dims, scene descriptor and a
/// logical timestamp (monotone within an episode, not wall-clock).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub id: String,
    pub dims: ScreenDims,
    pub scene: Scene,
    pub timestamp: u64,
}

impl Observation {
    /// Deterministic text rendering of the scene.
    pub fn describe(&self) -> String {
        match &self.scene {
            Scene::Text(text) => text.clone(),
            Scene::Elements(elements) if elements.is_empty() => {
                format!("Screen {} with no interactive elements.", self.dims)
            }
            Scene::Elements(elements) => {
                let mut out = format!("Screen {} with {} elements:\n", self.dims, elements.len());
                for element in elements {
                    out.push_str(&element.render_line());
                    out.push('\n');
                }
                out.pop();
                out
            }
        }
    }
}

/// Reasoning produced at one step.
///
/// `reflection` is present exactly when a previous step exists;
/// `expectation` is never empty — it is what the next step's reflection
/// will be checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasoningRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflection: Option<String>,
    pub strategic_summary: String,
    pub strategic_planning: String,
    pub tactical: String,
    pub expectation: String,
}

impl ReasoningRecord {
    /// Checks the cycle rules for a record at step `t`.
    pub fn validate(&self, t: usize) -> Result<(), ProtocolError> {
        match (&self.reflection, t) {
            (Some(_), 0) => return Err(ProtocolError::ReflectionAtStart),
            (Some(r), _) if r.trim().is_empty() => {
                return Err(ProtocolError::MissingReflection { t })
            }
            (None, t) if t > 0 => return Err(ProtocolError::MissingReflection { t }),
            _ => {}
        }
        for (label, content) in [
            ("Summary", &self.strategic_summary),
            ("Planning", &self.strategic_planning),
            ("Tactical", &self.tactical),
            ("Expectation", &self.expectation),
        ] {
            if content.trim().is_empty() {
                return Err(ProtocolError::EmptySection(label));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeStatus {
    Running,
    Complete,
    Infeasible,
    Exhausted,
}

impl EpisodeStatus {
    pub fn is_terminal(&self) -> bool {
        *self != EpisodeStatus::Running
    }
}

impl std::fmt::Display for EpisodeStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EpisodeStatus::Running => "running",
            EpisodeStatus::Complete => "complete",
            EpisodeStatus::Infeasible => "infeasible",
            EpisodeStatus::Exhausted => "exhausted",
        };
        f.write_str(s)
    }
}

/// One recorded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub observation: Observation,
    pub reasoning: ReasoningRecord,
    pub action: Action,
}

/// Default per-episode step budget; exceeding it sets `exhausted`.
pub const DEFAULT_MAX_STEPS: usize = 30;

/// Default history window size.
pub const DEFAULT_WINDOW: usize = 2;

/// The full episode state: goal, window size, recorded steps, status.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeState {
    goal: String,
    window_size: usize,
    config: ActionSpaceConfig,
    max_steps: usize,
    history_as_text: bool,
    steps: Vec<StepRecord>,
    status: EpisodeStatus,
}

/// Creates a fresh episode in `running` state with no steps.
pub fn new_episode(
    goal: impl Into<String>,
    window_size: usize,
    config: ActionSpaceConfig,
) -> Result<EpisodeState, ProtocolError> {
    let goal = goal.into();
    if goal.trim().is_empty() {
        return Err(ProtocolError::EmptyGoal);
    }
    if window_size < 1 {
        return Err(ProtocolError::ZeroWindow);
    }
    Ok(EpisodeState {
        goal,
        window_size,
        config,
        max_steps: DEFAULT_MAX_STEPS,
        history_as_text: true,
        steps: Vec::new(),
        status: EpisodeStatus::Running,
    })
}

impl EpisodeState {
    pub fn goal(&self) -> &str {
        &self.goal
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn config(&self) -> &ActionSpaceConfig {
        &self.config
    }

    pub fn status(&self) -> EpisodeStatus {
        self.status
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// Index of the next step to record.
    pub fn next_step_index(&self) -> usize {
        self.steps.len()
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn with_max_steps(mut self, budget: usize) -> Self {
        self.max_steps = budget;
        if self.steps.len() >= self.max_steps && self.status == EpisodeStatus::Running {
            self.status = EpisodeStatus::Exhausted;
        }
        self
    }

    /// Whether history turns carry text descriptions instead of full
    /// scene descriptors. On by default.
    pub fn with_history_as_text(mut self, enabled: bool) -> Self {
        self.history_as_text = enabled;
        self
    }

    /// The last `min(t, n)` recorded steps, oldest first.
    pub fn window(&self) -> &[StepRecord] {
        let from = self.steps.len().saturating_sub(self.window_size);
        &self.steps[from..]
    }
}

/// History entry view: a text description by default, the full
/// observation when the episode is configured to keep scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryObservation {
    Text(String),
    Scene(Observation),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryStep {
    pub observation: HistoryObservation,
    pub reasoning: ReasoningRecord,
    pub action: Action,
}

/// Everything the agent sees at one step: goal, current observation and
/// the windowed history, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInput {
    pub goal: String,
    pub step_index: usize,
    pub action_space: ActionSpaceConfig,
    pub observation: Observation,
    pub history: Vec<HistoryStep>,
}

/// Assembles the agent input for the current observation.
pub fn build_step_input(
    state: &EpisodeState,
    observation: Observation,
) -> Result<StepInput, ProtocolError> {
    if state.status.is_terminal() {
        return Err(ProtocolError::Terminal { status: state.status });
    }
    if state.steps.iter().any(|s| s.observation.id == observation.id) {
        return Err(ProtocolError::DuplicateObservation(observation.id));
    }
    let history = state
        .window()
        .iter()
        .map(|step| HistoryStep {
            observation: if state.history_as_text {
                HistoryObservation::Text(step.observation.describe())
            } else {
                HistoryObservation::Scene(step.observation.clone())
            },
            reasoning: step.reasoning.clone(),
            action: step.action.clone(),
        })
        .collect();
    Ok(StepInput {
        goal: state.goal.clone(),
        step_index: state.steps.len(),
        action_space: state.config.clone(),
        observation,
        history,
    })
}

/// Appends a completed step, moving the episode into a terminal state
/// when the action sets one or the budget runs out.
pub fn record_step(
    state: &mut EpisodeState,
    observation: Observation,
    reasoning: ReasoningRecord,
    action: Action,
) -> Result<EpisodeStatus, ProtocolError> {
    if state.status.is_terminal() {
        return Err(ProtocolError::Terminal { status: state.status });
    }
    if state.steps.iter().any(|s| s.observation.id == observation.id) {
        return Err(ProtocolError::DuplicateObservation(observation.id));
    }
    validate_action(&action, &state.config)?;
    reasoning.validate(state.steps.len())?;

    let status_action = match &action {
        Action::SetTaskStatus { status } => Some(*status),
        _ => None,
    };
    state.steps.push(StepRecord { observation, reasoning, action });
    state.status = match status_action {
        Some(TaskStatus::Complete) => EpisodeStatus::Complete,
        Some(TaskStatus::Infeasible) => EpisodeStatus::Infeasible,
        _ if state.steps.len() >= state.max_steps => EpisodeStatus::Exhausted,
        _ => EpisodeStatus::Running,
    };
    Ok(state.status)
}

/// Renders a step input into the deterministic prompt message sequence:
/// a system preamble (action space and output contract), then each
/// history triple as a user/assistant exchange, then the current
/// observation as the final user turn.
pub fn render_step_prompt(input: &StepInput) -> Vec<ChatMessage> {
    let mut messages = Vec::with_capacity(2 + input.history.len() * 2);

    let action_list = input
        .action_space
        .enabled()
        .iter()
        .map(|name| name.as_str())
        .collect::<Vec<_>>()
        .join(", ");
    let reflection_rule = if input.step_index == 0 {
        "Omit the [Reflection] section: this is the first step."
    } else {
        "Begin with a [Reflection] section assessing the previous expectation."
    };
    messages.push(ChatMessage::system(format!(
        "You are a GUI agent on the '{platform}' platform.\n\
         Task goal: {goal}\n\
         Allowed actions: {actions}.\n\
         At every step respond with labeled sections, in this order:\n\
         [Reflection] (except at step 0), [Summary], [Planning], [Tactical], \
         [Expectation], then [Action] holding exactly one function-call \
         envelope {{\"name\": ..., \"arguments\": {{...}}}}.\n\
         {rule}\n\
         Ground actions with coordinates on the [0, 1000] grid.",
        platform = input.action_space.platform(),
        goal = input.goal,
        actions = action_list,
        rule = reflection_rule,
    )));

    let first_history_index = input.step_index - input.history.len();
    for (offset, step) in input.history.iter().enumerate() {
        let t = first_history_index + offset;
        let view = match &step.observation {
            HistoryObservation::Text(text) => text.clone(),
            HistoryObservation::Scene(observation) => observation.describe(),
        };
        messages.push(ChatMessage::user(format!("Step {t} observation:\n{view}")));
        messages.push(ChatMessage::assistant(render_step_output(
            &step.reasoning,
            &step.action,
        )));
    }

    messages.push(ChatMessage::user(format!(
        "Step {t} observation:\n{view}",
        t = input.step_index,
        view = input.observation.describe(),
    )));
    messages
}
