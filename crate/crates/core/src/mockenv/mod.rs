//! Deterministic scripted GUI environment.
//!
//! An [`AppScript`] declares screens (element lists on the normalized
//! grid), transition rules (action patterns that move between screens or
//! mutate field state), and tasks (goals with success checkers and a
//! scripted oracle solution). A [`MockEnv`] executes actions against a
//! script: hit-testing happens directly in normalized space, the
//! top-most (last-listed) element containing the point wins, and
//! unmatched actions are no-ops that still advance the step counter.
//!
//! Transitions are deterministic by default. A seeded rule-failure mode
//! exists for robustness experiments and is off unless configured.
//!
//! Observations expose structured scene descriptors, never rendered
//! pixels, and carry no mark indices: agents have to ground actions via
//! coordinates.

pub mod scripts;

use crate::actions::{Action, ActionError, ActionName, Direction, TaskStatus};
use crate::geometry::{point_in_box, NormPoint, ScreenDims};
use crate::protocol::{Observation, Scene, SceneElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error("environment is finished; reset before stepping")]
    Finished,
    #[error("invalid app script: {0}")]
    Script(String),
    #[error("task '{0}' has no scripted oracle path")]
    NoOraclePath(String),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// One screen: identity, dimensions and its interactive elements.
/// Overlapping elements are legal; the last one listed is on top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub id: String,
    pub dims: ScreenDims,
    pub elements: Vec<SceneElement>,
}

/// An action pattern. Every specified component must match: the action
/// kind, the element hit by the action's primary point (single-point
/// ops and `point_input` use their point, `swipe` its start point), and
/// the scroll direction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trigger {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

impl Trigger {
    pub fn on_element(element: impl Into<String>) -> Self {
        Self { element: Some(element.into()), ..Self::default() }
    }

    pub fn on_action(action: ActionName) -> Self {
        Self { action: Some(action), ..Self::default() }
    }

    pub fn on_scroll(direction: Direction) -> Self {
        Self { action: Some(ActionName::Scroll), direction: Some(direction), ..Self::default() }
    }
}

/// A state mutation fired by a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mutation {
    /// Write a literal into an element's field.
    SetText { element: String, text: String },
    /// Write the action's text payload into an element's field.
    SetTextFromAction { element: String },
    /// Clear an element's field.
    ClearText { element: String },
}

/// One transition rule. The first rule on the current screen whose
/// trigger matches fires; later rules are not consulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRule {
    pub screen: String,
    pub trigger: Trigger,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_screen: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

/// A success predicate over environment state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Checker {
    FieldEquals { element: String, expected: String },
    FieldContains { element: String, needle: String },
    OnScreen { screen: String },
    NoteRecorded { needle: String },
    All { checks: Vec<Checker> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Middle,
    Hard,
}

impl Difficulty {
    pub fn as_str(&self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Middle => "middle",
            Difficulty::Hard => "hard",
        }
    }
}

impl std::fmt::Display for Difficulty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A task: a goal, a success checker, and the scripted oracle solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub difficulty: Difficulty,
    pub goal: String,
    pub checker: Checker,
    #[serde(default)]
    pub oracle: Vec<Action>,
}

/// A complete scripted application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppScript {
    pub name: String,
    pub initial_screen: String,
    pub screens: Vec<Screen>,
    pub rules: Vec<TransitionRule>,
    pub tasks: Vec<TaskSpec>,
}

impl std::str::FromStr for AppScript {
    type Err = EnvError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let script: AppScript =
            serde_json::from_str(text).map_err(|e| EnvError::Script(e.to_string()))?;
        script.validate()?;
        Ok(script)
    }
}

impl AppScript {
    pub fn from_path(path: &Path) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EnvError::Script(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn screen(&self, id: &str) -> Option<&Screen> {
        self.screens.iter().find(|s| s.id == id)
    }

    pub fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }

    fn element(&self, id: &str) -> Option<&SceneElement> {
        self.screens.iter().flat_map(|s| &s.elements).find(|e| e.id == id)
    }

    /// Structural validation: referenced screens and elements exist,
    /// screen and element ids are unique, every task has a checker over
    /// known names.
    pub fn validate(&self) -> Result<(), EnvError> {
        let mut screen_ids = Vec::new();
        let mut element_ids = Vec::new();
        for screen in &self.screens {
            if screen_ids.contains(&screen.id) {
                return Err(EnvError::Script(format!("duplicate screen id '{}'", screen.id)));
            }
            screen_ids.push(screen.id.clone());
            for element in &screen.elements {
                if element_ids.contains(&element.id) {
                    return Err(EnvError::Script(format!(
                        "duplicate element id '{}'",
                        element.id
                    )));
                }
                element_ids.push(element.id.clone());
            }
        }
        if self.screen(&self.initial_screen).is_none() {
            return Err(EnvError::Script(format!(
                "initial screen '{}' does not exist",
                self.initial_screen
            )));
        }
        for rule in &self.rules {
            if self.screen(&rule.screen).is_none() {
                return Err(EnvError::Script(format!(
                    "rule references unknown screen '{}'",
                    rule.screen
                )));
            }
            if let Some(next) = &rule.next_screen {
                if self.screen(next).is_none() {
                    return Err(EnvError::Script(format!(
                        "rule targets unknown screen '{next}'"
                    )));
                }
            }
            if let Some(element) = &rule.trigger.element {
                if self.element(element).is_none() {
                    return Err(EnvError::Script(format!(
                        "rule trigger references unknown element '{element}'"
                    )));
                }
            }
            if let Some(mutation) = &rule.mutation {
                let target = match mutation {
                    Mutation::SetText { element, .. }
                    | Mutation::SetTextFromAction { element }
                    | Mutation::ClearText { element } => element,
                };
                if self.element(target).is_none() {
                    return Err(EnvError::Script(format!(
                        "mutation references unknown element '{target}'"
                    )));
                }
            }
        }
        if self.tasks.is_empty() {
            return Err(EnvError::Script("script declares no tasks".to_string()));
        }
        for task in &self.tasks {
            self.validate_checker(&task.checker, &task.id)?;
        }
        Ok(())
    }

    fn validate_checker(&self, checker: &Checker, task: &str) -> Result<(), EnvError> {
        match checker {
            Checker::FieldEquals { element, .. } | Checker::FieldContains { element, .. } => {
                if self.element(element).is_none() {
                    return Err(EnvError::Script(format!(
                        "task '{task}' checker references unknown element '{element}'"
                    )));
                }
            }
            Checker::OnScreen { screen } => {
                if self.screen(screen).is_none() {
                    return Err(EnvError::Script(format!(
                        "task '{task}' checker references unknown screen '{screen}'"
                    )));
                }
            }
            Checker::NoteRecorded { .. } => {}
            Checker::All { checks } => {
                if checks.is_empty() {
                    return Err(EnvError::Script(format!(
                        "task '{task}' has an empty checker conjunction"
                    )));
                }
                for check in checks {
                    self.validate_checker(check, task)?;
                }
            }
        }
        Ok(())
    }
}

/// The mutable environment state. Serializing this and resuming yields
/// identical future behavior: there is no hidden state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub screen: String,
    pub fields: BTreeMap<String, String>,
    pub notes: Vec<String>,
    pub steps: u64,
    pub focus: Option<String>,
    pub done: bool,
    pub succeeded: Option<bool>,
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub done: bool,
    pub success: bool,
}

/// A running environment instance: one script, one task, one episode.
#[derive(Debug, Clone)]
pub struct MockEnv {
    script: AppScript,
    task_id: String,
    state: EnvState,
    rule_failure: Option<(f64, ChaCha8Rng)>,
}

impl MockEnv {
    /// Resets the script to its initial screen for the given task and
    /// returns the environment positioned at step 0.
    pub fn reset(script: AppScript, task_id: &str) -> Result<Self, EnvError> {
        script.validate()?;
        if script.task(task_id).is_none() {
            return Err(EnvError::UnknownTask(task_id.to_string()));
        }
        let state = EnvState {
            screen: script.initial_screen.clone(),
            fields: BTreeMap::new(),
            notes: Vec::new(),
            steps: 0,
            focus: None,
            done: false,
            succeeded: None,
        };
        Ok(Self { script, task_id: task_id.to_string(), state, rule_failure: None })
    }

    /// Enables seeded rule-level failures: each matched rule fails to
    /// fire with probability `p`. Off by default.
    pub fn with_rule_failures(mut self, p: f64, seed: u64) -> Self {
        self.rule_failure = Some((p.clamp(0.0, 1.0), ChaCha8Rng::seed_from_u64(seed)));
        self
    }

    /// Restores an environment from a state snapshot.
    pub fn resume(script: AppScript, task_id: &str, state: EnvState) -> Result<Self, EnvError> {
        script.validate()?;
        if script.task(task_id).is_none() {
            return Err(EnvError::UnknownTask(task_id.to_string()));
        }
        if script.screen(&state.screen).is_none() {
            return Err(EnvError::Script(format!(
                "snapshot references unknown screen '{}'",
                state.screen
            )));
        }
        Ok(Self { script, task_id: task_id.to_string(), state, rule_failure: None })
    }

    pub fn snapshot(&self) -> EnvState {
        self.state.clone()
    }

    pub fn script(&self) -> &AppScript {
        &self.script
    }

    pub fn task(&self) -> &TaskSpec {
        self.script.task(&self.task_id).expect("task validated at reset")
    }

    pub fn goal(&self) -> &str {
        &self.task().goal
    }

    pub fn is_done(&self) -> bool {
        self.state.done
    }

    fn current_screen(&self) -> &Screen {
        self.script.screen(&self.state.screen).expect("current screen validated")
    }

    /// The effective text of an element: mutated field content when
    /// present, the script's static text otherwise.
    pub fn field_value(&self, element_id: &str) -> Option<String> {
        if let Some(value) = self.state.fields.get(element_id) {
            return Some(value.clone());
        }
        self.script.element(element_id).map(|e| e.text.clone())
    }

    /// The scene descriptor of the current screen, with live field text.
    pub fn observation(&self) -> Observation {
        let screen = self.current_screen();
        let elements = screen
            .elements
            .iter()
            .map(|element| {
                let mut element = element.clone();
                if let Some(value) = self.state.fields.get(&element.id) {
                    element.text = value.clone();
                }
                element
            })
            .collect();
        Observation {
            id: format!("obs-{:04}", self.state.steps),
            dims: screen.dims,
            scene: Scene::Elements(elements),
            timestamp: self.state.steps,
        }
    }

    /// Top-most element of the current screen containing the point.
    fn hit_test(&self, point: NormPoint) -> Option<&SceneElement> {
        self.current_screen()
            .elements
            .iter()
            .rev()
            .find(|element| point_in_box(point, element.bounds))
    }

    fn checker_passes(&self, checker: &Checker) -> bool {
        match checker {
            Checker::FieldEquals { element, expected } => {
                self.field_value(element).as_deref() == Some(expected.as_str())
            }
            Checker::FieldContains { element, needle } => self
                .field_value(element)
                .is_some_and(|value| value.contains(needle)),
            Checker::OnScreen { screen } => &self.state.screen == screen,
            Checker::NoteRecorded { needle } => {
                self.state.notes.iter().any(|note| note.contains(needle))
            }
            Checker::All { checks } => checks.iter().all(|c| self.checker_passes(c)),
        }
    }

    /// Evaluates the task checker against the current state.
    pub fn evaluate(&self) -> bool {
        self.checker_passes(&self.task().checker.clone())
    }

    fn write_field(&mut self, element_id: &str, text: &str) {
        self.state.fields.insert(element_id.to_string(), text.to_string());
    }

    /// Executes one action. Point actions hit-test the current screen,
    /// built-in text-entry behavior applies before rules, the first
    /// matching rule fires, and everything else is a counted no-op.
    pub fn step(&mut self, action: &Action) -> Result<StepOutcome, EnvError> {
        if self.state.done {
            return Err(EnvError::Finished);
        }
        self.state.steps += 1;

        match action {
            Action::SetTaskStatus { status } => {
                match status {
                    TaskStatus::Complete => {
                        self.state.done = true;
                        self.state.succeeded = Some(self.evaluate());
                    }
                    TaskStatus::Infeasible => {
                        self.state.done = true;
                        self.state.succeeded = Some(false);
                    }
                    TaskStatus::Continue => {}
                }
                return Ok(self.outcome());
            }
            Action::Remember { content } => {
                if let Some(note) = content {
                    self.state.notes.push(note.clone());
                }
                return Ok(self.outcome());
            }
            _ => {}
        }

        let hit_point = match action {
            Action::Tap { point }
            | Action::Click { point }
            | Action::Hover { point }
            | Action::Select { point }
            | Action::PointInput { point, .. } => Some(*point),
            Action::Swipe { from, .. } => Some(*from),
            _ => None,
        };
        let hit_id = hit_point.and_then(|p| self.hit_test(p)).map(|e| e.id.clone());

        // Built-in text entry, independent of rules.
        match action {
            Action::Input { text } => {
                if let Some(focus) = self.state.focus.clone() {
                    if self.script.element(&focus).is_some_and(|e| e.editable) {
                        self.write_field(&focus, text);
                    }
                }
            }
            Action::PointInput { text, .. } => {
                if let Some(id) = &hit_id {
                    if self.script.element(id).is_some_and(|e| e.editable) {
                        self.write_field(id, text);
                        self.state.focus = Some(id.clone());
                    }
                }
            }
            Action::Tap { .. } | Action::Click { .. } | Action::Select { .. } => {
                if let Some(id) = &hit_id {
                    if self.script.element(id).is_some_and(|e| e.editable) {
                        self.state.focus = Some(id.clone());
                    }
                }
            }
            _ => {}
        }

        let direction = match action {
            Action::Scroll { direction } => Some(*direction),
            _ => None,
        };
        let matched = self
            .script
            .rules
            .iter()
            .position(|rule| {
                rule.screen == self.state.screen
                    && rule.trigger.action.is_none_or(|a| a == action.name())
                    && rule
                        .trigger
                        .element
                        .as_ref()
                        .is_none_or(|e| hit_id.as_deref() == Some(e.as_str()))
                    && rule.trigger.direction.is_none_or(|d| Some(d) == direction)
            })
            .map(|index| self.script.rules[index].clone());

        if let Some(rule) = matched {
            let suppressed = match &mut self.rule_failure {
                Some((p, rng)) => rng.random::<f64>() < *p,
                None => false,
            };
            if !suppressed {
                match &rule.mutation {
                    Some(Mutation::SetText { element, text }) => {
                        let (element, text) = (element.clone(), text.clone());
                        self.write_field(&element, &text);
                    }
                    Some(Mutation::SetTextFromAction { element }) => {
                        let payload = match action {
                            Action::Input { text } | Action::PointInput { text, .. } => {
                                Some(text.clone())
                            }
                            Action::Remember { content } => content.clone(),
                            _ => None,
                        };
                        if let Some(text) = payload {
                            let element = element.clone();
                            self.write_field(&element, &text);
                        }
                    }
                    Some(Mutation::ClearText { element }) => {
                        let element = element.clone();
                        self.state.fields.remove(&element);
                    }
                    None => {}
                }
                if let Some(next) = &rule.next_screen {
                    self.state.screen = next.clone();
                    self.state.focus = None;
                }
            }
        }

        Ok(self.outcome())
    }

    fn outcome(&self) -> StepOutcome {
        StepOutcome {
            observation: self.observation(),
            done: self.state.done,
            success: self.state.succeeded.unwrap_or(false),
        }
    }
}

/// The scripted ground-truth action sequence for a task.
pub fn oracle_agent(script: &AppScript, task_id: &str) -> Result<Vec<Action>, EnvError> {
    let task = script
        .task(task_id)
        .ok_or_else(|| EnvError::UnknownTask(task_id.to_string()))?;
    if task.oracle.is_empty() {
        return Err(EnvError::NoOraclePath(task_id.to_string()));
    }
    Ok(task.oracle.clone())
}
