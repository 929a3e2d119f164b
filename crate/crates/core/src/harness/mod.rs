//! Evaluation harness: grounding accuracy and episode success rate.
//!
//! Agents implement [`AgentBackend`]: a pure mapping from a
//! [`StepInput`] to raw model-output text. The harness parses that text
//! through the protocol grammar, drives the mock environment, and
//! aggregates fixed-shape reports: platform x element-type grounding
//! cells plus average, and easy/middle/hard/overall success columns.

mod report;

pub use report::{GroundingCell, GroundingReport, PlatformCells, RateCell, SuccessReport};

use crate::actions::{Action, ActionName, ActionSpaceConfig, Direction, TaskStatus};
use crate::chat::{ChatClient, ClientError, DecodeParams};
use crate::geometry::{NormBox, NormPoint, ParseMode, ScreenDims};
use crate::mockenv::{Difficulty, MockEnv};
use crate::protocol::{
    build_step_input, new_episode, parse_step_output, record_step, render_step_output,
    render_step_prompt, EpisodeStatus, Observation, ReasoningRecord, Scene, StepInput,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::BufRead;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("agent backend failure: {0}")]
    Backend(String),
    #[error("no scripted action for step {0}")]
    ScriptExhausted(usize),
    #[error("empty grounding suite")]
    EmptySuite,
    #[error("suite io: {0}")]
    Io(String),
    #[error(transparent)]
    Env(#[from] crate::mockenv::EnvError),
    #[error(transparent)]
    Protocol(#[from] crate::protocol::ProtocolError),
}

impl From<ClientError> for HarnessError {
    fn from(err: ClientError) -> Self {
        HarnessError::Backend(err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Platform {
    Mobile,
    Desktop,
    Web,
}

impl Platform {
    pub fn as_str(&self) -> &'static str {
        match self {
            Platform::Mobile => "mobile",
            Platform::Desktop => "desktop",
            Platform::Web => "web",
        }
    }

    pub fn action_space(&self) -> ActionSpaceConfig {
        match self {
            Platform::Mobile => ActionSpaceConfig::mobile(),
            Platform::Desktop => ActionSpaceConfig::desktop(),
            Platform::Web => ActionSpaceConfig::web(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementType {
    Text,
    Icon,
}

/// One grounding case: a scene, an instruction naming a target, and the
/// gold box the predicted point must fall into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingCase {
    pub platform: Platform,
    pub element_type: ElementType,
    pub dims: ScreenDims,
    pub scene: Scene,
    pub instruction: String,
    pub gold: NormBox,
}

/// An inference backend: maps a step input to raw output text. Pure with
/// respect to episode state — implementations may not keep out-of-band
/// memory between calls.
pub trait AgentBackend {
    fn name(&self) -> &str;
    fn act(&self, input: &StepInput) -> Result<String, HarnessError>;
}

/// Backend over any chat-completion client.
pub struct ChatClientAgent<'a> {
    client: &'a dyn ChatClient,
    params: DecodeParams,
}

impl<'a> ChatClientAgent<'a> {
    pub fn new(client: &'a dyn ChatClient) -> Self {
        Self { client, params: DecodeParams::default() }
    }
}

impl AgentBackend for ChatClientAgent<'_> {
    fn name(&self) -> &str {
        "chat-client"
    }

    fn act(&self, input: &StepInput) -> Result<String, HarnessError> {
        Ok(self.client.complete(&render_step_prompt(input), &self.params)?)
    }
}

fn scripted_record(input: &StepInput, action: &Action) -> ReasoningRecord {
    let t = input.step_index;
    ReasoningRecord {
        reflection: (t > 0).then(|| {
            match input.history.last() {
                Some(prev) => format!(
                    "The previous expectation held: {}",
                    prev.reasoning.expectation
                ),
                None => "The previous action behaved as expected.".to_string(),
            }
        }),
        strategic_summary: format!("Goal: {}. {} steps completed.", input.goal, t),
        strategic_planning: format!("Follow the known solution; next is {}.", action.name()),
        tactical: format!("Execute {} as planned.", action.name()),
        expectation: format!(
            "After {}, the interface should move closer to: {}.",
            action.name(),
            input.goal
        ),
    }
}

/// Replays a fixed action sequence, indexed by the input's step index.
pub struct ScriptedAgent {
    actions: Vec<Action>,
}

impl ScriptedAgent {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions }
    }
}

impl AgentBackend for ScriptedAgent {
    fn name(&self) -> &str {
        "oracle"
    }

    fn act(&self, input: &StepInput) -> Result<String, HarnessError> {
        let action = self
            .actions
            .get(input.step_index)
            .ok_or(HarnessError::ScriptExhausted(input.step_index))?;
        Ok(render_step_output(&scripted_record(input, action), action))
    }
}

/// Answers grounding cases by looking up the quoted label from the
/// instruction in the scene and tapping the element's center.
pub struct GroundingOracleAgent;

fn quoted_label(text: &str) -> Option<&str> {
    let open = text.find('"')?;
    let rest = &text[open + 1..];
    let close = rest.find('"')?;
    Some(&rest[..close])
}

impl AgentBackend for GroundingOracleAgent {
    fn name(&self) -> &str {
        "grounding-oracle"
    }

    fn act(&self, input: &StepInput) -> Result<String, HarnessError> {
        let point = quoted_label(&input.goal)
            .and_then(|label| match &input.observation.scene {
                Scene::Elements(elements) => elements
                    .iter()
                    .find(|e| e.label == label)
                    .map(|e| e.bounds.center()),
                Scene::Text(_) => None,
            })
            .unwrap_or_else(|| NormPoint::new(0, 0).expect("origin is valid"));
        let action = if input.action_space.contains(ActionName::Tap) {
            Action::Tap { point }
        } else {
            Action::Click { point }
        };
        Ok(render_step_output(&scripted_record(input, &action), &action))
    }
}

/// Always answers with the same point. Useful as a calibration floor.
pub struct ConstantPointAgent {
    pub point: NormPoint,
}

impl AgentBackend for ConstantPointAgent {
    fn name(&self) -> &str {
        "constant-point"
    }

    fn act(&self, input: &StepInput) -> Result<String, HarnessError> {
        let action = if input.action_space.contains(ActionName::Tap) {
            Action::Tap { point: self.point }
        } else {
            Action::Click { point: self.point }
        };
        Ok(render_step_output(&scripted_record(input, &action), &action))
    }
}

/// Produces output that never parses. Exercises miss accounting and
/// parse-failure policies.
pub struct MalformedAgent;

impl AgentBackend for MalformedAgent {
    fn name(&self) -> &str {
        "malformed"
    }

    fn act(&self, _input: &StepInput) -> Result<String, HarnessError> {
        Ok("perhaps clicking somewhere would help?".to_string())
    }
}

/// Seeded random agent: a pure function of (seed, step input), so per
/// the backend contract it keeps no memory between calls.
pub struct RandomAgent {
    pub seed: u64,
}

impl RandomAgent {
    fn rng_for(&self, input: &StepInput) -> ChaCha8Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(input.goal.as_bytes());
        hasher.update(input.step_index.to_le_bytes());
        hasher.update(input.observation.id.as_bytes());
        let digest = hasher.finalize();
        let mut seed_bytes = [0u8; 8];
        seed_bytes.copy_from_slice(&digest[..8]);
        ChaCha8Rng::seed_from_u64(u64::from_le_bytes(seed_bytes))
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> NormPoint {
    NormPoint::new(rng.random_range(0..=1000), rng.random_range(0..=1000))
        .expect("sampled range is valid")
}

impl AgentBackend for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&self, input: &StepInput) -> Result<String, HarnessError> {
        let mut rng = self.rng_for(input);
        let names: Vec<ActionName> = input.action_space.enabled().iter().copied().collect();
        let name = names[rng.random_range(0..names.len())];
        let action = match name {
            ActionName::Tap => Action::Tap { point: random_point(&mut rng) },
            ActionName::Click => Action::Click { point: random_point(&mut rng) },
            ActionName::Hover => Action::Hover { point: random_point(&mut rng) },
            ActionName::Select => Action::Select { point: random_point(&mut rng) },
            ActionName::Swipe => Action::Swipe {
                from: random_point(&mut rng),
                to: random_point(&mut rng),
            },
            ActionName::SelectText => Action::SelectText {
                start: random_point(&mut rng),
                end: random_point(&mut rng),
            },
            ActionName::Scroll => Action::Scroll {
                direction: Direction::ALL[rng.random_range(0..4)],
            },
            ActionName::Input => Action::Input { text: "random text".into() },
            ActionName::PointInput => Action::PointInput {
                point: random_point(&mut rng),
                text: "random text".into(),
            },
            ActionName::Remember => Action::Remember { content: Some("noted".into()) },
            ActionName::Enter => Action::Enter,
            ActionName::Home => Action::Home,
            ActionName::Back => Action::Back,
            ActionName::SetTaskStatus => Action::SetTaskStatus {
                status: [TaskStatus::Continue, TaskStatus::Complete, TaskStatus::Infeasible]
                    [rng.random_range(0..3)],
            },
        };
        Ok(render_step_output(&scripted_record(input, &action), &action))
    }
}

/// Extracts the predicted point from grounding output.
///
/// Accepted answer forms, in order: a full step output whose action is a
/// single point `tap`/`click`; a bare function-call envelope of the
/// same; a bare point JSON; a bare box JSON, reduced to its center.
/// Anything else is a miss.
pub fn extract_grounding_prediction(output: &str) -> Option<NormPoint> {
    let point_of = |action: &Action| match action {
        Action::Tap { point } | Action::Click { point } => Some(*point),
        _ => None,
    };
    if output.contains("[Action]") {
        // Step index 1 tolerates outputs with or without a reflection in
        // lenient mode? No: reflection presence is checked per index, so
        // try both step shapes.
        for t in [0usize, 1] {
            if let Ok((_, action)) = parse_step_output(output, t, ParseMode::Lenient) {
                return point_of(&action);
            }
        }
        return None;
    }
    let trimmed = output.trim();
    if let Ok(action) = crate::actions::parse_action(trimmed) {
        return point_of(&action);
    }
    if let Ok(point) = crate::geometry::parse_point(trimmed, ParseMode::Lenient) {
        return Some(point);
    }
    if let Ok(container) = crate::geometry::parse_box(trimmed, ParseMode::Lenient) {
        return Some(container.center());
    }
    None
}

/// Runs a grounding evaluation: one single-turn episode per case, hit
/// iff the predicted point lands inside the gold box. Output that fails
/// to parse counts as a miss and is logged.
pub fn eval_grounding(
    cases: &[GroundingCase],
    agent: &dyn AgentBackend,
) -> Result<GroundingReport, HarnessError> {
    if cases.is_empty() {
        return Err(HarnessError::EmptySuite);
    }
    let mut report = GroundingReport::default();
    for (index, case) in cases.iter().enumerate() {
        let input = StepInput {
            goal: case.instruction.clone(),
            step_index: 0,
            action_space: case.platform.action_space(),
            observation: Observation {
                id: format!("case-{index:04}"),
                dims: case.dims,
                scene: case.scene.clone(),
                timestamp: 0,
            },
            history: Vec::new(),
        };
        let (hit, parse_miss) = match agent.act(&input) {
            Ok(output) => match extract_grounding_prediction(&output) {
                Some(point) => (crate::geometry::point_in_box(point, case.gold), false),
                None => {
                    log::warn!("case {index}: unparseable grounding answer");
                    (false, true)
                }
            },
            Err(err) => {
                log::warn!("case {index}: backend error: {err}");
                (false, true)
            }
        };
        report.tally(case.platform, case.element_type, hit, parse_miss);
    }
    Ok(report)
}

/// What to do when a step's model output cannot be parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsePolicy {
    /// End the episode immediately and count it as a failure.
    #[default]
    AbortAsFailure,
    /// Log, consume one step of budget, and continue.
    SkipStep,
}

/// Harness-level terminal status of an episode run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    Complete,
    Infeasible,
    Exhausted,
    Aborted,
}

impl From<EpisodeStatus> for TerminalStatus {
    fn from(status: EpisodeStatus) -> Self {
        match status {
            EpisodeStatus::Complete => TerminalStatus::Complete,
            EpisodeStatus::Infeasible => TerminalStatus::Infeasible,
            _ => TerminalStatus::Exhausted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub task_id: String,
    pub difficulty: Difficulty,
    pub success: bool,
    pub steps_used: usize,
    pub terminal: TerminalStatus,
}

/// Runs one episode against a fresh environment under the mobile
/// action-space preset (the bundled apps are touch-styled).
pub fn run_episode(
    env: MockEnv,
    agent: &dyn AgentBackend,
    budget: usize,
    window: usize,
    policy: ParsePolicy,
) -> Result<EpisodeResult, HarnessError> {
    run_episode_with_space(env, agent, budget, window, policy, ActionSpaceConfig::mobile())
}

/// Runs one episode against a fresh environment with an explicit action
/// space.
///
/// Per step: build the input, ask the agent, parse reasoning and action,
/// step the environment, record into the episode state. The loop ends on
/// a terminal action, on budget exhaustion, or per `policy` when output
/// does not parse or fails episode validation (e.g. an action outside
/// the configured space). Success comes from the environment's task
/// checker.
pub fn run_episode_with_space(
    mut env: MockEnv,
    agent: &dyn AgentBackend,
    budget: usize,
    window: usize,
    policy: ParsePolicy,
    space: ActionSpaceConfig,
) -> Result<EpisodeResult, HarnessError> {
    let task = env.task().clone();
    let mut state =
        new_episode(env.goal(), window.max(1), space)?.with_max_steps(budget.max(1));
    let mut observation = env.observation();
    let mut attempts = 0usize;
    let mut success = false;
    let mut terminal: Option<TerminalStatus> = None;

    while attempts < budget && !state.status().is_terminal() {
        attempts += 1;
        let input = build_step_input(&state, observation.clone())?;
        let parsed = match agent.act(&input) {
            Ok(output) => {
                parse_step_output(&output, input.step_index, ParseMode::Lenient).map_err(|e| e.to_string())
            }
            Err(err) => Err(err.to_string()),
        };
        // An action outside the configured space is as unusable as an
        // unparseable one; neither reaches the environment.
        let parsed = parsed.and_then(|(reasoning, action)| {
            crate::actions::validate_action(&action, state.config())
                .map(|()| (reasoning, action))
                .map_err(|e| e.to_string())
        });
        let (reasoning, action) = match parsed {
            Ok(pair) => pair,
            Err(reason) => match policy {
                ParsePolicy::AbortAsFailure => {
                    log::warn!("{}: aborting episode: {reason}", task.id);
                    terminal = Some(TerminalStatus::Aborted);
                    break;
                }
                ParsePolicy::SkipStep => {
                    log::warn!("{}: skipping unparseable step: {reason}", task.id);
                    continue;
                }
            },
        };
        let outcome = env.step(&action)?;
        match record_step(&mut state, observation, reasoning, action) {
            Ok(_) => {}
            Err(err) => match policy {
                ParsePolicy::AbortAsFailure => {
                    log::warn!("{}: aborting episode: {err}", task.id);
                    terminal = Some(TerminalStatus::Aborted);
                    break;
                }
                ParsePolicy::SkipStep => {
                    log::warn!("{}: step rejected by protocol: {err}", task.id);
                    if outcome.done {
                        success = outcome.success;
                        terminal = Some(TerminalStatus::Aborted);
                        break;
                    }
                    observation = outcome.observation;
                    continue;
                }
            },
        }
        observation = outcome.observation;
        if outcome.done {
            success = outcome.success;
            terminal = Some(TerminalStatus::from(state.status()));
            break;
        }
    }

    Ok(EpisodeResult {
        task_id: task.id.clone(),
        difficulty: task.difficulty,
        success,
        steps_used: attempts,
        terminal: terminal.unwrap_or(TerminalStatus::Exhausted),
    })
}

/// Runs every task of every bundled app with the oracle's scripted path
/// replayed through the full agent-protocol loop.
pub fn run_bundled_suite(
    agent_for_task: impl Fn(&crate::mockenv::AppScript, &crate::mockenv::TaskSpec) -> Box<dyn AgentBackend>,
    budget: usize,
    window: usize,
    policy: ParsePolicy,
) -> Result<Vec<EpisodeResult>, HarnessError> {
    let mut results = Vec::new();
    for script in crate::mockenv::scripts::bundled_apps() {
        for task in script.tasks.clone() {
            let env = MockEnv::reset(script.clone(), &task.id)?;
            let agent = agent_for_task(&script, &task);
            results.push(run_episode(env, agent.as_ref(), budget, window, policy)?);
        }
    }
    Ok(results)
}

/// Aggregates episode results into per-difficulty and overall rates.
/// Groups with no results are absent, not zero.
pub fn success_rate(results: &[EpisodeResult]) -> SuccessReport {
    let mut report = SuccessReport::default();
    for result in results {
        report.tally(result.difficulty, result.success);
    }
    report
}

/// Reads a grounding suite from newline-delimited JSON.
pub fn read_grounding_suite<R: BufRead>(reader: R) -> Result<Vec<GroundingCase>, HarnessError> {
    let mut cases = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| HarnessError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let case: GroundingCase = serde_json::from_str(&line)
            .map_err(|e| HarnessError::Io(format!("line {}: {e}", index + 1)))?;
        cases.push(case);
    }
    Ok(cases)
}

/// Writes a grounding suite as newline-delimited JSON.
pub fn write_grounding_suite<W: std::io::Write>(
    mut writer: W,
    cases: &[GroundingCase],
) -> std::io::Result<()> {
    for case in cases {
        serde_json::to_writer(&mut writer, case)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bundled_grounding_suite, corner_point};
    use crate::mockenv::{oracle_agent, scripts};

    #[test]
    fn grounding_oracle_is_perfect_on_bundled_suite() {
        let suite = bundled_grounding_suite();
        let report = eval_grounding(&suite, &GroundingOracleAgent).unwrap();
        assert_eq!(report.average(), Some(1.0));
        for (platform, element_type, cell) in report.cells() {
            assert_eq!(
                cell.accuracy(),
                Some(1.0),
                "{platform:?}/{element_type:?} below 100%"
            );
        }
        assert_eq!(report.parse_misses, 0);
    }

    #[test]
    fn constant_corner_accuracy_equals_direct_count() {
        let suite = bundled_grounding_suite();
        let agent = ConstantPointAgent { point: corner_point() };
        let report = eval_grounding(&suite, &agent).unwrap();
        let expected = suite
            .iter()
            .filter(|case| crate::geometry::point_in_box(corner_point(), case.gold))
            .count();
        assert_eq!(report.total().hits, expected);
        assert!(expected > 0, "suite should have some corner-anchored targets");
        assert!(report.average().unwrap() < 1.0);
    }

    #[test]
    fn malformed_agent_scores_zero_with_logged_misses() {
        let suite = bundled_grounding_suite();
        let report = eval_grounding(&suite, &MalformedAgent).unwrap();
        assert_eq!(report.total().hits, 0);
        assert_eq!(report.parse_misses, suite.len());
    }

    #[test]
    fn empty_suite_rejected() {
        assert!(matches!(
            eval_grounding(&[], &GroundingOracleAgent).unwrap_err(),
            HarnessError::EmptySuite
        ));
    }

    #[test]
    fn quoted_label_extraction() {
        assert_eq!(quoted_label("Locate \"Save\" now"), Some("Save"));
        assert_eq!(quoted_label("no quotes"), None);
    }

    #[test]
    fn oracle_succeeds_on_create_contact_within_script_length() {
        let script = scripts::contacts_app();
        let actions = oracle_agent(&script, "create_contact").unwrap();
        let env = MockEnv::reset(script, "create_contact").unwrap();
        let agent = ScriptedAgent::new(actions.clone());
        let result = run_episode(env, &agent, 30, 2, ParsePolicy::AbortAsFailure).unwrap();
        assert!(result.success);
        assert_eq!(result.terminal, TerminalStatus::Complete);
        assert_eq!(result.steps_used, actions.len());
        assert!(result.steps_used <= 30);
    }

    #[test]
    fn random_agent_terminates_without_raising() {
        let script = scripts::contacts_app();
        let env = MockEnv::reset(script, "create_contact").unwrap();
        let result =
            run_episode(env, &RandomAgent { seed: 3 }, 10, 2, ParsePolicy::AbortAsFailure)
                .unwrap();
        assert!(result.steps_used <= 10);
        assert!(matches!(
            result.terminal,
            TerminalStatus::Exhausted | TerminalStatus::Complete | TerminalStatus::Infeasible
        ));
    }

    #[test]
    fn zero_budget_is_immediately_exhausted() {
        let script = scripts::contacts_app();
        let env = MockEnv::reset(script, "open_contacts").unwrap();
        let result =
            run_episode(env, &GroundingOracleAgent, 0, 2, ParsePolicy::AbortAsFailure).unwrap();
        assert_eq!(result.steps_used, 0);
        assert_eq!(result.terminal, TerminalStatus::Exhausted);
        assert!(!result.success);
    }

    #[test]
    fn abort_policy_fails_episode_on_malformed_output() {
        let script = scripts::contacts_app();
        let env = MockEnv::reset(script, "open_contacts").unwrap();
        let result =
            run_episode(env, &MalformedAgent, 10, 2, ParsePolicy::AbortAsFailure).unwrap();
        assert!(!result.success);
        assert_eq!(result.terminal, TerminalStatus::Aborted);
        assert_eq!(result.steps_used, 1);
    }

    #[test]
    fn skip_policy_consumes_budget_instead_of_aborting() {
        let script = scripts::contacts_app();
        let env = MockEnv::reset(script, "open_contacts").unwrap();
        let result = run_episode(env, &MalformedAgent, 5, 2, ParsePolicy::SkipStep).unwrap();
        assert!(!result.success);
        assert_eq!(result.terminal, TerminalStatus::Exhausted);
        assert_eq!(result.steps_used, 5);
    }

    #[test]
    fn bundled_suite_oracle_beats_random() {
        let oracle_results = run_bundled_suite(
            |script, task| {
                Box::new(ScriptedAgent::new(
                    oracle_agent(script, &task.id).expect("bundled tasks scripted"),
                ))
            },
            30,
            2,
            ParsePolicy::AbortAsFailure,
        )
        .unwrap();
        let oracle_rates = success_rate(&oracle_results);
        assert_eq!(oracle_rates.overall.rate(), Some(1.0));

        let random_results = run_bundled_suite(
            |_, _| Box::new(RandomAgent { seed: 17 }),
            10,
            2,
            ParsePolicy::AbortAsFailure,
        )
        .unwrap();
        let random_rates = success_rate(&random_results);
        assert!(
            random_rates.overall.rate().unwrap() < oracle_rates.overall.rate().unwrap(),
            "sanity gap violated: random {:?} vs oracle {:?}",
            random_rates.overall,
            oracle_rates.overall
        );
    }

    #[test]
    fn extraction_accepts_bare_forms() {
        assert_eq!(
            extract_grounding_prediction(r#"{"name":"tap","arguments":{"point":{"x":5,"y":6}}}"#),
            Some(NormPoint::new(5, 6).unwrap())
        );
        assert_eq!(
            extract_grounding_prediction(r#"{"x": 10, "y": 20}"#),
            Some(NormPoint::new(10, 20).unwrap())
        );
        // Boxes reduce to their center.
        assert_eq!(
            extract_grounding_prediction(r#"{"x1": 0, "y1": 0, "x2": 10, "y2": 20}"#),
            Some(NormPoint::new(5, 10).unwrap())
        );
        // A swipe is not a grounding answer.
        assert_eq!(
            extract_grounding_prediction(
                r#"{"name":"swipe","arguments":{"from":{"x":1,"y":1},"to":{"x":2,"y":2}}}"#
            ),
            None
        );
        assert_eq!(extract_grounding_prediction("not an answer"), None);
    }

    #[test]
    fn oracle_under_restricted_space_surfaces_validation_failure() {
        // reply_to_message's oracle uses `enter`; removing it from the
        // space must abort the episode, not silently execute.
        let script = scripts::messaging_app();
        let actions = oracle_agent(&script, "reply_to_message").unwrap();
        let env = MockEnv::reset(script, "reply_to_message").unwrap();
        let space = crate::actions::ActionSpaceConfig::new(
            [
                crate::actions::ActionName::Tap,
                crate::actions::ActionName::PointInput,
                crate::actions::ActionName::SetTaskStatus,
            ],
            "restricted",
        )
        .unwrap();
        let result = run_episode_with_space(
            env,
            &ScriptedAgent::new(actions),
            30,
            2,
            ParsePolicy::AbortAsFailure,
            space,
        )
        .unwrap();
        assert!(!result.success);
        assert_eq!(result.terminal, TerminalStatus::Aborted);
    }

    #[test]
    fn grounding_report_is_reproducible() {
        let suite = bundled_grounding_suite();
        let a = eval_grounding(&suite, &GroundingOracleAgent).unwrap();
        let b = eval_grounding(&suite, &GroundingOracleAgent).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn grounding_suite_ndjson_round_trip() {
        let suite = bundled_grounding_suite();
        let mut bytes = Vec::new();
        write_grounding_suite(&mut bytes, &suite[..10]).unwrap();
        let back = read_grounding_suite(bytes.as_slice()).unwrap();
        assert_eq!(back, suite[..10]);
    }
}
