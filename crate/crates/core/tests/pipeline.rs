//! End-to-end pipeline tests across module boundaries: trajectories
//! recorded from the environment flow through synthesis, the emitted
//! corpus validates and survives file round-trips, and episode traces
//! written by the harness re-read as step logs.

use guiact::actions::{ActionSpaceConfig, UnificationTable};
use guiact::chat::{ChatMessage, StubChatClient};
use guiact::fixtures::{bundled_trajectories, read_trajectories, write_trajectories};
use guiact::geometry::ParseMode;
use guiact::protocol::{episode_log, parse_step_output, read_step_log, write_step_log};
use guiact::synthesis::{
    read_corpus, run_synthesis, validate_corpus, write_corpus, SynthesisManifest, TaskKind,
    TemplateSet, TrajectoryPipeline,
};

#[test]
fn five_step_trajectory_respects_window_in_samples() {
    // create_contact_full has a 6-step oracle; with window 2 the sample
    // at t = 4 must hold exactly two history exchanges.
    let trajectories = bundled_trajectories();
    let traj = trajectories
        .iter()
        .find(|t| t.id == "contacts-create_contact_full-pristine")
        .expect("bundled trajectory present");
    assert!(traj.steps.len() >= 5);

    let stub = StubChatClient::templated();
    let table = UnificationTable::builtin();
    let templates = TemplateSet::builtin();
    let mut pipeline = TrajectoryPipeline::new(
        traj,
        &table,
        &stub,
        &templates,
        2,
        ActionSpaceConfig::full(),
    )
    .unwrap();

    let sample = pipeline.step_sample(4).unwrap();
    // system + 2 history (user, assistant) pairs + current user + assistant.
    assert_eq!(sample.messages.len(), 2 + 2 * 2 + 1);
    let history_users: Vec<&ChatMessage> = sample
        .messages
        .iter()
        .filter(|m| m.content.starts_with("Step 2 observation:") || m.content.starts_with("Step 3 observation:"))
        .collect();
    assert_eq!(history_users.len(), 2, "history must be steps 2 and 3 at t = 4");
}

#[test]
fn synthesis_from_trajectory_file_round_trips() {
    let trajectories = bundled_trajectories();
    let mut bytes = Vec::new();
    write_trajectories(&mut bytes, &trajectories[..4]).unwrap();
    let reread = read_trajectories(bytes.as_slice()).unwrap();

    let stub = StubChatClient::templated();
    let manifest = SynthesisManifest::default();
    let report = run_synthesis(
        &manifest,
        &reread,
        &stub,
        &UnificationTable::builtin(),
        &TemplateSet::builtin(),
    )
    .unwrap();
    assert!(report.skipped.is_empty());

    let mut corpus_bytes = Vec::new();
    write_corpus(&mut corpus_bytes, &report.samples).unwrap();
    let corpus = read_corpus(corpus_bytes.as_slice()).unwrap();
    assert_eq!(corpus, report.samples);
    assert!(validate_corpus(&corpus).is_clean());

    // Every stage-2 assistant turn re-parses at its recorded step index.
    for sample in corpus.iter().filter(|s| s.task_kind == TaskKind::Stage2Step) {
        let step = sample.source.step.unwrap();
        parse_step_output(sample.assistant_content().unwrap(), step, ParseMode::Strict)
            .unwrap_or_else(|e| panic!("{}#{step}: {e}", sample.source.trajectory));
    }
}

#[test]
fn episode_trace_writes_and_reads_as_step_log() {
    use guiact::harness::{run_episode, ParsePolicy, ScriptedAgent};
    use guiact::mockenv::{oracle_agent, scripts, MockEnv};
    use guiact::protocol::{build_step_input, new_episode, record_step};

    // Drive an episode manually so the protocol state is observable.
    let script = scripts::settings_app();
    let actions = oracle_agent(&script, "note_build_number").unwrap();
    let mut env = MockEnv::reset(script.clone(), "note_build_number").unwrap();
    let agent = ScriptedAgent::new(actions.clone());
    let mut state =
        new_episode(env.goal(), 2, ActionSpaceConfig::mobile()).unwrap();
    let mut observation = env.observation();
    loop {
        let input = build_step_input(&state, observation.clone()).unwrap();
        let output = guiact::harness::AgentBackend::act(&agent, &input).unwrap();
        let (reasoning, action) =
            parse_step_output(&output, input.step_index, ParseMode::Lenient).unwrap();
        let outcome = env.step(&action).unwrap();
        record_step(&mut state, observation, reasoning, action).unwrap();
        observation = outcome.observation;
        if outcome.done {
            assert!(outcome.success);
            break;
        }
    }

    let entries = episode_log(&state);
    assert_eq!(entries.len(), actions.len());
    let mut bytes = Vec::new();
    write_step_log(&mut bytes, &entries).unwrap();
    let reread = read_step_log(bytes.as_slice()).unwrap();
    assert_eq!(reread, entries);
    assert_eq!(
        reread.last().unwrap().status_after,
        guiact::protocol::EpisodeStatus::Complete
    );

    // The packaged runner reaches the same outcome.
    let env = MockEnv::reset(script, "note_build_number").unwrap();
    let result = run_episode(
        env,
        &ScriptedAgent::new(actions),
        30,
        2,
        ParsePolicy::AbortAsFailure,
    )
    .unwrap();
    assert!(result.success);
}
