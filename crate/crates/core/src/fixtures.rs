//! Bundled fixtures: a deterministic grounding suite and a trajectory
//! mini-corpus recorded from the mock environment's oracle paths.
//!
//! Everything here is generated from fixed seeds, so two builds of the
//! fixtures are byte-identical.

use crate::actions::Action;
use crate::geometry::{NormBox, NormPoint, ScreenDims};
use crate::harness::{ElementType, GroundingCase, Platform};
use crate::mockenv::{oracle_agent, AppScript, MockEnv, TaskSpec};
use crate::protocol::{Scene, SceneElement};
use crate::synthesis::{RawAction, RawTrajStep, RawTrajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GROUNDING_SEED: u64 = 0x6ac7;
const CASES_PER_CELL: usize = 36;

const TEXT_LABELS: [&str; 12] = [
    "Save", "Cancel", "Submit", "Search", "Settings", "Next", "Sign in", "Compose", "Archive",
    "Reply", "Forward", "Delete",
];

const ICON_LABELS: [&str; 12] = [
    "gear icon",
    "home icon",
    "back arrow icon",
    "share icon",
    "menu icon",
    "star icon",
    "trash icon",
    "camera icon",
    "mic icon",
    "plus icon",
    "bell icon",
    "profile icon",
];

fn platform_dims(platform: Platform) -> ScreenDims {
    let (w, h) = match platform {
        Platform::Mobile => (1080, 2160),
        Platform::Desktop => (1920, 1080),
        Platform::Web => (1366, 768),
    };
    ScreenDims::new(w, h).expect("static dims are valid")
}

fn random_box(rng: &mut ChaCha8Rng) -> NormBox {
    let x1 = rng.random_range(0..=800);
    let y1 = rng.random_range(0..=800);
    let w = rng.random_range(40..=190);
    let h = rng.random_range(30..=150);
    NormBox::new(x1, y1, (x1 + w).min(1000), (y1 + h).min(1000)).expect("sampled box is ordered")
}

/// Sample `k` distinct labels from a pool.
fn sample_labels<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], k: usize) -> Vec<&'a str> {
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    for i in 0..k {
        let j = rng.random_range(i..indices.len());
        indices.swap(i, j);
    }
    indices[..k].iter().map(|&i| pool[i]).collect()
}

/// The bundled grounding suite: 36 cases per (platform, element type)
/// cell, 216 in total. Every ninth case anchors its target at the
/// screen's top-left corner, the natural home of back buttons and nav
/// affordances, which also gives constant-corner baselines a measurable
/// floor.
pub fn bundled_grounding_suite() -> Vec<GroundingCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(GROUNDING_SEED);
    let mut cases = Vec::new();
    for platform in [Platform::Mobile, Platform::Desktop, Platform::Web] {
        for element_type in [ElementType::Text, ElementType::Icon] {
            let pool: &[&str] = match element_type {
                ElementType::Text => &TEXT_LABELS,
                ElementType::Icon => &ICON_LABELS,
            };
            let role = match element_type {
                ElementType::Text => "button",
                ElementType::Icon => "icon",
            };
            for case_index in 0..CASES_PER_CELL {
                let count = rng.random_range(3..=6);
                let labels = sample_labels(&mut rng, pool, count);
                let target_index = rng.random_range(0..count);
                let mut elements = Vec::with_capacity(count);
                for (i, label) in labels.iter().enumerate() {
                    let bounds = if i == target_index && case_index % 9 == 0 {
                        NormBox::new(
                            0,
                            0,
                            rng.random_range(60..=200),
                            rng.random_range(40..=120),
                        )
                        .expect("corner box is ordered")
                    } else {
                        random_box(&mut rng)
                    };
                    elements.push(SceneElement {
                        id: format!("e{i}"),
                        role: role.into(),
                        label: (*label).into(),
                        bounds,
                        editable: false,
                        text: String::new(),
                    });
                }
                let target = &elements[target_index];
                cases.push(GroundingCase {
                    platform,
                    element_type,
                    dims: platform_dims(platform),
                    instruction: format!("Locate \"{}\" on the screen and tap it.", target.label),
                    gold: target.bounds,
                    scene: Scene::Elements(elements.clone()),
                });
            }
        }
    }
    cases
}

/// The zero point, used by calibration baselines.
pub fn corner_point() -> NormPoint {
    NormPoint::new(0, 0).expect("origin is valid")
}

fn record_trajectory(
    script: &AppScript,
    task: &TaskSpec,
    actions: &[Action],
    variant: &str,
) -> RawTrajectory {
    let mut env = MockEnv::reset(script.clone(), &task.id).expect("bundled script is valid");
    let mut steps = Vec::with_capacity(actions.len());
    let mut observation = env.observation();
    let mut last_success = false;
    for action in actions {
        let envelope = action.to_envelope();
        steps.push(RawTrajStep {
            dims: observation.dims,
            scene: observation.scene.clone(),
            action: RawAction { name: envelope.name, arguments: envelope.arguments },
            annotation: None,
        });
        let outcome = env.step(action).expect("oracle actions are valid");
        last_success = outcome.success;
        observation = outcome.observation;
    }
    assert!(last_success, "trajectory variant '{variant}' for {} must succeed", task.id);
    RawTrajectory {
        id: format!("{}-{}-{variant}", script.name, task.id),
        dialect: "canonical".into(),
        dataset: Some("bundled-mock".into()),
        goal: task.goal.clone(),
        steps,
    }
}

fn detour_tap() -> Action {
    Action::Tap { point: NormPoint::new(5, 5).expect("static point is valid") }
}

fn detour_note() -> Action {
    Action::Remember { content: Some("re-checking the goal before acting".into()) }
}

/// The bundled trajectory mini-corpus: four successful variants per
/// bundled task (the oracle path plus no-op detour variants), 52
/// trajectories in total.
pub fn bundled_trajectories() -> Vec<RawTrajectory> {
    let mut trajectories = Vec::new();
    for script in crate::mockenv::scripts::bundled_apps() {
        for task in script.tasks.clone() {
            let oracle = oracle_agent(&script, &task.id).expect("bundled tasks are scripted");

            trajectories.push(record_trajectory(&script, &task, &oracle, "pristine"));

            let mut with_tap = oracle.clone();
            with_tap.insert(0, detour_tap());
            trajectories.push(record_trajectory(&script, &task, &with_tap, "detour-tap"));

            let mut with_note = oracle.clone();
            with_note.insert(oracle.len() / 2, detour_note());
            trajectories.push(record_trajectory(&script, &task, &with_note, "detour-note"));

            let mut with_both = oracle.clone();
            with_both.insert(0, detour_tap());
            with_both.insert(with_both.len() / 2, detour_note());
            trajectories.push(record_trajectory(&script, &task, &with_both, "detour-both"));
        }
    }
    trajectories
}

/// Writes trajectories as newline-delimited JSON.
pub fn write_trajectories<W: std::io::Write>(
    mut writer: W,
    trajectories: &[RawTrajectory],
) -> std::io::Result<()> {
    for trajectory in trajectories {
        serde_json::to_writer(&mut writer, trajectory)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads trajectories from newline-delimited JSON.
pub fn read_trajectories<R: std::io::BufRead>(
    reader: R,
) -> Result<Vec<RawTrajectory>, crate::synthesis::SynthesisError> {
    let mut trajectories = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| crate::synthesis::SynthesisError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let trajectory: RawTrajectory = serde_json::from_str(&line).map_err(|e| {
            crate::synthesis::SynthesisError::Io(format!("line {}: {e}", index + 1))
        })?;
        trajectories.push(trajectory);
    }
    Ok(trajectories)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_covers_all_cells_with_at_least_200_cases() {
        let suite = bundled_grounding_suite();
        assert!(suite.len() >= 200, "suite has {}", suite.len());
        for platform in [Platform::Mobile, Platform::Desktop, Platform::Web] {
            for element_type in [ElementType::Text, ElementType::Icon] {
                let count = suite
                    .iter()
                    .filter(|c| c.platform == platform && c.element_type == element_type)
                    .count();
                assert_eq!(count, CASES_PER_CELL);
            }
        }
    }

    #[test]
    fn suite_is_deterministic_and_self_consistent() {
        let a = bundled_grounding_suite();
        let b = bundled_grounding_suite();
        assert_eq!(a, b);
        for case in &a {
            // The instruction names exactly one element, whose box is gold.
            let label = case
                .instruction
                .split('"')
                .nth(1)
                .expect("instruction quotes the target label");
            match &case.scene {
                Scene::Elements(elements) => {
                    let matches: Vec<_> =
                        elements.iter().filter(|e| e.label == label).collect();
                    assert_eq!(matches.len(), 1, "label '{label}' must be unique");
                    assert_eq!(matches[0].bounds, case.gold);
                }
                other => panic!("expected elements, got {other:?}"),
            }
        }
    }

    #[test]
    fn corpus_has_enough_successful_trajectories() {
        let trajectories = bundled_trajectories();
        assert!(trajectories.len() >= 20, "corpus has {}", trajectories.len());
        let total_steps: usize = trajectories.iter().map(|t| t.steps.len()).sum();
        assert!(total_steps >= 200, "corpus has {total_steps} steps");
        for trajectory in &trajectories {
            assert!(!trajectory.steps.is_empty());
        }
    }

    #[test]
    fn trajectories_round_trip_through_ndjson() {
        let trajectories = bundled_trajectories();
        let mut bytes = Vec::new();
        write_trajectories(&mut bytes, &trajectories).unwrap();
        let back = read_trajectories(bytes.as_slice()).unwrap();
        assert_eq!(back, trajectories);
    }
}
