//! Newline-delimited JSON step logs: one object per step with the step
//! index, observation, reasoning, action, and the status after the step.

use super::{EpisodeState, EpisodeStatus, Observation, ProtocolError, ReasoningRecord};
use crate::actions::Action;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLogEntry {
    pub t: usize,
    pub observation: Observation,
    pub reasoning: ReasoningRecord,
    pub action: Action,
    pub status_after: EpisodeStatus,
}

/// Builds the log view of an episode. Only the final step can carry a
/// non-running status: terminal states absorb.
pub fn episode_log(state: &EpisodeState) -> Vec<StepLogEntry> {
    let last = state.steps().len().saturating_sub(1);
    state
        .steps()
        .iter()
        .enumerate()
        .map(|(t, step)| StepLogEntry {
            t,
            observation: step.observation.clone(),
            reasoning: step.reasoning.clone(),
            action: step.action.clone(),
            status_after: if t == last { state.status() } else { EpisodeStatus::Running },
        })
        .collect()
}

pub fn write_step_log<W: Write>(mut writer: W, entries: &[StepLogEntry]) -> std::io::Result<()> {
    for entry in entries {
        serde_json::to_writer(&mut writer, entry)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_step_log<R: BufRead>(reader: R) -> Result<Vec<StepLogEntry>, ProtocolError> {
    let mut entries = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| ProtocolError::UnknownSection(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: StepLogEntry = serde_json::from_str(&line)
            .map_err(|e| ProtocolError::UnknownSection(format!("bad step log line: {e}")))?;
        entries.push(entry);
    }
    Ok(entries)
}
