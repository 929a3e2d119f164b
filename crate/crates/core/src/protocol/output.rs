//! The structured step-output grammar.
//!
//! A model's step output is a sequence of labeled sections followed by
//! exactly one function-call envelope:
//!
//! ```text
//! [Reflection]      <- omitted at step 0
//! ...
//! [Summary]
//! ...
//! [Planning]
//! ...
//! [Tactical]
//! ...
//! [Expectation]
//! ...
//! [Action]
//! {"name": "tap", "arguments": {"point": {"x": 500, "y": 500}}}
//! ```
//!
//! Strict parsing demands exact labels in canonical order; lenient
//! parsing tolerates minor drift (label casing, `#` heading prefixes,
//! section reordering, fenced action JSON, unknown trailing sections).

use super::{ProtocolError, ReasoningRecord};
use crate::actions::{parse_action, serialize_action, Action};
use crate::geometry::ParseMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Reflection,
    Summary,
    Planning,
    Tactical,
    Expectation,
    Action,
}

impl Section {
    const ORDER: [Section; 6] = [
        Section::Reflection,
        Section::Summary,
        Section::Planning,
        Section::Tactical,
        Section::Expectation,
        Section::Action,
    ];

    fn label(&self) -> &'static str {
        match self {
            Section::Reflection => "Reflection",
            Section::Summary => "Summary",
            Section::Planning => "Planning",
            Section::Tactical => "Tactical",
            Section::Expectation => "Expectation",
            Section::Action => "Action",
        }
    }

    fn from_name(name: &str) -> Option<Section> {
        Section::ORDER.iter().copied().find(|s| s.label().eq_ignore_ascii_case(name))
    }

    fn rank(&self) -> usize {
        Section::ORDER.iter().position(|s| s == self).expect("section is in ORDER")
    }
}

fn match_label(line: &str, mode: ParseMode) -> Option<Result<Section, String>> {
    match mode {
        ParseMode::Strict => {
            let inner = line.strip_prefix('[')?.strip_suffix(']')?;
            Some(Section::from_name(inner).ok_or_else(|| inner.to_string()))
        }
        ParseMode::Lenient => {
            let trimmed = line.trim().trim_start_matches('#').trim();
            let inner = trimmed.strip_prefix('[')?.strip_suffix(']')?.trim();
            Some(Section::from_name(inner).ok_or_else(|| inner.to_string()))
        }
    }
}

fn split_sections(
    text: &str,
    mode: ParseMode,
) -> Result<Vec<(Section, String)>, ProtocolError> {
    // `None` keys are lenient-mode unknown sections, which swallow their
    // lines and are dropped before returning.
    let mut sections: Vec<(Option<Section>, Vec<&str>)> = Vec::new();
    for line in text.lines() {
        match match_label(line, mode) {
            Some(Ok(section)) => {
                if sections.iter().any(|(s, _)| *s == Some(section)) {
                    return Err(ProtocolError::DuplicateSection(section.label().to_string()));
                }
                if mode == ParseMode::Strict {
                    if let Some((Some(last), _)) = sections.last() {
                        if last.rank() >= section.rank() {
                            return Err(ProtocolError::SectionOrder(format!(
                                "[{}] after [{}]",
                                section.label(),
                                last.label()
                            )));
                        }
                    }
                }
                sections.push((Some(section), Vec::new()));
            }
            Some(Err(unknown)) => {
                if mode == ParseMode::Strict {
                    return Err(ProtocolError::UnknownSection(unknown));
                }
                sections.push((None, Vec::new()));
            }
            None => match sections.last_mut() {
                Some((_, lines)) => lines.push(line),
                None => {
                    if mode == ParseMode::Strict && !line.trim().is_empty() {
                        return Err(ProtocolError::LeadingContent);
                    }
                }
            },
        }
    }
    Ok(sections
        .into_iter()
        .filter_map(|(s, lines)| s.map(|s| (s, lines.join("\n").trim().to_string())))
        .collect())
}

fn section_content(sections: &[(Section, String)], wanted: Section) -> Option<&str> {
    sections
        .iter()
        .find(|(s, _)| *s == wanted)
        .map(|(_, content)| content.as_str())
}

fn required_section(
    sections: &[(Section, String)],
    wanted: Section,
) -> Result<&str, ProtocolError> {
    let content =
        section_content(sections, wanted).ok_or(ProtocolError::MissingSection(wanted.label()))?;
    if content.is_empty() {
        return Err(ProtocolError::EmptySection(wanted.label()));
    }
    Ok(content)
}

/// Extracts the reasoning record from a structured step output.
///
/// `t` drives the reflection rule: the section must be absent at step 0
/// and present (non-empty) at every later step. A trailing `[Action]`
/// section is tolerated and ignored.
pub fn parse_reasoning(
    text: &str,
    t: usize,
    mode: ParseMode,
) -> Result<ReasoningRecord, ProtocolError> {
    let sections = split_sections(text, mode)?;
    let reflection = match section_content(&sections, Section::Reflection) {
        Some(_) if t == 0 => return Err(ProtocolError::ReflectionAtStart),
        Some("") => return Err(ProtocolError::EmptySection(Section::Reflection.label())),
        Some(content) => Some(content.to_string()),
        None if t > 0 => return Err(ProtocolError::MissingReflection { t }),
        None => None,
    };
    Ok(ReasoningRecord {
        reflection,
        strategic_summary: required_section(&sections, Section::Summary)?.to_string(),
        strategic_planning: required_section(&sections, Section::Planning)?.to_string(),
        tactical: required_section(&sections, Section::Tactical)?.to_string(),
        expectation: required_section(&sections, Section::Expectation)?.to_string(),
    })
}

/// Parses a full step output: the reasoning sections plus the single
/// function-call envelope under `[Action]`.
pub fn parse_step_output(
    text: &str,
    t: usize,
    mode: ParseMode,
) -> Result<(ReasoningRecord, Action), ProtocolError> {
    let reasoning = parse_reasoning(text, t, mode)?;
    let sections = split_sections(text, mode)?;
    let raw = required_section(&sections, Section::Action).map_err(|e| match e {
        ProtocolError::MissingSection(_) => ProtocolError::MissingAction,
        other => other,
    })?;
    let json = match mode {
        ParseMode::Strict => raw.to_string(),
        ParseMode::Lenient => strip_code_fence(raw),
    };
    let action = parse_action(&json)?;
    Ok((reasoning, action))
}

fn strip_code_fence(text: &str) -> String {
    let trimmed = text.trim();
    let Some(rest) = trimmed.strip_prefix("```") else {
        return trimmed.to_string();
    };
    let rest = rest.strip_prefix("json").unwrap_or(rest);
    rest.trim_start_matches('\n').trim_end_matches('`').trim().to_string()
}

/// Renders a reasoning record and action into the canonical output form.
/// Inverse of [`parse_step_output`] under strict parsing, provided the
/// record's section texts are trimmed.
pub fn render_step_output(record: &ReasoningRecord, action: &Action) -> String {
    let mut out = String::new();
    if let Some(reflection) = &record.reflection {
        out.push_str("[Reflection]\n");
        out.push_str(reflection);
        out.push_str("\n\n");
    }
    out.push_str("[Summary]\n");
    out.push_str(&record.strategic_summary);
    out.push_str("\n\n[Planning]\n");
    out.push_str(&record.strategic_planning);
    out.push_str("\n\n[Tactical]\n");
    out.push_str(&record.tactical);
    out.push_str("\n\n[Expectation]\n");
    out.push_str(&record.expectation);
    out.push_str("\n\n[Action]\n");
    out.push_str(&serialize_action(action));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::Direction;

    fn record(t: usize) -> ReasoningRecord {
        ReasoningRecord {
            reflection: (t > 0).then(|| "the tap worked".to_string()),
            strategic_summary: "we are mid-task".to_string(),
            strategic_planning: "open the form next".to_string(),
            tactical: "scroll down to reveal the form".to_string(),
            expectation: "the form should appear".to_string(),
        }
    }

    #[test]
    fn render_parse_round_trip() {
        for t in [0usize, 3] {
            let action = Action::Scroll { direction: Direction::Down };
            let text = render_step_output(&record(t), &action);
            let (parsed, parsed_action) =
                parse_step_output(&text, t, ParseMode::Strict).unwrap();
            assert_eq!(parsed, record(t));
            assert_eq!(parsed_action, action);
            // Canonical strings survive a render cycle byte-exactly.
            assert_eq!(render_step_output(&parsed, &parsed_action), text);
        }
    }

    #[test]
    fn missing_expectation_named() {
        let text = "[Summary]\ns\n\n[Planning]\np\n\n[Tactical]\nt\n\n[Action]\n{}";
        let err = parse_reasoning(text, 0, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, ProtocolError::MissingSection("Expectation")));
    }

    #[test]
    fn reflection_at_step_zero_rejected() {
        let text = render_step_output(&record(1), &Action::Back);
        let err = parse_step_output(&text, 0, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, ProtocolError::ReflectionAtStart));
    }

    #[test]
    fn missing_reflection_after_step_zero_rejected() {
        let text = render_step_output(&record(0), &Action::Back);
        let err = parse_step_output(&text, 2, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, ProtocolError::MissingReflection { t: 2 }));
    }

    #[test]
    fn strict_rejects_out_of_order_sections() {
        let text = "[Planning]\np\n\n[Summary]\ns\n\n[Tactical]\nt\n\n[Expectation]\ne";
        let err = parse_reasoning(text, 0, ParseMode::Strict).unwrap_err();
        assert!(matches!(err, ProtocolError::SectionOrder(_)));
        assert!(parse_reasoning(text, 0, ParseMode::Lenient).is_ok());
    }

    #[test]
    fn strict_rejects_unknown_section_and_leading_content() {
        let text = "[Vibes]\ngood\n\n[Summary]\ns";
        assert!(matches!(
            parse_reasoning(text, 0, ParseMode::Strict).unwrap_err(),
            ProtocolError::UnknownSection(label) if label == "Vibes"
        ));
        let text = "preamble chatter\n[Summary]\ns";
        assert!(matches!(
            parse_reasoning(text, 0, ParseMode::Strict).unwrap_err(),
            ProtocolError::LeadingContent
        ));
    }

    #[test]
    fn lenient_tolerates_drift() {
        let text = "chatty preamble\n\
                    ## [summary]\nstate of play\n\n\
                    [PLANNING]\nnext moves\n\n\
                    [Tactical]\ndo the thing\n\n\
                    [expectation]\nit works\n\n\
                    [Notes]\nignored\n\n\
                    [Action]\n```json\n{\"name\":\"back\",\"arguments\":{}}\n```";
        let (reasoning, action) = parse_step_output(text, 0, ParseMode::Lenient).unwrap();
        assert_eq!(reasoning.strategic_summary, "state of play");
        assert_eq!(action, Action::Back);
        assert!(parse_step_output(text, 0, ParseMode::Strict).is_err());
    }

    #[test]
    fn duplicate_section_rejected_in_both_modes() {
        let text = "[Summary]\na\n\n[Summary]\nb\n\n[Planning]\np\n\n[Tactical]\nt\n\n[Expectation]\ne";
        for mode in [ParseMode::Strict, ParseMode::Lenient] {
            assert!(matches!(
                parse_reasoning(text, 0, mode).unwrap_err(),
                ProtocolError::DuplicateSection(_)
            ));
        }
    }

    #[test]
    fn empty_section_rejected() {
        let text = "[Summary]\n\n\n[Planning]\np\n\n[Tactical]\nt\n\n[Expectation]\ne";
        assert!(matches!(
            parse_reasoning(text, 0, ParseMode::Strict).unwrap_err(),
            ProtocolError::EmptySection("Summary")
        ));
    }

    #[test]
    fn missing_action_envelope() {
        let text = "[Summary]\ns\n\n[Planning]\np\n\n[Tactical]\nt\n\n[Expectation]\ne";
        assert!(matches!(
            parse_step_output(text, 0, ParseMode::Strict).unwrap_err(),
            ProtocolError::MissingAction
        ));
    }
}
