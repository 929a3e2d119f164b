//! The canonical modular action space.
//!
//! Fourteen operations grouped into six categories, each with a fixed
//! argument schema:
//!
//! | category          | operations                          | arguments            |
//! |-------------------|-------------------------------------|----------------------|
//! | single-point      | `tap`, `click`, `hover`, `select`   | `point`              |
//! | two-point         | `swipe`                             | `from`, `to`         |
//! |                   | `select_text`                       | `start`, `end`       |
//! | directional       | `scroll`                            | `direction`          |
//! | text input        | `input`                             | `text`               |
//! |                   | `point_input`                       | `point`, `text`      |
//! | parameterless     | `remember`¹, `enter`, `home`, `back`| —                    |
//! | state settings    | `set_task_status`                   | `status`             |
//!
//! ¹ `remember` accepts an optional `content` argument; the note has to
//! come from somewhere.
//!
//! Actions cross the wire as function-call envelopes,
//! `{"name": ..., "arguments": {...}}`, with argument keys sorted so the
//! encoding is deterministic. Platform configurations enable subsets of
//! the canonical names without changing the interface.

mod unify;

pub use unify::{
    unify_action, CoordinateConvention, DialectSpec, UnifyEntry, UnifyError, UnificationTable,
};

use crate::geometry::{GeometryError, NormPoint};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeSet;
use std::str::FromStr;
use thiserror::Error;

/// The fourteen canonical operation names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionName {
    Tap,
    Click,
    Hover,
    Select,
    Swipe,
    SelectText,
    Scroll,
    Input,
    PointInput,
    Remember,
    Enter,
    Home,
    Back,
    SetTaskStatus,
}

impl ActionName {
    pub const ALL: [ActionName; 14] = [
        ActionName::Tap,
        ActionName::Click,
        ActionName::Hover,
        ActionName::Select,
        ActionName::Swipe,
        ActionName::SelectText,
        ActionName::Scroll,
        ActionName::Input,
        ActionName::PointInput,
        ActionName::Remember,
        ActionName::Enter,
        ActionName::Home,
        ActionName::Back,
        ActionName::SetTaskStatus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ActionName::Tap => "tap",
            ActionName::Click => "click",
            ActionName::Hover => "hover",
            ActionName::Select => "select",
            ActionName::Swipe => "swipe",
            ActionName::SelectText => "select_text",
            ActionName::Scroll => "scroll",
            ActionName::Input => "input",
            ActionName::PointInput => "point_input",
            ActionName::Remember => "remember",
            ActionName::Enter => "enter",
            ActionName::Home => "home",
            ActionName::Back => "back",
            ActionName::SetTaskStatus => "set_task_status",
        }
    }

    pub fn category(&self) -> ActionCategory {
        match self {
            ActionName::Tap | ActionName::Click | ActionName::Hover | ActionName::Select => {
                ActionCategory::SinglePoint
            }
            ActionName::Swipe | ActionName::SelectText => ActionCategory::TwoPoint,
            ActionName::Scroll => ActionCategory::Directional,
            ActionName::Input | ActionName::PointInput => ActionCategory::TextInput,
            ActionName::Remember | ActionName::Enter | ActionName::Home | ActionName::Back => {
                ActionCategory::Parameterless
            }
            ActionName::SetTaskStatus => ActionCategory::StateSettings,
        }
    }
}

impl std::fmt::Display for ActionName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionName {
    type Err = ActionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionName::ALL
            .iter()
            .copied()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| ActionError::UnknownAction {
                name: s.to_string(),
                known: canonical_names(),
            })
    }
}

fn canonical_names() -> String {
    ActionName::ALL
        .iter()
        .map(|n| n.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// The six operation categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionCategory {
    SinglePoint,
    TwoPoint,
    Directional,
    TextInput,
    Parameterless,
    StateSettings,
}

impl std::fmt::Display for ActionCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ActionCategory::SinglePoint => "single-point",
            ActionCategory::TwoPoint => "two-point",
            ActionCategory::Directional => "directional",
            ActionCategory::TextInput => "text input",
            ActionCategory::Parameterless => "parameterless",
            ActionCategory::StateSettings => "state settings",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] =
        [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Continue,
    Complete,
    Infeasible,
}

impl TaskStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskStatus::Continue => "continue",
            TaskStatus::Complete => "complete",
            TaskStatus::Infeasible => "infeasible",
        }
    }
}

/// One canonical action with its typed parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Tap { point: NormPoint },
    Click { point: NormPoint },
    Hover { point: NormPoint },
    Select { point: NormPoint },
    Swipe { from: NormPoint, to: NormPoint },
    SelectText { start: NormPoint, end: NormPoint },
    Scroll { direction: Direction },
    Input { text: String },
    PointInput { point: NormPoint, text: String },
    Remember { content: Option<String> },
    Enter,
    Home,
    Back,
    SetTaskStatus { status: TaskStatus },
}

impl Action {
    pub fn name(&self) -> ActionName {
        match self {
            Action::Tap { .. } => ActionName::Tap,
            Action::Click { .. } => ActionName::Click,
            Action::Hover { .. } => ActionName::Hover,
            Action::Select { .. } => ActionName::Select,
            Action::Swipe { .. } => ActionName::Swipe,
            Action::SelectText { .. } => ActionName::SelectText,
            Action::Scroll { .. } => ActionName::Scroll,
            Action::Input { .. } => ActionName::Input,
            Action::PointInput { .. } => ActionName::PointInput,
            Action::Remember { .. } => ActionName::Remember,
            Action::Enter => ActionName::Enter,
            Action::Home => ActionName::Home,
            Action::Back => ActionName::Back,
            Action::SetTaskStatus { .. } => ActionName::SetTaskStatus,
        }
    }

    pub fn category(&self) -> ActionCategory {
        self.name().category()
    }

    /// The point payload of a single-point action, if any.
    pub fn point(&self) -> Option<NormPoint> {
        match self {
            Action::Tap { point }
            | Action::Click { point }
            | Action::Hover { point }
            | Action::Select { point }
            | Action::PointInput { point, .. } => Some(*point),
            _ => None,
        }
    }

    pub fn to_envelope(&self) -> FunctionCallEnvelope {
        let arguments = match self {
            Action::Tap { point }
            | Action::Click { point }
            | Action::Hover { point }
            | Action::Select { point } => args_value(&PointArgs { point: *point }),
            Action::Swipe { from, to } => args_value(&SwipeArgs { from: *from, to: *to }),
            Action::SelectText { start, end } => {
                args_value(&SelectTextArgs { start: *start, end: *end })
            }
            Action::Scroll { direction } => args_value(&ScrollArgs { direction: *direction }),
            Action::Input { text } => args_value(&InputArgs { text: text.clone() }),
            Action::PointInput { point, text } => {
                args_value(&PointInputArgs { point: *point, text: text.clone() })
            }
            Action::Remember { content } => args_value(&RememberArgs { content: content.clone() }),
            Action::Enter | Action::Home | Action::Back => Value::Object(Map::new()),
            Action::SetTaskStatus { status } => args_value(&StatusArgs { status: *status }),
        };
        FunctionCallEnvelope { name: self.name().to_string(), arguments }
    }
}

fn args_value<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("argument structs serialize infallibly")
}

// Actions cross every serialization boundary in envelope form.
impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_envelope().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let envelope = FunctionCallEnvelope::deserialize(deserializer)?;
        action_from_envelope(&envelope).map_err(serde::de::Error::custom)
    }
}

/// Wire form of an action: `{"name": ..., "arguments": {...}}`.
///
/// Field order is fixed and argument keys are sorted, so the JSON text
/// of an envelope is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionCallEnvelope {
    pub name: String,
    pub arguments: Value,
}

#[derive(Serialize)]
struct PointArgs {
    point: NormPoint,
}

#[derive(Serialize)]
struct SwipeArgs {
    from: NormPoint,
    to: NormPoint,
}

#[derive(Serialize)]
struct SelectTextArgs {
    start: NormPoint,
    end: NormPoint,
}

#[derive(Serialize)]
struct ScrollArgs {
    direction: Direction,
}

#[derive(Serialize)]
struct InputArgs {
    text: String,
}

#[derive(Serialize)]
struct PointInputArgs {
    point: NormPoint,
    text: String,
}

#[derive(Serialize)]
struct RememberArgs {
    #[serde(skip_serializing_if = "Option::is_none")]
    content: Option<String>,
}

#[derive(Serialize)]
struct StatusArgs {
    status: TaskStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("invalid function-call envelope: {0}")]
    Envelope(String),
    #[error("unknown action '{name}', canonical names are: {known}")]
    UnknownAction { name: String, known: String },
    #[error("action '{name}' ({category} category): {detail}")]
    Schema { name: ActionName, category: ActionCategory, detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("action '{name}' not in configured space (platform '{platform}')")]
    NotInConfiguredSpace { name: ActionName, platform: String },
    #[error("action space must enable at least one action")]
    EmptyConfig,
}

/// Serializes an action to its canonical envelope JSON.
pub fn serialize_action(action: &Action) -> String {
    serde_json::to_string(&action.to_envelope()).expect("envelope serializes infallibly")
}

/// Parses envelope JSON into a typed action with strict validation:
/// unknown names, missing or extra arguments, and out-of-range
/// coordinates are all typed errors. Exact inverse of
/// [`serialize_action`] on its image.
pub fn parse_action(text: &str) -> Result<Action, ActionError> {
    let envelope: FunctionCallEnvelope =
        serde_json::from_str(text).map_err(|e| ActionError::Envelope(e.to_string()))?;
    action_from_envelope(&envelope)
}

/// Builds a typed action out of an envelope, validating the argument
/// schema for the named action.
pub fn action_from_envelope(envelope: &FunctionCallEnvelope) -> Result<Action, ActionError> {
    let name: ActionName = envelope.name.parse()?;
    let mut args = match &envelope.arguments {
        Value::Object(map) => map.clone(),
        other => {
            return Err(schema_err(
                name,
                format!("arguments must be a JSON object, got {}", json_kind(other)),
            ))
        }
    };

    let action = match name {
        ActionName::Tap => Action::Tap { point: take_point(&mut args, "point", name)? },
        ActionName::Click => Action::Click { point: take_point(&mut args, "point", name)? },
        ActionName::Hover => Action::Hover { point: take_point(&mut args, "point", name)? },
        ActionName::Select => Action::Select { point: take_point(&mut args, "point", name)? },
        ActionName::Swipe => Action::Swipe {
            from: take_point(&mut args, "from", name)?,
            to: take_point(&mut args, "to", name)?,
        },
        ActionName::SelectText => Action::SelectText {
            start: take_point(&mut args, "start", name)?,
            end: take_point(&mut args, "end", name)?,
        },
        ActionName::Scroll => Action::Scroll { direction: take_direction(&mut args, name)? },
        ActionName::Input => Action::Input { text: take_text(&mut args, "text", name)? },
        ActionName::PointInput => Action::PointInput {
            point: take_point(&mut args, "point", name)?,
            text: take_text(&mut args, "text", name)?,
        },
        ActionName::Remember => Action::Remember {
            content: match args.remove("content") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s),
                Some(other) => {
                    return Err(schema_err(
                        name,
                        format!("argument 'content' must be a string, got {}", json_kind(&other)),
                    ))
                }
            },
        },
        ActionName::Enter => Action::Enter,
        ActionName::Home => Action::Home,
        ActionName::Back => Action::Back,
        ActionName::SetTaskStatus => Action::SetTaskStatus { status: take_status(&mut args, name)? },
    };

    if let Some(extra) = args.keys().next() {
        return Err(schema_err(name, format!("unexpected argument '{extra}'")));
    }
    Ok(action)
}

fn schema_err(name: ActionName, detail: String) -> ActionError {
    ActionError::Schema { name, category: name.category(), detail }
}

fn json_kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn take_field(args: &mut Map<String, Value>, key: &str, name: ActionName) -> Result<Value, ActionError> {
    args.remove(key)
        .ok_or_else(|| schema_err(name, format!("missing argument '{key}'")))
}

fn take_point(
    args: &mut Map<String, Value>,
    key: &str,
    name: ActionName,
) -> Result<NormPoint, ActionError> {
    let value = take_field(args, key, name)?;
    let text = value.to_string();
    crate::geometry::parse_point(&text, crate::geometry::ParseMode::Strict).map_err(|e| match e {
        GeometryError::OutOfRange { .. } => ActionError::Geometry(e),
        other => schema_err(name, format!("argument '{key}': {other}")),
    })
}

fn take_text(
    args: &mut Map<String, Value>,
    key: &str,
    name: ActionName,
) -> Result<String, ActionError> {
    match take_field(args, key, name)? {
        Value::String(s) => Ok(s),
        other => Err(schema_err(
            name,
            format!("argument '{key}' must be a string, got {}", json_kind(&other)),
        )),
    }
}

fn take_direction(args: &mut Map<String, Value>, name: ActionName) -> Result<Direction, ActionError> {
    match take_field(args, "direction", name)? {
        Value::String(s) => Direction::ALL
            .iter()
            .copied()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| {
                schema_err(name, format!("direction '{s}' not one of: up, down, left, right"))
            }),
        other => Err(schema_err(
            name,
            format!("argument 'direction' must be a string, got {}", json_kind(&other)),
        )),
    }
}

fn take_status(args: &mut Map<String, Value>, name: ActionName) -> Result<TaskStatus, ActionError> {
    match take_field(args, "status", name)? {
        Value::String(s) => match s.as_str() {
            "continue" => Ok(TaskStatus::Continue),
            "complete" => Ok(TaskStatus::Complete),
            "infeasible" => Ok(TaskStatus::Infeasible),
            other => Err(schema_err(
                name,
                format!("status '{other}' not one of: continue, complete, infeasible"),
            )),
        },
        other => Err(schema_err(
            name,
            format!("argument 'status' must be a string, got {}", json_kind(&other)),
        )),
    }
}

/// The subset of the action space a platform enables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct ActionSpaceConfig {
    enabled: BTreeSet<ActionName>,
    platform: String,
}

#[derive(Deserialize)]
struct RawConfig {
    enabled: BTreeSet<ActionName>,
    platform: String,
}

impl TryFrom<RawConfig> for ActionSpaceConfig {
    type Error = ActionError;

    fn try_from(raw: RawConfig) -> Result<Self, Self::Error> {
        ActionSpaceConfig::new(raw.enabled, raw.platform)
    }
}

impl ActionSpaceConfig {
    pub fn new(
        enabled: impl IntoIterator<Item = ActionName>,
        platform: impl Into<String>,
    ) -> Result<Self, ActionError> {
        let enabled: BTreeSet<ActionName> = enabled.into_iter().collect();
        if enabled.is_empty() {
            return Err(ActionError::EmptyConfig);
        }
        Ok(Self { enabled, platform: platform.into() })
    }

    /// All fourteen canonical operations.
    pub fn full() -> Self {
        Self::new(ActionName::ALL, "full").expect("full space is non-empty")
    }

    /// Touch-driven subset: no pointer hover or text selection.
    pub fn mobile() -> Self {
        Self::new(
            [
                ActionName::Tap,
                ActionName::Swipe,
                ActionName::Scroll,
                ActionName::Input,
                ActionName::PointInput,
                ActionName::Enter,
                ActionName::Home,
                ActionName::Back,
                ActionName::Remember,
                ActionName::SetTaskStatus,
            ],
            "mobile",
        )
        .expect("mobile space is non-empty")
    }

    /// Pointer platforms add click, hover, select and select_text on top
    /// of the mobile subset.
    pub fn desktop() -> Self {
        Self::new(ActionName::ALL, "desktop").expect("desktop space is non-empty")
    }

    pub fn web() -> Self {
        Self::new(ActionName::ALL, "web").expect("web space is non-empty")
    }

    /// Named preset lookup: `full`, `mobile`, `desktop` or `web`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "full" => Some(Self::full()),
            "mobile" => Some(Self::mobile()),
            "desktop" => Some(Self::desktop()),
            "web" => Some(Self::web()),
            _ => None,
        }
    }

    pub fn platform(&self) -> &str {
        &self.platform
    }

    pub fn enabled(&self) -> &BTreeSet<ActionName> {
        &self.enabled
    }

    pub fn contains(&self, name: ActionName) -> bool {
        self.enabled.contains(&name)
    }
}

/// Checks an action against a configured subset of the space.
///
/// Parameter shapes are correct by construction for typed [`Action`]
/// values; malformed shapes are rejected earlier, by [`parse_action`].
pub fn validate_action(action: &Action, cfg: &ActionSpaceConfig) -> Result<(), ActionError> {
    if !cfg.contains(action.name()) {
        return Err(ActionError::NotInConfiguredSpace {
            name: action.name(),
            platform: cfg.platform.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn np(x: u16, y: u16) -> NormPoint {
        NormPoint::new(x, y).unwrap()
    }

    #[test]
    fn every_name_in_exactly_one_category() {
        use std::collections::BTreeMap;
        let mut by_category: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for name in ActionName::ALL {
            by_category
                .entry(match name.category() {
                    ActionCategory::SinglePoint => "single-point",
                    ActionCategory::TwoPoint => "two-point",
                    ActionCategory::Directional => "directional",
                    ActionCategory::TextInput => "text-input",
                    ActionCategory::Parameterless => "parameterless",
                    ActionCategory::StateSettings => "state-settings",
                })
                .or_default()
                .push(name.as_str());
        }
        assert_eq!(by_category["single-point"], ["tap", "click", "hover", "select"]);
        assert_eq!(by_category["two-point"], ["swipe", "select_text"]);
        assert_eq!(by_category["directional"], ["scroll"]);
        assert_eq!(by_category["text-input"], ["input", "point_input"]);
        assert_eq!(by_category["parameterless"], ["remember", "enter", "home", "back"]);
        assert_eq!(by_category["state-settings"], ["set_task_status"]);
        let total: usize = by_category.values().map(Vec::len).sum();
        assert_eq!(total, 14);
    }

    #[test]
    fn parameterless_envelope() {
        assert_eq!(serialize_action(&Action::Back), r#"{"name":"back","arguments":{}}"#);
    }

    #[test]
    fn point_input_envelope() {
        let action = Action::PointInput { point: np(120, 860), text: "hello".into() };
        assert_eq!(
            serialize_action(&action),
            r#"{"name":"point_input","arguments":{"point":{"x":120,"y":860},"text":"hello"}}"#
        );
        assert_eq!(parse_action(&serialize_action(&action)).unwrap(), action);
    }

    #[test]
    fn scroll_parses() {
        let action = parse_action(r#"{"name":"scroll","arguments":{"direction":"down"}}"#).unwrap();
        assert_eq!(action, Action::Scroll { direction: Direction::Down });
    }

    #[test]
    fn out_of_range_coordinate_is_geometry_error() {
        let err = parse_action(r#"{"name":"tap","arguments":{"point":{"x":1001,"y":0}}}"#)
            .unwrap_err();
        assert!(matches!(err, ActionError::Geometry(GeometryError::OutOfRange { .. })));
    }

    #[test]
    fn diagonal_scroll_is_shape_error_naming_category() {
        let err = parse_action(r#"{"name":"scroll","arguments":{"direction":"diagonal"}}"#)
            .unwrap_err();
        match err {
            ActionError::Schema { name, category, .. } => {
                assert_eq!(name, ActionName::Scroll);
                assert_eq!(category, ActionCategory::Directional);
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn unknown_action_lists_canonical_names() {
        let err = parse_action(r#"{"name":"teleport","arguments":{}}"#).unwrap_err();
        match err {
            ActionError::UnknownAction { name, known } => {
                assert_eq!(name, "teleport");
                assert!(known.contains("tap") && known.contains("set_task_status"));
            }
            other => panic!("expected unknown action, got {other}"),
        }
    }

    #[test]
    fn missing_and_extra_arguments_rejected() {
        assert!(matches!(
            parse_action(r#"{"name":"input","arguments":{}}"#).unwrap_err(),
            ActionError::Schema { .. }
        ));
        assert!(matches!(
            parse_action(r#"{"name":"back","arguments":{"force":true}}"#).unwrap_err(),
            ActionError::Schema { .. }
        ));
    }

    #[test]
    fn remember_content_is_optional() {
        let bare = parse_action(r#"{"name":"remember","arguments":{}}"#).unwrap();
        assert_eq!(bare, Action::Remember { content: None });
        let noted =
            parse_action(r#"{"name":"remember","arguments":{"content":"wifi is off"}}"#).unwrap();
        assert_eq!(noted, Action::Remember { content: Some("wifi is off".into()) });
        assert_eq!(
            serialize_action(&Action::Remember { content: None }),
            r#"{"name":"remember","arguments":{}}"#
        );
    }

    #[test]
    fn validate_against_configured_subsets() {
        let full = ActionSpaceConfig::full();
        let mobile = ActionSpaceConfig::mobile();
        let tap = Action::Tap { point: np(500, 500) };
        assert!(validate_action(&tap, &full).is_ok());
        assert!(validate_action(&tap, &mobile).is_ok());
        let hover = Action::Hover { point: np(1, 2) };
        let err = validate_action(&hover, &mobile).unwrap_err();
        assert!(matches!(err, ActionError::NotInConfiguredSpace { name: ActionName::Hover, .. }));
        assert!(err.to_string().contains("not in configured space"));
    }

    #[test]
    fn empty_config_rejected() {
        assert!(matches!(
            ActionSpaceConfig::new([], "none").unwrap_err(),
            ActionError::EmptyConfig
        ));
    }

    #[test]
    fn mobile_subset_membership() {
        let mobile = ActionSpaceConfig::mobile();
        for name in [ActionName::Click, ActionName::Hover, ActionName::Select, ActionName::SelectText] {
            assert!(!mobile.contains(name), "{name} should be pointer-only");
        }
        assert_eq!(mobile.enabled().len(), 10);
        assert_eq!(ActionSpaceConfig::desktop().enabled().len(), 14);
    }

    prop_compose! {
        fn arb_point()(x in 0u16..=1000, y in 0u16..=1000) -> NormPoint {
            NormPoint::new(x, y).unwrap()
        }
    }

    fn arb_action() -> impl Strategy<Value = Action> {
        let text = "[ -~]{0,24}"; // printable ASCII
        prop_oneof![
            arb_point().prop_map(|point| Action::Tap { point }),
            arb_point().prop_map(|point| Action::Click { point }),
            arb_point().prop_map(|point| Action::Hover { point }),
            arb_point().prop_map(|point| Action::Select { point }),
            (arb_point(), arb_point()).prop_map(|(from, to)| Action::Swipe { from, to }),
            (arb_point(), arb_point()).prop_map(|(start, end)| Action::SelectText { start, end }),
            proptest::sample::select(&Direction::ALL[..])
                .prop_map(|direction| Action::Scroll { direction }),
            text.prop_map(|text| Action::Input { text }),
            (arb_point(), text).prop_map(|(point, text)| Action::PointInput { point, text }),
            proptest::option::of(text).prop_map(|content| Action::Remember { content }),
            Just(Action::Enter),
            Just(Action::Home),
            Just(Action::Back),
            proptest::sample::select(
                &[TaskStatus::Continue, TaskStatus::Complete, TaskStatus::Infeasible][..]
            )
            .prop_map(|status| Action::SetTaskStatus { status }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_identity(action in arb_action()) {
            let text = serialize_action(&action);
            prop_assert_eq!(parse_action(&text).unwrap(), action);
        }

        #[test]
        fn serialization_is_deterministic(action in arb_action()) {
            prop_assert_eq!(serialize_action(&action), serialize_action(&action.clone()));
        }

        #[test]
        fn parser_total_on_mutated_envelopes(
            action in arb_action(),
            cut in 0usize..60,
            junk in "[ -~]{0,8}",
        ) {
            // Mutations of valid envelopes must yield a value or a typed
            // error, never a panic.
            let valid = serialize_action(&action);
            let cut = cut.min(valid.len());
            let mutated = format!("{}{}", &valid[..cut], junk);
            let _ = parse_action(&mutated);
            let _ = parse_action(&valid[cut..]);
        }
    }
}
