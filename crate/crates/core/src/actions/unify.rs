//! Dialect unification: mapping foreign action vocabularies onto the
//! canonical space.
//!
//! Source datasets name and parameterize their actions differently. A
//! unification table — a versioned data file, editable without code
//! changes — declares per-dialect mappings: the canonical target name,
//! an argument rename map (dotted paths build nested arguments, so a
//! flat `{"x": ..., "y": ...}` can become `{"point": {"x": ..., "y": ...}}`),
//! and the coordinate convention the dialect uses. Coordinates arriving
//! as pixels or `[0, 1]` floats are re-normalized onto the `[0, 1000]`
//! grid; pixel conversion needs the screen dims of the source record.
//!
//! Lookups never guess: an unmapped `(dialect, name)` pair is an error,
//! and tables with ambiguous (duplicate) mappings are rejected at load.

use super::{parse_action, Action, ActionError, ActionName, FunctionCallEnvelope};
use crate::geometry::{normalize_point, PixelPoint, ScreenDims, NORM_MAX};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnifyError {
    #[error("no mapping for action '{name}' in dialect '{dialect}'")]
    Unmapped { dialect: String, name: String },
    #[error("unknown dialect '{0}'")]
    UnknownDialect(String),
    #[error("coordinate convention '{convention}' requires screen dims")]
    MissingDims { convention: CoordinateConvention },
    #[error("argument '{path}': {reason}")]
    BadArgument { path: String, reason: String },
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("invalid unification table: {0}")]
    Table(String),
}

/// How a dialect expresses coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateConvention {
    /// Already on the `[0, 1000]` grid.
    Norm1000,
    /// Raw pixels; conversion needs screen dims.
    Pixel,
    /// Floats in `[0, 1]`.
    UnitFloat,
}

impl std::fmt::Display for CoordinateConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CoordinateConvention::Norm1000 => "norm1000",
            CoordinateConvention::Pixel => "pixel",
            CoordinateConvention::UnitFloat => "unit_float",
        };
        f.write_str(s)
    }
}

/// A dialect registered in the table, with its default coordinate
/// convention (used when standardizing records of that dialect).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialectSpec {
    pub id: String,
    pub coordinate_convention: CoordinateConvention,
}

/// One mapping row: source action to canonical action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnifyEntry {
    pub dialect: String,
    pub source_name: String,
    pub canonical_name: ActionName,
    #[serde(default)]
    pub argument_rename_map: BTreeMap<String, String>,
    pub coordinate_convention: CoordinateConvention,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableFile {
    version: u32,
    dialects: Vec<DialectSpec>,
    actions: Vec<UnifyEntry>,
}

/// The loaded, validated unification table.
#[derive(Debug, Clone)]
pub struct UnificationTable {
    version: u32,
    dialects: BTreeMap<String, CoordinateConvention>,
    entries: BTreeMap<(String, String), UnifyEntry>,
}

const BUILTIN_TABLE: &str = include_str!("../../data/unification_table.json");

impl std::str::FromStr for UnificationTable {
    type Err = UnifyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| UnifyError::Table(e.to_string()))?;
        let mut dialects = BTreeMap::new();
        for dialect in file.dialects {
            if dialects.insert(dialect.id.clone(), dialect.coordinate_convention).is_some() {
                return Err(UnifyError::Table(format!("duplicate dialect '{}'", dialect.id)));
            }
        }
        let mut entries = BTreeMap::new();
        for entry in file.actions {
            if !dialects.contains_key(&entry.dialect) {
                return Err(UnifyError::Table(format!(
                    "entry for unregistered dialect '{}'",
                    entry.dialect
                )));
            }
            let key = (entry.dialect.clone(), entry.source_name.clone());
            if entries.insert(key, entry.clone()).is_some() {
                return Err(UnifyError::Table(format!(
                    "ambiguous mapping: dialect '{}' defines '{}' twice",
                    entry.dialect, entry.source_name
                )));
            }
        }
        Ok(Self { version: file.version, dialects, entries })
    }
}

impl UnificationTable {
    /// The table shipped with the crate: `canonical`, `android_touch`
    /// and `web_click` dialects.
    pub fn builtin() -> Self {
        BUILTIN_TABLE.parse().expect("builtin table is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self, UnifyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UnifyError::Table(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn dialects(&self) -> impl Iterator<Item = &str> {
        self.dialects.keys().map(String::as_str)
    }

    pub fn has_dialect(&self, dialect: &str) -> bool {
        self.dialects.contains_key(dialect)
    }

    /// The dialect's default coordinate convention.
    pub fn dialect_convention(&self, dialect: &str) -> Result<CoordinateConvention, UnifyError> {
        self.dialects
            .get(dialect)
            .copied()
            .ok_or_else(|| UnifyError::UnknownDialect(dialect.to_string()))
    }

    pub fn lookup(&self, dialect: &str, source_name: &str) -> Result<&UnifyEntry, UnifyError> {
        if !self.dialects.contains_key(dialect) {
            return Err(UnifyError::UnknownDialect(dialect.to_string()));
        }
        self.entries
            .get(&(dialect.to_string(), source_name.to_string()))
            .ok_or_else(|| UnifyError::Unmapped {
                dialect: dialect.to_string(),
                name: source_name.to_string(),
            })
    }
}

/// Canonical point-valued argument names whose coordinates get converted.
const POINT_KEYS: [&str; 5] = ["point", "from", "to", "start", "end"];

/// Maps a foreign action onto the canonical space.
///
/// Arguments are renamed per the table entry, coordinates are brought
/// onto the `[0, 1000]` grid per the entry's convention, and the result
/// is validated through the canonical envelope parser, so the output
/// always satisfies the full action-space schema.
pub fn unify_action(
    table: &UnificationTable,
    source_name: &str,
    source_args: &Value,
    dialect: &str,
    dims: Option<ScreenDims>,
) -> Result<Action, UnifyError> {
    let entry = table.lookup(dialect, source_name)?;

    let args = match source_args {
        Value::Object(map) => map.clone(),
        other => {
            return Err(UnifyError::BadArgument {
                path: String::new(),
                reason: format!("arguments must be a JSON object, got {other}"),
            })
        }
    };

    let mut renamed = Map::new();
    for (key, value) in args {
        let target = entry.argument_rename_map.get(&key).cloned().unwrap_or_else(|| key.clone());
        insert_path(&mut renamed, &target, value)?;
    }

    convert_coordinates(&mut renamed, entry.coordinate_convention, dims)?;

    let envelope = FunctionCallEnvelope {
        name: entry.canonical_name.to_string(),
        arguments: Value::Object(renamed),
    };
    let text = serde_json::to_string(&envelope).expect("envelope serializes infallibly");
    Ok(parse_action(&text)?)
}

/// Inserts `value` at a dotted path like `point.x`, creating intermediate
/// objects as needed.
fn insert_path(root: &mut Map<String, Value>, path: &str, value: Value) -> Result<(), UnifyError> {
    let mut parts = path.split('.').peekable();
    let mut current = root;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            if current.insert(part.to_string(), value).is_some() {
                return Err(UnifyError::BadArgument {
                    path: path.to_string(),
                    reason: "rename map writes the same path twice".to_string(),
                });
            }
            return Ok(());
        }
        let slot = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        current = match slot {
            Value::Object(map) => map,
            other => {
                return Err(UnifyError::BadArgument {
                    path: path.to_string(),
                    reason: format!("path collides with non-object value {other}"),
                })
            }
        };
    }
    Ok(())
}

fn convert_coordinates(
    args: &mut Map<String, Value>,
    convention: CoordinateConvention,
    dims: Option<ScreenDims>,
) -> Result<(), UnifyError> {
    if convention == CoordinateConvention::Norm1000 {
        return Ok(());
    }
    for key in POINT_KEYS {
        let Some(slot) = args.get_mut(key) else { continue };
        let Value::Object(point) = slot else { continue };
        for axis in ["x", "y"] {
            let Some(raw) = point.get(axis) else { continue };
            let path = format!("{key}.{axis}");
            let converted = match convention {
                CoordinateConvention::Norm1000 => unreachable!(),
                CoordinateConvention::Pixel => {
                    let dims = dims.ok_or(UnifyError::MissingDims { convention })?;
                    let value = raw.as_u64().ok_or_else(|| UnifyError::BadArgument {
                        path: path.clone(),
                        reason: format!("pixel coordinate must be an unsigned integer, got {raw}"),
                    })?;
                    let value = u32::try_from(value).map_err(|_| UnifyError::BadArgument {
                        path: path.clone(),
                        reason: format!("pixel coordinate {value} too large"),
                    })?;
                    // Convert per-axis through a point on that axis.
                    let pixel = match axis {
                        "x" => PixelPoint { x: value, y: 0 },
                        _ => PixelPoint { x: 0, y: value },
                    };
                    let norm = normalize_point(pixel, dims).map_err(|e| UnifyError::BadArgument {
                        path: path.clone(),
                        reason: e.to_string(),
                    })?;
                    u64::from(if axis == "x" { norm.x() } else { norm.y() })
                }
                CoordinateConvention::UnitFloat => {
                    let value = raw.as_f64().ok_or_else(|| UnifyError::BadArgument {
                        path: path.clone(),
                        reason: format!("unit-float coordinate must be a number, got {raw}"),
                    })?;
                    if !(0.0..=1.0).contains(&value) {
                        return Err(UnifyError::BadArgument {
                            path,
                            reason: format!("unit-float coordinate {value} outside [0, 1]"),
                        });
                    }
                    (value * f64::from(NORM_MAX) + 0.5).floor() as u64
                }
            };
            point.insert(axis.to_string(), Value::from(converted));
        }
    }
    Ok(())
}
