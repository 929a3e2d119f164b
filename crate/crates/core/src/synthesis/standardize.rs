//! Stage-1 record standardization: foreign grounding/QA/understanding
//! records become canonical SFT samples with normalized coordinates,
//! templated instructions where the source ones are ambiguous, and
//! reference-augmented annotations wherever a spatial target exists.

use super::{SampleSource, SynthesisError, TaskKind, TemplateSet};
use crate::actions::{CoordinateConvention, UnificationTable};
use crate::chat::ChatMessage;
use crate::geometry::{
    normalize_box, normalize_point, NormBox, NormPoint, ParseMode, PixelBox, PixelPoint,
    ScreenDims, NORM_MAX,
};
use crate::raa::{emit_raa, parse_raa, RaaDocument, RaaReference, RefCoords};
use crate::synthesis::SFTSample;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Grounding,
    Qa,
    Understanding,
}

impl RecordKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordKind::Grounding => "grounding",
            RecordKind::Qa => "qa",
            RecordKind::Understanding => "understanding",
        }
    }

    fn task_kind(&self) -> TaskKind {
        match self {
            RecordKind::Grounding => TaskKind::Stage1Grounding,
            RecordKind::Qa => TaskKind::Stage1Qa,
            RecordKind::Understanding => TaskKind::Stage1Understanding,
        }
    }
}

/// The spatial target of a record, in the dialect's own units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTarget {
    pub label: String,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_coords: Option<[f64; 4]>,
    #[serde(default, rename = "point", skip_serializing_if = "Option::is_none")]
    pub point_coords: Option<[f64; 2]>,
}

/// One foreign record as it arrives from a dataset adapter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub dialect: String,
    pub kind: RecordKind,
    pub dims: ScreenDims,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instruction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RawTarget>,
    pub source: SampleSource,
}

fn bad_field(path: &str, reason: impl Into<String>) -> SynthesisError {
    SynthesisError::Standardize { path: path.to_string(), reason: reason.into() }
}

fn to_norm_unit(value: f64, path: &str) -> Result<u16, SynthesisError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(bad_field(path, format!("unit-float {value} outside [0, 1]")));
    }
    Ok((value * f64::from(NORM_MAX) + 0.5).floor() as u16)
}

fn to_pixel(value: f64, path: &str) -> Result<u32, SynthesisError> {
    if value < 0.0 || value.fract() != 0.0 {
        return Err(bad_field(path, format!("pixel coordinate {value} is not a whole number")));
    }
    Ok(value as u32)
}

fn to_norm_int(value: f64, path: &str) -> Result<u16, SynthesisError> {
    if value < 0.0 || value.fract() != 0.0 || value > f64::from(NORM_MAX) {
        return Err(bad_field(path, format!("normalized coordinate {value} invalid")));
    }
    Ok(value as u16)
}

/// Brings a raw target's coordinates onto the `[0, 1000]` grid per the
/// dialect convention.
fn normalize_target(
    target: &RawTarget,
    convention: CoordinateConvention,
    dims: ScreenDims,
) -> Result<RefCoords, SynthesisError> {
    match (&target.box_coords, &target.point_coords) {
        (Some(b), _) => {
            let coords = match convention {
                CoordinateConvention::Norm1000 => NormBox::new(
                    to_norm_int(b[0], "target.box[0]")?,
                    to_norm_int(b[1], "target.box[1]")?,
                    to_norm_int(b[2], "target.box[2]")?,
                    to_norm_int(b[3], "target.box[3]")?,
                )
                .map_err(|e| bad_field("target.box", e.to_string()))?,
                CoordinateConvention::Pixel => normalize_box(
                    PixelBox {
                        x1: to_pixel(b[0], "target.box[0]")?,
                        y1: to_pixel(b[1], "target.box[1]")?,
                        x2: to_pixel(b[2], "target.box[2]")?,
                        y2: to_pixel(b[3], "target.box[3]")?,
                    },
                    dims,
                )
                .map_err(|e| bad_field("target.box", e.to_string()))?,
                CoordinateConvention::UnitFloat => NormBox::new(
                    to_norm_unit(b[0], "target.box[0]")?,
                    to_norm_unit(b[1], "target.box[1]")?,
                    to_norm_unit(b[2], "target.box[2]")?,
                    to_norm_unit(b[3], "target.box[3]")?,
                )
                .map_err(|e| bad_field("target.box", e.to_string()))?,
            };
            Ok(RefCoords::Box(coords))
        }
        (None, Some(p)) => {
            let coords = match convention {
                CoordinateConvention::Norm1000 => NormPoint::new(
                    to_norm_int(p[0], "target.point[0]")?,
                    to_norm_int(p[1], "target.point[1]")?,
                )
                .map_err(|e| bad_field("target.point", e.to_string()))?,
                CoordinateConvention::Pixel => normalize_point(
                    PixelPoint {
                        x: to_pixel(p[0], "target.point[0]")?,
                        y: to_pixel(p[1], "target.point[1]")?,
                    },
                    dims,
                )
                .map_err(|e| bad_field("target.point", e.to_string()))?,
                CoordinateConvention::UnitFloat => NormPoint::new(
                    to_norm_unit(p[0], "target.point[0]")?,
                    to_norm_unit(p[1], "target.point[1]")?,
                )
                .map_err(|e| bad_field("target.point", e.to_string()))?,
            };
            Ok(RefCoords::Point(coords))
        }
        (None, None) => Err(bad_field("target", "target has neither box nor point coordinates")),
    }
}

/// Wraps the first occurrence of the target label in a response with a
/// reference marker. Responses that already carry references are left
/// untouched; labels absent from the text get an appended canonical
/// sentence instead.
fn annotate_response(
    response: &str,
    label: &str,
    coords: RefCoords,
) -> Result<String, SynthesisError> {
    let existing = parse_raa(response, ParseMode::Lenient)?;
    if existing.references().count() > 0 {
        return Ok(response.to_string());
    }
    let reference = RaaReference::new(coords, None, label.to_string())?;
    if let Some(at) = response.find(label) {
        let mut doc = RaaDocument::new();
        doc.push_plain(&response[..at]);
        doc.push_reference(reference);
        doc.push_plain(&response[at + label.len()..]);
        return Ok(emit_raa(&doc));
    }
    let mut doc = RaaDocument::new();
    doc.push_plain(response);
    doc.push_plain(" See ");
    doc.push_reference(reference);
    doc.push_plain(".");
    Ok(emit_raa(&doc))
}

/// Standardizes one record into an SFT sample.
///
/// Coordinates are normalized per the dialect's registered convention,
/// missing or blank instructions are rewritten from the template
/// registry, and the final response must pass a strict annotation parse.
pub fn standardize_record(
    record: &RawRecord,
    table: &UnificationTable,
    templates: &TemplateSet,
) -> Result<SFTSample, SynthesisError> {
    let convention = table.dialect_convention(&record.dialect)?;

    let target = record
        .target
        .as_ref()
        .map(|t| Ok::<_, SynthesisError>((t.label.clone(), normalize_target(t, convention, record.dims)?)))
        .transpose()?;

    // Instruction: ambiguous (missing or blank) instructions are rebuilt
    // from the registry.
    let instruction = match record.instruction.as_deref().map(str::trim) {
        Some(text) if !text.is_empty() => text.to_string(),
        _ => {
            let template = templates
                .instruction_template(record.kind.as_str())
                .ok_or_else(|| bad_field("instruction", "missing and no template registered"))?;
            let label = target.as_ref().map(|(label, _)| label.clone()).unwrap_or_default();
            if template.contains("{label}") && label.is_empty() {
                return Err(bad_field("target.label", "instruction template needs a target"));
            }
            let mut vars = BTreeMap::new();
            vars.insert("label", label);
            super::templates::render(template, &vars)
        }
    };

    // Response: annotate spatial targets; synthesize a canonical response
    // when the source has none and a template exists.
    let response = match (record.response.as_deref().map(str::trim), &target) {
        (Some(text), Some((label, coords))) if !text.is_empty() => {
            annotate_response(text, label, *coords)?
        }
        (Some(text), None) if !text.is_empty() => text.to_string(),
        (_, Some((label, coords))) => {
            let template = templates
                .response_template(record.kind.as_str())
                .ok_or_else(|| bad_field("response", "missing and no template registered"))?;
            let reference = RaaReference::new(*coords, None, label.clone())?;
            let mut doc = RaaDocument::new();
            doc.push_reference(reference);
            let mut vars = BTreeMap::new();
            vars.insert("raa", emit_raa(&doc));
            super::templates::render(template, &vars)
        }
        (_, None) => return Err(bad_field("response", "missing and record has no target")),
    };

    // Every emitted response must parse strictly, coordinates included.
    parse_raa(&response, ParseMode::Strict)?;

    let mut user = String::new();
    if let Some(screen) = record.screen_text.as_deref() {
        if !screen.trim().is_empty() {
            user.push_str("Screen:\n");
            user.push_str(screen);
            user.push_str("\n\n");
        }
    }
    user.push_str(&instruction);

    Ok(SFTSample {
        messages: vec![
            ChatMessage::system(templates.system_prompt("default")),
            ChatMessage::user(user),
            ChatMessage::assistant(response),
        ],
        source: record.source.clone(),
        task_kind: record.kind.task_kind(),
    })
}
