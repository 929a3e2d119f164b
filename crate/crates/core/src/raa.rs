//! Reference-augmented annotation: inline markers that bind spans of
//! response text to screen locations.
//!
//! A marker wraps the text it grounds and carries the reference type,
//! coordinates and an optional note:
//!
//! ```text
//! Tap <ref type="point" x="500" y="500" note="submit">the Submit button</ref> to continue
//! <ref type="box" x1="120" y1="80" x2="480" y2="140">Search field</ref>
//! ```
//!
//! Markers cannot nest. Emission is canonical: attributes appear in the
//! fixed order `type`, coordinates, `note`, separated by single spaces,
//! with `&` and `"` in note values escaped as `&amp;` and `&quot;`.
//! Strict parsing accepts exactly the canonical form (so `emit ∘ parse`
//! is the identity on every accepted string); lenient parsing demotes
//! anything malformed to plain text instead of failing. The full grammar
//! is documented in `docs/raa-format.md`.

use crate::geometry::{NormBox, NormPoint};
pub use crate::geometry::ParseMode;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RaaError {
    #[error("malformed marker at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("nested marker at byte {offset}")]
    Nested { offset: usize },
    #[error("unclosed marker opened at byte {offset}")]
    Unclosed { offset: usize },
    #[error("empty reference content at byte {offset}")]
    EmptyContent { offset: usize },
    #[error("invalid reference content: {reason}")]
    InvalidContent { reason: String },
}

/// Spatial payload of a reference: a rectangular region or a single location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ref_type", rename_all = "snake_case")]
pub enum RefCoords {
    Point(NormPoint),
    Box(NormBox),
}

/// One reference marker: coordinates, an optional annotative note, and
/// the span of text the marker wraps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaaReference {
    #[serde(flatten)]
    pub coords: RefCoords,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub content: String,
}

impl RaaReference {
    /// Builds a reference, rejecting content that is empty or would be
    /// ambiguous to re-parse (content containing marker delimiters).
    pub fn new(
        coords: RefCoords,
        note: Option<String>,
        content: impl Into<String>,
    ) -> Result<Self, RaaError> {
        let content = content.into();
        if content.is_empty() {
            return Err(RaaError::InvalidContent {
                reason: "reference content must be non-empty".into(),
            });
        }
        if content.contains("</ref>") || contains_marker_start(&content) {
            return Err(RaaError::InvalidContent {
                reason: "reference content may not contain marker delimiters".into(),
            });
        }
        Ok(Self { coords, note, content })
    }
}

/// One segment of an annotated text: either verbatim prose or a reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RaaSegment {
    PlainText { text: String },
    Reference(RaaReference),
}

/// An ordered list of segments. Construction via [`RaaDocument::push_plain`]
/// and [`RaaDocument::push_reference`] keeps the document canonical: no
/// empty plain segments and no two adjacent plain segments.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RaaDocument {
    segments: Vec<RaaSegment>,
}

impl RaaDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[RaaSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Appends prose, merging into a preceding plain segment and dropping
    /// empty pushes.
    pub fn push_plain(&mut self, text: &str) {
        if text.is_empty() {
            return;
        }
        if let Some(RaaSegment::PlainText { text: last }) = self.segments.last_mut() {
            last.push_str(text);
        } else {
            self.segments.push(RaaSegment::PlainText { text: text.to_string() });
        }
    }

    pub fn push_reference(&mut self, reference: RaaReference) {
        self.segments.push(RaaSegment::Reference(reference));
    }

    /// All reference segments in document order.
    pub fn references(&self) -> impl Iterator<Item = &RaaReference> {
        self.segments.iter().filter_map(|s| match s {
            RaaSegment::Reference(r) => Some(r),
            RaaSegment::PlainText { .. } => None,
        })
    }

    /// The plain-text view: markers dropped, reference content kept in place.
    pub fn stripped(&self) -> String {
        let mut out = String::new();
        for segment in &self.segments {
            match segment {
                RaaSegment::PlainText { text } => out.push_str(text),
                RaaSegment::Reference(r) => out.push_str(&r.content),
            }
        }
        out
    }

    /// Checks that the document is canonical, i.e. survives one
    /// emit/parse cycle unchanged.
    pub fn validate(&self) -> Result<(), RaaError> {
        let reparsed = parse_raa(&emit_raa(self), ParseMode::Strict)?;
        if &reparsed != self {
            return Err(RaaError::InvalidContent {
                reason: "document is not canonical: emit/parse cycle changed it".into(),
            });
        }
        Ok(())
    }
}

/// True if `text` contains a marker start (`<ref` followed by whitespace
/// or `>`), which is what the parser treats as a marker candidate.
fn contains_marker_start(text: &str) -> bool {
    find_marker_start(text.as_bytes(), 0).is_some()
}

fn find_marker_start(bytes: &[u8], from: usize) -> Option<usize> {
    let mut pos = from;
    while pos < bytes.len() {
        let at = pos + bytes[pos..].iter().position(|&b| b == b'<')?;
        if bytes[at..].starts_with(b"<ref") {
            if let Some(b' ' | b'\t' | b'\n' | b'\r' | b'>') = bytes.get(at + 4) {
                return Some(at);
            }
        }
        pos = at + 1;
    }
    None
}

/// Parses annotated text into a document.
///
/// Every well-formed marker becomes a reference segment; all other bytes
/// are preserved verbatim as plain text. In strict mode a malformed
/// marker is an error carrying its byte offset; in lenient mode it is
/// kept as plain text.
pub fn parse_raa(text: &str, mode: ParseMode) -> Result<RaaDocument, RaaError> {
    let bytes = text.as_bytes();
    let mut doc = RaaDocument::new();
    let mut plain_start = 0;
    let mut pos = 0;
    while let Some(at) = find_marker_start(bytes, pos) {
        match parse_marker(text, at, mode) {
            Ok((reference, end)) => {
                doc.push_plain(&text[plain_start..at]);
                doc.push_reference(reference);
                plain_start = end;
                pos = end;
            }
            Err(err) => match mode {
                ParseMode::Strict => return Err(err),
                // The candidate stays plain text; resume after its '<'.
                ParseMode::Lenient => pos = at + 1,
            },
        }
    }
    doc.push_plain(&text[plain_start..]);
    Ok(doc)
}

/// Renders a document back to its canonical marker form.
pub fn emit_raa(doc: &RaaDocument) -> String {
    let mut out = String::new();
    for segment in doc.segments() {
        match segment {
            RaaSegment::PlainText { text } => out.push_str(text),
            RaaSegment::Reference(r) => emit_reference(&mut out, r),
        }
    }
    out
}

/// Removes markers from annotated text, keeping reference content in place.
pub fn strip_raa(text: &str, mode: ParseMode) -> Result<String, RaaError> {
    Ok(parse_raa(text, mode)?.stripped())
}

fn emit_reference(out: &mut String, r: &RaaReference) {
    match r.coords {
        RefCoords::Point(p) => {
            out.push_str(&format!("<ref type=\"point\" x=\"{}\" y=\"{}\"", p.x(), p.y()));
        }
        RefCoords::Box(b) => {
            out.push_str(&format!(
                "<ref type=\"box\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"",
                b.x1(),
                b.y1(),
                b.x2(),
                b.y2()
            ));
        }
    }
    if let Some(note) = &r.note {
        out.push_str(" note=\"");
        out.push_str(&escape_attr(note));
        out.push('"');
    }
    out.push('>');
    out.push_str(&r.content);
    out.push_str("</ref>");
}

fn escape_attr(value: &str) -> String {
    value.replace('&', "&amp;").replace('"', "&quot;")
}

fn unescape_attr(value: &str) -> String {
    value.replace("&quot;", "\"").replace("&amp;", "&")
}

const POINT_ATTRS: [&str; 2] = ["x", "y"];
const BOX_ATTRS: [&str; 4] = ["x1", "y1", "x2", "y2"];

fn malformed(offset: usize, reason: impl Into<String>) -> RaaError {
    RaaError::Malformed { offset, reason: reason.into() }
}

/// Parses one marker starting at `start` (which points at `<ref`).
/// Returns the reference and the byte offset just past `</ref>`.
fn parse_marker(
    text: &str,
    start: usize,
    mode: ParseMode,
) -> Result<(RaaReference, usize), RaaError> {
    let bytes = text.as_bytes();
    let mut cursor = start + 4; // past "<ref"

    let mut attrs: Vec<(String, String, usize)> = Vec::new();
    loop {
        // Separator before an attribute or the closing '>'.
        let ws_start = cursor;
        while cursor < bytes.len() && bytes[cursor].is_ascii_whitespace() {
            cursor += 1;
        }
        if cursor >= bytes.len() {
            return Err(RaaError::Unclosed { offset: start });
        }
        if bytes[cursor] == b'>' {
            if mode == ParseMode::Strict && cursor != ws_start {
                return Err(malformed(ws_start, "whitespace before '>'"));
            }
            cursor += 1;
            break;
        }
        if mode == ParseMode::Strict && (cursor - ws_start != 1 || bytes[ws_start] != b' ') {
            return Err(malformed(ws_start, "attributes must be separated by one space"));
        }
        if cursor == ws_start {
            return Err(malformed(cursor, "expected whitespace before attribute"));
        }

        let name_start = cursor;
        while cursor < bytes.len()
            && (bytes[cursor].is_ascii_lowercase() || bytes[cursor].is_ascii_digit())
        {
            cursor += 1;
        }
        if cursor == name_start {
            return Err(malformed(cursor, "expected attribute name"));
        }
        let name = &text[name_start..cursor];
        if bytes.get(cursor) != Some(&b'=') {
            return Err(malformed(cursor, format!("expected '=' after attribute '{name}'")));
        }
        cursor += 1;
        if bytes.get(cursor) != Some(&b'"') {
            return Err(malformed(cursor, format!("expected '\"' opening value of '{name}'")));
        }
        cursor += 1;
        let value_start = cursor;
        while cursor < bytes.len() && bytes[cursor] != b'"' {
            cursor += 1;
        }
        if cursor >= bytes.len() {
            return Err(RaaError::Unclosed { offset: start });
        }
        attrs.push((name.to_string(), text[value_start..cursor].to_string(), value_start));
        cursor += 1;
    }

    let reference = build_reference(&attrs, start, mode)?;

    // Content runs to the closing tag; an inner marker start is nesting.
    let content_start = cursor;
    let close = match text[cursor..].find("</ref>") {
        Some(rel) => cursor + rel,
        None => return Err(RaaError::Unclosed { offset: start }),
    };
    if let Some(inner) = find_marker_start(bytes, content_start) {
        if inner < close {
            return Err(RaaError::Nested { offset: inner });
        }
    }
    if close == content_start {
        return Err(RaaError::EmptyContent { offset: content_start });
    }
    let content = &text[content_start..close];

    Ok((
        RaaReference {
            coords: reference.coords,
            note: reference.note,
            content: content.to_string(),
        },
        close + "</ref>".len(),
    ))
}

struct ParsedAttrs {
    coords: RefCoords,
    note: Option<String>,
}

fn build_reference(
    attrs: &[(String, String, usize)],
    marker_offset: usize,
    mode: ParseMode,
) -> Result<ParsedAttrs, RaaError> {
    let mut names: Vec<&str> = Vec::new();
    for (name, _, offset) in attrs {
        if names.contains(&name.as_str()) {
            return Err(malformed(*offset, format!("duplicate attribute '{name}'")));
        }
        names.push(name);
    }

    let lookup = |wanted: &str| -> Option<&(String, String, usize)> {
        attrs.iter().find(|(name, _, _)| name == wanted)
    };

    let (ref_type, _, _) = lookup("type")
        .ok_or_else(|| malformed(marker_offset, "missing 'type' attribute"))
        .map(|(_, v, o)| (v.clone(), (), *o))?;

    let coord_names: &[&str] = match ref_type.as_str() {
        "point" => &POINT_ATTRS,
        "box" => &BOX_ATTRS,
        other => {
            return Err(malformed(
                marker_offset,
                format!("unknown reference type '{other}', expected 'point' or 'box'"),
            ))
        }
    };

    let mut expected: Vec<&str> = vec!["type"];
    expected.extend_from_slice(coord_names);
    let has_note = lookup("note").is_some();
    if has_note {
        expected.push("note");
    }
    for (name, _, offset) in attrs {
        if !expected.contains(&name.as_str()) {
            return Err(malformed(*offset, format!("unexpected attribute '{name}'")));
        }
    }
    if mode == ParseMode::Strict {
        // Canonical order is part of the strict grammar.
        if names != expected {
            return Err(malformed(
                marker_offset,
                format!("attributes must appear in order {}", expected.join(", ")),
            ));
        }
    }

    let mut values = Vec::with_capacity(coord_names.len());
    for coord in coord_names {
        let (_, value, offset) = lookup(coord)
            .ok_or_else(|| malformed(marker_offset, format!("missing '{coord}' attribute")))?;
        values.push(parse_coord(value, *offset, mode)?);
    }

    let coords = match ref_type.as_str() {
        "point" => RefCoords::Point(
            NormPoint::new(values[0], values[1])
                .map_err(|e| malformed(marker_offset, e.to_string()))?,
        ),
        _ => RefCoords::Box(
            NormBox::new(values[0], values[1], values[2], values[3])
                .map_err(|e| malformed(marker_offset, e.to_string()))?,
        ),
    };

    let note = lookup("note").map(|(_, v, _)| unescape_attr(v));
    Ok(ParsedAttrs { coords, note })
}

fn parse_coord(value: &str, offset: usize, mode: ParseMode) -> Result<u16, RaaError> {
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(offset, format!("coordinate '{value}' is not an unsigned integer")));
    }
    if mode == ParseMode::Strict && value.len() > 1 && value.starts_with('0') {
        return Err(malformed(offset, format!("coordinate '{value}' has a leading zero")));
    }
    value
        .parse::<u16>()
        .map_err(|_| malformed(offset, format!("coordinate '{value}' out of range")))
}
