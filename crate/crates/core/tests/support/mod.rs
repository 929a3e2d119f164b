//! Shared test support: an independent reference parser for the
//! annotation format and the golden-corpus input list.
//!
//! The reference parser deliberately uses a different decomposition
//! strategy from the library (close-tag splitting instead of forward
//! scanning) so the two routes can check each other. It assumes
//! well-formed canonical input, which is all the golden corpus contains.

use guiact::geometry::{NormBox, NormPoint};
use guiact::raa::{RaaDocument, RaaReference, RefCoords};

/// Parses canonical annotated text by splitting on close tags.
pub fn reference_parse(text: &str) -> Result<RaaDocument, String> {
    let mut doc = RaaDocument::new();
    let chunks: Vec<&str> = text.split("</ref>").collect();
    let (body, tail) = chunks.split_at(chunks.len() - 1);
    for chunk in body {
        match chunk.rfind("<ref ") {
            Some(at) => {
                doc.push_plain(&chunk[..at]);
                doc.push_reference(parse_marker_body(&chunk[at..])?);
            }
            None => {
                // The close tag we split on was plain text.
                doc.push_plain(chunk);
                doc.push_plain("</ref>");
            }
        }
    }
    doc.push_plain(tail[0]);
    Ok(doc)
}

fn parse_marker_body(marker: &str) -> Result<RaaReference, String> {
    let mut rest = marker.strip_prefix("<ref ").ok_or("missing opener")?;
    let mut attrs: Vec<(&str, &str)> = Vec::new();
    let content = loop {
        if let Some(content) = rest.strip_prefix('>') {
            break content;
        }
        let trimmed = rest.strip_prefix(' ').unwrap_or(rest);
        let (name, after) = trimmed.split_once("=\"").ok_or("missing attribute value")?;
        let (value, remainder) = after.split_once('"').ok_or("unterminated value")?;
        attrs.push((name, value));
        rest = remainder;
    };

    let get = |key: &str| attrs.iter().find(|(name, _)| *name == key).map(|(_, value)| *value);
    let coord = |key: &str| -> Result<u16, String> {
        get(key)
            .ok_or_else(|| format!("missing '{key}'"))?
            .parse::<u16>()
            .map_err(|e| format!("{key}: {e}"))
    };
    let coords = match get("type").ok_or("missing 'type'")? {
        "point" => RefCoords::Point(
            NormPoint::new(coord("x")?, coord("y")?).map_err(|e| e.to_string())?,
        ),
        "box" => RefCoords::Box(
            NormBox::new(coord("x1")?, coord("y1")?, coord("x2")?, coord("y2")?)
                .map_err(|e| e.to_string())?,
        ),
        other => return Err(format!("unknown type '{other}'")),
    };
    let note = get("note").map(|v| v.replace("&quot;", "\"").replace("&amp;", "&"));
    RaaReference::new(coords, note, content).map_err(|e| e.to_string())
}

/// The 50 golden inputs: 30 hand-written shapes plus 20 generated
/// variations. All canonical, so emit(parse(x)) == x holds byte-exactly.
pub fn golden_inputs() -> Vec<String> {
    let mut inputs: Vec<String> = vec![
        String::new(),
        "plain text only".into(),
        "multi\nline\nplain text".into(),
        "unicode: café ≥ 80% 完成".into(),
        "angle brackets < > but no markers".into(),
        "<ref type=\"point\" x=\"0\" y=\"0\">origin</ref>".into(),
        "<ref type=\"point\" x=\"1000\" y=\"1000\">corner</ref>".into(),
        "Tap <ref type=\"point\" x=\"500\" y=\"500\" note=\"submit\">the Submit button</ref> to continue".into(),
        "<ref type=\"point\" x=\"7\" y=\"9\" note=\"say &quot;hi&quot; &amp; bye\">greeting</ref>".into(),
        "prefix <ref type=\"point\" x=\"12\" y=\"34\">mid</ref> suffix".into(),
        "<ref type=\"box\" x1=\"0\" y1=\"0\" x2=\"1000\" y2=\"1000\">whole screen</ref>".into(),
        "<ref type=\"box\" x1=\"10\" y1=\"10\" x2=\"10\" y2=\"10\">degenerate box</ref>".into(),
        "see <ref type=\"box\" x1=\"120\" y1=\"80\" x2=\"480\" y2=\"140\" note=\"search\">the search field</ref> above".into(),
        "<ref type=\"point\" x=\"1\" y=\"2\">a</ref><ref type=\"point\" x=\"3\" y=\"4\">b</ref>".into(),
        "<ref type=\"point\" x=\"1\" y=\"2\">a</ref> and <ref type=\"box\" x1=\"5\" y1=\"6\" x2=\"7\" y2=\"8\">b</ref>".into(),
        "ends with marker <ref type=\"point\" x=\"42\" y=\"24\">end</ref>".into(),
        "<ref type=\"point\" x=\"9\" y=\"1\">start</ref> begins the text".into(),
        "stray closer </ref> stays plain".into(),
        "see <reference counting> for details".into(),
        "<ref type=\"point\" x=\"5\" y=\"5\" note=\"two\nlines\">noted</ref>".into(),
        "<ref type=\"point\" x=\"9\" y=\"9\">a > b</ref>".into(),
        "<ref type=\"point\" x=\"9\" y=\"8\">say \"what\"</ref>".into(),
        "<ref type=\"point\" x=\"3\" y=\"7\" note=\"a > b\">angled note</ref>".into(),
        "Fill the form, press enter, and wait: <ref type=\"box\" x1=\"50\" y1=\"60\" x2=\"70\" y2=\"80\">OK</ref>.".into(),
        "line1\n<ref type=\"point\" x=\"11\" y=\"12\">x</ref>\nline3".into(),
        "first <ref type=\"point\" x=\"1\" y=\"1\">one</ref> second <ref type=\"point\" x=\"2\" y=\"2\">two</ref> third <ref type=\"point\" x=\"3\" y=\"3\">three</ref> done".into(),
        "<ref type=\"box\" x1=\"0\" y1=\"0\" x2=\"1\" y2=\"1\" note=\"tiny\">t</ref> then <ref type=\"point\" x=\"999\" y=\"998\">almost</ref>".into(),
        "tab\there and <ref type=\"point\" x=\"66\" y=\"77\">target</ref>".into(),
        "<ref type=\"box\" x1=\"100\" y1=\"200\" x2=\"300\" y2=\"400\" note=\"&amp;&amp;\">amp note</ref>".into(),
        "mixed </ref> stray then real <ref type=\"point\" x=\"8\" y=\"8\">hit</ref>".into(),
    ];
    for i in 0..20u16 {
        let x = (i * 53) % 1001;
        let y = (i * 97) % 1001;
        let note = if i % 3 == 0 { format!(" note=\"note {i}\"") } else { String::new() };
        let marker = if i % 2 == 0 {
            format!("<ref type=\"point\" x=\"{x}\" y=\"{y}\"{note}>target {i}</ref>")
        } else {
            let x2 = x + (1000 - x) / 2;
            let y2 = y + (1000 - y) / 2;
            format!(
                "<ref type=\"box\" x1=\"{x}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y2}\"{note}>region {i}</ref>"
            )
        };
        inputs.push(format!("case {i}: {marker} end."));
    }
    assert_eq!(inputs.len(), 50);
    inputs
}
