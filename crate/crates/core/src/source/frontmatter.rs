//! Requirement files: a `---` delimited block of `key: value` lines followed by
//! a free-text body.
//!
//! ```text
//! ---
//! id: SWR-101
//! title: Validate sensor range on input
//! status: Approved
//! last_modified: 2026-01-10T09:00:00Z
//! category: SWR
//! scope: feature/sensor-fusion
//! ---
//! Free text.
//! ```
//!
//! Values may be wrapped in matching single or double quotes. Blank lines and
//! lines starting with `#` inside the block are ignored. Unknown keys are kept
//! in [`Requirement::extra`](super::Requirement::extra).

use std::collections::BTreeMap;

use super::{RawRequirement, SourceError};

const DELIMITER: &str = "---";

pub(crate) fn parse_requirement_file(file: &str, content: &str) -> Result<RawRequirement, SourceError> {
    let err = |line: usize, message: &str| SourceError::Parse {
        file: file.to_string(),
        line,
        message: message.to_string(),
    };

    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let mut lines = content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    // Leading blank lines are tolerated before the opening delimiter.
    let opening = lines.by_ref().find(|(_, l)| !l.trim().is_empty());
    match opening {
        Some((_, l)) if l.trim_end() == DELIMITER => {}
        Some((n, _)) => return Err(err(n, "expected front-matter opening `---`")),
        None => return Err(err(1, "empty file; expected front-matter block")),
    }

    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut closed_at = None;
    for (n, line) in lines {
        if line.trim_end() == DELIMITER {
            closed_at = Some(n);
            break;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(err(n, &format!("expected `key: value`, found {trimmed:?}")));
        };
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(err(n, &format!("invalid key {key:?}")));
        }
        if fields.contains_key(&key) {
            return Err(err(n, &format!("duplicate key `{key}`")));
        }
        fields.insert(key, (n, unquote(value.trim()).to_string()));
    }
    let Some(closed_at) = closed_at else {
        return Err(err(content.lines().count().max(1), "unterminated front-matter block"));
    };

    let mut raw = RawRequirement::default();
    for required in ["id", "title", "status", "last_modified", "category"] {
        if !fields.contains_key(required) {
            return Err(err(closed_at, &format!("missing required key `{required}`")));
        }
    }
    let id_line = fields["id"].0;
    raw.origin = format!("{file}:{id_line}");
    for (key, (_, value)) in fields {
        match key.as_str() {
            "id" => raw.id = Some(value),
            "title" => raw.title = Some(value),
            "status" => raw.status = Some(value),
            "last_modified" => raw.last_modified = Some(value),
            "category" => raw.category = Some(value),
            "scope" => raw.scope = Some(value),
            _ => {
                raw.extra.insert(key, value);
            }
        }
    }
    Ok(raw)
}

fn unquote(value: &str) -> &str {
    for q in ['"', '\''] {
        if value.len() >= 2 && value.starts_with(q) && value.ends_with(q) {
            return &value[1..value.len() - 1];
        }
    }
    value
}
