//! Constant names: normalized requirement id followed by normalized title.

use std::collections::HashMap;

use super::CodegenError;

pub const DEFAULT_MAX_NAME_LENGTH: usize = 80;

/// Uppercases ASCII alphanumerics and collapses every run of anything else
/// into a single `_`, trimming underscores at both ends.
pub fn normalize_segment(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_sep = false;
    for c in text.chars() {
        if c.is_ascii_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.push(c.to_ascii_uppercase());
        } else {
            pending_sep = true;
        }
    }
    out
}

/// Normalized id segment. Ids starting with a digit get an `R_` prefix so the
/// result is a valid identifier.
pub fn normalize_id(id: &str) -> Result<String, CodegenError> {
    let seg = normalize_segment(id);
    match seg.chars().next() {
        None => Err(CodegenError::EmptyIdentifier(id.to_string())),
        Some(c) if c.is_ascii_digit() => Ok(format!("R_{seg}")),
        Some(_) => Ok(seg),
    }
}

/// `normalize_name_with_limit` at the default 80-character limit.
pub fn normalize_name(id: &str, title: &str) -> Result<String, CodegenError> {
    normalize_name_with_limit(id, title, DEFAULT_MAX_NAME_LENGTH)
}

pub fn normalize_name_with_limit(id: &str, title: &str, max_len: usize) -> Result<String, CodegenError> {
    Ok(truncate(&untruncated_name(id, title)?, id_len(id)?, max_len))
}

fn id_len(id: &str) -> Result<usize, CodegenError> {
    normalize_id(id).map(|s| s.len())
}

fn untruncated_name(id: &str, title: &str) -> Result<String, CodegenError> {
    let id_seg = normalize_id(id)?;
    let title_seg = normalize_segment(title);
    if title_seg.is_empty() {
        if !title.trim().is_empty() {
            tracing::warn!(
                requirement = id,
                "title {title:?} has no usable characters; using id-only name"
            );
        }
        return Ok(id_seg);
    }
    Ok(format!("{id_seg}_{title_seg}"))
}

/// Cuts `name` to at most `max_len` characters, backing off to a word
/// boundary inside the title part when one exists.
fn truncate(name: &str, id_len: usize, max_len: usize) -> String {
    if name.len() <= max_len {
        return name.to_string();
    }
    let max_len = max_len.max(1);
    let hard = &name[..max_len];
    if name.as_bytes()[max_len] == b'_' {
        return hard.trim_end_matches('_').to_string();
    }
    match hard.rfind('_') {
        Some(pos) if pos > id_len => hard[..pos].to_string(),
        _ => hard.trim_end_matches('_').to_string(),
    }
}

/// Names every `(id, title)` pair, resolving clashes that only exist because
/// of truncation with `_2`, `_3`, ... suffixes (in input order). Two inputs
/// whose untruncated names already coincide are a collision error.
pub fn assign_constant_names<'a>(
    entries: impl IntoIterator<Item = (&'a str, &'a str)>,
    max_len: usize,
) -> Result<Vec<String>, CodegenError> {
    let mut full_owner: HashMap<String, &str> = HashMap::new();
    let mut taken: HashMap<String, &str> = HashMap::new();
    let mut out = Vec::new();
    for (id, title) in entries {
        let full = untruncated_name(id, title)?;
        if let Some(first) = full_owner.insert(full.clone(), id) {
            return Err(CodegenError::Collision {
                name: full,
                first: first.to_string(),
                second: id.to_string(),
            });
        }
        let base = truncate(&full, id_len(id)?, max_len);
        let mut candidate = base.clone();
        let mut n = 2;
        while taken.contains_key(&candidate) {
            let suffix = format!("_{n}");
            let room = max_len.saturating_sub(suffix.len()).max(1);
            let stem = if base.len() > room {
                base[..room].trim_end_matches('_')
            } else {
                &base
            };
            candidate = format!("{stem}{suffix}");
            n += 1;
        }
        taken.insert(candidate.clone(), id);
        out.push(candidate);
    }
    Ok(out)
}
