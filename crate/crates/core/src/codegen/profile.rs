//! Language profiles: template data describing how a requirement set is
//! rendered for one target language.
//!
//! Profiles are TOML files. Built-in ones live in `templates/` and are
//! compiled in; a configured template directory can add or override them by
//! `profile_id`. Placeholders use `{{name}}` syntax; see `docs/templates.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::CodegenError;

const BUILTIN: [(&str, &str); 3] = [
    ("pseudo", include_str!("../../templates/pseudo.toml")),
    ("java_enum", include_str!("../../templates/java_enum.toml")),
    ("c_header", include_str!("../../templates/c_header.toml")),
];

/// Placeholders available in the module and marker templates.
pub const SET_PLACEHOLDERS: [&str; 5] = ["header", "set_name", "set_name_upper", "set_tag", "set_tag_upper"];

/// Placeholders available in per-constant entry templates.
pub const ENTRY_PLACEHOLDERS: [&str; 12] = [
    "set_name",
    "constant_name",
    "id_name",
    "requirement_id",
    "status",
    "title",
    "title_escaped",
    "last_modified",
    "scope",
    "deprecation_marker",
    "separator",
    "index",
];

/// A template rendered once per Traceable and joined into the module under
/// the placeholder named after the entry.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryTemplate {
    pub text: String,
    /// Substituted for `{{separator}}` on every entry except the last.
    #[serde(default)]
    pub separator: String,
    /// Substituted for `{{separator}}` on the last entry.
    #[serde(default)]
    pub terminator: String,
    /// Used in place of the joined entries when the set is empty.
    #[serde(default)]
    pub empty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageProfile {
    pub profile_id: String,
    pub file_extension: String,
    pub comment_prefix: String,
    #[serde(default)]
    pub comment_suffix: String,
    /// Fragment inserted at `{{deprecation_marker}}` for Deprecated entries.
    /// Without one, deprecation is recorded only in the state file.
    #[serde(default)]
    pub deprecation_marker: Option<String>,
    pub module: String,
    pub markers: String,
    #[serde(default)]
    pub entries: BTreeMap<String, EntryTemplate>,
}

impl LanguageProfile {
    pub fn builtin_ids() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(id, _)| *id)
    }

    pub fn builtin(profile_id: &str) -> Result<Self, CodegenError> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(id, _)| *id == profile_id)
            .ok_or_else(|| CodegenError::UnknownProfile(profile_id.to_string()))?;
        Self::parse(text, Path::new(&format!("<builtin>/{profile_id}.toml")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CodegenError> {
        let text = std::fs::read_to_string(path).map_err(|source| CodegenError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Looks for `<template_dir>/<profile_id>.toml` first, then the built-ins.
    pub fn resolve(profile_id: &str, template_dir: Option<&Path>) -> Result<Self, CodegenError> {
        if let Some(dir) = template_dir {
            let candidate = dir.join(format!("{profile_id}.toml"));
            if candidate.is_file() {
                let profile = Self::from_file(&candidate)?;
                if profile.profile_id != profile_id {
                    return Err(CodegenError::ProfileFormat {
                        path: candidate,
                        message: format!("declares profile_id {:?}", profile.profile_id),
                    });
                }
                return Ok(profile);
            }
        }
        Self::builtin(profile_id)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self, CodegenError> {
        let profile: Self = toml::from_str(text).map_err(|e| CodegenError::ProfileFormat {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<(), CodegenError> {
        let module_names: Vec<&str> = SET_PLACEHOLDERS
            .iter()
            .copied()
            .chain(self.entries.keys().map(String::as_str))
            .collect();
        self.check("module", &self.module, &module_names)?;
        self.check("markers", &self.markers, &SET_PLACEHOLDERS)?;
        for (name, entry) in &self.entries {
            if SET_PLACEHOLDERS.contains(&name.as_str()) {
                return Err(self.template_error(name, "entry name shadows a set placeholder"));
            }
            self.check(name, &entry.text, &ENTRY_PLACEHOLDERS)?;
        }
        if self.file_extension.is_empty() || self.file_extension.contains(['/', '\\', '.']) {
            return Err(self.template_error("file_extension", "must be a bare extension"));
        }
        Ok(())
    }

    fn check(&self, template: &str, text: &str, allowed: &[&str]) -> Result<(), CodegenError> {
        for name in placeholders(text).map_err(|m| self.template_error(template, &m))? {
            if !allowed.contains(&name) {
                return Err(self.template_error(template, &format!("unknown placeholder {{{{{name}}}}}")));
            }
        }
        Ok(())
    }

    fn template_error(&self, template: &str, message: &str) -> CodegenError {
        CodegenError::Template {
            profile: self.profile_id.clone(),
            template: template.to_string(),
            message: message.to_string(),
        }
    }

    /// Wraps one line of text in the profile's comment syntax.
    pub fn comment(&self, text: &str) -> String {
        if self.comment_suffix.is_empty() {
            format!("{} {}", self.comment_prefix, text)
        } else {
            format!("{} {} {}", self.comment_prefix, text, self.comment_suffix)
        }
    }
}

fn placeholders(text: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("{{") {
        let after = &rest[start + 2..];
        let end = after.find("}}").ok_or("unterminated `{{`")?;
        out.push(after[..end].trim());
        rest = &after[end + 2..];
    }
    Ok(out)
}

/// Substitutes every `{{name}}` with `lookup(name)`. Callers validate
/// placeholder names beforehand; unknown ones render empty.
pub fn render(text: &str, lookup: impl Fn(&str) -> Option<String>) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find("}}") {
            Some(end) => {
                out.push_str(&lookup(after[..end].trim()).unwrap_or_default());
                rest = &after[end + 2..];
            }
            None => {
                out.push_str(&rest[start..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}
