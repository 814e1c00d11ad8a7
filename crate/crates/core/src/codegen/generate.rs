//! Rendering one requirement set through a [`LanguageProfile`].

use serde::Serialize;

use super::profile::{render, LanguageProfile};
use super::{CodegenError, Traceable};
use crate::timestamp;

/// First line of every generated file (inside the profile's comment syntax).
pub const SENTINEL: &str = "GENERATED BY REQTOCODE — DO NOT EDIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    ConstantModule,
    MarkerDeclarations,
    StateFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratedArtifact {
    /// Forward-slash path relative to the artifact root.
    pub relative_path: String,
    pub content: String,
    pub kind: ArtifactKind,
}

impl GeneratedArtifact {
    pub fn new(relative_path: String, content: &str, kind: ArtifactKind) -> Self {
        Self {
            relative_path,
            content: normalize_text(content),
            kind,
        }
    }
}

/// LF line endings, no trailing whitespace-only tail, exactly one final newline.
pub fn normalize_text(content: &str) -> String {
    let mut text = content.replace("\r\n", "\n");
    let trimmed_len = text.trim_end_matches('\n').len();
    text.truncate(trimmed_len);
    text.push('\n');
    text
}

/// Whether `content` starts with the generation sentinel line.
pub fn is_generated(content: &str) -> bool {
    content.lines().next().is_some_and(|l| l.contains(SENTINEL))
}

/// Data stamped into every generated file's header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationHeader {
    pub snapshot_hash: String,
}

impl GenerationHeader {
    pub fn lines(&self) -> [String; 2] {
        [SENTINEL.to_string(), format!("snapshot: sha256:{}", self.snapshot_hash)]
    }

    pub fn render(&self, profile: &LanguageProfile) -> String {
        self.lines()
            .iter()
            .map(|l| profile.comment(l))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetInfo {
    pub name: String,
    /// Short tag for set-specific markers (`SWR` in `TracesSWR`).
    pub tag: String,
}

impl SetInfo {
    pub fn new(name: &str, tag: &str) -> Self {
        Self {
            name: name.into(),
            tag: tag.into(),
        }
    }

    fn lookup(&self, header: &str, key: &str) -> Option<String> {
        match key {
            "header" => Some(header.to_string()),
            "set_name" => Some(self.name.clone()),
            "set_name_upper" => Some(self.name.to_ascii_uppercase()),
            "set_tag" => Some(self.tag.clone()),
            "set_tag_upper" => Some(self.tag.to_ascii_uppercase()),
            _ => None,
        }
    }
}

pub fn module_path(set_name: &str, profile: &LanguageProfile) -> String {
    format!("{set_name}/{set_name}.{}", profile.file_extension)
}

pub fn markers_path(set_name: &str, profile: &LanguageProfile) -> String {
    format!("{set_name}/markers.{}", profile.file_extension)
}

fn escape_literal(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Emits the constant module and marker declarations for one set.
///
/// Constants appear in ascending requirement-id order. Deprecated entries get
/// the profile's deprecation marker.
pub fn generate_set(
    set: &SetInfo,
    traceables: &[Traceable],
    profile: &LanguageProfile,
    header: &GenerationHeader,
) -> Result<Vec<GeneratedArtifact>, CodegenError> {
    let mut sorted: Vec<&Traceable> = traceables.iter().collect();
    sorted.sort_by(|a, b| a.requirement_id.cmp(&b.requirement_id));

    let mut owners: std::collections::HashMap<&str, &str> = Default::default();
    for t in &sorted {
        if t.set_name != set.name {
            return Err(CodegenError::WrongSet {
                id: t.requirement_id.clone(),
                expected: set.name.clone(),
                actual: t.set_name.clone(),
            });
        }
        if t.state.is_removed() {
            return Err(CodegenError::RemovedTraceable(t.requirement_id.clone()));
        }
        if let Some(first) = owners.insert(&t.constant_name, &t.requirement_id) {
            return Err(CodegenError::Collision {
                name: t.constant_name.clone(),
                first: first.to_string(),
                second: t.requirement_id.clone(),
            });
        }
    }

    let header_text = header.render(profile);
    let mut rendered_entries = std::collections::BTreeMap::new();
    for (name, entry) in &profile.entries {
        let joined = if sorted.is_empty() {
            entry.empty.clone()
        } else {
            sorted
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let separator = if i + 1 == sorted.len() {
                        &entry.terminator
                    } else {
                        &entry.separator
                    };
                    render(&entry.text, |key| entry_value(t, i, separator, profile, key))
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        rendered_entries.insert(name.as_str(), joined);
    }

    let module = render(&profile.module, |key| {
        set.lookup(&header_text, key)
            .or_else(|| rendered_entries.get(key).cloned())
    });
    let markers = render(&profile.markers, |key| set.lookup(&header_text, key));

    Ok(vec![
        GeneratedArtifact::new(module_path(&set.name, profile), &module, ArtifactKind::ConstantModule),
        GeneratedArtifact::new(
            markers_path(&set.name, profile),
            &markers,
            ArtifactKind::MarkerDeclarations,
        ),
    ])
}

fn entry_value(t: &Traceable, index: usize, separator: &str, profile: &LanguageProfile, key: &str) -> Option<String> {
    Some(match key {
        "set_name" => t.set_name.clone(),
        "constant_name" => t.constant_name.clone(),
        "id_name" => t.id_name(),
        "requirement_id" => t.requirement_id.clone(),
        "status" => t.status.to_ascii_uppercase(),
        "title" => t.title.clone(),
        "title_escaped" => escape_literal(&t.title),
        "last_modified" => t
            .last_modified
            .as_ref()
            .map(timestamp::format)
            .unwrap_or_else(|| "-".into()),
        "scope" => t.scope.clone().unwrap_or_else(|| "-".into()),
        "deprecation_marker" => {
            if t.is_deprecated() {
                profile.deprecation_marker.clone().unwrap_or_default()
            } else {
                String::new()
            }
        }
        "separator" => separator.to_string(),
        "index" => index.to_string(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::fixtures::sensor_traceables;
    use crate::lifecycle::TraceableState;
    use crate::timestamp;

    fn header() -> GenerationHeader {
        GenerationHeader {
            snapshot_hash: "0".repeat(64),
        }
    }

    fn set() -> SetInfo {
        SetInfo::new("SensorValidation_SWR", "SWR")
    }

    fn pseudo() -> LanguageProfile {
        LanguageProfile::builtin("pseudo").unwrap()
    }

    fn deprecated_102() -> Vec<Traceable> {
        let mut ts = sensor_traceables();
        ts[1].status = "Deprecated".into();
        ts[1].state = TraceableState::deprecated(timestamp::parse("2026-02-01T00:00:00Z").unwrap(), 2);
        ts
    }

    #[test]
    fn pseudo_module_lists_constants_with_statuses() {
        let out = generate_set(&set(), &sensor_traceables(), &pseudo(), &header()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].relative_path, "SensorValidation_SWR/SensorValidation_SWR.txt");
        assert_eq!(out[1].relative_path, "SensorValidation_SWR/markers.txt");
        let module = &out[0].content;
        assert!(module.starts_with("# GENERATED BY REQTOCODE — DO NOT EDIT\n# snapshot: sha256:"));
        assert!(module.contains("RequirementSet SensorValidation_SWR\n"));
        let statuses: Vec<&str> = module
            .lines()
            .filter_map(|l| l.trim().strip_prefix("status: "))
            .collect();
        assert_eq!(statuses, ["APPROVED", "APPROVED", "DRAFT"]);
        assert!(module
            .contains("  Traceable SWR_101\n    title:  \"Validate sensor range on input\"\n    status: APPROVED\n"));
        assert!(module.ends_with("scope: -\n"));
        assert!(!module.ends_with("\n\n"));
    }

    #[test]
    fn deprecation_only_changes_the_deprecated_entry() {
        let before = generate_set(&set(), &sensor_traceables(), &pseudo(), &header()).unwrap();
        let after = generate_set(&set(), &deprecated_102(), &pseudo(), &header()).unwrap();
        assert!(after[0].content.contains(
            "  Traceable SWR_102 [DEPRECATED]\n    title:  \"Reject stale sensor readings\"\n    status: DEPRECATED\n"
        ));
        let diff: Vec<(&str, &str)> = before[0]
            .content
            .lines()
            .zip(after[0].content.lines())
            .filter(|(a, b)| a != b)
            .collect();
        assert_eq!(
            diff,
            vec![
                ("  Traceable SWR_102", "  Traceable SWR_102 [DEPRECATED]"),
                ("    status: APPROVED", "    status: DEPRECATED"),
            ]
        );
        assert_eq!(before[1], after[1]);
    }

    #[test]
    fn java_profile_matches_enum_listing() {
        let java = LanguageProfile::builtin("java_enum").unwrap();
        let out = generate_set(&set(), &deprecated_102(), &java, &header()).unwrap();
        let module = &out[0].content;
        assert!(module.contains("public enum SensorValidation_SWR {"));
        assert!(module.contains("  SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT(\"SWR-101\", Status.APPROVED),\n"));
        assert!(
            module.contains("  @Deprecated\n  SWR_102_REJECT_STALE_SENSOR_READINGS(\"SWR-102\", Status.DEPRECATED),\n")
        );
        assert!(module.contains("  SWR_103_LOG_VALIDATION_FAILURES(\"SWR-103\", Status.DRAFT);\n"));
        assert_eq!(module.matches("@Deprecated").count(), 1);
        assert!(out[1].content.contains("@interface TracesSWR {"));
        assert!(out[1].content.contains("@interface VerifiesSWR {"));
        assert!(out[1].content.contains("RetentionPolicy.SOURCE"));
    }

    #[test]
    fn c_profile_emits_aliases_and_noop_markers() {
        let c = LanguageProfile::builtin("c_header").unwrap();
        let out = generate_set(&set(), &deprecated_102(), &c, &header()).unwrap();
        let module = &out[0].content;
        assert!(module.starts_with("/* GENERATED BY REQTOCODE — DO NOT EDIT */\n"));
        assert!(module.contains("#define SWR_101 SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT\n"));
        assert!(module.contains("    SWR_102_REJECT_STALE_SENSOR_READINGS REQTOCODE_DEPRECATED,\n"));
        assert!(module.contains("{ \"SWR-103\", \"DRAFT\", \"Log validation failures\" },"));
        assert!(out[1].content.contains("#ifdef TRACEABILITY_ENABLED"));
        assert!(out[1].content.contains("#define TRACES_SWR(...) ((void)0)"));
    }

    #[test]
    fn empty_set_is_a_valid_shell() {
        for id in LanguageProfile::builtin_ids() {
            let profile = LanguageProfile::builtin(id).unwrap();
            let out = generate_set(&set(), &[], &profile, &header()).unwrap();
            assert!(is_generated(&out[0].content));
            assert!(out[0].content.ends_with('\n') && !out[0].content.ends_with("\n\n"));
        }
        let java = LanguageProfile::builtin("java_enum").unwrap();
        let out = generate_set(&set(), &[], &java, &header()).unwrap();
        assert!(out[0].content.contains("public enum SensorValidation_SWR {\n\n  ;\n"));
    }

    #[test]
    fn removed_traceables_are_refused() {
        let mut ts = sensor_traceables();
        ts[0].state = TraceableState::removed();
        assert!(matches!(
            generate_set(&set(), &ts, &pseudo(), &header()),
            Err(CodegenError::RemovedTraceable(_))
        ));
    }

    #[test]
    fn duplicate_constant_names_are_refused() {
        let mut ts = sensor_traceables();
        ts[2].constant_name = ts[0].constant_name.clone();
        match generate_set(&set(), &ts, &pseudo(), &header()) {
            Err(CodegenError::Collision { first, second, .. }) => {
                assert_eq!((first.as_str(), second.as_str()), ("SWR-101", "SWR-103"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn foreign_set_members_are_refused() {
        let mut ts = sensor_traceables();
        ts[0].set_name = "Other".into();
        assert!(matches!(
            generate_set(&set(), &ts, &pseudo(), &header()),
            Err(CodegenError::WrongSet { .. })
        ));
    }

    #[test]
    fn output_is_sorted_regardless_of_input_order() {
        let mut ts = sensor_traceables();
        ts.reverse();
        let a = generate_set(&set(), &ts, &pseudo(), &header()).unwrap();
        let b = generate_set(&set(), &sensor_traceables(), &pseudo(), &header()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn profile_without_marker_emits_plain_entries() {
        let mut p = pseudo();
        p.deprecation_marker = None;
        let out = generate_set(&set(), &deprecated_102(), &p, &header()).unwrap();
        assert!(out[0].content.contains("  Traceable SWR_102\n"));
    }

    #[test]
    fn text_normalization() {
        assert_eq!(normalize_text("a\r\nb\n\n\n"), "a\nb\n");
        assert_eq!(normalize_text(""), "\n");
    }
}
