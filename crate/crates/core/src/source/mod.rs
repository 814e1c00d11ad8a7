//! Requirement ingestion: structured files or a mock ALM endpoint, validated
//! into an immutable [`SourceSnapshot`].

pub mod alm;
pub mod frontmatter;
pub mod partition;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

use crate::timestamp;

pub use alm::{load_from_mock_alm, post_report};
pub use partition::{partition, Partition, PartitionRule, PartitionRules};

/// Status tokens accepted when no vocabulary is configured.
pub const DEFAULT_STATUSES: [&str; 4] = ["Draft", "Approved", "Deprecated", "Removed"];

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
    #[error("duplicate requirement id {id}: defined at {first} and {second}")]
    DuplicateId { id: String, first: String, second: String },
    #[error("{origin}: requirement {id} has unknown status {status:?} (allowed: {allowed})")]
    UnknownStatus {
        id: String,
        status: String,
        origin: String,
        allowed: String,
    },
    #[error("cannot reach requirement endpoint {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("{endpoint}: payload does not match schema at `{path}`: {message}")]
    Schema {
        endpoint: String,
        path: String,
        message: String,
    },
    #[error("requirements match no partition rule: {}", ids.join(", "))]
    Unpartitioned { ids: Vec<String> },
    #[error("requirements match more than one partition rule: {}", describe_ambiguous(.ids))]
    AmbiguousPartition { ids: Vec<(String, Vec<String>)> },
    #[error("invalid partition rule for set {set}: {message}")]
    Rule { set: String, message: String },
}

fn describe_ambiguous(ids: &[(String, Vec<String>)]) -> String {
    ids.iter()
        .map(|(id, sets)| format!("{id} -> [{}]", sets.join(", ")))
        .collect::<Vec<_>>()
        .join("; ")
}

/// One requirement as read from the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Requirement {
    pub id: String,
    pub title: String,
    pub status: String,
    #[serde(with = "timestamp::serde_secs")]
    pub last_modified: DateTime<Utc>,
    pub category: String,
    pub scope: Option<String>,
    /// Unrecognized front-matter keys, kept but not interpreted.
    pub extra: BTreeMap<String, String>,
    /// Where the requirement was defined (`file:line` or `endpoint#index`).
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSnapshot {
    pub requirements: Vec<Requirement>,
    #[serde(with = "timestamp::serde_secs")]
    pub taken_at: DateTime<Utc>,
    pub source_id: String,
}

impl SourceSnapshot {
    pub fn get(&self, id: &str) -> Option<&Requirement> {
        self.requirements
            .binary_search_by(|r| r.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.requirements[i])
    }

    /// Canonical JSON form; identical inputs give identical bytes.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    /// SHA-256 over the requirement content only (no origin, source id or
    /// acquisition time), so two checkouts of the same source hash equally.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for r in &self.requirements {
            for field in [
                r.id.as_str(),
                r.title.as_str(),
                r.status.as_str(),
                &timestamp::format(&r.last_modified),
                r.category.as_str(),
                r.scope.as_deref().unwrap_or(""),
            ] {
                hasher.update(field.as_bytes());
                hasher.update([0x1f]);
            }
            hasher.update([0x1e]);
        }
        format!("{:x}", hasher.finalize())
    }
}

/// Status vocabulary plus the acquisition time stamped on the snapshot.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub statuses: Vec<String>,
    pub taken_at: DateTime<Utc>,
}

impl LoadOptions {
    pub fn new(taken_at: DateTime<Utc>) -> Self {
        Self {
            statuses: DEFAULT_STATUSES.iter().map(|s| s.to_string()).collect(),
            taken_at,
        }
    }

    pub fn with_statuses(mut self, statuses: Vec<String>) -> Self {
        self.statuses = statuses;
        self
    }
}

/// A requirement before validation, as produced by either loader.
#[derive(Debug, Clone, Default)]
pub(crate) struct RawRequirement {
    pub id: Option<String>,
    pub title: Option<String>,
    pub status: Option<String>,
    pub last_modified: Option<String>,
    pub category: Option<String>,
    pub scope: Option<String>,
    pub extra: BTreeMap<String, String>,
    pub origin: String,
}

/// Collapses internal whitespace runs to one space and trims the ends.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Reads every `*.md` file below `root` (one requirement per file).
pub fn load_from_files(root: &Path, options: &LoadOptions) -> Result<SourceSnapshot, SourceError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = entry.map_err(|e| SourceError::Io {
            path: e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf()),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("directory walk failed")),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "md") {
            files.push(entry.into_path());
        }
    }
    files.sort();

    let raw = files
        .par_iter()
        .map(|path| {
            let content = std::fs::read_to_string(path).map_err(|source| SourceError::Io {
                path: path.clone(),
                source,
            })?;
            let display = path
                .strip_prefix(root)
                .unwrap_or(path)
                .to_string_lossy()
                .replace('\\', "/");
            frontmatter::parse_requirement_file(&display, &content)
        })
        .collect::<Result<Vec<_>, _>>()?;

    validate(raw, options, source_id_for_path(root))
}

fn source_id_for_path(root: &Path) -> String {
    format!(
        "files:{}",
        root.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    )
}

pub(crate) fn validate(
    raw: Vec<RawRequirement>,
    options: &LoadOptions,
    source_id: String,
) -> Result<SourceSnapshot, SourceError> {
    let mut requirements = Vec::with_capacity(raw.len());
    let mut seen: HashMap<String, String> = HashMap::new();

    for r in raw {
        let origin = r.origin.clone();
        let missing = |field: &str| SourceError::Invalid {
            origin: origin.clone(),
            message: format!("missing required field `{field}`"),
        };
        let id = r.id.as_deref().map(str::trim).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(missing("id"));
        }
        let title = collapse_whitespace(r.title.as_deref().unwrap_or_default());
        if title.is_empty() {
            return Err(SourceError::Invalid {
                origin,
                message: format!("requirement {id} has an empty title"),
            });
        }
        let raw_status = r.status.as_deref().map(str::trim).ok_or_else(|| missing("status"))?;
        let status = options
            .statuses
            .iter()
            .find(|s| s.eq_ignore_ascii_case(raw_status))
            .cloned()
            .ok_or_else(|| SourceError::UnknownStatus {
                id: id.clone(),
                status: raw_status.to_string(),
                origin: origin.clone(),
                allowed: options.statuses.join(", "),
            })?;
        let modified_text = r.last_modified.as_deref().ok_or_else(|| missing("last_modified"))?;
        let last_modified = timestamp::parse(modified_text).map_err(|e| SourceError::Invalid {
            origin: origin.clone(),
            message: format!("requirement {id}: last_modified {modified_text:?} is not RFC 3339: {e}"),
        })?;
        let category = r.category.as_deref().map(str::trim).unwrap_or_default().to_string();
        if category.is_empty() {
            return Err(missing("category"));
        }
        let scope = r
            .scope
            .as_deref()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string);

        if let Some(first) = seen.insert(id.clone(), origin.clone()) {
            let (first, second) = if first <= origin {
                (first, origin)
            } else {
                (origin, first)
            };
            return Err(SourceError::DuplicateId { id, first, second });
        }
        if last_modified > options.taken_at {
            tracing::warn!(
                requirement = %id,
                "last_modified {} is later than snapshot time {}; accepting (clock skew)",
                timestamp::format(&last_modified),
                timestamp::format(&options.taken_at)
            );
        }

        requirements.push(Requirement {
            id,
            title,
            status,
            last_modified,
            category,
            scope,
            extra: r.extra,
            origin,
        });
    }

    requirements.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(SourceSnapshot {
        requirements,
        taken_at: options.taken_at,
        source_id,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn requirement(id: &str, title: &str, status: &str, category: &str) -> Requirement {
        Requirement {
            id: id.into(),
            title: title.into(),
            status: status.into(),
            last_modified: timestamp::parse("2026-01-10T09:00:00Z").unwrap(),
            category: category.into(),
            scope: None,
            extra: BTreeMap::new(),
            origin: format!("{id}.md:1"),
        }
    }

    pub fn snapshot(reqs: Vec<Requirement>) -> SourceSnapshot {
        let mut requirements = reqs;
        requirements.sort_by(|a, b| a.id.cmp(&b.id));
        SourceSnapshot {
            requirements,
            taken_at: timestamp::parse("2026-03-01T00:00:00Z").unwrap(),
            source_id: "test".into(),
        }
    }
}
