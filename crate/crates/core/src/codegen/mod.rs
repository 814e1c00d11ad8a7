//! Traceable generation: constant naming, template-driven set modules, the
//! lifecycle state file and the plan that brings the artifact root up to date.

pub mod generate;
pub mod naming;
pub mod profile;
pub mod state_file;
pub mod workspace;

use std::collections::HashMap;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::lifecycle::{LifecycleState, TraceableState};
use crate::timestamp;

pub use generate::{generate_set, GeneratedArtifact, GenerationHeader, SetInfo, SENTINEL};
pub use naming::{normalize_id, normalize_name, DEFAULT_MAX_NAME_LENGTH};
pub use profile::LanguageProfile;
pub use workspace::{plan_workspace_update, WritePlan};

/// File name of the lifecycle state file at the artifact root.
pub const STATE_FILE_NAME: &str = "state.reqtocode";

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("cannot derive a constant name from requirement id {0:?}")]
    EmptyIdentifier(String),
    #[error("constant name {name} is produced by both {first} and {second}")]
    Collision {
        name: String,
        first: String,
        second: String,
    },
    #[error("traceable {id} belongs to set {actual}, not {expected}")]
    WrongSet {
        id: String,
        expected: String,
        actual: String,
    },
    #[error("traceable {0} is removed and cannot be emitted")]
    RemovedTraceable(String),
    #[error("template {template} of profile {profile}: {message}")]
    Template {
        profile: String,
        template: String,
        message: String,
    },
    #[error("unknown language profile {0:?}")]
    UnknownProfile(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid profile: {message}")]
    ProfileFormat { path: PathBuf, message: String },
    #[error("{file}:{line}: {message}")]
    StateFile { file: String, line: usize, message: String },
    #[error("artifact root {0} is not inside a version-controlled working tree")]
    Placement(PathBuf),
    #[error("refusing to delete {0}: not a generated file (missing generation header)")]
    ForeignFile(PathBuf),
}

/// The generated projection of one requirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Traceable {
    pub constant_name: String,
    pub requirement_id: String,
    pub title: String,
    pub state: TraceableState,
    pub set_name: String,
    /// Source status token as last seen.
    pub status: String,
    pub last_modified: Option<DateTime<Utc>>,
    pub scope: Option<String>,
}

impl Traceable {
    /// Short name made from the requirement id alone (`SWR_101`).
    pub fn id_name(&self) -> String {
        normalize_id(&self.requirement_id).unwrap_or_else(|_| self.constant_name.clone())
    }

    pub fn is_deprecated(&self) -> bool {
        self.state.state == LifecycleState::Deprecated
    }

    /// Metadata in emission order after `(requirement_id, status)`.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        vec![
            ("status", self.status.clone()),
            (
                "last_modified",
                self.last_modified.as_ref().map(timestamp::format).unwrap_or_default(),
            ),
            ("scope", self.scope.clone().unwrap_or_default()),
        ]
    }
}

/// Non-removed Traceables of one generation cycle, looked up by constant name
/// or by the short id name.
#[derive(Debug, Clone, Default)]
pub struct TraceableSet {
    items: Vec<Traceable>,
    by_name: HashMap<String, usize>,
    known_prefixes: Vec<String>,
}

impl TraceableSet {
    /// Builds the set; Removed entries are dropped from lookup but still
    /// contribute their id prefix to [`TraceableSet::known_prefixes`].
    pub fn new(traceables: impl IntoIterator<Item = Traceable>) -> Self {
        let mut prefixes = std::collections::BTreeSet::new();
        let mut items: Vec<Traceable> = Vec::new();
        for t in traceables {
            let id_name = t.id_name();
            let head = id_name.split('_').next().unwrap_or(&id_name).to_string();
            if !head.is_empty() {
                prefixes.insert(head);
            }
            if !t.state.is_removed() {
                items.push(t);
            }
        }
        items.sort_by(|a, b| a.requirement_id.cmp(&b.requirement_id));

        let mut by_name = HashMap::new();
        for (i, t) in items.iter().enumerate() {
            by_name.insert(t.constant_name.clone(), i);
        }
        // Short names never shadow a full constant name.
        for (i, t) in items.iter().enumerate() {
            by_name.entry(t.id_name()).or_insert(i);
        }
        Self {
            items,
            by_name,
            known_prefixes: prefixes.into_iter().collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Traceable> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<&Traceable> {
        self.by_name.get(name).map(|&i| &self.items[i])
    }

    /// Leading alphabetic segments of every known requirement id, including
    /// removed ones (`SWR` for `SWR-101`).
    pub fn known_prefixes(&self) -> &[String] {
        &self.known_prefixes
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn lookup_by_full_and_short_name() {
        let set = TraceableSet::new(sensor_traceables());
        assert_eq!(
            set.lookup("SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT")
                .unwrap()
                .requirement_id,
            "SWR-101"
        );
        assert_eq!(set.lookup("SWR_101").unwrap().requirement_id, "SWR-101");
        assert!(set.lookup("SWR_1011").is_none());
        assert!(set.lookup("SWR_101_VALIDATE").is_none());
    }

    #[test]
    fn removed_are_not_resolvable_but_keep_prefix() {
        let mut ts = sensor_traceables();
        ts[1].state = TraceableState::removed();
        ts.push(traceable("STK-7", "Need", "Removed", TraceableState::removed()));
        let set = TraceableSet::new(ts);
        assert_eq!(set.len(), 2);
        assert!(set.lookup("SWR_102").is_none());
        assert_eq!(set.known_prefixes(), ["STK".to_string(), "SWR".to_string()]);
    }
}
