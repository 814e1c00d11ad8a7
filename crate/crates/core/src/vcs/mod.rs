//! Read-only access to version-control history.
//!
//! Everything else in the crate talks to [`Vcs`], so tests can run against
//! [`MemoryVcs`] instead of a real repository.

mod git;
mod memory;

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use git::GitRepo;
pub use memory::MemoryVcs;

/// Revision name standing for the checked-out files, committed or not.
pub const WORKTREE: &str = "WORKTREE";

#[derive(Debug, Error)]
pub enum VcsError {
    #[error("{path} is not inside a git repository: {message}")]
    NotARepository { path: PathBuf, message: String },
    #[error("cannot resolve revision {0:?}")]
    Revision(String),
    #[error("{path} does not exist at revision {revision}")]
    PathNotFound { revision: String, path: String },
    #[error("git {command} failed: {message}")]
    Git { command: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RevisionRef {
    /// Branch name or revision expression as given.
    pub name: String,
    /// Full commit hash. For [`WORKTREE`] this is the `HEAD` commit, or
    /// empty in a repository without commits.
    pub resolved_id: String,
}

impl RevisionRef {
    pub fn is_worktree(&self) -> bool {
        self.name == WORKTREE
    }
}

impl std::fmt::Display for RevisionRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)
    }
}

/// Which commit timestamp counts as "last touched".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommitTime {
    #[default]
    Committer,
    Author,
}

/// Repo-relative paths (forward slashes) to file contents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileTree {
    files: BTreeMap<String, Vec<u8>>,
}

impl FileTree {
    pub fn insert(&mut self, path: impl Into<String>, content: impl Into<Vec<u8>>) {
        self.files.insert(path.into(), content.into());
    }

    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.files.get(path).map(Vec::as_slice)
    }

    pub fn files(&self) -> &BTreeMap<String, Vec<u8>> {
        &self.files
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

impl FromIterator<(String, Vec<u8>)> for FileTree {
    fn from_iter<I: IntoIterator<Item = (String, Vec<u8>)>>(iter: I) -> Self {
        Self {
            files: iter.into_iter().collect(),
        }
    }
}

pub trait Vcs: Send + Sync {
    fn resolve(&self, revision: &str) -> Result<RevisionRef, VcsError>;

    fn read_tree(&self, revision: &RevisionRef) -> Result<FileTree, VcsError>;

    /// Time of the most recent commit at or before `revision` touching `path`.
    fn last_commit_time(&self, revision: &RevisionRef, path: &str) -> Result<DateTime<Utc>, VcsError>;

    /// Local branches sorted by name.
    fn list_branches(&self) -> Result<Vec<RevisionRef>, VcsError>;
}
