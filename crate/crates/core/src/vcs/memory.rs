use std::collections::BTreeMap;

use chrono::{DateTime, Utc};

use super::{FileTree, RevisionRef, Vcs, VcsError, WORKTREE};

#[derive(Debug, Clone)]
struct Snapshot {
    id: String,
    tree: FileTree,
    touched: BTreeMap<String, DateTime<Utc>>,
}

/// In-memory stand-in for a repository: named revisions, each with a file
/// tree and per-file last-commit times.
#[derive(Debug, Clone, Default)]
pub struct MemoryVcs {
    revisions: BTreeMap<String, Snapshot>,
    branches: Vec<String>,
}

impl MemoryVcs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a revision. `files` carries `(path, content, last_commit_time)`.
    /// Names registered as branches are listed by [`Vcs::list_branches`].
    pub fn add_revision<'a>(
        &mut self,
        name: &str,
        branch: bool,
        files: impl IntoIterator<Item = (&'a str, &'a str, DateTime<Utc>)>,
    ) -> &mut Self {
        let mut tree = FileTree::default();
        let mut touched = BTreeMap::new();
        for (path, content, time) in files {
            tree.insert(path, content.as_bytes().to_vec());
            touched.insert(path.to_string(), time);
        }
        let id = format!("{:040x}", self.revisions.len() + 1);
        self.revisions.insert(name.to_string(), Snapshot { id, tree, touched });
        if branch && !self.branches.iter().any(|b| b == name) {
            self.branches.push(name.to_string());
            self.branches.sort();
        }
        self
    }

    fn snapshot(&self, revision: &RevisionRef) -> Result<&Snapshot, VcsError> {
        self.revisions
            .get(&revision.name)
            .ok_or_else(|| VcsError::Revision(revision.name.clone()))
    }
}

impl Vcs for MemoryVcs {
    fn resolve(&self, revision: &str) -> Result<RevisionRef, VcsError> {
        let snapshot = self
            .revisions
            .get(revision)
            .ok_or_else(|| VcsError::Revision(revision.to_string()))?;
        Ok(RevisionRef {
            name: revision.to_string(),
            resolved_id: snapshot.id.clone(),
        })
    }

    fn read_tree(&self, revision: &RevisionRef) -> Result<FileTree, VcsError> {
        Ok(self.snapshot(revision)?.tree.clone())
    }

    fn last_commit_time(&self, revision: &RevisionRef, path: &str) -> Result<DateTime<Utc>, VcsError> {
        self.snapshot(revision)?
            .touched
            .get(path)
            .copied()
            .ok_or_else(|| VcsError::PathNotFound {
                revision: revision.name.clone(),
                path: path.to_string(),
            })
    }

    fn list_branches(&self) -> Result<Vec<RevisionRef>, VcsError> {
        self.branches
            .iter()
            .filter(|b| b.as_str() != WORKTREE)
            .map(|b| self.resolve(b))
            .collect()
    }
}
