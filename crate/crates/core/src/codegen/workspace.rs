//! Bringing the artifact root in line with freshly generated artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use super::generate::{is_generated, GeneratedArtifact};
use super::CodegenError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileWrite {
    pub relative_path: String,
    pub content: String,
}

/// Files to create, overwrite and delete under `root`. Paths are relative
/// and use forward slashes; every list is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WritePlan {
    pub root: PathBuf,
    pub creates: Vec<FileWrite>,
    pub overwrites: Vec<FileWrite>,
    pub deletions: Vec<String>,
}

impl WritePlan {
    pub fn is_empty(&self) -> bool {
        self.creates.is_empty() && self.overwrites.is_empty() && self.deletions.is_empty()
    }

    /// Applies the plan. Each file is written to a sibling temporary and
    /// renamed into place; directories emptied by deletions are removed.
    pub fn apply(&self) -> Result<(), CodegenError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CodegenError::Io { path, source }
        };
        for write in self.creates.iter().chain(&self.overwrites) {
            let target = self.root.join(&write.relative_path);
            if let Some(parent) = target.parent() {
                fs::create_dir_all(parent).map_err(io(parent))?;
            }
            let file_name = target
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let tmp = target.with_file_name(format!(".{file_name}.tmp"));
            fs::write(&tmp, &write.content).map_err(io(&tmp))?;
            fs::rename(&tmp, &target).map_err(io(&target))?;
        }
        for rel in &self.deletions {
            let target = self.root.join(rel);
            fs::remove_file(&target).map_err(io(&target))?;
            let mut dir = target.parent();
            while let Some(d) = dir {
                if d == self.root || !d.starts_with(&self.root) {
                    break;
                }
                if fs::read_dir(d).map(|mut it| it.next().is_none()).unwrap_or(false) {
                    fs::remove_dir(d).map_err(io(d))?;
                    dir = d.parent();
                } else {
                    break;
                }
            }
        }
        Ok(())
    }
}

/// Walks up from `start` (or its nearest existing ancestor) looking for a
/// `.git` entry.
pub fn find_working_tree(start: &Path) -> Option<PathBuf> {
    let absolute = if start.is_absolute() {
        start.to_path_buf()
    } else {
        std::env::current_dir().ok()?.join(start)
    };
    let mut cursor = Some(absolute.as_path());
    while let Some(dir) = cursor {
        if dir.join(".git").exists() {
            return Some(dir.canonicalize().unwrap_or_else(|_| dir.to_path_buf()));
        }
        cursor = dir.parent();
    }
    None
}

/// Diffs `artifacts` against what is on disk under `artifact_root`.
///
/// Existing files whose content differs are overwritten (manual edits
/// included). Files no longer produced are deleted if they carry the
/// generation header; anything else is a foreign file and aborts the plan.
pub fn plan_workspace_update(artifacts: &[GeneratedArtifact], artifact_root: &Path) -> Result<WritePlan, CodegenError> {
    if find_working_tree(artifact_root).is_none() {
        return Err(CodegenError::Placement(artifact_root.to_path_buf()));
    }

    let mut existing: BTreeMap<String, PathBuf> = BTreeMap::new();
    if artifact_root.is_dir() {
        for entry in WalkDir::new(artifact_root).sort_by_file_name() {
            let entry = entry.map_err(|e| CodegenError::Io {
                path: artifact_root.to_path_buf(),
                source: e
                    .into_io_error()
                    .unwrap_or_else(|| std::io::Error::other("walk failed")),
            })?;
            if entry.file_type().is_file() {
                let rel = entry
                    .path()
                    .strip_prefix(artifact_root)
                    .expect("walk stays under root")
                    .to_string_lossy()
                    .replace('\\', "/");
                existing.insert(rel, entry.into_path());
            }
        }
    }

    let mut plan = WritePlan {
        root: artifact_root.to_path_buf(),
        ..WritePlan::default()
    };
    let mut wanted: Vec<&GeneratedArtifact> = artifacts.iter().collect();
    wanted.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    for artifact in &wanted {
        let write = FileWrite {
            relative_path: artifact.relative_path.clone(),
            content: artifact.content.clone(),
        };
        match existing.remove(&artifact.relative_path) {
            None => plan.creates.push(write),
            Some(path) => {
                let current = fs::read(&path).map_err(|source| CodegenError::Io { path, source })?;
                if current != artifact.content.as_bytes() {
                    plan.overwrites.push(write);
                }
            }
        }
    }
    for (rel, path) in existing {
        let content = fs::read(&path).map_err(|source| CodegenError::Io {
            path: path.clone(),
            source,
        })?;
        if !is_generated(&String::from_utf8_lossy(&content)) {
            return Err(CodegenError::ForeignFile(path));
        }
        plan.deletions.push(rel);
    }
    Ok(plan)
}
