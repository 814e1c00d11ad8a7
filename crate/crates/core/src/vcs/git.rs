//! [`Vcs`] over the `git` command-line client.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use chrono::{DateTime, TimeZone, Utc};

use super::{CommitTime, FileTree, RevisionRef, Vcs, VcsError, WORKTREE};

#[derive(Debug, Clone)]
pub struct GitRepo {
    root: PathBuf,
    commit_time: CommitTime,
}

impl GitRepo {
    /// Opens the repository containing `path`.
    pub fn open(path: &Path) -> Result<Self, VcsError> {
        let output = Command::new("git")
            .arg("-C")
            .arg(path)
            .args(["rev-parse", "--show-toplevel"])
            .env("LC_ALL", "C")
            .output()
            .map_err(|source| VcsError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        if !output.status.success() {
            return Err(VcsError::NotARepository {
                path: path.to_path_buf(),
                message: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        let root = PathBuf::from(String::from_utf8_lossy(&output.stdout).trim_end_matches(['\n', '\r']));
        Ok(Self {
            root,
            commit_time: CommitTime::default(),
        })
    }

    pub fn with_commit_time(mut self, commit_time: CommitTime) -> Self {
        self.commit_time = commit_time;
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn command(&self) -> Command {
        let mut cmd = Command::new("git");
        cmd.arg("-C")
            .arg(&self.root)
            .env("LC_ALL", "C")
            .env("GIT_TERMINAL_PROMPT", "0")
            .stdin(Stdio::null());
        cmd
    }

    /// Runs git and returns stdout, or `Ok(None)` when git exits non-zero
    /// and `allow_failure` is set.
    fn git(&self, args: &[&str], allow_failure: bool) -> Result<Option<Vec<u8>>, VcsError> {
        let output = self.command().args(args).output().map_err(|source| VcsError::Io {
            path: self.root.clone(),
            source,
        })?;
        if output.status.success() {
            Ok(Some(output.stdout))
        } else if allow_failure {
            Ok(None)
        } else {
            Err(VcsError::Git {
                command: args.join(" "),
                message: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            })
        }
    }

    fn head(&self) -> Result<String, VcsError> {
        Ok(self
            .git(&["rev-parse", "--verify", "--quiet", "HEAD^{commit}"], true)?
            .map(|out| String::from_utf8_lossy(&out).trim().to_string())
            .unwrap_or_default())
    }

    fn read_worktree(&self) -> Result<FileTree, VcsError> {
        let listing = self
            .git(&["ls-files", "-z", "--cached", "--others", "--exclude-standard"], false)?
            .unwrap_or_default();
        let mut tree = FileTree::default();
        for path in listing.split(|b| *b == 0).filter(|p| !p.is_empty()) {
            let rel = String::from_utf8_lossy(path).into_owned();
            let full = self.root.join(&rel);
            if !full.is_file() {
                continue;
            }
            let content = std::fs::read(&full).map_err(|source| VcsError::Io { path: full, source })?;
            tree.insert(rel, content);
        }
        Ok(tree)
    }

    fn read_commit(&self, id: &str) -> Result<FileTree, VcsError> {
        let listing = self
            .git(&["ls-tree", "-r", "-z", "--full-tree", id], false)?
            .unwrap_or_default();
        let mut entries = Vec::new();
        for record in listing.split(|b| *b == 0).filter(|r| !r.is_empty()) {
            let record = String::from_utf8_lossy(record);
            let Some((meta, path)) = record.split_once('\t') else {
                continue;
            };
            let mut fields = meta.split(' ');
            let (mode, kind, object) = (fields.next(), fields.next(), fields.next());
            if kind == Some("blob") && mode != Some("120000") {
                if let Some(object) = object {
                    entries.push((path.to_string(), object.to_string()));
                }
            }
        }
        if entries.is_empty() {
            return Ok(FileTree::default());
        }

        let mut child = self
            .command()
            .args(["cat-file", "--batch"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| VcsError::Io {
                path: self.root.clone(),
                source,
            })?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let request: String = entries.iter().map(|(_, o)| format!("{o}\n")).collect();
        let writer = std::thread::spawn(move || stdin.write_all(request.as_bytes()));

        let mut reader = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut tree = FileTree::default();
        let batch_error = |message: String| VcsError::Git {
            command: "cat-file --batch".into(),
            message,
        };
        for (path, object) in &entries {
            let mut header = String::new();
            reader.read_line(&mut header).map_err(|e| batch_error(e.to_string()))?;
            let size: usize = header
                .split_whitespace()
                .nth(2)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| batch_error(format!("unexpected header for {object}: {header:?}")))?;
            let mut content = vec![0u8; size + 1];
            reader
                .read_exact(&mut content)
                .map_err(|e| batch_error(e.to_string()))?;
            content.pop();
            tree.insert(path.clone(), content);
        }
        drop(reader);
        writer
            .join()
            .expect("writer thread")
            .map_err(|e| batch_error(e.to_string()))?;
        let status = child.wait().map_err(|source| VcsError::Io {
            path: self.root.clone(),
            source,
        })?;
        if !status.success() {
            return Err(batch_error(format!("exited with {status}")));
        }
        Ok(tree)
    }
}

impl Vcs for GitRepo {
    fn resolve(&self, revision: &str) -> Result<RevisionRef, VcsError> {
        if revision == WORKTREE {
            return Ok(RevisionRef {
                name: WORKTREE.into(),
                resolved_id: self.head()?,
            });
        }
        if revision.starts_with('-') {
            return Err(VcsError::Revision(revision.to_string()));
        }
        let spec = format!("{revision}^{{commit}}");
        let out = self
            .git(&["rev-parse", "--verify", "--quiet", &spec], true)?
            .ok_or_else(|| VcsError::Revision(revision.to_string()))?;
        Ok(RevisionRef {
            name: revision.to_string(),
            resolved_id: String::from_utf8_lossy(&out).trim().to_string(),
        })
    }

    fn read_tree(&self, revision: &RevisionRef) -> Result<FileTree, VcsError> {
        if revision.is_worktree() {
            self.read_worktree()
        } else {
            self.read_commit(&revision.resolved_id)
        }
    }

    fn last_commit_time(&self, revision: &RevisionRef, path: &str) -> Result<DateTime<Utc>, VcsError> {
        let missing = || VcsError::PathNotFound {
            revision: revision.name.clone(),
            path: path.to_string(),
        };
        if revision.is_worktree() {
            if !self.root.join(path).is_file() {
                return Err(missing());
            }
        } else {
            let object = format!("{}:{}", revision.resolved_id, path);
            if self.git(&["cat-file", "-e", &object], true)?.is_none() {
                return Err(missing());
            }
        }
        if revision.resolved_id.is_empty() {
            return Err(missing());
        }
        let format = match self.commit_time {
            CommitTime::Committer => "--format=%ct",
            CommitTime::Author => "--format=%at",
        };
        let out = self
            .git(&["log", "-1", format, &revision.resolved_id, "--", path], false)?
            .unwrap_or_default();
        let text = String::from_utf8_lossy(&out);
        let seconds: i64 = text.trim().parse().map_err(|_| missing())?;
        Utc.timestamp_opt(seconds, 0).single().ok_or_else(|| VcsError::Git {
            command: "log".into(),
            message: format!("timestamp out of range: {seconds}"),
        })
    }

    fn list_branches(&self) -> Result<Vec<RevisionRef>, VcsError> {
        let out = self
            .git(
                &[
                    "for-each-ref",
                    "--format=%(refname:short)%00%(objectname)",
                    "refs/heads",
                ],
                false,
            )?
            .unwrap_or_default();
        let mut branches: Vec<RevisionRef> = String::from_utf8_lossy(&out)
            .lines()
            .filter_map(|line| {
                let (name, id) = line.split_once('\0')?;
                Some(RevisionRef {
                    name: name.to_string(),
                    resolved_id: id.to_string(),
                })
            })
            .collect();
        branches.sort();
        Ok(branches)
    }
}
