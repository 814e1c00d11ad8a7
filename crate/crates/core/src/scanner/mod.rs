//! Lexical reference scanning.
//!
//! Files are tokenized with comment and string awareness, then marker forms
//! (`trace(X)`, `verifiesRequirement(X)`, `@TracesSET(X)`, `@VerifiesSET({X, Y})`,
//! `TRACES_SET(X)`) and bare constant mentions are collected as
//! [`TraceReference`]s. Resolution against the current Traceables lives in
//! [`resolve`].

pub mod grammar;
pub mod lexer;
pub mod resolve;

use std::fmt;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use lexer::{tokenize, Token, TokenKind};

pub use grammar::{GrammarConfig, MarkerForm, MarkerGrammar};
pub use resolve::{near_miss, resolve, ResolutionResult, Resolved};

use crate::vcs::FileTree;

pub const DEFAULT_TEST_GLOBS: [&str; 3] = ["**/test/**", "**/tests/**", "*_test.*"];

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid marker grammar: {0}")]
    Grammar(String),
    #[error("invalid glob {glob:?}: {message}")]
    Glob { glob: String, message: String },
    #[error("scan root {0} does not exist")]
    MissingRoot(PathBuf),
    #[error("cannot build scan thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefKind {
    Implementation,
    Test,
}

impl RefKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Implementation => "implementation",
            Self::Test => "test",
        }
    }
}

impl fmt::Display for RefKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reference site. Ordering is (file, line, constant_name, marker).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceReference {
    pub file: String,
    pub line: usize,
    pub constant_name: String,
    pub marker: MarkerForm,
    pub kind: RefKind,
}

impl TraceReference {
    fn sort_key(&self) -> (&str, usize, &str, MarkerForm) {
        (&self.file, self.line, &self.constant_name, self.marker)
    }
}

impl Ord for TraceReference {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key()).then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for TraceReference {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TraceReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}:{}",
            self.file, self.line, self.kind, self.marker, self.constant_name
        )
    }
}

/// All references of one scan, sorted and de-duplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceIndex {
    references: Vec<TraceReference>,
}

impl ReferenceIndex {
    pub fn new(mut references: Vec<TraceReference>) -> Self {
        references.sort();
        references.dedup_by(|a, b| a.sort_key() == b.sort_key());
        Self { references }
    }

    pub fn references(&self) -> &[TraceReference] {
        &self.references
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    /// Line-oriented records `file:line:kind:marker:constant_name`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for r in &self.references {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// Path selection and classification settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// When non-empty, only matching paths are scanned.
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub test_globs: Vec<String>,
    /// 0 uses rayon's default.
    pub threads: usize,
    #[serde(skip)]
    pub artifact_root: Option<String>,
    pub grammar: GrammarConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            include: Vec::new(),
            exclude: Vec::new(),
            test_globs: DEFAULT_TEST_GLOBS.iter().map(|g| g.to_string()).collect(),
            threads: 0,
            artifact_root: None,
            grammar: GrammarConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanWarning {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanOutcome {
    pub index: ReferenceIndex,
    pub warnings: Vec<ScanWarning>,
    pub files_scanned: usize,
}

fn glob_set(globs: &[String]) -> Result<Option<GlobSet>, ScanError> {
    if globs.is_empty() {
        return Ok(None);
    }
    let mut builder = GlobSetBuilder::new();
    for g in globs {
        let glob = Glob::new(g).map_err(|e| ScanError::Glob {
            glob: g.clone(),
            message: e.to_string(),
        })?;
        builder.add(glob);
    }
    builder.build().map(Some).map_err(|e| ScanError::Glob {
        glob: globs.join(","),
        message: e.to_string(),
    })
}

/// A compiled scan configuration.
#[derive(Debug, Clone)]
pub struct Scanner {
    grammar: MarkerGrammar,
    bare: Option<Regex>,
    include: Option<GlobSet>,
    exclude: Option<GlobSet>,
    tests: Option<GlobSet>,
    artifact_root: Option<String>,
    threads: usize,
}

impl Scanner {
    /// `known_prefixes` feeds the bare-reference pattern (see
    /// [`crate::TraceableSet::known_prefixes`]).
    pub fn new(config: &ScanConfig, grammar: MarkerGrammar, known_prefixes: &[String]) -> Result<Self, ScanError> {
        let bare = if grammar.bare_references {
            grammar::bare_pattern(known_prefixes)
        } else {
            None
        };
        let tests = glob_set(&config.test_globs)?;
        Ok(Self {
            grammar,
            bare,
            include: glob_set(&config.include)?,
            exclude: glob_set(&config.exclude)?,
            tests,
            artifact_root: config
                .artifact_root
                .as_ref()
                .map(|r| r.trim_start_matches("./").trim_end_matches('/').to_string())
                .filter(|r| !r.is_empty()),
            threads: config.threads,
        })
    }

    pub fn from_config(config: &ScanConfig, known_prefixes: &[String]) -> Result<Self, ScanError> {
        Self::new(config, MarkerGrammar::from_config(&config.grammar)?, known_prefixes)
    }

    pub fn grammar(&self) -> &MarkerGrammar {
        &self.grammar
    }

    /// Whether a repo-relative path takes part in the scan.
    pub fn selects(&self, path: &str) -> bool {
        if path == ".git" || path.starts_with(".git/") {
            return false;
        }
        if let Some(root) = &self.artifact_root {
            if path == root || path.starts_with(&format!("{root}/")) {
                return false;
            }
        }
        if let Some(include) = &self.include {
            if !include.is_match(path) {
                return false;
            }
        }
        !self.exclude.as_ref().is_some_and(|e| e.is_match(path))
    }

    pub fn is_test_path(&self, path: &str) -> bool {
        let Some(tests) = &self.tests else {
            return false;
        };
        if tests.is_match(path) {
            return true;
        }
        // `*_test.*` style globs are meant for the file name at any depth.
        Path::new(path)
            .file_name()
            .is_some_and(|name| tests.is_match(Path::new(name)))
    }

    /// References of one file in file order.
    pub fn scan_file(&self, path: &str, content: &str) -> Vec<TraceReference> {
        let test_path = self.is_test_path(path);
        let kind_of = |marker: MarkerForm| {
            if test_path || marker.is_verify() {
                RefKind::Test
            } else {
                RefKind::Implementation
            }
        };
        let tokens = tokenize(content, &self.grammar.syntax);
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let token = tokens[i];
            if token.kind != TokenKind::Ident {
                i += 1;
                continue;
            }
            let head = if i > 0 && tokens[i - 1].kind == TokenKind::Punct('@') {
                format!("@{}", token.text)
            } else {
                token.text.to_string()
            };
            if let Some(form) = self.grammar.marker_form(&head) {
                if tokens.get(i + 1).map(|t| t.kind) == Some(TokenKind::Punct('(')) {
                    if let Some((args, end)) = self.marker_arguments(&tokens, i + 2) {
                        for name in args {
                            out.push(TraceReference {
                                file: path.to_string(),
                                line: token.line,
                                constant_name: name.to_string(),
                                marker: form,
                                kind: kind_of(form),
                            });
                        }
                        i = end + 1;
                        continue;
                    }
                }
            }
            if self.bare.as_ref().is_some_and(|re| re.is_match(token.text)) {
                out.push(TraceReference {
                    file: path.to_string(),
                    line: token.line,
                    constant_name: token.text.to_string(),
                    marker: MarkerForm::Bare,
                    kind: kind_of(MarkerForm::Bare),
                });
            }
            i += 1;
        }
        out
    }

    /// Parses a marker argument list starting just after `(`. Returns the
    /// constant names and the index of the closing `)`, or `None` when the
    /// list is never closed.
    fn marker_arguments<'a>(&self, tokens: &[Token<'a>], start: usize) -> Option<(Vec<&'a str>, usize)> {
        let opens: Vec<char> = self.grammar.list_delimiters.iter().map(|d| d.0).collect();
        let closes: Vec<char> = self.grammar.list_delimiters.iter().map(|d| d.1).collect();
        let mut names = Vec::new();
        let mut element: Vec<Token<'a>> = Vec::new();
        let mut depth = 0usize;
        let mut i = start;
        while i < tokens.len() {
            let t = tokens[i];
            match t.kind {
                TokenKind::Punct('(') => {
                    depth += 1;
                    element.push(t);
                }
                TokenKind::Punct(')') if depth == 0 => {
                    self.push_element(&element, &mut names);
                    return Some((names, i));
                }
                TokenKind::Punct(')') => {
                    depth -= 1;
                    element.push(t);
                }
                TokenKind::Punct(',') if depth == 0 => {
                    self.push_element(&element, &mut names);
                    element.clear();
                }
                TokenKind::Punct(c) if depth == 0 && (opens.contains(&c) || closes.contains(&c)) => {}
                _ => element.push(t),
            }
            i += 1;
        }
        None
    }

    /// Accepts `NAME`, `a.b.NAME`, `a::NAME` and `key = NAME`.
    fn push_element<'a>(&self, element: &[Token<'a>], names: &mut Vec<&'a str>) {
        let mut tokens = element;
        if let [key, eq, rest @ ..] = tokens {
            if key.kind == TokenKind::Ident && eq.kind == TokenKind::Punct('=') {
                tokens = rest;
            }
        }
        let mut last = None;
        let mut expect_ident = true;
        let mut k = 0;
        while k < tokens.len() {
            let t = tokens[k];
            if expect_ident {
                if t.kind != TokenKind::Ident {
                    return;
                }
                last = Some(t.text);
                expect_ident = false;
                k += 1;
            } else if t.kind == TokenKind::Punct('.') {
                expect_ident = true;
                k += 1;
            } else if t.kind == TokenKind::Punct(':')
                && tokens.get(k + 1).map(|n| n.kind) == Some(TokenKind::Punct(':'))
            {
                expect_ident = true;
                k += 2;
            } else {
                return;
            }
        }
        if expect_ident {
            return;
        }
        if let Some(name) = last {
            if self.grammar.argument.is_match(name) {
                names.push(name);
            }
        }
    }

    fn pool(&self) -> Result<Option<rayon::ThreadPool>, ScanError> {
        if self.threads == 0 {
            return Ok(None);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map(Some)
            .map_err(|e| ScanError::ThreadPool(e.to_string()))
    }

    fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T, ScanError> {
        Ok(match self.pool()? {
            Some(pool) => pool.install(job),
            None => job(),
        })
    }

    fn scan_bytes(&self, path: &str, bytes: &[u8]) -> Option<Vec<TraceReference>> {
        if bytes.contains(&0) {
            return None;
        }
        let text = std::str::from_utf8(bytes).ok()?;
        Some(self.scan_file(path, text))
    }

    /// Scans an in-memory tree, e.g. one read from a revision.
    pub fn scan_file_tree(&self, tree: &FileTree) -> Result<ScanOutcome, ScanError> {
        let files: Vec<(&String, &Vec<u8>)> = tree.files().iter().filter(|(p, _)| self.selects(p)).collect();
        let results: Vec<(usize, Vec<TraceReference>)> = self.run(|| {
            files
                .par_iter()
                .filter_map(|(p, bytes)| self.scan_bytes(p, bytes).map(|r| (1, r)))
                .collect()
        })?;
        Ok(collect(results, Vec::new()))
    }

    /// Scans a directory on disk. Unreadable files produce warnings; binary
    /// files are skipped.
    pub fn scan_tree(&self, root: &Path) -> Result<ScanOutcome, ScanError> {
        if !root.is_dir() {
            return Err(ScanError::MissingRoot(root.to_path_buf()));
        }
        let mut warnings = Vec::new();
        let mut paths = Vec::new();
        let walker = WalkDir::new(root)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || e.file_name() != ".git");
        for entry in walker {
            match entry {
                Ok(e) if e.file_type().is_file() => {
                    let rel = relative(root, e.path());
                    if self.selects(&rel) {
                        paths.push((rel, e.into_path()));
                    }
                }
                Ok(_) => {}
                Err(e) => warnings.push(ScanWarning {
                    file: e.path().map(|p| relative(root, p)).unwrap_or_default(),
                    message: e.to_string(),
                }),
            }
        }
        let results: Vec<Result<Option<Vec<TraceReference>>, ScanWarning>> = self.run(|| {
            paths
                .par_iter()
                .map(|(rel, full)| match std::fs::read(full) {
                    Ok(bytes) => Ok(self.scan_bytes(rel, &bytes)),
                    Err(e) => Err(ScanWarning {
                        file: rel.clone(),
                        message: format!("unreadable: {e}"),
                    }),
                })
                .collect()
        })?;
        let mut scanned = Vec::new();
        for r in results {
            match r {
                Ok(Some(refs)) => scanned.push((1, refs)),
                Ok(None) => {}
                Err(w) => warnings.push(w),
            }
        }
        for w in &warnings {
            tracing::warn!(file = %w.file, "{}", w.message);
        }
        Ok(collect(scanned, warnings))
    }
}

fn relative(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}

fn collect(results: Vec<(usize, Vec<TraceReference>)>, mut warnings: Vec<ScanWarning>) -> ScanOutcome {
    let files_scanned = results.iter().map(|(n, _)| n).sum();
    let index = ReferenceIndex::new(results.into_iter().flat_map(|(_, r)| r).collect());
    warnings.sort_by(|a, b| (&a.file, &a.message).cmp(&(&b.file, &b.message)));
    ScanOutcome {
        index,
        warnings,
        files_scanned,
    }
}
