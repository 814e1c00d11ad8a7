//! `reqtocode.toml`: the single configuration file at the repository root.
//! The file format is documented in `docs/configuration.md`.

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::codegen::DEFAULT_MAX_NAME_LENGTH;
use crate::lifecycle::{Intent, LifecycleConfig};
use crate::scanner::ScanConfig;
use crate::source::{PartitionRule, DEFAULT_STATUSES};
use crate::vcs::CommitTime;

pub const DEFAULT_CONFIG_FILE: &str = "reqtocode.toml";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceConfig {
    /// Directory of requirement files, relative to the repository root.
    Files(PathBuf),
    /// Mock ALM endpoint: an http(s) URL or a JSON file path.
    Alm(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    files: Option<PathBuf>,
    alm: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawLifecycle {
    grace_cycles: Option<u32>,
    lifecycle_info_available: Option<bool>,
    statuses: Option<Vec<String>>,
    status_map: Option<BTreeMap<String, Intent>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateConfig {
    pub profile: String,
    /// Relative to the repository root.
    pub artifact_root: PathBuf,
    pub max_name_length: usize,
    /// Directory of additional or overriding profile files.
    pub template_dir: Option<PathBuf>,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            profile: "pseudo".into(),
            artifact_root: PathBuf::from("generated"),
            max_name_length: DEFAULT_MAX_NAME_LENGTH,
            template_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VcsConfig {
    pub commit_time: CommitTime,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    /// Baseline used by `report --baseline` without a value.
    pub baseline: Option<String>,
    pub drift_tolerance_secs: i64,
}

/// Gate defaults; command-line flags can only make them stricter.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GatesConfig {
    pub deny_deprecated: bool,
    pub strict_drift: bool,
    /// Minimum percentage of rows with both implementation and test references.
    pub min_coverage: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    source: RawSource,
    #[serde(default)]
    partition: Vec<PartitionRule>,
    #[serde(default)]
    lifecycle: RawLifecycle,
    #[serde(default)]
    generate: GenerateConfig,
    #[serde(default)]
    scan: ScanConfig,
    #[serde(default)]
    vcs: VcsConfig,
    #[serde(default)]
    report: ReportConfig,
    #[serde(default)]
    gates: GatesConfig,
}

#[derive(Debug, Clone)]
pub struct ToolConfig {
    /// Directory holding the configuration file; all relative paths hang off it.
    pub repo_root: PathBuf,
    pub source: SourceConfig,
    pub partitions: Vec<PartitionRule>,
    pub statuses: Vec<String>,
    pub lifecycle: LifecycleConfig,
    pub generate: GenerateConfig,
    pub scan: ScanConfig,
    pub vcs: VcsConfig,
    pub report: ReportConfig,
    pub gates: GatesConfig,
}

fn is_plain_relative(path: &Path) -> bool {
    path.components()
        .all(|c| matches!(c, Component::Normal(_) | Component::CurDir))
}

impl ToolConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let absolute = if path.is_absolute() {
            path.to_path_buf()
        } else {
            std::env::current_dir()
                .map_err(|source| ConfigError::Io {
                    path: path.to_path_buf(),
                    source,
                })?
                .join(path)
        };
        let root = absolute.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, root)
    }

    pub fn parse(text: &str, origin: &Path, repo_root: PathBuf) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let invalid = |message: String| ConfigError::Invalid {
            path: origin.to_path_buf(),
            message,
        };

        let source = match (raw.source.files, raw.source.alm) {
            (Some(files), None) => SourceConfig::Files(files),
            (None, Some(alm)) => SourceConfig::Alm(alm),
            _ => return Err(invalid("[source] needs exactly one of `files` or `alm`".into())),
        };
        if raw.partition.is_empty() {
            return Err(invalid("at least one [[partition]] rule is required".into()));
        }
        let artifact_root = &raw.generate.artifact_root;
        if artifact_root.as_os_str().is_empty() || !is_plain_relative(artifact_root) {
            return Err(invalid(format!(
                "generate.artifact_root {} must be a relative path inside the repository",
                artifact_root.display()
            )));
        }
        if raw.generate.max_name_length < 8 {
            return Err(invalid("generate.max_name_length must be at least 8".into()));
        }

        let defaults = LifecycleConfig::default();
        let statuses = raw
            .lifecycle
            .statuses
            .unwrap_or_else(|| DEFAULT_STATUSES.iter().map(|s| s.to_string()).collect());
        let lifecycle = LifecycleConfig {
            grace_cycles: raw.lifecycle.grace_cycles.unwrap_or(defaults.grace_cycles),
            lifecycle_info_available: raw
                .lifecycle
                .lifecycle_info_available
                .unwrap_or(defaults.lifecycle_info_available),
            status_map: raw.lifecycle.status_map.unwrap_or(defaults.status_map),
        };
        lifecycle.validate(&statuses).map_err(|e| invalid(e.to_string()))?;

        let mut scan = raw.scan;
        scan.artifact_root = Some(artifact_root.to_string_lossy().replace('\\', "/"));

        Ok(Self {
            repo_root,
            source,
            partitions: raw.partition,
            statuses,
            lifecycle,
            generate: raw.generate,
            scan,
            vcs: raw.vcs,
            report: raw.report,
            gates: raw.gates,
        })
    }

    pub fn artifact_root(&self) -> PathBuf {
        self.repo_root.join(&self.generate.artifact_root)
    }

    /// Artifact root as a repo-relative path with forward slashes.
    pub fn artifact_root_rel(&self) -> String {
        let rel = self.generate.artifact_root.to_string_lossy().replace('\\', "/");
        rel.trim_start_matches("./").trim_end_matches('/').to_string()
    }

    pub fn template_dir(&self) -> Option<PathBuf> {
        self.generate.template_dir.as_ref().map(|d| self.repo_root.join(d))
    }
}
