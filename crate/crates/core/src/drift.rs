//! Drift between requirement modification times and the commit times of the
//! code that references them.
//!
//! For every Traceable with at least one resolved reference, the code time is
//! the latest commit touching any referencing file. A requirement edited after
//! that is `RequirementNewer`; code committed after the last requirement edit
//! is `CodeNewer`. Findings are signals; the CLI decides whether they fail.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::codegen::Traceable;
use crate::scanner::ResolutionResult;
use crate::timestamp;
use crate::vcs::{RevisionRef, Vcs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DriftDirection {
    RequirementNewer,
    CodeNewer,
}

impl fmt::Display for DriftDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::RequirementNewer => "RequirementNewer",
            Self::CodeNewer => "CodeNewer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DriftFinding {
    pub requirement_id: String,
    pub traceable: String,
    pub direction: DriftDirection,
    #[serde(with = "timestamp::serde_secs")]
    pub requirement_time: DateTime<Utc>,
    #[serde(with = "timestamp::serde_secs")]
    pub code_time: DateTime<Utc>,
    pub evidence_files: Vec<String>,
}

impl DriftFinding {
    pub fn message(&self) -> String {
        let req = timestamp::format(&self.requirement_time);
        let code = timestamp::format(&self.code_time);
        match self.direction {
            DriftDirection::RequirementNewer => format!(
                "requirement {} modified {req} after referencing code was last committed {code}",
                self.requirement_id
            ),
            DriftDirection::CodeNewer => format!(
                "referencing code committed {code} after requirement {} was last modified {req}",
                self.requirement_id
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DriftOutcome {
    pub findings: Vec<DriftFinding>,
    /// Requirements that could not be examined, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// The direction rule on its own.
pub fn classify(
    requirement_time: DateTime<Utc>,
    code_time: DateTime<Utc>,
    tolerance: Duration,
) -> Option<DriftDirection> {
    if requirement_time > code_time + tolerance {
        Some(DriftDirection::RequirementNewer)
    } else if code_time > requirement_time + tolerance {
        Some(DriftDirection::CodeNewer)
    } else {
        None
    }
}

pub fn detect_drift(
    resolution: &ResolutionResult<'_>,
    revision: &RevisionRef,
    vcs: &dyn Vcs,
    tolerance: Duration,
) -> DriftOutcome {
    let mut files_by_req: BTreeMap<&str, (&Traceable, BTreeSet<&str>)> = BTreeMap::new();
    for r in &resolution.resolved {
        files_by_req
            .entry(&r.traceable.requirement_id)
            .or_insert_with(|| (r.traceable, BTreeSet::new()))
            .1
            .insert(&r.reference.file);
    }

    let all_files: BTreeSet<&str> = files_by_req.values().flat_map(|(_, f)| f.iter().copied()).collect();
    let times: BTreeMap<&str, Result<DateTime<Utc>, String>> = all_files
        .into_par_iter()
        .map(|f| (f, vcs.last_commit_time(revision, f).map_err(|e| e.to_string())))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut outcome = DriftOutcome::default();
    for (id, (traceable, files)) in files_by_req {
        let Some(requirement_time) = traceable.last_modified else {
            tracing::warn!(requirement = id, "no last_modified metadata; skipped for drift");
            outcome
                .skipped
                .push((id.to_string(), "no last_modified metadata".into()));
            continue;
        };
        let mut code_time = None;
        let mut failure = None;
        for f in &files {
            match &times[f] {
                Ok(t) => code_time = code_time.max(Some(*t)),
                Err(e) => failure = Some(e.clone()),
            }
        }
        if let Some(e) = failure {
            tracing::warn!(requirement = id, "cannot determine code time: {e}");
            outcome.skipped.push((id.to_string(), e));
            continue;
        }
        let Some(code_time) = code_time else { continue };
        if let Some(direction) = classify(requirement_time, code_time, tolerance) {
            outcome.findings.push(DriftFinding {
                requirement_id: id.to_string(),
                traceable: traceable.id_name(),
                direction,
                requirement_time,
                code_time,
                evidence_files: files.iter().map(|f| f.to_string()).collect(),
            });
        }
    }
    outcome
}
