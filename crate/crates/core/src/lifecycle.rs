//! Graduated Traceable lifecycle: Active, Deprecated (with a grace period
//! counted in sync cycles), Removed.
//!
//! One sync invocation is one cycle. A requirement that is continuously
//! deprecated with `grace_cycles = g` is Deprecated for cycles `1..=g` and
//! Removed at cycle `g + 1`. Removed is terminal: a requirement that becomes
//! active again after removal is a resurrection error and needs a new id.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LifecycleState {
    Active,
    Deprecated,
    Removed,
}

impl fmt::Display for LifecycleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Active => "Active",
            Self::Deprecated => "Deprecated",
            Self::Removed => "Removed",
        })
    }
}

impl FromStr for LifecycleState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "active" => Ok(Self::Active),
            "deprecated" => Ok(Self::Deprecated),
            "removed" => Ok(Self::Removed),
            other => Err(format!("unknown lifecycle state {other:?}")),
        }
    }
}

/// What a source status token asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intent {
    Active,
    Deprecated,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceableState {
    pub state: LifecycleState,
    /// Set iff `state` is Deprecated: when the deprecation was first observed.
    pub deprecated_since: Option<DateTime<Utc>>,
    /// Set iff `state` is Deprecated: sync cycles left before removal.
    pub grace_remaining: Option<u32>,
}

impl TraceableState {
    pub fn active() -> Self {
        Self {
            state: LifecycleState::Active,
            deprecated_since: None,
            grace_remaining: None,
        }
    }

    pub fn deprecated(since: DateTime<Utc>, grace_remaining: u32) -> Self {
        Self {
            state: LifecycleState::Deprecated,
            deprecated_since: Some(since),
            grace_remaining: Some(grace_remaining),
        }
    }

    pub fn removed() -> Self {
        Self {
            state: LifecycleState::Removed,
            deprecated_since: None,
            grace_remaining: None,
        }
    }

    pub fn is_removed(&self) -> bool {
        self.state == LifecycleState::Removed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LifecycleError {
    #[error("status {0:?} is not mapped to a lifecycle intent")]
    UnknownStatus(String),
    #[error("requirement reappeared as active after removal; re-created requirements need a new id")]
    Resurrection,
    #[error("status vocabulary entries without a lifecycle mapping: {}", .0.join(", "))]
    IncompleteStatusMap(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleConfig {
    pub grace_cycles: u32,
    /// When false the source exposes no lifecycle transitions and every
    /// non-active status removes the Traceable directly.
    pub lifecycle_info_available: bool,
    pub status_map: BTreeMap<String, Intent>,
}

impl Default for LifecycleConfig {
    fn default() -> Self {
        let status_map = [
            ("Draft", Intent::Active),
            ("Approved", Intent::Active),
            ("Deprecated", Intent::Deprecated),
            ("Removed", Intent::Removed),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            grace_cycles: 2,
            lifecycle_info_available: true,
            status_map,
        }
    }
}

impl LifecycleConfig {
    /// Checks that every vocabulary token has an intent.
    pub fn validate(&self, vocabulary: &[String]) -> Result<(), LifecycleError> {
        let missing: Vec<String> = vocabulary
            .iter()
            .filter(|s| self.intent_of(s).is_err())
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(LifecycleError::IncompleteStatusMap(missing))
        }
    }

    pub fn intent_of(&self, status: &str) -> Result<Intent, LifecycleError> {
        self.status_map
            .get(status)
            .or_else(|| {
                self.status_map
                    .iter()
                    .find(|(k, _)| k.eq_ignore_ascii_case(status))
                    .map(|(_, v)| v)
            })
            .copied()
            .ok_or_else(|| LifecycleError::UnknownStatus(status.to_string()))
    }
}

/// Advances one sync cycle for a requirement present in the source.
///
/// `observed_at` stamps `deprecated_since` when the Traceable first enters
/// Deprecated; callers pass the requirement's last-modified time so the result
/// stays a pure function of repository content.
pub fn derive_state(
    source_status: &str,
    previous: Option<&TraceableState>,
    config: &LifecycleConfig,
    observed_at: DateTime<Utc>,
) -> Result<TraceableState, LifecycleError> {
    let intent = config.intent_of(source_status)?;
    step(intent, previous, config, observed_at)
}

/// Advances one sync cycle for a requirement that was known before but is
/// missing from the current snapshot. Absence counts as deprecation intent.
pub fn absent_requirement_state(
    previous: &TraceableState,
    config: &LifecycleConfig,
    observed_at: DateTime<Utc>,
) -> TraceableState {
    step(Intent::Deprecated, Some(previous), config, observed_at).expect("deprecation intent never resurrects")
}

fn step(
    intent: Intent,
    previous: Option<&TraceableState>,
    config: &LifecycleConfig,
    observed_at: DateTime<Utc>,
) -> Result<TraceableState, LifecycleError> {
    if previous.is_some_and(TraceableState::is_removed) {
        return match intent {
            Intent::Active => Err(LifecycleError::Resurrection),
            Intent::Deprecated | Intent::Removed => Ok(TraceableState::removed()),
        };
    }
    if !config.lifecycle_info_available {
        return Ok(match intent {
            Intent::Active => TraceableState::active(),
            Intent::Deprecated | Intent::Removed => TraceableState::removed(),
        });
    }
    Ok(match intent {
        Intent::Active => TraceableState::active(),
        Intent::Removed => TraceableState::removed(),
        Intent::Deprecated => match previous {
            Some(prev) if prev.state == LifecycleState::Deprecated => {
                let remaining = prev.grace_remaining.unwrap_or(0);
                if remaining <= 1 {
                    TraceableState::removed()
                } else {
                    TraceableState::deprecated(prev.deprecated_since.unwrap_or(observed_at), remaining - 1)
                }
            }
            _ if config.grace_cycles == 0 => TraceableState::removed(),
            _ => TraceableState::deprecated(observed_at, config.grace_cycles),
        },
    })
}
