//! Partitioning requirements into named requirement sets.

use globset::{Glob, GlobMatcher};
use serde::{Deserialize, Serialize};

use super::{Requirement, SourceError, SourceSnapshot};

/// Maps requirements to a set by category and/or source glob. A rule with
/// neither pattern matches everything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionRule {
    pub set: String,
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub source: Option<String>,
    /// Short name used in set-specific markers (`TracesSWR`); derived from the
    /// set name when absent.
    #[serde(default)]
    pub marker_tag: Option<String>,
}

impl PartitionRule {
    pub fn new(set: &str, category: &str) -> Self {
        Self {
            set: set.into(),
            category: Some(category.into()),
            source: None,
            marker_tag: None,
        }
    }
}

/// Marker tag for a set: the segment after the last `_`, or the whole name.
pub fn derive_marker_tag(set_name: &str) -> String {
    let tail = set_name.rsplit('_').next().unwrap_or(set_name);
    let tag: String = tail.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    if tag.is_empty() {
        set_name.chars().filter(|c| c.is_ascii_alphanumeric()).collect()
    } else {
        tag
    }
}

#[derive(Debug)]
struct CompiledRule {
    rule: PartitionRule,
    category: Option<GlobMatcher>,
    source: Option<GlobMatcher>,
}

/// Rules with their glob patterns compiled.
#[derive(Debug)]
pub struct PartitionRules {
    rules: Vec<CompiledRule>,
}

impl PartitionRules {
    pub fn new(rules: Vec<PartitionRule>) -> Result<Self, SourceError> {
        let compile = |rule: &PartitionRule, pattern: &Option<String>| {
            pattern
                .as_deref()
                .map(|p| {
                    Glob::new(p)
                        .map(|g| g.compile_matcher())
                        .map_err(|e| SourceError::Rule {
                            set: rule.set.clone(),
                            message: e.to_string(),
                        })
                })
                .transpose()
        };
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            if rule.set.trim().is_empty() {
                return Err(SourceError::Rule {
                    set: rule.set,
                    message: "set name is empty".into(),
                });
            }
            let category = compile(&rule, &rule.category)?;
            let source = compile(&rule, &rule.source)?;
            compiled.push(CompiledRule { rule, category, source });
        }
        Ok(Self { rules: compiled })
    }

    pub fn rules(&self) -> impl Iterator<Item = &PartitionRule> {
        self.rules.iter().map(|r| &r.rule)
    }

    /// Marker tag configured for `set_name`, or the derived default.
    pub fn marker_tag(&self, set_name: &str) -> String {
        self.rules
            .iter()
            .find(|r| r.rule.set == set_name)
            .and_then(|r| r.rule.marker_tag.clone())
            .unwrap_or_else(|| derive_marker_tag(set_name))
    }

    fn matching<'a>(&'a self, req: &Requirement, source_id: &str) -> Vec<&'a PartitionRule> {
        self.rules
            .iter()
            .filter(|r| r.category.as_ref().is_none_or(|m| m.is_match(&req.category)))
            .filter(|r| r.source.as_ref().is_none_or(|m| m.is_match(source_id)))
            .map(|r| &r.rule)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub set_name: String,
    pub requirements: Vec<Requirement>,
}

/// Splits the snapshot so that every requirement lands in exactly one set.
///
/// Partitions come back sorted by set name, requirements within each by id.
/// Rules naming the same set are merged into one partition.
pub fn partition(snapshot: &SourceSnapshot, rules: &PartitionRules) -> Result<Vec<Partition>, SourceError> {
    let mut unmatched = Vec::new();
    let mut ambiguous = Vec::new();
    let mut assigned: std::collections::BTreeMap<String, Vec<Requirement>> = Default::default();

    for req in &snapshot.requirements {
        let hits = rules.matching(req, &snapshot.source_id);
        match hits.as_slice() {
            [] => unmatched.push(req.id.clone()),
            [rule] => assigned.entry(rule.set.clone()).or_default().push(req.clone()),
            many => ambiguous.push((req.id.clone(), many.iter().map(|r| r.set.clone()).collect())),
        }
    }
    if !ambiguous.is_empty() {
        return Err(SourceError::AmbiguousPartition { ids: ambiguous });
    }
    if !unmatched.is_empty() {
        return Err(SourceError::Unpartitioned { ids: unmatched });
    }
    Ok(assigned
        .into_iter()
        .map(|(set_name, mut requirements)| {
            requirements.sort_by(|a, b| a.id.cmp(&b.id));
            Partition { set_name, requirements }
        })
        .collect())
}
