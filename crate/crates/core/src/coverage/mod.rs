//! Requirement-reference coverage: per-Traceable implementation and test
//! reference counts, lifecycle distribution, and branch-relative deltas.

pub mod render;

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::codegen::{Traceable, TraceableSet};
use crate::lifecycle::LifecycleState;
use crate::scanner::{resolve, RefKind, ReferenceIndex, ResolutionResult};
use crate::vcs::RevisionRef;

pub use render::{render, Format, Report};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageRow {
    /// Short id name shown in tables (`SWR_101`).
    pub traceable: String,
    pub constant_name: String,
    pub requirement_id: String,
    pub impl_count: usize,
    pub test_count: usize,
    pub state: LifecycleState,
}

impl CoverageRow {
    fn new(t: &Traceable) -> Self {
        Self {
            traceable: t.id_name(),
            constant_name: t.constant_name.clone(),
            requirement_id: t.requirement_id.clone(),
            impl_count: 0,
            test_count: 0,
            state: t.state.state,
        }
    }

    fn count(&mut self, kind: RefKind) {
        match kind {
            RefKind::Implementation => self.impl_count += 1,
            RefKind::Test => self.test_count += 1,
        }
    }

    /// Both an implementation and a test reference exist.
    pub fn is_covered(&self) -> bool {
        self.impl_count > 0 && self.test_count > 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LifecycleDistribution {
    pub active: usize,
    pub deprecated: usize,
    /// Implementation references that target Deprecated Traceables.
    pub implementation_references_to_deprecated: usize,
}

impl LifecycleDistribution {
    fn of(rows: &[CoverageRow]) -> Self {
        let mut d = Self::default();
        for row in rows {
            match row.state {
                LifecycleState::Active => d.active += 1,
                LifecycleState::Deprecated => {
                    d.deprecated += 1;
                    d.implementation_references_to_deprecated += row.impl_count;
                }
                LifecycleState::Removed => {}
            }
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub lifecycle_distribution: LifecycleDistribution,
    pub revision: RevisionRef,
    pub set_filter: Option<String>,
}

impl CoverageReport {
    /// Share of rows with both implementation and test references, in
    /// percent. An empty report counts as fully covered.
    pub fn covered_percent(&self) -> f64 {
        if self.rows.is_empty() {
            return 100.0;
        }
        let covered = self.rows.iter().filter(|r| r.is_covered()).count();
        covered as f64 * 100.0 / self.rows.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub rows: Vec<CoverageRow>,
    pub lifecycle_distribution: LifecycleDistribution,
    pub branch: RevisionRef,
    pub baseline: RevisionRef,
    pub set_filter: Option<String>,
}

fn in_filter(t: &Traceable, set_filter: Option<&str>) -> bool {
    set_filter.is_none_or(|s| t.set_name == s)
}

/// Builds the coverage report for one revision.
///
/// A Traceable gets a row unless it carries a scope that differs from the
/// revision name and has no references there: requirements scoped to a
/// feature branch show up on other branches only once code references them.
pub fn compute_coverage(
    traceables: &TraceableSet,
    resolution: &ResolutionResult<'_>,
    revision: &RevisionRef,
    set_filter: Option<&str>,
) -> CoverageReport {
    let mut rows: BTreeMap<&str, CoverageRow> = BTreeMap::new();
    for t in traceables.iter().filter(|t| in_filter(t, set_filter)) {
        if t.scope.as_deref().is_none_or(|s| s == revision.name) {
            rows.insert(&t.requirement_id, CoverageRow::new(t));
        }
    }
    for r in &resolution.resolved {
        if !in_filter(r.traceable, set_filter) {
            continue;
        }
        rows.entry(&r.traceable.requirement_id)
            .or_insert_with(|| CoverageRow::new(r.traceable))
            .count(r.reference.kind);
    }
    let rows: Vec<CoverageRow> = rows.into_values().collect();
    CoverageReport {
        lifecycle_distribution: LifecycleDistribution::of(&rows),
        rows,
        revision: revision.clone(),
        set_filter: set_filter.map(str::to_string),
    }
}

/// Counts branch references whose `(file, requirement, kind)` triple does
/// not occur on the baseline. Names are canonicalized through the Traceable
/// set first, so `SWR_101` and its full constant name are the same
/// reference target. Rows without any new reference are left out.
pub fn compute_delta(
    branch_index: &ReferenceIndex,
    baseline_index: &ReferenceIndex,
    traceables: &TraceableSet,
    branch: &RevisionRef,
    baseline: &RevisionRef,
    set_filter: Option<&str>,
) -> DeltaReport {
    let canonical = |name: &str| -> String {
        traceables
            .lookup(name)
            .map(|t| t.requirement_id.clone())
            .unwrap_or_else(|| name.to_string())
    };
    let baseline_triples: HashSet<(&str, String, RefKind)> = baseline_index
        .references()
        .iter()
        .map(|r| (r.file.as_str(), canonical(&r.constant_name), r.kind))
        .collect();

    let resolution = resolve(branch_index, traceables);
    let mut rows: BTreeMap<&str, CoverageRow> = BTreeMap::new();
    for r in &resolution.resolved {
        let t = r.traceable;
        if !in_filter(t, set_filter) {
            continue;
        }
        let triple = (r.reference.file.as_str(), t.requirement_id.clone(), r.reference.kind);
        if baseline_triples.contains(&triple) {
            continue;
        }
        rows.entry(&t.requirement_id)
            .or_insert_with(|| CoverageRow::new(t))
            .count(r.reference.kind);
    }
    let rows: Vec<CoverageRow> = rows.into_values().collect();
    DeltaReport {
        lifecycle_distribution: LifecycleDistribution::of(&rows),
        rows,
        branch: branch.clone(),
        baseline: baseline.clone(),
        set_filter: set_filter.map(str::to_string),
    }
}
