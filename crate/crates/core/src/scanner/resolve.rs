//! Matching scanned references against the current Traceables.

use std::sync::OnceLock;

use regex::Regex;

use super::{ReferenceIndex, TraceReference};
use crate::codegen::{Traceable, TraceableSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved<'t> {
    pub reference: TraceReference,
    pub traceable: &'t Traceable,
}

/// Every reference of an index lands in exactly one of `resolved` and
/// `unresolved`, both in index order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolutionResult<'t> {
    pub resolved: Vec<Resolved<'t>>,
    pub unresolved: Vec<TraceReference>,
}

impl<'t> ResolutionResult<'t> {
    /// Resolved references whose Traceable is Deprecated.
    pub fn deprecated_hits(&self) -> impl Iterator<Item = &Resolved<'t>> {
        self.resolved.iter().filter(|r| r.traceable.is_deprecated())
    }

    pub fn len(&self) -> usize {
        self.resolved.len() + self.unresolved.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn resolve<'t>(index: &ReferenceIndex, traceables: &'t TraceableSet) -> ResolutionResult<'t> {
    let mut result = ResolutionResult::default();
    for reference in index.references() {
        match traceables.lookup(&reference.constant_name) {
            Some(traceable) => result.resolved.push(Resolved {
                reference: reference.clone(),
                traceable,
            }),
            None => result.unresolved.push(reference.clone()),
        }
    }
    result
}

/// For an unresolved name whose `PREFIX_NUMBER` head names a current
/// Traceable, that Traceable (likely a typo or a stale title segment).
pub fn near_miss<'t>(constant_name: &str, traceables: &'t TraceableSet) -> Option<&'t Traceable> {
    static HEAD: OnceLock<Regex> = OnceLock::new();
    let head = HEAD.get_or_init(|| Regex::new(r"^([A-Z]+_[0-9]+)_").expect("static regex"));
    let id_name = head.captures(constant_name)?.get(1)?.as_str();
    traceables.lookup(id_name).filter(|t| t.constant_name != constant_name)
}
