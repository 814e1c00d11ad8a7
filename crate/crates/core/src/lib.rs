//! Traceability compiler.
//!
//! Requirement definitions are loaded from an authoritative source, projected
//! into generated constants ("Traceables") grouped into requirement sets, and
//! checked against the references found in a source tree. The pipeline stages
//! live in separate modules:
//!
//! - [`source`]: loading, validating and partitioning requirements
//! - [`lifecycle`]: Active / Deprecated / Removed state derivation
//! - [`codegen`]: constant naming, template-driven artifact emission, write plans
//! - [`scanner`]: lexical reference scanning and resolution
//! - [`vcs`]: read-only access to version-control history
//! - [`coverage`]: per-Traceable reference counts, branch deltas, rendering
//! - [`drift`]: requirement/code modification-time mismatches
//! - [`cli`]: subcommands and exit-code contract

pub mod cli;
pub mod codegen;
pub mod config;
pub mod coverage;
pub mod drift;
pub mod lifecycle;
pub mod scanner;
pub mod source;
pub mod timestamp;
pub mod vcs;

pub use codegen::{GeneratedArtifact, Traceable, TraceableSet};
pub use lifecycle::{LifecycleConfig, LifecycleState, TraceableState};
pub use scanner::{ReferenceIndex, TraceReference};
pub use source::{Requirement, SourceSnapshot};
