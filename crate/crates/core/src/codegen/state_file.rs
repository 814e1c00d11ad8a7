//! The lifecycle state file, `state.reqtocode`, at the artifact root.
//!
//! Two header comment lines (sentinel and snapshot hash), a column comment,
//! then one tab-separated record per Traceable sorted by requirement id (tabs
//! shown as spaces):
//!
//! ```text
//! # GENERATED BY REQTOCODE — DO NOT EDIT
//! # snapshot: sha256:<hex>
//! # id state deprecated_since grace_remaining set constant status last_modified scope title
//! SWR-102 deprecated 2026-02-05T10:00:00Z 2 SensorValidation_SWR SWR_102_REJECT_STALE_SENSOR_READINGS Deprecated 2026-02-05T10:00:00Z - Reject stale sensor readings
//! ```
//!
//! `-` marks an absent value. Removed Traceables keep their record so a
//! requirement that comes back can be recognized.

use super::generate::{ArtifactKind, GeneratedArtifact, GenerationHeader};
use super::{CodegenError, Traceable, STATE_FILE_NAME};
use crate::lifecycle::{LifecycleState, TraceableState};
use crate::timestamp;

const COLUMNS: &str =
    "id\tstate\tdeprecated_since\tgrace_remaining\tset\tconstant\tstatus\tlast_modified\tscope\ttitle";
const NONE: &str = "-";

fn field(value: &str) -> String {
    let cleaned = value.replace(['\t', '\n', '\r'], " ");
    if cleaned.is_empty() {
        NONE.to_string()
    } else {
        cleaned
    }
}

fn state_token(state: LifecycleState) -> &'static str {
    match state {
        LifecycleState::Active => "active",
        LifecycleState::Deprecated => "deprecated",
        LifecycleState::Removed => "removed",
    }
}

pub fn render(records: &[Traceable], header: &GenerationHeader) -> GeneratedArtifact {
    let mut sorted: Vec<&Traceable> = records.iter().collect();
    sorted.sort_by(|a, b| a.requirement_id.cmp(&b.requirement_id));

    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("# ");
    out.push_str(COLUMNS);
    out.push('\n');
    for t in sorted {
        let cols = [
            field(&t.requirement_id),
            state_token(t.state.state).to_string(),
            t.state
                .deprecated_since
                .as_ref()
                .map(timestamp::format)
                .unwrap_or_else(|| NONE.into()),
            t.state
                .grace_remaining
                .map(|g| g.to_string())
                .unwrap_or_else(|| NONE.into()),
            field(&t.set_name),
            field(&t.constant_name),
            field(&t.status),
            t.last_modified
                .as_ref()
                .map(timestamp::format)
                .unwrap_or_else(|| NONE.into()),
            field(t.scope.as_deref().unwrap_or_default()),
            field(&t.title),
        ];
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    GeneratedArtifact::new(STATE_FILE_NAME.to_string(), &out, ArtifactKind::StateFile)
}

pub fn parse(file: &str, content: &str) -> Result<Vec<Traceable>, CodegenError> {
    let mut records = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let n = i + 1;
        let err = |message: String| CodegenError::StateFile {
            file: file.to_string(),
            line: n,
            message,
        };
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [id, state, since, grace, set, constant, status, modified, scope, title] = cols[..] else {
            return Err(err(format!("expected 10 tab-separated fields, found {}", cols.len())));
        };
        let opt = |v: &str| (v != NONE).then(|| v.to_string());
        let parse_ts = |v: &str| {
            opt(v)
                .map(|s| timestamp::parse(&s).map_err(|e| err(format!("bad timestamp {s:?}: {e}"))))
                .transpose()
        };
        let state: LifecycleState = state.parse().map_err(err)?;
        let grace_remaining = opt(grace)
            .map(|g| {
                g.parse::<u32>()
                    .map_err(|e| err(format!("bad grace_remaining {g:?}: {e}")))
            })
            .transpose()?;
        let deprecated_since = parse_ts(since)?;
        if (state == LifecycleState::Deprecated) != deprecated_since.is_some()
            || (state == LifecycleState::Deprecated) != grace_remaining.is_some()
        {
            return Err(err(
                "deprecated_since and grace_remaining must be set exactly for deprecated records".into(),
            ));
        }
        records.push(Traceable {
            constant_name: constant.to_string(),
            requirement_id: id.to_string(),
            title: title.to_string(),
            state: TraceableState {
                state,
                deprecated_since,
                grace_remaining,
            },
            set_name: set.to_string(),
            status: status.to_string(),
            last_modified: parse_ts(modified)?,
            scope: opt(scope),
        });
    }
    records.sort_by(|a, b| a.requirement_id.cmp(&b.requirement_id));
    if let Some(w) = records.windows(2).find(|w| w[0].requirement_id == w[1].requirement_id) {
        return Err(CodegenError::StateFile {
            file: file.to_string(),
            line: 0,
            message: format!("duplicate record for {}", w[0].requirement_id),
        });
    }
    Ok(records)
}
