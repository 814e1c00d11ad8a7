use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::Utc;

use super::{io_error, CliError, EXIT_CLEAN};
use crate::codegen::naming::assign_constant_names;
use crate::codegen::{
    generate_set, state_file, GenerationHeader, LanguageProfile, SetInfo, Traceable, STATE_FILE_NAME,
};
use crate::config::{SourceConfig, ToolConfig};
use crate::lifecycle::{absent_requirement_state, derive_state};
use crate::source::{self, alm, LoadOptions, PartitionRules, SourceSnapshot};

pub(crate) fn load_snapshot(config: &ToolConfig) -> Result<SourceSnapshot, CliError> {
    let options = LoadOptions::new(Utc::now()).with_statuses(config.statuses.clone());
    let snapshot = match &config.source {
        SourceConfig::Files(dir) => source::load_from_files(&config.repo_root.join(dir), &options)?,
        SourceConfig::Alm(endpoint) => {
            let endpoint = if endpoint.starts_with("http://") || endpoint.starts_with("https://") {
                endpoint.clone()
            } else {
                let path = endpoint.strip_prefix("file://").unwrap_or(endpoint);
                config.repo_root.join(path).to_string_lossy().into_owned()
            };
            let token = std::env::var(alm::TOKEN_ENV).ok();
            source::load_from_mock_alm(&endpoint, token.as_deref(), &options)?
        }
    };
    Ok(snapshot)
}

fn describe(t: &Traceable) -> String {
    match t.state.grace_remaining {
        Some(g) => format!("{} (grace {g})", t.state.state),
        None => t.state.state.to_string(),
    }
}

/// One sync cycle: load, advance lifecycle, regenerate, write.
pub fn cmd_sync(config: &ToolConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let snapshot = load_snapshot(config)?;
    let rules = PartitionRules::new(config.partitions.clone())?;
    let partitions = source::partition(&snapshot, &rules)?;

    let artifact_root = config.artifact_root();
    let state_path = artifact_root.join(STATE_FILE_NAME);
    let previous: BTreeMap<String, Traceable> = if state_path.is_file() {
        let text = std::fs::read_to_string(&state_path).map_err(io_error(&state_path))?;
        state_file::parse(&state_path.to_string_lossy(), &text)?
            .into_iter()
            .map(|t| (t.requirement_id.clone(), t))
            .collect()
    } else {
        BTreeMap::new()
    };

    let mut records: Vec<Traceable> = Vec::new();
    for part in &partitions {
        for req in &part.requirements {
            let prev = previous.get(&req.id);
            let state = derive_state(
                &req.status,
                prev.map(|p| &p.state),
                &config.lifecycle,
                req.last_modified,
            )
            .map_err(|source| CliError::Lifecycle {
                id: req.id.clone(),
                source,
            })?;
            records.push(Traceable {
                constant_name: String::new(),
                requirement_id: req.id.clone(),
                title: req.title.clone(),
                state,
                set_name: part.set_name.clone(),
                status: req.status.clone(),
                last_modified: Some(req.last_modified),
                scope: req.scope.clone(),
            });
        }
    }
    for (id, prev) in &previous {
        if snapshot.get(id).is_some() {
            continue;
        }
        let observed = prev.last_modified.unwrap_or(snapshot.taken_at);
        let state = absent_requirement_state(&prev.state, &config.lifecycle, observed);
        let mut t = prev.clone();
        t.status = if state.is_removed() { "Removed" } else { "Deprecated" }.into();
        t.state = state;
        records.push(t);
    }
    records.sort_by(|a, b| a.requirement_id.cmp(&b.requirement_id));

    let live: Vec<usize> = (0..records.len()).filter(|&i| !records[i].state.is_removed()).collect();
    let names = assign_constant_names(
        live.iter()
            .map(|&i| (records[i].requirement_id.as_str(), records[i].title.as_str())),
        config.generate.max_name_length,
    )?;
    for (&i, name) in live.iter().zip(names) {
        records[i].constant_name = name;
    }
    for t in records.iter_mut().filter(|t| t.constant_name.is_empty()) {
        t.constant_name = crate::codegen::naming::normalize_name_with_limit(
            &t.requirement_id,
            &t.title,
            config.generate.max_name_length,
        )?;
    }

    let profile = LanguageProfile::resolve(&config.generate.profile, config.template_dir().as_deref())?;
    let header = GenerationHeader {
        snapshot_hash: snapshot.content_hash(),
    };
    let mut sets: BTreeSet<&str> = rules.rules().map(|r| r.set.as_str()).collect();
    sets.extend(
        records
            .iter()
            .filter(|t| !t.state.is_removed())
            .map(|t| t.set_name.as_str()),
    );
    let mut artifacts = Vec::new();
    for set in sets {
        let members: Vec<Traceable> = records
            .iter()
            .filter(|t| t.set_name == set && !t.state.is_removed())
            .cloned()
            .collect();
        artifacts.extend(generate_set(
            &SetInfo::new(set, &rules.marker_tag(set)),
            &members,
            &profile,
            &header,
        )?);
    }
    artifacts.push(state_file::render(&records, &header));

    let plan = crate::codegen::plan_workspace_update(&artifacts, &artifact_root)?;
    let root_rel = config.artifact_root_rel();
    let mut lines = Vec::new();
    for w in &plan.creates {
        lines.push(format!("create {root_rel}/{}", w.relative_path));
    }
    for w in &plan.overwrites {
        lines.push(format!("overwrite {root_rel}/{}", w.relative_path));
    }
    for d in &plan.deletions {
        lines.push(format!("delete {root_rel}/{d}"));
    }
    for t in &records {
        match previous.get(&t.requirement_id) {
            None => lines.push(format!("transition {} new -> {}", t.requirement_id, describe(t))),
            Some(p) if p.state != t.state => lines.push(format!(
                "transition {} {} -> {}",
                t.requirement_id,
                describe(p),
                describe(t)
            )),
            Some(_) => {}
        }
    }
    plan.apply()?;

    if lines.is_empty() {
        lines.push("no changes".into());
    }
    for line in lines {
        writeln!(out, "{line}").map_err(io_error("<stdout>"))?;
    }
    Ok(EXIT_CLEAN)
}
