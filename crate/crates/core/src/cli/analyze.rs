//! `verify`, `report` and `drift`: commands that scan a revision against the
//! Traceables recorded in that revision's state file.

use std::io::Write;

use chrono::Duration;

use super::{io_error, CliError, DriftArgs, ReportArgs, VerifyArgs, EXIT_CLEAN, EXIT_FINDING};
use crate::codegen::{state_file, TraceableSet, STATE_FILE_NAME};
use crate::config::ToolConfig;
use crate::coverage::{self, render, Format, Report};
use crate::drift::{detect_drift, DriftOutcome};
use crate::scanner::{near_miss, resolve, ResolutionResult, ScanOutcome, Scanner, TraceReference};
use crate::source::alm;
use crate::vcs::{FileTree, GitRepo, RevisionRef, Vcs};

struct Analysis {
    vcs: GitRepo,
    revision: RevisionRef,
    set: TraceableSet,
    scanner: Scanner,
    scan: ScanOutcome,
}

fn open_repo(config: &ToolConfig) -> Result<GitRepo, CliError> {
    Ok(GitRepo::open(&config.repo_root)?.with_commit_time(config.vcs.commit_time))
}

fn traceables_at(config: &ToolConfig, tree: &FileTree, revision: &RevisionRef) -> Result<TraceableSet, CliError> {
    let path = format!("{}/{STATE_FILE_NAME}", config.artifact_root_rel());
    let bytes = tree.get(&path).ok_or_else(|| CliError::MissingState {
        path: path.clone(),
        revision: revision.name.clone(),
    })?;
    let text = String::from_utf8_lossy(bytes);
    Ok(TraceableSet::new(state_file::parse(&path, &text)?))
}

fn analyze(config: &ToolConfig, revision: &str) -> Result<Analysis, CliError> {
    let vcs = open_repo(config)?;
    let revision = vcs.resolve(revision)?;
    let tree = vcs.read_tree(&revision)?;
    let set = traceables_at(config, &tree, &revision)?;
    let scanner = Scanner::from_config(&config.scan, set.known_prefixes())?;
    let scan = scanner.scan_file_tree(&tree)?;
    Ok(Analysis {
        vcs,
        revision,
        set,
        scanner,
        scan,
    })
}

fn diagnostic(level: &str, r: &TraceReference, message: &str) -> String {
    format!("{level} {}:{} {} {message}", r.file, r.line, r.constant_name)
}

fn emit(out: &mut dyn Write, lines: &[String]) -> Result<(), CliError> {
    for line in lines {
        writeln!(out, "{line}").map_err(io_error("<stdout>"))?;
    }
    Ok(())
}

/// Diagnostics for unresolved and deprecated references, in index order,
/// plus whether any of them is an error.
pub(crate) fn verify_diagnostics(
    resolution: &ResolutionResult<'_>,
    set: &TraceableSet,
    deny_deprecated: bool,
) -> (Vec<String>, bool) {
    let mut entries: Vec<(&TraceReference, String)> = Vec::new();
    for r in &resolution.unresolved {
        let mut message = "unresolved reference: no such Traceable".to_string();
        if let Some(t) = near_miss(&r.constant_name, set) {
            message.push_str(&format!(" (did you mean {}?)", t.constant_name));
        }
        entries.push((r, diagnostic("ERROR", r, &message)));
    }
    let level = if deny_deprecated { "ERROR" } else { "WARNING" };
    for hit in resolution.deprecated_hits() {
        let t = hit.traceable;
        let since = t
            .state
            .deprecated_since
            .as_ref()
            .map(|s| format!(" since {}", crate::timestamp::format(s)))
            .unwrap_or_default();
        let grace = t
            .state
            .grace_remaining
            .map(|g| format!(", {g} sync cycle(s) until removal"))
            .unwrap_or_default();
        let message = format!("references deprecated requirement {}{since}{grace}", t.requirement_id);
        entries.push((&hit.reference, diagnostic(level, &hit.reference, &message)));
    }
    entries.sort_by(|a, b| a.0.cmp(b.0));
    let failed =
        !resolution.unresolved.is_empty() || (deny_deprecated && resolution.deprecated_hits().next().is_some());
    (entries.into_iter().map(|(_, d)| d).collect(), failed)
}

pub fn cmd_verify(
    config: &ToolConfig,
    revision: &str,
    args: &VerifyArgs,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let a = analyze(config, revision)?;
    let resolution = resolve(&a.scan.index, &a.set);
    let deny = args.deny_deprecated || config.gates.deny_deprecated;
    let (lines, failed) = verify_diagnostics(&resolution, &a.set, deny);
    emit(out, &lines)?;
    Ok(if failed { EXIT_FINDING } else { EXIT_CLEAN })
}

fn tolerance(config: &ToolConfig, flag: Option<i64>) -> Result<Duration, CliError> {
    let secs = flag.unwrap_or(config.report.drift_tolerance_secs);
    if secs < 0 {
        return Err(CliError::Usage(format!(
            "drift tolerance must not be negative (got {secs})"
        )));
    }
    Ok(Duration::seconds(secs))
}

pub fn cmd_report(
    config: &ToolConfig,
    revision: &str,
    args: &ReportArgs,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let format: Format = args.format.parse().map_err(CliError::Usage)?;
    let baseline = match args.baseline.as_deref() {
        None => None,
        Some("") => Some(config.report.baseline.clone().ok_or_else(|| {
            CliError::Usage("--baseline without a value needs report.baseline in the configuration".into())
        })?),
        Some(b) => Some(b.to_string()),
    };
    let min_coverage = args.min_coverage.or(config.gates.min_coverage);
    if let Some(m) = min_coverage {
        if !(0.0..=100.0).contains(&m) {
            return Err(CliError::Usage(format!(
                "--min-coverage must be between 0 and 100 (got {m})"
            )));
        }
    }

    let a = analyze(config, revision)?;
    let resolution = resolve(&a.scan.index, &a.set);
    let set_filter = args.set_filter.as_deref();
    let drift: Option<DriftOutcome> = if args.no_drift {
        None
    } else {
        Some(detect_drift(&resolution, &a.revision, &a.vcs, tolerance(config, None)?))
    };
    let drift_findings = drift.as_ref().map(|d| d.findings.as_slice());

    let coverage_report;
    let delta_report;
    let (report, covered) = match &baseline {
        None => {
            coverage_report = coverage::compute_coverage(&a.set, &resolution, &a.revision, set_filter);
            (Report::Coverage(&coverage_report), coverage_report.covered_percent())
        }
        Some(base) => {
            let base_rev = a.vcs.resolve(base)?;
            let base_tree = a.vcs.read_tree(&base_rev)?;
            let base_scan = a.scanner.scan_file_tree(&base_tree)?;
            delta_report = coverage::compute_delta(
                &a.scan.index,
                &base_scan.index,
                &a.set,
                &a.revision,
                &base_rev,
                set_filter,
            );
            let absolute = coverage::compute_coverage(&a.set, &resolution, &a.revision, set_filter);
            (Report::Delta(&delta_report), absolute.covered_percent())
        }
    };

    let text = render(report, drift_findings, format);
    match &args.output {
        Some(path) => std::fs::write(path, &text).map_err(io_error(path))?,
        None => out.write_all(text.as_bytes()).map_err(io_error("<stdout>"))?,
    }
    if let Some(endpoint) = &args.post {
        let json = match format {
            Format::Json => text.clone(),
            Format::Table => render(report, drift_findings, Format::Json),
        };
        let token = std::env::var(alm::TOKEN_ENV).ok();
        alm::post_report(endpoint, token.as_deref(), &json)?;
    }

    if let Some(m) = min_coverage {
        if covered + 1e-9 < m {
            return Ok(EXIT_FINDING);
        }
    }
    Ok(EXIT_CLEAN)
}

pub fn cmd_drift(config: &ToolConfig, revision: &str, args: &DriftArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let tolerance = tolerance(config, args.tolerance)?;
    let a = analyze(config, revision)?;
    let resolution = resolve(&a.scan.index, &a.set);
    let outcome = detect_drift(&resolution, &a.revision, &a.vcs, tolerance);
    let strict = args.strict_drift || config.gates.strict_drift;
    let level = if strict { "ERROR" } else { "WARNING" };
    let mut lines = Vec::new();
    for f in &outcome.findings {
        let site = resolution
            .resolved
            .iter()
            .find(|r| r.traceable.requirement_id == f.requirement_id)
            .map(|r| &r.reference)
            .expect("findings come from resolved references");
        lines.push(diagnostic(level, site, &format!("{}: {}", f.direction, f.message())));
    }
    emit(out, &lines)?;
    Ok(if strict && !outcome.findings.is_empty() {
        EXIT_FINDING
    } else {
        EXIT_CLEAN
    })
}
