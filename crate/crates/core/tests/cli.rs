mod common;

use common::{row, sensor_repo, table_rows, write_requirement, Repo, CONFIG};
use regex::Regex;
use serde_json::Value;

const MAIN_TABLE: &str = "\
Coverage at main

| Traceable | Implementation References | Test References | Status     |
|-----------|---------------------------|-----------------|------------|
| SWR_101   | 2                         | 3               | Active     |
| SWR_102   | 1                         | 1               | Deprecated |
| SWR_103   | 0                         | 0               | Active     |

Lifecycle: 2 active, 1 deprecated, 1 implementation references to deprecated
";

#[test]
fn main_report_golden_without_drift() {
    let repo = sensor_repo();
    let out = repo.ok(&["--revision", "main", "report", "--no-drift"]);
    assert_eq!(out, MAIN_TABLE);
}

#[test]
fn report_drift_section_lists_both_directions() {
    let repo = sensor_repo();
    let out = repo.ok(&["--revision", "main", "report"]);
    assert!(out.starts_with(MAIN_TABLE));
    let drift = &out[MAIN_TABLE.len()..];
    assert!(drift.contains("| SWR_101   | CodeNewer        | 2026-01-10T09:00:00Z | 2026-01-25T12:00:00Z |"));
    assert!(drift.contains("| SWR_102   | RequirementNewer | 2026-02-05T10:00:00Z | 2026-01-25T12:00:00Z |"));
}

#[test]
fn scoped_requirements_appear_on_their_branch() {
    let repo = sensor_repo();
    let rows = table_rows(&repo.ok(&["--revision", "feature/sensor-fusion", "report", "--no-drift"]));
    assert_eq!(
        rows,
        [
            row("SWR_101", 2, 3, "Active"),
            row("SWR_102", 1, 1, "Deprecated"),
            row("SWR_103", 0, 0, "Active"),
            row("SWR_201", 1, 2, "Active"),
            row("SWR_202", 1, 1, "Active"),
        ]
    );
}

#[test]
fn baseline_defaults_from_config() {
    let repo = sensor_repo();
    let run = repo.reqtocode(&["--revision", "feature/sensor-fusion", "report", "--baseline"]);
    assert_eq!(run.code, 2, "{}", run.stdout);
    assert!(run.stderr.contains("report.baseline"));

    repo.write("reqtocode.toml", &format!("{CONFIG}\n[report]\nbaseline = \"main\"\n"));
    let rows = table_rows(&repo.ok(&["--revision", "feature/sensor-fusion", "report", "--baseline"]));
    assert_eq!(rows, [row("SWR_201", 1, 2, "Active"), row("SWR_202", 1, 1, "Active")]);
}

#[test]
fn delta_of_a_branch_against_itself_is_empty() {
    let repo = sensor_repo();
    let out = repo.ok(&["--revision", "main", "report", "--baseline", "main", "--no-drift"]);
    assert!(table_rows(&out).is_empty(), "{out}");
}

#[test]
fn set_filter_restricts_rows() {
    let repo = sensor_repo();
    let out = repo.ok(&["--revision", "main", "report", "--set", "Other", "--no-drift"]);
    assert!(table_rows(&out).is_empty(), "{out}");
    let out = repo.ok(&[
        "--revision",
        "main",
        "report",
        "--set",
        "SensorValidation_SWR",
        "--no-drift",
    ]);
    assert_eq!(table_rows(&out).len(), 3);
}

#[test]
fn min_coverage_gate() {
    let repo = sensor_repo();
    // SWR_101 and SWR_102 have both kinds of reference, SWR_103 neither.
    assert_eq!(
        repo.reqtocode(&["--revision", "main", "report", "--min-coverage", "66"])
            .code,
        0
    );
    assert_eq!(
        repo.reqtocode(&["--revision", "main", "report", "--min-coverage", "67"])
            .code,
        1
    );
    assert_eq!(
        repo.reqtocode(&["--revision", "main", "report", "--min-coverage", "101"])
            .code,
        2
    );
}

#[test]
fn report_to_file() {
    let repo = sensor_repo();
    let path = repo.path().join("out/report.txt");
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    let out = repo.ok(&[
        "--revision",
        "main",
        "report",
        "--no-drift",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), MAIN_TABLE);
}

#[test]
fn unknown_format_is_an_error() {
    let repo = sensor_repo();
    let run = repo.reqtocode(&["report", "--format", "yaml"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.starts_with("error: "));
}

// ---------------------------------------------------------------------------
// JSON report against docs/report-schema.json

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report-schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Checks `value` against the keywords the report schema uses.
fn check(root: &Value, schema: &Value, value: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return check(root, &root["$defs"][name], value, at, errors);
    }
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let matching = options
            .iter()
            .filter(|o| {
                let mut e = Vec::new();
                check(root, o, value, at, &mut e);
                e.is_empty()
            })
            .count();
        if matching != 1 {
            errors.push(format!("{at}: matches {matching} oneOf branches"));
        }
    }
    if let Some(ty) = schema.get("type") {
        let types: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.is_u64() || value.is_i64(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            _ => false,
        });
        if !ok {
            errors.push(format!("{at}: expected {types:?}, got {value}"));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            errors.push(format!("{at}: {value} not in {options:?}"));
        }
    }
    if let (Some(p), Some(s)) = (schema.get("pattern").and_then(Value::as_str), value.as_str()) {
        if !Regex::new(p).unwrap().is_match(s) {
            errors.push(format!("{at}: {s:?} does not match {p}"));
        }
    }
    if let (Some(min), Some(n)) = (schema.get("minimum").and_then(Value::as_i64), value.as_i64()) {
        if n < min {
            errors.push(format!("{at}: {n} < {min}"));
        }
    }
    if let Some(items) = value.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < min {
                errors.push(format!("{at}: fewer than {min} items"));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in items.iter().enumerate() {
                check(root, item_schema, item, &format!("{at}[{i}]"), errors);
            }
        }
    }
    if let Some(object) = value.as_object() {
        let properties = schema.get("properties").and_then(Value::as_object);
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !object.contains_key(key.as_str().unwrap()) {
                errors.push(format!("{at}: missing {key}"));
            }
        }
        for (key, v) in object {
            match properties.and_then(|p| p.get(key)) {
                Some(s) => check(root, s, v, &format!("{at}.{key}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{at}: unexpected key {key}"))
                }
                None => {}
            }
        }
    }
}

fn assert_valid(json: &str) -> Value {
    let value: Value = serde_json::from_str(json).unwrap();
    let schema = schema();
    let mut errors = Vec::new();
    check(&schema, &schema, &value, "$", &mut errors);
    assert!(errors.is_empty(), "{errors:#?}\n{json}");
    value
}

#[test]
fn json_reports_match_schema() {
    let repo = sensor_repo();
    let v = assert_valid(&repo.ok(&["--revision", "main", "report", "--format", "json"]));
    assert_eq!(v["kind"], "coverage");
    assert_eq!(v["rows"][0]["implementation_references"], 2);
    assert_eq!(v["rows"][0]["test_references"], 3);
    assert_eq!(v["drift"].as_array().unwrap().len(), 2);

    let v = assert_valid(&repo.ok(&[
        "--revision",
        "feature/sensor-fusion",
        "report",
        "--format",
        "json",
        "--baseline",
        "main",
        "--no-drift",
    ]));
    assert_eq!(v["kind"], "delta");
    assert_eq!(v["baseline"]["name"], "main");
    assert!(v["drift"].is_null());
    assert_eq!(v["rows"][1]["traceable"], "SWR_202");
    assert_eq!(v["rows"][1]["delta"], true);
}

#[test]
fn schema_check_rejects_malformed_reports() {
    let schema = schema();
    let mut errors = Vec::new();
    let bad = serde_json::json!({"kind": "coverage", "rows": [{"status": "Removed"}]});
    check(&schema, &schema, &bad, "$", &mut errors);
    assert!(errors.iter().any(|e| e.contains("missing")));
    assert!(errors.iter().any(|e| e.contains("Removed")));
}

#[test]
fn post_writes_json_to_file_endpoint() {
    let repo = sensor_repo();
    let target = repo.path().join("posted.json");
    let out = repo.ok(&[
        "--revision",
        "main",
        "report",
        "--no-drift",
        "--post",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out, MAIN_TABLE);
    assert_valid(&std::fs::read_to_string(target).unwrap());
}

// ---------------------------------------------------------------------------
// sync

#[test]
fn first_sync_creates_artifacts_and_reports_transitions() {
    let repo = Repo::new();
    repo.write("reqtocode.toml", CONFIG);
    common::write_initial_requirements(&repo);
    let out = repo.ok(&["sync"]);
    assert!(
        out.contains("create generated/SensorValidation_SWR/SensorValidation_SWR.txt"),
        "{out}"
    );
    assert!(out.contains("create generated/state.reqtocode"), "{out}");
    assert!(out.contains("transition SWR-101 new -> Active"), "{out}");
    assert_eq!(repo.ok(&["sync"]), "no changes\n");
}

#[test]
fn grace_period_counts_sync_cycles() {
    let repo = Repo::new();
    repo.write("reqtocode.toml", CONFIG);
    common::write_initial_requirements(&repo);
    repo.ok(&["sync"]);
    repo.commit("init", "2026-01-10T12:00:00Z");
    write_requirement(
        &repo,
        "SWR-102",
        "Reject stale sensor readings",
        "Deprecated",
        "2026-02-05T10:00:00Z",
        None,
    );

    let out = repo.ok(&["sync"]);
    assert!(
        out.contains("transition SWR-102 Active -> Deprecated (grace 2)"),
        "{out}"
    );
    let out = repo.ok(&["sync"]);
    assert!(
        out.contains("transition SWR-102 Deprecated (grace 2) -> Deprecated (grace 1)"),
        "{out}"
    );
    let out = repo.ok(&["sync"]);
    assert!(
        out.contains("transition SWR-102 Deprecated (grace 1) -> Removed"),
        "{out}"
    );
    let module = repo.read("generated/SensorValidation_SWR/SensorValidation_SWR.txt");
    assert!(!module.contains("SWR_102"));
    assert_eq!(repo.ok(&["sync"]), "no changes\n");

    write_requirement(
        &repo,
        "SWR-102",
        "Reject stale sensor readings",
        "Approved",
        "2026-03-01T10:00:00Z",
        None,
    );
    let run = repo.reqtocode(&["sync"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("SWR-102"), "{}", run.stderr);
}

#[test]
fn deleted_requirement_is_deprecated_then_removed() {
    let repo = Repo::new();
    repo.write("reqtocode.toml", &format!("{CONFIG}\n[lifecycle]\ngrace_cycles = 1\n"));
    common::write_initial_requirements(&repo);
    repo.ok(&["sync"]);
    repo.commit("init", "2026-01-10T12:00:00Z");
    std::fs::remove_file(repo.path().join("requirements/SWR-103.md")).unwrap();
    let out = repo.ok(&["sync"]);
    assert!(
        out.contains("transition SWR-103 Active -> Deprecated (grace 1)"),
        "{out}"
    );
    let out = repo.ok(&["sync"]);
    assert!(
        out.contains("transition SWR-103 Deprecated (grace 1) -> Removed"),
        "{out}"
    );
}

#[test]
fn unreachable_alm_exits_2() {
    let repo = Repo::new();
    repo.write(
        "reqtocode.toml",
        &CONFIG.replace("files = \"requirements\"", "alm = \"http://127.0.0.1:9/requirements\""),
    );
    let run = repo.reqtocode(&["sync"]);
    assert_eq!(run.code, 2);
    assert!(run.stdout.is_empty());
    assert!(run.stderr.starts_with("error: "), "{}", run.stderr);
    assert!(!repo.path().join("generated").exists());
}

#[test]
fn alm_file_endpoint_feeds_sync() {
    let repo = Repo::new();
    repo.write(
        "reqtocode.toml",
        &CONFIG.replace("files = \"requirements\"", "alm = \"alm.json\""),
    );
    repo.write(
        "alm.json",
        r#"{"requirements": [
            {"id": "SWR-101", "title": "Validate sensor range on input", "status": "Approved",
             "last_modified": "2026-01-10T09:00:00Z", "category": "SWR"}
        ]}"#,
    );
    let out = repo.ok(&["sync"]);
    assert!(out.contains("transition SWR-101 new -> Active"), "{out}");
    assert!(repo
        .read("generated/SensorValidation_SWR/SensorValidation_SWR.txt")
        .contains("SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT"));
}

#[test]
fn invalid_requirement_file_exits_2() {
    let repo = Repo::new();
    repo.write("reqtocode.toml", CONFIG);
    repo.write("requirements/bad.md", "---\nid: SWR-1\n---\n");
    let run = repo.reqtocode(&["sync"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("bad.md"), "{}", run.stderr);
}

#[test]
fn other_profiles_generate_their_layout() {
    let repo = Repo::new();
    repo.write(
        "reqtocode.toml",
        &CONFIG.replace("profile = \"pseudo\"", "profile = \"java_enum\""),
    );
    common::write_initial_requirements(&repo);
    repo.ok(&["sync"]);
    let files: Vec<String> = repo.snapshot_dir("generated").into_iter().map(|f| f.0).collect();
    assert!(files.iter().any(|f| f.ends_with(".java")), "{files:?}");
}

// ---------------------------------------------------------------------------
// verify and drift

#[test]
fn verify_reports_unresolved_with_suggestion() {
    let repo = sensor_repo();
    repo.write(
        "src/typo.pseudo",
        "trace(SWR_101_VALIDATE_SENSOR_RANGE)\ntrace(SWR_999)\n",
    );
    let run = repo.reqtocode(&["verify"]);
    assert_eq!(run.code, 1);
    let errors: Vec<&str> = run.stdout.lines().filter(|l| l.starts_with("ERROR ")).collect();
    assert_eq!(errors.len(), 2, "{}", run.stdout);
    assert!(errors[0].starts_with("ERROR src/typo.pseudo:1 SWR_101_VALIDATE_SENSOR_RANGE unresolved reference"));
    assert!(errors[0].ends_with("(did you mean SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT?)"));
    assert!(errors[1].starts_with("ERROR src/typo.pseudo:2 SWR_999 unresolved reference"));
}

#[test]
fn deny_deprecated_turns_warnings_into_errors() {
    let repo = sensor_repo();
    let run = repo.reqtocode(&["verify", "--deny-deprecated"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.stdout.lines().filter(|l| l.starts_with("ERROR ")).count(), 2);
}

#[test]
fn verify_at_an_older_commit_uses_that_state_file() {
    let repo = sensor_repo();
    let c3 = repo.git(&["rev-parse", "main~1"]);
    let run = repo.reqtocode(&["--revision", c3.trim(), "verify"]);
    assert_eq!((run.code, run.stdout.as_str()), (0, ""), "{}", run.stderr);
}

#[test]
fn verify_without_state_file_exits_2() {
    let repo = Repo::new();
    repo.write("reqtocode.toml", CONFIG);
    repo.write("src/a.pseudo", "trace(SWR_101)\n");
    let run = repo.reqtocode(&["verify"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("sync"), "{}", run.stderr);
}

#[test]
fn unknown_revision_exits_2() {
    let repo = sensor_repo();
    let run = repo.reqtocode(&["--revision", "no-such-branch", "verify"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("no-such-branch"), "{}", run.stderr);
}

#[test]
fn drift_strictness_and_tolerance() {
    let repo = sensor_repo();
    let run = repo.reqtocode(&["--revision", "main", "drift"]);
    assert_eq!(run.code, 0);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(lines.len(), 2, "{}", run.stdout);
    assert!(lines[0].starts_with("WARNING src/main/java/sensor/SensorValidator.java:7 "));
    assert!(lines[0].contains("CodeNewer"));
    assert!(lines[1].starts_with("WARNING src/validate.pseudo:9 SWR_102 RequirementNewer"));

    let run = repo.reqtocode(&["--revision", "main", "drift", "--strict-drift"]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.lines().all(|l| l.starts_with("ERROR ")));

    // SWR-101 is 15 days and 3 hours behind its code, SWR-102 ahead by
    // 10 days 22 hours.
    let run = repo.reqtocode(&["--revision", "main", "drift", "--tolerance", "1000000"]);
    assert_eq!(run.stdout.lines().count(), 1, "{}", run.stdout);
    assert!(run.stdout.contains("CodeNewer"));
    let run = repo.reqtocode(&["--revision", "main", "drift", "--tolerance", "2000000"]);
    assert_eq!(run.stdout, "");
    assert_eq!(repo.reqtocode(&["drift", "--tolerance", "-1"]).code, 2);
}
