//! Scripted git repositories for integration and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

pub const CONFIG: &str = r#"[source]
files = "requirements"

[[partition]]
set = "SensorValidation_SWR"
category = "SWR"
marker_tag = "SWR"

[generate]
profile = "pseudo"
artifact_root = "generated"
"#;

pub const VALIDATE_PSEUDO: &str = "\
function validateSensorInput(reading):
    // Implementation of SWR_101
    if reading.value < RANGE_MIN or reading.value > RANGE_MAX:
        trace(SWR_101)
        return INVALID

    // Implementation of SWR_102
    if reading.timestamp < currentTime() - MAX_AGE:
        trace(SWR_102)
        return STALE

    return VALID
";

pub const VALIDATE_TEST_PSEUDO: &str = "\
test \"sensor range validation rejects out-of-range input\":
    verifiesRequirement(SWR_101)
    reading = createReading(value: RANGE_MAX + 1)
    result = validateSensorInput(reading)
    assert result == INVALID
";

pub const VALIDATOR_JAVA: &str = "\
package sensor;

import static sensor.SensorValidation_SWR.*;

public class SensorValidator {

  @TracesSWR(SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT)
  public Result validateSensorInput(SensorReading reading) {
    if (reading.value() < RANGE_MIN || reading.value() > RANGE_MAX) {
      return INVALID;
    }
    return VALID;
  }
}
";

pub const VALIDATOR_TEST_JAVA: &str = "\
package sensor;

class SensorValidatorTest {

  @Test
  @VerifiesSWR(SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT)
  void rejectsOutOfRangeInput() {
    var reading = createReading(RANGE_MAX + 1);
    assertThat(validateSensorInput(reading)).isEqualTo(INVALID);
  }

  @Test
  @VerifiesSWR({
      SWR_101_VALIDATE_SENSOR_RANGE_ON_INPUT,
      SWR_102_REJECT_STALE_SENSOR_READINGS
  })
  void rejectsStaleOutOfRangeInput() {
    // SWR_102 alone is covered elsewhere
    var reading = createStaleReading(RANGE_MAX + 1);
    assertThat(validateSensorInput(reading)).isNotEqualTo(VALID);
  }
}
";

pub const FUSION_PSEUDO: &str = "\
function fuseReadings(primary, secondary):
    trace(SWR_201)
    if abs(primary.value - secondary.value) > MAX_DISAGREEMENT:
        trace(SWR_202)
        return DISAGREEMENT
    return average(primary.value, secondary.value)
";

pub const FUSION_TEST_PSEUDO: &str = "\
test \"fused value is the average\":
    verifiesRequirement(SWR_201)
    assert fuseReadings(reading(1), reading(3)).value == 2

test \"fusion uses both sensors\":
    verifiesRequirement(SWR_201)
    assert fuseReadings(reading(1), missing()) == DISAGREEMENT

test \"disagreement is detected\":
    verifiesRequirement(SWR_202)
    assert fuseReadings(reading(1), reading(90)) == DISAGREEMENT
";

pub struct Repo {
    dir: TempDir,
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Repo {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let repo = Self { dir };
        repo.git(&["init", "-q", "-b", "main"]);
        repo
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn config_path(&self) -> PathBuf {
        self.path().join("reqtocode.toml")
    }

    pub fn write(&self, rel: &str, content: &str) {
        let p = self.path().join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, content).unwrap();
    }

    pub fn read(&self, rel: &str) -> String {
        std::fs::read_to_string(self.path().join(rel)).unwrap()
    }

    pub fn git(&self, args: &[&str]) -> String {
        self.git_at(args, "2026-01-01T00:00:00Z")
    }

    fn git_at(&self, args: &[&str], date: &str) -> String {
        let output = Command::new("git")
            .arg("-C")
            .arg(self.path())
            .args(args)
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env("GIT_AUTHOR_NAME", "Fixture")
            .env("GIT_AUTHOR_EMAIL", "fixture@example.com")
            .env("GIT_COMMITTER_NAME", "Fixture")
            .env("GIT_COMMITTER_EMAIL", "fixture@example.com")
            .env("GIT_AUTHOR_DATE", date)
            .env("GIT_COMMITTER_DATE", date)
            .output()
            .expect("git runs");
        assert!(
            output.status.success(),
            "git {args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        String::from_utf8(output.stdout).unwrap()
    }

    /// Stages everything and commits with author and committer date `date`.
    pub fn commit(&self, message: &str, date: &str) {
        self.git_at(&["add", "-A"], date);
        self.git_at(&["commit", "-q", "--no-gpg-sign", "--allow-empty", "-m", message], date);
    }

    pub fn reqtocode(&self, args: &[&str]) -> Run {
        let config = self.config_path();
        let mut argv: Vec<String> = vec![
            "reqtocode".into(),
            "--config".into(),
            config.to_string_lossy().into_owned(),
        ];
        argv.extend(args.iter().map(|s| s.to_string()));
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = reqtocode::cli::run(argv, &mut out, &mut err);
        Run {
            code,
            stdout: String::from_utf8(out).unwrap(),
            stderr: String::from_utf8(err).unwrap(),
        }
    }

    /// Runs a command that must succeed with exit code 0.
    pub fn ok(&self, args: &[&str]) -> String {
        let run = self.reqtocode(args);
        assert_eq!(
            run.code, 0,
            "{args:?}\nstdout:\n{}\nstderr:\n{}",
            run.stdout, run.stderr
        );
        run.stdout
    }

    /// Every file under `rel`, as (relative path, content) pairs.
    pub fn snapshot_dir(&self, rel: &str) -> Vec<(String, Vec<u8>)> {
        let root = self.path().join(rel);
        let mut out = Vec::new();
        for entry in walkdir::WalkDir::new(&root).sort_by_file_name() {
            let entry = entry.unwrap();
            if entry.file_type().is_file() {
                let p = entry.path().strip_prefix(&root).unwrap().to_string_lossy().into_owned();
                out.push((p, std::fs::read(entry.path()).unwrap()));
            }
        }
        out
    }
}

pub fn requirement(id: &str, title: &str, status: &str, last_modified: &str, scope: Option<&str>) -> String {
    let mut s =
        format!("---\nid: {id}\ntitle: {title}\nstatus: {status}\nlast_modified: {last_modified}\ncategory: SWR\n");
    if let Some(scope) = scope {
        s.push_str(&format!("scope: {scope}\n"));
    }
    s.push_str("---\n");
    s
}

pub fn write_requirement(repo: &Repo, id: &str, title: &str, status: &str, last_modified: &str, scope: Option<&str>) {
    repo.write(
        &format!("requirements/{id}.md"),
        &requirement(id, title, status, last_modified, scope),
    );
}

/// The five requirements of the sensor-validation example, all in their initial state.
pub fn write_initial_requirements(repo: &Repo) {
    write_requirement(
        repo,
        "SWR-101",
        "Validate sensor range on input",
        "Approved",
        "2026-01-10T09:00:00Z",
        None,
    );
    write_requirement(
        repo,
        "SWR-102",
        "Reject stale sensor readings",
        "Approved",
        "2026-01-10T09:00:00Z",
        None,
    );
    write_requirement(
        repo,
        "SWR-103",
        "Log validation failures",
        "Draft",
        "2026-01-10T09:00:00Z",
        None,
    );
    let scope = Some("feature/sensor-fusion");
    write_requirement(
        repo,
        "SWR-201",
        "Fuse readings from redundant sensors",
        "Approved",
        "2026-01-10T09:00:00Z",
        scope,
    );
    write_requirement(
        repo,
        "SWR-202",
        "Detect sensor disagreement",
        "Approved",
        "2026-01-10T09:00:00Z",
        scope,
    );
}

/// Commit history of the sensor-validation example:
///
/// 1. requirements and first sync (2026-01-10)
/// 2. implementation references (2026-01-20)
/// 3. test references (2026-01-25)
/// 4. SWR-102 deprecated in the source and synced (2026-02-05)
///
/// then `feature/sensor-fusion` branches off and adds fusion code and tests
/// (2026-02-12). The checkout is left on `main`.
pub fn sensor_repo() -> Repo {
    let repo = Repo::new();
    repo.write("reqtocode.toml", CONFIG);
    write_initial_requirements(&repo);
    repo.ok(&["sync"]);
    repo.commit("requirements and generated traceables", "2026-01-10T12:00:00Z");

    repo.write("src/validate.pseudo", VALIDATE_PSEUDO);
    repo.write("src/main/java/sensor/SensorValidator.java", VALIDATOR_JAVA);
    repo.commit("sensor input validation", "2026-01-20T12:00:00Z");

    repo.write("tests/validate_test.pseudo", VALIDATE_TEST_PSEUDO);
    repo.write("tests/sensor/SensorValidatorTest.java", VALIDATOR_TEST_JAVA);
    repo.commit("validation tests", "2026-01-25T12:00:00Z");

    write_requirement(
        &repo,
        "SWR-102",
        "Reject stale sensor readings",
        "Deprecated",
        "2026-02-05T10:00:00Z",
        None,
    );
    repo.ok(&["sync"]);
    repo.commit("deprecate SWR-102", "2026-02-05T12:00:00Z");

    repo.git(&["checkout", "-q", "-b", "feature/sensor-fusion"]);
    repo.write("src/fusion.pseudo", FUSION_PSEUDO);
    repo.write("tests/fusion_test.pseudo", FUSION_TEST_PSEUDO);
    repo.commit("sensor fusion", "2026-02-12T12:00:00Z");
    repo.git(&["checkout", "-q", "main"]);
    repo
}

/// Rows of a rendered table as (traceable, impl, test, status).
pub fn table_rows(table: &str) -> Vec<(String, usize, usize, String)> {
    reqtocode::coverage::render::parse_table_cells(table)
        .into_iter()
        .map(|c| (c[0].clone(), c[1].parse().unwrap(), c[2].parse().unwrap(), c[3].clone()))
        .collect()
}

pub fn row(name: &str, i: usize, t: usize, status: &str) -> (String, usize, usize, String) {
    (name.to_string(), i, t, status.to_string())
}
