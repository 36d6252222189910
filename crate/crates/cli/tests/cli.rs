use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gucon_core::engine::ComplianceStatus;
use gucon_core::report::read_report;
use gucon_core::syntax::parse_turtle_star;
use gucon_testkit::fixtures::{fixtures_dir, Scenario, HOSPITAL_EVALUATION_TIME, STATE_CASES};

fn gucon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gucon"))
        .args(args)
        .env_remove("GUCON_BASE")
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    fixtures_dir().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn hospital_states_table() {
    let kb = fixture("hospital.ttls");
    let policy = fixture("hospital.gucon");
    let o = gucon(&[
        "states",
        "--kb",
        &kb,
        "--policy",
        &policy,
        "--time",
        HOSPITAL_EVALUATION_TIME,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].ends_with("\tFULFILLED,EXPIRED"), "{}", rows[0]);
    assert!(stderr(&o).is_empty());
}

#[test]
fn hospital_check_is_compliant_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.ttl");
    let o = gucon(&[
        "check",
        "--kb",
        &fixture("hospital.ttls"),
        "--policy",
        &fixture("hospital-policy.ttl"),
        "--time",
        HOSPITAL_EVALUATION_TIME,
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "COMPLIANT");
    let back = read_report(&parse_turtle_star(&fs::read_to_string(report).unwrap()).unwrap()).unwrap();
    assert_eq!(back.status, ComplianceStatus::Compliant);
    assert_eq!(back.entries.len(), 1);
}

#[test]
fn violated_case_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let case = STATE_CASES.iter().find(|c| c.id == "S33").unwrap();
    let kb = write(dir.path(), "kb.ttls", &case.kb_text());
    let policy = write(dir.path(), "rule.gucon", Scenario::S3.rule_text());
    let o = gucon(&[
        "check",
        "--kb",
        kb.to_str().unwrap(),
        "--policy",
        policy.to_str().unwrap(),
        "--time",
        case.time,
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "NON_COMPLIANT");
}

#[test]
fn empty_policy_gives_an_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let policy = write(dir.path(), "empty.gucon", "");
    let o = gucon(&[
        "states",
        "--kb",
        &fixture("hospital.ttls"),
        "--policy",
        policy.to_str().unwrap(),
        "--time",
        HOSPITAL_EVALUATION_TIME,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn operational_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.ttls",
        &fs::read_to_string(fixture("hospital.ttls"))
            .unwrap()
            .replacen(" .", " ;;; <", 1),
    );
    let policy = fixture("hospital.gucon");
    let o = gucon(&[
        "check",
        "--kb",
        broken.to_str().unwrap(),
        "--policy",
        &policy,
        "--time",
        HOSPITAL_EVALUATION_TIME,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("broken.ttls:"), "{err}");
    assert!(
        err.split("broken.ttls:")
            .nth(1)
            .unwrap()
            .chars()
            .next()
            .unwrap()
            .is_ascii_digit(),
        "{err}"
    );
    assert!(stdout(&o).is_empty());

    let missing = dir.path().join("nope.ttls");
    let o = gucon(&[
        "check",
        "--kb",
        missing.to_str().unwrap(),
        "--policy",
        &policy,
        "--time",
        HOSPITAL_EVALUATION_TIME,
    ]);
    assert_eq!(o.status.code(), Some(2));

    // No implicit evaluation time.
    let o = gucon(&["states", "--kb", &fixture("hospital.ttls"), "--policy", &policy]);
    assert_eq!(o.status.code(), Some(2));

    let o = gucon(&[
        "states",
        "--kb",
        &fixture("hospital.ttls"),
        "--policy",
        &policy,
        "--time",
        "tomorrow",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = gucon(&[
        "states",
        "--kb",
        &fixture("hospital.ttls"),
        "--policy",
        &policy,
        "--time",
        HOSPITAL_EVALUATION_TIME,
        "--policy-format",
        "ucp",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_reports_rule_count() {
    let o = gucon(&[
        "validate",
        "--policy",
        &fixture("hospital-policy.ttl"),
        "--kb",
        &fixture("hospital.ttls"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 rules"));
    let dir = tempfile::tempdir().unwrap();
    let unsafe_rule = write(
        dir.path(),
        "unsafe.gucon",
        "{ ?a ex:p ?b } -> O { << ?a gucon:sign ?c >> gucon:deadline \"2025-01-01T00:00:00Z\"^^xsd:dateTime }",
    );
    let o = gucon(&["validate", "--policy", unsafe_rule.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("?c"), "{}", stderr(&o));
}

#[test]
fn base_namespace_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gucon"))
        .args([
            "check",
            "--kb",
            &fixture("hospital.ttls"),
            "--policy",
            &fixture("hospital.gucon"),
            "--time",
            HOSPITAL_EVALUATION_TIME,
            "--out",
            "/dev/stdout",
        ])
        .env("GUCON_BASE", "urn:test:")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("<urn:test:report-"), "{}", stdout(&o));
}

const TASK_CONFIG: &str = r#"
[generation]
seed = 11
event_fraction = 0.3

[task]
id = 1
steps = [1, 2, 3, 4, 5]
fixed = 3000
class = "high"
runs = 5
trim = 1
"#;

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "gen.toml",
        "[generation]\ntriple_target = 4000\n\n[rules]\ncount = 4\nclass = \"medium\"\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = gucon(&[
            "generate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "5",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["kb.ttls", "policy.gucon"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let o = gucon(&["validate", "--policy", a.join("policy.gucon").to_str().unwrap()]);
    assert!(stdout(&o).contains("4 rules"), "{}", stdout(&o));

    let bad = write(dir.path(), "bad.toml", "[generation]\ntriple_target = 10\n");
    let o = gucon(&[
        "generate",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_writes_five_step_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "task.toml", TASK_CONFIG);
    let out = dir.path().join("out");
    let o = gucon(&[
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("r2"));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 26);

    // Reusing the fixtures in process.
    let again = dir.path().join("again");
    let o = gucon(&[
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--fixtures",
        out.join("fixtures").to_str().unwrap(),
        "--in-process",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = gucon(&[
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--fixtures",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("step 1"), "{}", stderr(&o));
}
