use std::io::Write;
use std::process::{Command, Output, Stdio};

fn utstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_utstar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

const S3: &str = "z1[z2,z3]-z2[z1,z3]+z3[z1,z2]";

#[test]
fn standard_polynomial_is_an_identity() {
    let o = utstar(&["check-identity", "--n", "3", "--char", "5", "--inv", "star", S3]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS "));
}

#[test]
fn non_identity_fails_with_witness() {
    let o = utstar(&["check-identity", "--format", "json", "[y1,y2]"]);
    assert_eq!(o.status.code(), Some(1));
    let r = &json_lines(&o)[0];
    assert_eq!(r["status"], "FAIL");
    assert!(r["witness"].as_str().unwrap().contains("entry"));
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["claim_id", "dims", "elapsed_ms", "status", "witness"]);
}

#[test]
fn commutator_is_not_central() {
    let o = utstar(&["check-central", "--n", "3", "--char", "0", "[y1,z1]"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "NOT_CENTRAL");
}

#[test]
fn constants_are_central() {
    let o = utstar(&["check-central", "--n", "4", "--inv", "s", "3 + [z1,z2][z3,z4]z5 - [z1,z2][z3,z4]z5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "CENTRAL 3");
    let o = utstar(&["check-central", S3]);
    assert_eq!(stdout(&o).trim(), "IDENTITY");
}

#[test]
fn polynomial_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_utstar"))
        .args(["check-identity", "--char", "3", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(S3.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors() {
    for args in [
        &["check-identity", "--char", "9", "y1"][..],
        &["check-identity", "--char", "2", "y1"],
        &["check-identity", "--n", "1", "y1"],
        &["check-identity", "--n", "3", "--inv", "s", "y1"],
        &["check-identity", "y1 +"],
        &["check-identity", "x1"],
        &["basis", "--md", "nonsense"],
        &["frobnicate"],
    ] {
        let o = utstar(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn membership_certificate() {
    let o = utstar(&["member-i", "--format", "json", S3]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["status"], "PASS");
    let o = utstar(&["member-i", "[y1,y2]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("residue"));
}

#[test]
fn basis_lists_family() {
    let o = utstar(&["basis", "--md", "1,1;1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["case"] == "M1"));
}

#[test]
fn eval_on_qgeneric() {
    let o = utstar(&["eval", "--matrices", "qgeneric", "--format", "json", "[y1,y2]"]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    assert_eq!(v["size"], 3);
    let pos: Vec<(u64, u64)> =
        v["entries"].as_array().unwrap().iter().map(|e| (e["i"].as_u64().unwrap(), e["j"].as_u64().unwrap())).collect();
    assert_eq!(pos, [(1, 2), (2, 3)]);
}

#[test]
fn dims_of_small_component() {
    let o = utstar(&["dims", "--md", "1,1;1,1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let d = &json_lines(&o)[0]["dims"];
    assert_eq!(d["words"], 24);
    assert_eq!(d["I"], d["Id"]);
}

#[test]
fn replay_is_independent_of_worker_count() {
    let run = |jobs: &str| {
        utstar(&["replay", "--only", "THM", "--char", "3", "--max-total-degree", "3", "--format", "json", "--jobs", jobs])
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ids: Vec<String> =
        json_lines(&a).iter().map(|r| r["claim_id"].as_str().unwrap().to_string()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(ids.iter().any(|i| i == "THM2-n4-S-deg2"));
}

#[test]
fn skipped_fails_only_when_strict() {
    let args = ["replay", "--only", "THM1", "--max-total-degree", "3", "--cap-words", "2"];
    let o = utstar(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("SKIPPED"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(utstar(&strict).status.code(), Some(1));
}
