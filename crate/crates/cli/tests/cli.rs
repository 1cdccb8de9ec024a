use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn nlogic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlogic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_algebra_accepts_the_heyting_chain() {
    let o = nlogic(&["check-algebra", fixture("chain3.alg").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("kind lattice"));
}

#[test]
fn check_algebra_reports_a_broken_implication_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.alg");
    // 0->0 must be 1 in a Heyting chain
    std::fs::write(&p, "elements: 0 1\norder: 0<=1\nkind: lattice\nunit: 1\nimp: (0,0)=0 (0,1)=1 (1,0)=0 (1,1)=1\n").unwrap();
    let o = nlogic(&["check-algebra", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL] axioms"));
}

#[test]
fn weakening_correspondent() {
    let o = nlogic(&["correspond", "--sequent", "p |- q -> p", "--class", "LK_*", "--trace"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("correspondent: ∀¹x1 ∀¹x2 ∀¹x3 (R(x1,x2,x3) → x3 ≤ x1)"), "{out}");
    assert!(out.contains("R7    main"), "{out}");
}

#[test]
fn non_sahlqvist_sequent_fails_with_a_trace() {
    let o = nlogic(&["correspond", "--sequent", "p -> (p -> q) |- p -> q", "--class", "LK_*"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("note: start"));
}

#[test]
fn bad_frame_fails_the_unit_axiom() {
    let o = nlogic(&["check-frame", fixture("bad.frame").to_str().unwrap(), "--class", "PU"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("[FAIL] PU:U -- (U) at"), "{}", stdout(&o));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(code(&nlogic(&["correspond", "--sequent", "p |-", "--class", "LK"])), 2);
    assert_eq!(code(&nlogic(&["correspond", "--sequent", "p |- p", "--class", "XYZ"])), 2);
    assert_eq!(code(&nlogic(&["check-algebra", "/nonexistent.alg"])), 2);
    assert_eq!(code(&nlogic(&["frobnicate"])), 2);
    let o = nlogic(&["check-frame", fixture("bad.frame").to_str().unwrap(), "--axiom", "nope"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown axiom"));
}

#[test]
fn json_lines_are_records_framed_by_header_and_summary() {
    let o = nlogic(&["--format", "json-lines", "check-frame", fixture("bad.frame").to_str().unwrap(), "--class", "PU"]);
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).expect("one JSON value per line")).collect();
    assert_eq!(lines[0]["record"], "header");
    assert!(lines[0]["digest"].as_str().unwrap().starts_with("sha256:"));
    let last = lines.last().unwrap();
    assert_eq!(last["record"], "summary");
    assert_eq!(last["pass"], false);
    let failed: Vec<_> = lines.iter().filter(|v| v["record"] == "check" && v["pass"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["id"], "PU:U");
    assert!(failed[0]["witness"].is_string());
}

#[test]
fn human_output_content_appears_in_json_lines() {
    let args = ["correspond", "--sequent", "p*q |- q*p", "--class", "LK_*", "--trace"];
    let human = stdout(&nlogic(&args));
    let mut json_args = vec!["--format", "json-lines"];
    json_args.extend(args);
    let json = stdout(&nlogic(&json_args));
    for v in json.lines().map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()) {
        let text = match v["record"].as_str().unwrap() {
            "value" => v["value"].as_str().unwrap().to_string(),
            "trace" => v["system"].as_str().unwrap().to_string(),
            "note" => v["text"].as_str().unwrap().to_string(),
            _ => continue,
        };
        assert!(human.contains(&text), "{text} missing from human output");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--sequent", "p |- p*p", "--class", "LK_*", "--sample", "60"];
    assert_eq!(stdout(&nlogic(&args)), stdout(&nlogic(&args)));
}

#[test]
fn timing_is_opt_in() {
    let plain = stdout(&nlogic(&["check-algebra", fixture("chain2.alg").to_str().unwrap()]));
    assert!(!plain.contains(" in "));
    let timed = stdout(&nlogic(&["--timing", "check-algebra", fixture("chain2.alg").to_str().unwrap()]));
    assert!(timed.lines().last().unwrap().contains(" in "));
}

#[test]
fn dualized_frame_round_trips_through_the_frame_checker() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("l.frame");
    let o = nlogic(&["dualize", fixture("bool2_lambek.alg").to_str().unwrap(), "--verify", "-o", frame.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    for class in ["PU", "LK", "LK*", "LK_*"] {
        let o = nlogic(&["check-frame", frame.to_str().unwrap(), "--class", class]);
        assert_eq!(code(&o), 0, "{class}: {}", stdout(&o));
    }
    let val = dir.path().join("v.val");
    std::fs::write(&val, "p: x_1\nq: x_0\n").unwrap();
    let o = nlogic(&["eval", "--frame", frame.to_str().unwrap(), "--formula", "p * q -> p", "--valuation", val.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("extent: "));
    let o = nlogic(&["valid", "--frame", frame.to_str().unwrap(), "--sequent", "p * q |- q * p"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn verify_over_a_frame_directory() {
    let dir = tempfile::tempdir().unwrap();
    nlogic(&["dualize", fixture("bool2_lambek.alg").to_str().unwrap(), "-o", dir.path().join("a.frame").to_str().unwrap()]);
    let o = nlogic(&["verify", "--sequent", "p |- q -> p", "--class", "LK_*", "--frames", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("1/1 frames agree"));
}

#[test]
fn verify_by_enumeration_caps_the_size() {
    let o = nlogic(&["verify", "--sequent", "p |- p*p", "--class", "LK_*", "--enumerate", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn selftest_single_criterion() {
    let o = nlogic(&["selftest", "--criterion", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS]  1 representation embedding"));
}
