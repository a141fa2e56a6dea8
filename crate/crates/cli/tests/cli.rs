use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn ksmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksmc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn solve(text: &str) -> bool {
    let mut s = varisat::Solver::new();
    s.add_dimacs_cnf(text.as_bytes()).unwrap();
    s.solve().unwrap()
}

#[test]
fn f0_counterexample() {
    let o = ksmc(&["check", "--model", &model("f0.eks"), "--formula", "K[1] q", "--mode", "realized"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("state: q\n"), "{}", stdout(&o));
    let o = ksmc(&["check", "--model", &model("f0.eks"), "--formula", "K[2] (p -> q)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn communication_scenario() {
    let o = ksmc(&[
        "check",
        "--model",
        &model("comm.eks"),
        "--formula",
        "K[A] Bob_recv_msg",
        "--state",
        "Alice_send_msg,Alice_recv_ack,Bob_recv_msg,Bob_send_ack",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = ksmc(&["check", "--model", &model("comm.eks"), "--formula", "K[A] Bob_recv_msg", "--state", "Alice_send_msg"]);
    assert_eq!(o.status.code(), Some(1));
    // not a model of the theory
    let o = ksmc(&["check", "--model", &model("comm.eks"), "--formula", "p", "--state", "Bob_recv_msg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn needham_schroeder() {
    let o = ksmc(&["verify-ns", "--variant", "revised"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["failed"], serde_json::json!([]));
    let o = ksmc(&["verify-ns", "--variant", "original"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let failed = v["failed"].as_array().unwrap();
    assert!(!failed.is_empty());
    for spec in v["specs"].as_array().unwrap() {
        assert_eq!(spec["holds"], spec["nested_holds"]);
        assert_eq!(spec["holds"].as_bool().unwrap(), spec["counterexample"].is_null());
    }
    let o = ksmc(&["verify-ns", "--variant", "revised", "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("atom unbound"), "{}", stderr(&o));
    assert_eq!(ksmc(&["verify-ns", "--variant", "bogus"]).status.code(), Some(2));
}

#[test]
fn muddy_report_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = ksmc(&["bench-muddy", "--n", "4", "--k", "2", "--json", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rounds = &v[0]["rounds"];
    assert_eq!(rounds[0]["round"], 1);
    assert_eq!(rounds[0]["answers"], serde_json::json!(["No", "No", "No", "No"]));
    assert_eq!(rounds[1]["yes"], serde_json::json!([0, 1]));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k,round,alg,child,verdict,seconds"));
    let rows: Vec<&str> = lines.collect();
    for alg in ["1", "2"] {
        let count = rows.iter().filter(|r| r.split(',').nth(3) == Some(alg)).count();
        assert_eq!(count, 2 * 4);
    }
    let o = ksmc(&["bench-muddy", "--n", "5..4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o), serde_json::json!([]));
    assert_eq!(ksmc(&["bench-muddy", "--n", "3", "--k", "4"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = ksmc(&["gen-qbf", "--m", "3", "--seed", "11", "--json", "--check", "--out", path.to_str().unwrap()]);
        assert!(o.status.code().is_some());
        assert!(stdout(&o).is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "no temporary files are left behind: {names:?}");
}

#[test]
fn exit_codes_for_errors() {
    let o = ksmc(&["check", "--model", &model("f0.eks"), "--formula", "K[1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:4"));
    assert_eq!(ksmc(&["check", "--model", &model("f0.eks"), "--formula", "K[9] p"]).status.code(), Some(2));
    assert_eq!(ksmc(&["check", "--model", "/nonexistent.eks", "--formula", "p"]).status.code(), Some(2));
    assert_eq!(ksmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ksmc(&["check", "--model", &model("f0.eks")]).status.code(), Some(2));
    let o = ksmc(&["kripke-export", "--model", &model("f0.eks"), "--cap-worlds", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn engines_and_orders_agree() {
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order");
    std::fs::write(&order, "Bob_send_ack Bob_recv_msg\nAlice_recv_ack Alice_send_msg\n").unwrap();
    let order_arg = format!("@{}", order.display());
    let formulas = ["K[A] Bob_recv_msg", "C[A,B] (Bob_recv_msg -> Alice_send_msg)", "[K[B] Bob_recv_msg] K[A] Alice_send_msg"];
    for f in formulas {
        let base = ksmc(&["truthset", "--model", &model("comm.eks"), "--formula", f]);
        let en = ksmc(&["truthset", "--model", &model("comm.eks"), "--formula", f, "--engine", "enum"]);
        assert_eq!(stdout(&base), stdout(&en), "{f}");
        let ord = ksmc(&["truthset", "--model", &model("comm.eks"), "--formula", f, "--var-order", &order_arg, "--json"]);
        let count = |o: &Output| -> u64 {
            let t = stdout(o);
            match serde_json::from_str::<serde_json::Value>(&t) {
                Ok(v) => v["states"].as_u64().unwrap(),
                Err(_) => t.lines().next().unwrap().trim_start_matches("states: ").parse().unwrap(),
            }
        };
        assert_eq!(count(&base), count(&ord), "{f}");
    }
}

#[test]
fn dimacs_export_matches_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.cnf");
    for (f, expected) in [("K[1] q", 1), ("K[2] (p -> q)", 0), ("p -> K[2] q", 0)] {
        let o = ksmc(&["check", "--model", &model("f0.eks"), "--formula", f, "--dimacs", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(expected), "{f}");
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(solve(&text), expected == 1, "{f}");
    }
    let o = ksmc(&["translate", "--model", &model("f0.eks"), "--formula", "K[1] q | K[2] K[1] p", "--dimacs", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("realized: false"));
    assert!(solve(&std::fs::read_to_string(&path).unwrap()));
}

#[test]
fn translation_sharing_flag() {
    let f = "K[1] q | K[1] q";
    let shared = ksmc(&["translate", "--model", &model("f0.eks"), "--formula", f, "--json"]);
    let split = ksmc(&["translate", "--model", &model("f0.eks"), "--formula", f, "--json", "--fresh-per-occurrence"]);
    assert_eq!(json(&shared)["fresh"].as_array().unwrap().len(), 1);
    assert_eq!(json(&split)["fresh"].as_array().unwrap().len(), 2);
    let o = ksmc(&["translate", "--model", &model("f0.eks"), "--formula", "~K[1] q"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kripke_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let kr = dir.path().join("m.kripke");
    let o = ksmc(&["kripke-export", "--model", &model("comm.eks"), "--out", kr.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let eks = dir.path().join("back.eks");
    let o = ksmc(&["kripke-import", "--kripke", kr.to_str().unwrap(), "--out", eks.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // agent names are kept, so epistemic formulas carry over
    for f in ["K[A] Bob_recv_msg", "Bob_send_ack -> K[B] Alice_send_msg", "C[A,B] (Bob_recv_msg -> Alice_send_msg)"] {
        let a = ksmc(&["check", "--model", &model("comm.eks"), "--formula", f]);
        let b = ksmc(&["check", "--model", eks.to_str().unwrap(), "--formula", f]);
        assert_eq!(a.status.code(), b.status.code(), "{f}");
    }
}

#[test]
fn announcements_and_conditions() {
    let o = ksmc(&["announce", "--model", &model("f0.eks"), "--formula", "~K[1] q", "--then", "K[2] ~p"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = ksmc(&["announce", "--model", &model("f0.eks"), "--formula", "p & ~q"]);
    assert_eq!(o.status.code(), Some(1));
    let o = ksmc(&["wsc", "--model", &model("comm.eks"), "--agent", "A", "--formula", "Bob_recv_msg"]);
    assert_eq!(stdout(&o), "wsc: Alice_recv_ack\n");
    let o = ksmc(&["snc", "--model", &model("comm.eks"), "--agent", "A", "--formula", "Bob_recv_msg", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let o = ksmc(&["wsc", "--model", &model("comm.eks"), "--group", "A,B", "--formula", "Bob_recv_msg", "--json"]);
    assert!(json(&o)["iterations"].as_u64().is_some());
    let o = ksmc(&["common", "--model", &model("comm.eks"), "--group", "A,B", "--formula", "Bob_recv_msg -> Alice_send_msg"]);
    assert_eq!(o.status.code(), Some(0));
}
