use std::path::PathBuf;
use std::process::{Command, Output};

fn ick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ick")).args(args).env_remove("ICK_CONFIG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ick-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn decide_reports_and_exit_codes() {
    let o = ick(&["decide", "--logic", "ICKS5", "--agents", "a", "K{a} p | ~K{a} p"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "provable"));
    let o = ick(&["decide", "--logic", "ICK", "--agents", "a", "K{a} p | ~K{a} p"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "not-provable"));
    let o = ick(&["decide", "--logic", "ICKT", "--agents", "a", "K{a} p -> p"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "provable"));
    let o = ick(&["decide", "--logic", "ICKS5", "--max-sequents", "3", "C p | ~C p"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(2), "resource-limit"));
}

#[test]
fn malformed_input_exits_two_with_one_line() {
    for args in [
        vec!["decide", "p &"],
        vec!["decide", "K{z} p"],
        vec!["decide", "--logic", "ICKX", "p"],
        vec!["check-proof", "/nonexistent/proof.json"],
        vec!["translate", "(p"],
    ] {
        let o = ick(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.trim().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn certificates_revalidate() {
    let proof = tmp("proof.json");
    let o = ick(&["decide", "--logic", "ICK", "p & C (p -> K{a} p) -> C p", "--certificate", "--certificate-out", proof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = ick(&["check-proof", proof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("valid"));
    // the same proof is not a proof in a weaker calculus than the one it claims
    let t = tmp("t.json");
    ick(&["decide", "--logic", "ICKT", "K{a} p -> p", "--certificate", "--certificate-out", t.to_str().unwrap()]);
    let o = ick(&["check-proof", "--logic", "ICK", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    for (logic, goal, extra) in [("ICK", "K{a} p | ~K{a} p", None), ("ICKS5", "C p", Some("--s5-countermodel"))] {
        let model = tmp(&format!("model-{logic}.json"));
        let mut args = vec!["decide", "--logic", logic, goal, "--certificate", "--certificate-out", model.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(ick(&args).status.code(), Some(1));
        let o = ick(&["check-model", "--logic", logic, model.to_str().unwrap(), "--goal", goal]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let o = ick(&["check-model", "--logic", logic, model.to_str().unwrap(), "--goal", "p -> p"]);
        assert_eq!(o.status.code(), Some(1));
    }
}

#[test]
fn json_output_and_eval() {
    let o = ick(&["--format", "json", "decide", "--logic", "ICKS4", "K{a} p -> K{a} K{a} p"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], "provable");
    assert_eq!(v["logic"], "ICKS4");

    let model = tmp("eval.json");
    ick(&["decide", "--logic", "ICK", "p | ~p", "--certificate", "--certificate-out", model.to_str().unwrap()]);
    let root = serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(&model).unwrap()).unwrap()["root"]
        .as_str()
        .unwrap()
        .to_string();
    let o = ick(&["eval", model.to_str().unwrap(), &root, "p | ~p"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "false"));
    let o = ick(&["eval", model.to_str().unwrap(), &root, "p -> p"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "true"));
}

#[test]
fn translate_and_hilbert() {
    let o = ick(&["translate", "K{a} p"]);
    assert_eq!(stdout(&o).trim(), "~~K{a} ~~p");

    let file = tmp("hilbert.json");
    let s = ick::hilbert::samples().into_iter().find(|s| s.name == "k-and-intro").unwrap();
    let mut j = ick::hilbert::DerivationJson::from_derivation(&s.derivation);
    j.logic = Some("ICK".into());
    std::fs::write(&file, serde_json::to_string(&j).unwrap()).unwrap();
    let o = ick(&["check-hilbert", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    j.nodes.pop();
    std::fs::write(&file, serde_json::to_string(&j).unwrap()).unwrap();
    let o = ick(&["check-hilbert", file.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = tmp("config.json");
    std::fs::write(&cfg, r#"{"logic": "ICKT", "agents": ["a", "b"], "max_sequents": 100000}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ick")).args(["decide", "K{b} p -> p"]).env("ICK_CONFIG", &cfg).output().unwrap();
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "provable"));
}
