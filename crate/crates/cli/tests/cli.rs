use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

use procmat::linalg::OperatorJson;
use procmat::witness::{ocb_m1, ocb_m2};
use procmat::Operator;

fn procmat() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_procmat"));
    c.env_remove("TOLERANCE");
    c
}

fn run(args: &[&str]) -> Output {
    procmat().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = procmat()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const BUILTINS: [&str; 4] = ["fixed-order-ab", "fixed-order-ba", "ocb", "qs-marginal"];

#[test]
fn every_builtin_validates_through_a_pipe() {
    for name in BUILTINS {
        let emitted = run(&["builtin", name]);
        assert_eq!(code(&emitted), 0, "{name}");
        let checked = run_with_stdin(&["validate", "-"], &emitted.stdout);
        assert_eq!(
            code(&checked),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&checked.stderr)
        );
        let r = report(&checked);
        assert_eq!(r["results"]["valid"], true);
        assert_eq!(r["inputs"]["process"]["path"], "-");
        assert_eq!(r["inputs"]["process"]["sha256"].as_str().unwrap().len(), 64);
    }
    for name in ["fixed-order-ab", "qs-marginal"] {
        let emitted = run(&["builtin", name, "--dim", "3"]);
        assert_eq!(
            code(&run_with_stdin(&["validate", "-"], &emitted.stdout)),
            0
        );
    }
}

#[test]
fn emitted_operators_round_trip_byte_identically() {
    let mut emitted = Vec::new();
    for name in BUILTINS {
        emitted.push(run(&["builtin", name]).stdout);
    }
    emitted.push(run(&["twirl", "ocb"]).stdout);
    for bytes in emitted {
        let text = String::from_utf8(bytes).unwrap();
        let text = text.trim_end();
        let op = Operator::from_json(text).unwrap();
        assert_eq!(op.to_json(), text);
    }

    let split = report(&run(&["witness-split", "--witness", "ocb"]));
    let m_g = serde_json::to_string(&split["results"]["m_g"]).unwrap();
    let op = Operator::from_json(&m_g).unwrap();
    let again: Value = serde_json::from_str(&op.to_json()).unwrap();
    assert_eq!(again, split["results"]["m_g"]);
}

#[test]
fn report_keys_are_sorted_and_deterministic() {
    let a = run(&["score", "--witness", "ocb", "--process", "qs-marginal"]);
    let b = run(&["score", "--witness", "ocb", "--process", "qs-marginal"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let keys = [
        "\"inputs\"",
        "\"residuals\"",
        "\"results\"",
        "\"tolerance\"",
        "\"verb\"",
        "\"version\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn ocb_is_not_covariant() {
    let emitted = run(&["builtin", "ocb"]);
    let out = run_with_stdin(&["covariance-check", "-"], &emitted.stdout);
    assert_eq!(code(&out), 3);
    let r = report(&out);
    assert_eq!(r["results"]["covariant"], false);
    assert!(r["residuals"]["covariance"].as_f64().unwrap() > 0.0);

    assert_eq!(code(&run(&["covariance-check", "qs-marginal"])), 0);
}

#[test]
fn score_respects_the_covariant_bound() {
    let out = run(&["score", "--witness", "ocb", "--process", "qs-marginal"]);
    assert_eq!(code(&out), 0);
    let total = report(&out)["results"]["total"].as_f64().unwrap();
    assert!(total <= std::f64::consts::FRAC_1_SQRT_2 + 1e-9);

    let out = run(&["score", "--witness", "ocb", "--process", "ocb"]);
    assert_eq!(code(&out), 3);
    let r = report(&out);
    assert!((r["results"]["total"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(r["results"]["noncovariance"].as_f64().unwrap() > 0.0);
}

#[test]
fn decompose_verifies_its_weights() {
    let out = run(&["decompose", "qs-marginal", "--verify"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"]["verified"], true);
    assert!(r["residuals"]["verify"].as_f64().unwrap() <= 1e-10);
    let w = &r["results"]["weights"];
    for (k, want) in [("W1", 0.5), ("W2", 0.5), ("W3", 0.0), ("W4", 0.0)] {
        assert!((w[k].as_f64().unwrap() - want).abs() < 1e-12);
    }

    let out = run(&["decompose", "ocb"]);
    assert_eq!(code(&out), 3);
    assert_eq!(report(&out)["results"]["decomposable"], false);
}

#[test]
fn witness_and_game_files() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("witness.json");
    let m = &ocb_m1() + &ocb_m2();
    let body = json!({
        "m": OperatorJson::from(&m),
        "scale": 1.0 / (4.0 * std::f64::consts::SQRT_2),
    });
    std::fs::write(&witness, body.to_string()).unwrap();
    let out = run(&[
        "score",
        "--witness",
        witness.to_str().unwrap(),
        "--process",
        "ocb",
    ]);
    let r = report(&out);
    assert_eq!(r["inputs"]["witness"]["kind"], "file");
    assert!((r["results"]["total"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let game = dir.path().join("game.json");
    let trivial = json!({"settings": [[1.0]], "win": [[[[true, false], [false, true]]]]});
    std::fs::write(&game, trivial.to_string()).unwrap();
    // two-outcome Z measurements that discard and re-prepare |0⟩
    let z = |k: usize| {
        let mut re = vec![vec![0.0; 4]; 4];
        re[2 * k][2 * k] = 1.0;
        json!({"labels": ["in", "out"], "dims": [2, 2], "re": re, "im": vec![vec![0.0; 4]; 4]})
    };
    let strategy = dir.path().join("strategy.json");
    let s = json!({"alice": [[z(0), z(1)]], "bob": [[z(0), z(1)]]});
    std::fs::write(&strategy, s.to_string()).unwrap();
    let out = run(&[
        "simulate",
        "--process",
        "fixed-order-ab",
        "--strategy",
        strategy.to_str().unwrap(),
        "--game",
        game.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // Alice's input is maximally mixed, Bob receives |0⟩: p(a,b) = ½ δ_{b0}
    let p = report(&out)["results"]["success"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 1e-12, "{p}");

    // not trace preserving
    let bad = json!({"alice": [[z(0)]], "bob": [[z(0), z(1)]]});
    std::fs::write(&strategy, bad.to_string()).unwrap();
    let out = run(&[
        "simulate",
        "--process",
        "ocb",
        "--strategy",
        strategy.to_str().unwrap(),
        "--game",
        "ocb",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn ocb_game_preset() {
    let out = run(&[
        "simulate",
        "--process",
        "ocb",
        "--strategy",
        "ocb",
        "--game",
        "ocb",
    ]);
    assert_eq!(code(&out), 0);
    let p = report(&out)["results"]["success"].as_f64().unwrap();
    assert!((p - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-9);
}

#[test]
fn tolerance_precedence() {
    let with_env =
        |args: &[&str], tol: &str| procmat().env("TOLERANCE", tol).args(args).output().unwrap();
    assert_eq!(code(&with_env(&["covariance-check", "ocb"], "1")), 0);
    assert_eq!(
        code(&with_env(
            &["covariance-check", "ocb", "--tol", "1e-9"],
            "1"
        )),
        3
    );
    let out = with_env(&["validate", "ocb"], "1e-6");
    assert_eq!(report(&out)["tolerance"].as_f64().unwrap(), 1e-6);
}

#[test]
fn exit_codes_for_bad_invocations() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["validate"])), 1);
    assert_eq!(code(&run(&["builtin", "ocb", "--dim", "3"])), 1);
    assert_eq!(code(&run(&["--tol", "-1", "validate", "ocb"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["validate", "/nonexistent/process.json"])), 2);
    assert_eq!(code(&run_with_stdin(&["validate", "-"], b"{not json")), 2);
    let non_hermitian = json!({
        "labels": ["A_I", "A_O", "B_I", "B_O"],
        "dims": [1, 1, 1, 1],
        "re": [[1.0]],
        "im": [[1.0]],
    });
    assert_eq!(
        code(&run_with_stdin(
            &["validate", "-"],
            non_hermitian.to_string().as_bytes()
        )),
        2
    );
}

#[test]
fn invalid_process_is_a_negative_verdict() {
    let doubled = run(&["builtin", "qs-marginal"]).stdout;
    let op = Operator::from_json(String::from_utf8(doubled).unwrap().trim_end()).unwrap();
    let out = run_with_stdin(&["validate", "-"], op.scale(2.0).to_json().as_bytes());
    assert_eq!(code(&out), 3);
    assert_eq!(report(&out)["results"]["trace_ok"], false);
}
