//! The binary's exit codes, golden outputs on every fixture, and round
//! trips of synthesized models through `check`.
//!
//! Set `PRISYN_BLESS=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::Command;

use prisyn_core::fixtures::FIGURES;
use prisyn_core::model::parse_system;
use serde_json::Value;

fn prisyn(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_prisyn"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prisyn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("PRISYN_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, want, "golden {name} differs");
}

fn models() -> Vec<&'static str> {
    FIGURES
        .iter()
        .copied()
        .chain(["phil-2", "phil-3"])
        .collect()
}

#[test]
fn check_and_synth_match_goldens() {
    for m in models() {
        let (code, out, err) = prisyn(&["check", m]);
        assert!(code == 0 || code == 1, "{m}: {err}");
        golden(&format!("check-{m}.txt"), &format!("exit {code}\n{out}"));
        let (code, out, err) = prisyn(&["synth", m]);
        assert!(code == 0 || code == 1, "{m}: {err}");
        golden(&format!("synth-{m}.txt"), &format!("exit {code}\n{out}"));
    }
}

#[test]
fn unrestricted_philosophers_deadlock() {
    let (code, out, _) = prisyn(&["check", "phil-2", "--mode", "deadlock"]);
    assert_eq!(code, 1);
    assert!(out.contains("outcome: unsafe"));
    assert_eq!(out.lines().filter(|l| l.contains("  ->  ")).count(), 3);
}

#[test]
fn synthesized_model_checks_safe() {
    for m in ["phil-2", "phil-4", "fig2", "fig3"] {
        let (code, out, _) = prisyn(&["synth", m, "--repush-depth", "1"]);
        assert_eq!(code, 0, "{m}");
        let fixed = parse_system(&out).expect("synth output parses as a model");
        let path = scratch(&format!("{m}.model"), &out);
        let (code, out, _) = prisyn(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{m}: {out}");
        for engine in ["explicit", "symbolic"] {
            let (code, _, _) = prisyn(&["check", path.to_str().unwrap(), "--engine", engine]);
            assert_eq!(code, 0, "{m} {engine}");
        }
        assert!(!fixed.priorities().is_empty());
    }
}

#[test]
fn malformed_input_exits_two() {
    let p = scratch(
        "bad.model",
        "system { component c { locations a; on x from a to nowhere; } }",
    );
    let (code, _, err) = prisyn(&["check", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("nowhere"), "{err}");
    assert_eq!(prisyn(&["check", "/definitely/not/here"]).0, 2);
    assert_eq!(prisyn(&["generate", "philosophers", "1"]).0, 2);
    assert_eq!(prisyn(&["synth", "phil-3", "--keep", "p1,zz"]).0, 2);
    assert_eq!(
        prisyn(&["synth", "fig3", "--keep", "g", "--mode", "risk"]).0,
        2
    );
}

#[test]
fn text_and_json_report_the_same_facts() {
    for m in models() {
        for cmd in ["check", "synth"] {
            let mut args = vec![cmd, m];
            if cmd == "synth" {
                args.extend(["--repush-depth", "1"]);
            }
            let (c1, text, _) = prisyn(&args);
            args.push("--json");
            let (c2, json, _) = prisyn(&args);
            assert_eq!(c1, c2, "{cmd} {m}");
            let v: Value = serde_json::from_str(&json).unwrap();
            let field = |k: &str| {
                text.lines()
                    .map(|l| l.trim_start_matches("# "))
                    .find_map(|l| l.strip_prefix(&format!("{k}: ")))
                    .map(str::to_string)
            };
            assert_eq!(
                field("outcome").as_deref(),
                v["outcome"].as_str(),
                "{cmd} {m}"
            );
            assert_eq!(
                field("variables"),
                v.get("variables").map(|x| x.to_string()),
                "{cmd} {m}"
            );
            let text_pairs: Vec<String> = text
                .lines()
                .filter_map(|l| l.trim_start_matches("# ").strip_prefix("priority: "))
                .map(str::to_string)
                .collect();
            let json_pairs: Vec<String> = v
                .get("priorities")
                .and_then(Value::as_array)
                .map(|a| {
                    a.iter()
                        .map(|p| {
                            format!(
                                "{} < {}",
                                p["low"].as_str().unwrap(),
                                p["high"].as_str().unwrap()
                            )
                        })
                        .collect()
                })
                .unwrap_or_default();
            assert_eq!(text_pairs, json_pairs, "{cmd} {m}");
            let steps = text
                .lines()
                .skip_while(|l| *l != "trace:")
                .skip(1)
                .take_while(|l| l.starts_with("  "))
                .count();
            let jsteps = v.get("trace").and_then(Value::as_array).map_or(0, Vec::len);
            assert_eq!(steps, jsteps, "{cmd} {m}");
        }
    }
}

#[test]
fn philosophers_encoding_sizes() {
    for (n, vars) in [(10, 122), (20, 242)] {
        let (code, out, _) = prisyn(&["synth", &format!("phil-{n}"), "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["variables"], vars);
        assert!(v["verification"].as_str().unwrap().starts_with("safe"));
    }
    let (code, out, _) = prisyn(&["synth", "phil-12", "--keep", "p1,f1,p2,f2", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["variables"], 38);
    assert_eq!(
        v["abstraction"]["kept"],
        serde_json::json!(["p1", "f1", "p2", "f2"])
    );
}

#[test]
fn figure_three_needs_a_repush() {
    let (code, out, _) = prisyn(&["synth", "fig3", "--repush-depth", "0"]);
    assert_eq!(code, 1);
    assert!(out.contains("outcome: failure") && out.contains("unsat"));
    let (code, out, _) = prisyn(&["synth", "fig3", "--repush-depth", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("# repushed: "));
}

#[test]
fn emitted_cnf_is_dimacs() {
    let p = std::env::temp_dir().join(format!("prisyn-cnf-{}.cnf", std::process::id()));
    let (code, _, _) = prisyn(&["synth", "fig2", "--emit-cnf", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&p).unwrap();
    let header = text.lines().find(|l| l.starts_with("p cnf ")).unwrap();
    let parts: Vec<usize> = header[6..].split(' ').map(|x| x.parse().unwrap()).collect();
    let clauses = text.lines().filter(|l| l.ends_with(" 0")).count();
    assert_eq!(clauses, parts[1]);
    let comments = text.lines().filter(|l| l.starts_with("c ")).count();
    assert_eq!(comments, parts[0]);
}

#[test]
fn generate_is_deterministic() {
    for args in [
        vec!["generate", "philosophers", "7"],
        vec!["generate", "random", "11"],
        vec!["generate", "dpu"],
        vec!["generate", "fig6-spec"],
    ] {
        let a = prisyn(&args);
        let b = prisyn(&args);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
    }
    let (_, text, _) = prisyn(&["generate", "philosophers", "3"]);
    let s = parse_system(&text).unwrap();
    assert_eq!(s.components().len(), 6);
    let (_, text, _) = prisyn(&["generate", "random", "11"]);
    parse_system(&text).unwrap();
}

const SAFE_TOY: &str = "system {
  component u { locations a b; on x from a to b; on y from b to a; }
  component v { locations a b; on y from a to b; on z from b to a; }
}";

const Z_FIRST: &str = "dfa { states q0 q1 q2; alphabet x z; init q0; accept q1;
  q0 -z-> q1; q0 -x-> q2; q1 -x-> q1; q1 -z-> q1; q2 -x-> q2; q2 -z-> q2; }";

const BOTH_LEFT: &str = "dfa {
  states s00 s10 s01 s11;
  alphabet take_left_1 take_left_2 release_1 release_2;
  init s00;
  accept s11;
  s00 -take_left_1-> s10; s00 -take_left_2-> s01; s00 -release_1-> s00; s00 -release_2-> s00;
  s10 -take_left_1-> s10; s10 -take_left_2-> s11; s10 -release_1-> s00; s10 -release_2-> s10;
  s01 -take_left_1-> s11; s01 -take_left_2-> s01; s01 -release_1-> s01; s01 -release_2-> s00;
  s11 -take_left_1-> s11; s11 -take_left_2-> s11; s11 -release_1-> s01; s11 -release_2-> s10;
}";

#[test]
fn agsynth_outcomes_and_exit_codes() {
    let model = scratch("toy.model", SAFE_TOY);
    let spec = scratch("zfirst.dfa", Z_FIRST);
    let (code, out, err) = prisyn(&[
        "agsynth",
        model.to_str().unwrap(),
        "--split",
        "u",
        "--spec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("outcome: proved-safe"));
    assert!(!out.contains("priority:"));
    assert!(out.contains("conjecture sizes: "));

    let spec = scratch("bothleft.dfa", BOTH_LEFT);
    let (code, out, err) = prisyn(&[
        "agsynth",
        "phil-2",
        "--split",
        "p1,f1,f2",
        "--spec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("# outcome: success"));
    assert!(out.contains("# verification: safe (explicit)"));
    assert!(out.contains("# priority: P1 take_left_2 < take_right_1"));
    parse_system(&out).unwrap();

    let (code, out, _) = prisyn(&[
        "agsynth",
        "phil-2",
        "--split",
        "p1,f2",
        "--spec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("outcome: fail"));

    let (code, _, err) = prisyn(&[
        "agsynth",
        "phil-2",
        "--split",
        "p1",
        "--spec",
        spec.to_str().unwrap(),
        "--mode",
        "deadlock",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("unsound for deadlock"), "{err}");

    let (code, _, err) = prisyn(&["agsynth", "fig6", "--split", "C1", "--spec", "fig6-spec"]);
    assert_eq!(code, 2);
    assert!(err.contains("shared interaction `a`"), "{err}");
}
