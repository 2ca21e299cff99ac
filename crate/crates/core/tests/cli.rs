use std::process::{Command, Output};

fn permgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permgame")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_verdict() {
    let o = permgame(&["solve", "--formula", "p & ~p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("UNSAT\n"));
    let o = permgame(&["solve", "--formula", "<a> p"]);
    assert!(stdout(&o).starts_with("SAT\n"));
}

#[test]
fn expect_sets_exit_status() {
    assert_eq!(permgame(&["solve", "--formula", "p & ~p", "--expect", "sat"]).status.code(), Some(1));
    assert_eq!(permgame(&["solve", "--formula", "p & ~p", "--expect", "unsat"]).status.code(), Some(0));
}

#[test]
fn input_and_fragment_errors() {
    assert_eq!(permgame(&["solve", "--formula", "p &"]).status.code(), Some(2));
    assert_eq!(permgame(&["solve", "--formula", "mu X. <a> X & <a> X"]).status.code(), Some(2));
    assert_eq!(permgame(&["check", "--formula", "mu X. p | X"]).status.code(), Some(2));
    assert_eq!(permgame(&["solve", "--file", "/nonexistent/formula"]).status.code(), Some(2));
    assert_ne!(permgame(&["solve", "--formula", "p", "--time-cap", "0"]).status.code(), Some(0));
}

#[test]
fn resource_abort() {
    let o = permgame(&["solve", "--formula", "nu X. <a> X & <b> X", "--node-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn structured_output_is_deterministic() {
    let f = "mu X. p & nu Y. (<a> (Y & p) | <a> X)";
    for cmd in ["solve", "game", "dpa", "track", "closure", "check"] {
        let a = permgame(&[cmd, "--formula", f, "--format", "json"]);
        let b = permgame(&[cmd, "--formula", f, "--format", "json"]);
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
    let v: serde_json::Value = serde_json::from_slice(&permgame(&["solve", "-f", f, "--format", "json"]).stdout).unwrap();
    assert_eq!(v["answer"], "Sat");
    assert!(v["model"].is_object());
}

#[test]
fn dot_output() {
    for cmd in ["track", "dpa", "game"] {
        let o = permgame(&[cmd, "--formula", "<a> p | [a] q", "--format", "dot"]);
        assert!(stdout(&o).starts_with("digraph"), "{cmd}");
    }
}

#[test]
fn bench_gen_reparses() {
    let o = permgame(&["bench", "gen", "early-ac", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let check = permgame(&["check", "--formula", text.trim()]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(permgame(&["bench", "gen", "theta1", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn bench_run_table() {
    let o = permgame(&["bench", "run", "--max-n", "1", "--node-cap", "20000"]);
    let table = stdout(&o);
    assert!(table.lines().any(|l| l.starts_with("~theta1(1)") && l.contains(" ok ")));
    assert!(table.lines().any(|l| l.starts_with("af-serial") && l.contains(" ok ")));
}
