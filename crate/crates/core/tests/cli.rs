use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockzeta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn empty_selection_is_a_pass() {
    let o = run(&["verify", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn core_suite_passes_with_small_bounds() {
    let o = run(&["verify", "core", "--weight-cap", "4", "--mode-range", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let ids: Vec<&str> = text.lines().map(|l| l.split('"').nth(3).unwrap()).collect();
    assert_eq!(ids, ["HEISENBERG", "VIRASORO", "MODVIR", "GRADED-DIM"]);
    assert!(text.lines().all(|l| l.contains("\"status\":\"pass\"")));
    assert!(text.starts_with("{\"check-id\":"));
}

#[test]
fn json_lines_are_reproducible() {
    let args = ["verify", "res-change,zeta,GRADED-DIM", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"elapsed-ms\":0"));
}

#[test]
fn zeta_suite_reports_the_table() {
    let o = run(&["verify", "zeta"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"zeta(1-k)\":\"-1/12\""));
}

#[test]
fn insufficient_window_exits_one() {
    let o = run(&["verify", "COMM", "--y-order", "0", "--weight-cap", "1", "--x-window", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"status\":\"window-insufficient\""));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "NOT-A-CHECK"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "core", "--weight-cap", "-2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "core", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("fockzeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out = dir.join("out.jsonl");
    std::fs::write(&cfg, "# heisenberg only\nsuite = HEISENBERG\nweight-cap = 3\nmode-range = 1\n").unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--weight-cap", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"params\":{\"mode-range\":1,\"weight-cap\":2}"), "{text}");

    std::fs::write(&cfg, "suite = core\ncolour = blue\n").unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tables_print_exact_values() {
    let o = run(&["table", "bernoulli", "--max", "4", "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().nth(4), Some("{\"k\":4,\"B_k\":\"-1/30\"}"));
    let o = run(&["table", "partitions", "--max", "30"]);
    assert!(stdout(&o).lines().last().unwrap().contains("dim=5604"));
    let o = run(&["table", "zeta", "--max", "2"]);
    assert!(stdout(&o).contains("zeta(1-k)=-1/12"));
}
