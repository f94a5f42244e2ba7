use std::io::Write;
use std::process::{Command, Output, Stdio};

use lrgraph::graph6::{parse_graph6, parse_graph6_lines, write_graph6};
use lrgraph::Graph;

fn lr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lr")).args(args).env_remove("LR_THREADS").output().unwrap()
}

fn lr_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lr"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

const S011XX: &str = "KQGWOMA_Q@GB";

#[test]
fn refine_reports_iteration_number() {
    let o = lr(&["refine", "--g6", "Bw", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["iteration_number"], 0);
    let o = lr(&["refine", "--string", "S011XX", "--format", "json"]);
    assert_eq!(json(&o)["iteration_number"], 11);
    assert_eq!(json(&o)["long_refinement"], true);
    assert!(stdout(&lr(&["refine", "--string", "S011XX"])).contains("iteration_number 11"));
}

#[test]
fn verbose_trace_has_one_record_per_iteration() {
    let o = lr(&["refine", S011XX, "--verbose"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 12);
    let last: serde_json::Value = serde_json::from_str(lines[11]).unwrap();
    assert_eq!(last["stable"], true);
    assert_eq!(last["classes"].as_array().unwrap().len(), 12);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&lr(&["refine", "--file", "/nonexistent/missing.g6"])), 2);
    assert_eq!(code(&lr(&["refine", "--g6", "B~~"])), 1);
    assert_eq!(code(&lr(&["refine"])), 1);
    assert_eq!(code(&lr(&["refine", "--g6", "Bw", "--string", "S011XX"])), 1);
    assert_eq!(code(&lr(&["frobnicate"])), 1);
    assert_eq!(code(&lr(&["string", "realize", "SXQX"])), 1);
    assert_eq!(code(&lr(&["--help"])), 0);
    let o = lr(&["search", "--n", "11", "--degrees", "2,3", "--max-nodes", "3"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn analyze_reports() {
    let o = lr(&["analyze", "--format", "json", S011XX]);
    let checks = json(&o)["report"]["checks"].as_array().unwrap().clone();
    assert!(checks.iter().all(|c| c["status"] != "fail" && c["status"] != "skipped"));
    let complement = write_graph6(&parse_graph6(S011XX).unwrap().complement());
    assert!(stdout(&lr(&["analyze", &complement])).contains("10/10 checks passed"));
    let c6 = write_graph6(&Graph::cycle(6));
    let o = lr(&["analyze", &c6]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("FAIL"), "{text}");
}

#[test]
fn distinguish_pairs() {
    assert_eq!(stdout(&lr(&["distinguish", S011XX, S011XX])).trim(), "equivalent");
    let c6 = write_graph6(&Graph::cycle(6));
    let triangles = write_graph6(&Graph::cycle(3).disjoint_union(&Graph::cycle(3)));
    assert_eq!(stdout(&lr(&["distinguish", &c6, &triangles, "--assert-not-last"])).trim(), "equivalent");
    // two 13-vertex members of different families
    let o = lr(&["distinguish", "string:S1_211XX", "string:S01XX1_2", "--assert-not-last"]);
    assert_eq!(code(&o), 0);
    let i: usize = stdout(&o).trim().parse().unwrap();
    assert!(i <= 11);
    let o = lr(&["distinguish", "--format", "json", "Bw", "BW"]);
    assert_eq!(json(&o)["result"]["iteration"], 1);
}

#[test]
fn family_and_strings() {
    let o = lr(&["family", "--table", "1", "--variant", "2", "--k", "0"]);
    assert_eq!(parse_graph6(stdout(&o).trim()).unwrap().n(), 13);
    assert_eq!(code(&lr(&["family", "--table", "1", "--variant", "1", "--k", "0"])), 1);
    let s = stdout(&lr(&["string", "family", "odd-family-1", "--k", "1"]));
    let g6 = stdout(&lr(&["string", "realize", s.trim(), "--format", "graph6"]));
    assert_eq!(stdout(&lr(&["string", "extract", g6.trim()])), s);
    let o = lr(&["string", "realize", "S11XX", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn stdin_input() {
    let o = lr_stdin(&["refine", "-", "--format", "json"], &format!("{S011XX}\n"));
    assert_eq!(json(&o)["iteration_number"], 11);
    let o = lr_stdin(&["distinguish", "-", S011XX], S011XX);
    assert_eq!(stdout(&o).trim(), "equivalent");
}

#[test]
fn catalog_with_sidecar() {
    let dir = std::env::temp_dir().join(format!("lr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let side = dir.join("catalog.json");
    let o = lr(&["catalog", "--order", "10..20", "--degrees", "2,3", "--sidecar", side.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let graphs = parse_graph6_lines(&stdout(&o)).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&side).unwrap()).unwrap();
    let entries = meta["entries"].as_array().unwrap();
    assert_eq!(entries.len(), graphs.len());
    assert!(graphs.iter().any(|g| g.n() == 12));
    assert!(entries.iter().all(|e| e["provenance"]["kind"].is_string()));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn search_summary_and_determinism() {
    let o = lr(&["search", "--n", "9", "--degrees", "1,2,3,4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 long-refinement graphs"));
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_lr"))
            .args(["search", "--n", "10", "--degrees", "3,4"])
            .env("LR_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("4"));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(parse_graph6_lines(&stdout(&a)).unwrap().len(), 3);
}

#[test]
fn cross_validate_and_gaps() {
    let o = lr(&["search", "--cross-validate", "--order", "2..11", "--degrees", "2,3"]);
    assert_eq!(json(&o)["equal"], true);
    let o = lr(&["gap-check", "--max", "30", "--format", "json"]);
    let gaps: Vec<u64> = json(&o)["gaps"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(gaps.contains(&24) && !gaps.contains(&12));
}

#[test]
fn dot_output() {
    let o = lr(&["refine", "--g6", "Bw", "--format", "dot"]);
    assert!(stdout(&o).starts_with("graph G {"));
    assert_eq!(code(&lr(&["analyze", "Bw", "--format", "dot"])), 1);
}
