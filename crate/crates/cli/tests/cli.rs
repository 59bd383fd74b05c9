//! End-to-end runs of the `katetov` binary: golden outputs, exit codes and
//! JSON/text agreement.

use std::path::PathBuf;
use std::process::{Command, Output};

use katetov::spaces::format::{json_to_text, parse_space, MatrixJson};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_katetov")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Writes `text` to a fresh file under the target directory.
fn file(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const PATH3: &str = "points: 3\n0 1 2\n1 0 1\n2 1 0\n";
const PAIR: &str = "points: 2\n0 1\n1 0\n";

#[test]
fn check4v_prints_the_bad_quadruple() {
    let o = run(&["check4v", "1", "2", "4"]);
    assert_eq!(stdout(&o), "bad quadruple (1,1,2,4)\n");
    assert_eq!(code(&o), 1);
    let o = run(&["check4v", "1", "2", "5"]);
    assert_eq!(stdout(&o), "{1,2,5} satisfies the 4-values condition\n");
    assert_eq!(code(&o), 0);
}

#[test]
fn badquads_golden_table() {
    let o = run(&["badquads", "1", "3", "6"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "[2,2]  (1,3,1,1)  (1,3,1,1): * ~ (1,3,1,1), _* ~ (1,3,1,1)\n\
         [3,2]  (3,6,1,1)  (3,6,1,1): * ~ (1,6,1,3), _* ~ (1,6,1,3)\n\
         [5,2]  (1,6,1,1)  (1,6,1,1): * ~ (1,6,1,1), _* ~ (1,6,1,1)\n\
         [5,4]  (1,6,1,3)  (1,6,1,3): * ~ (3,6,1,1), _* ~ (1,6,1,3)\n"
    );
}

#[test]
fn similar_uses_a_separator() {
    assert_eq!(code(&run(&["similar", "1", "2", "--", "2", "3"])), 0);
    let o = run(&["similar", "1", "2", "--", "1", "3"]);
    assert_eq!((code(&o), stdout(&o)), (1, "{1,2} !~ {1,3}\n".to_string()));
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(code(&run(&["no-such-verb"])), 2);
    assert_eq!(code(&run(&["check4v", "1", "x"])), 2);
    assert_eq!(code(&run(&["iso", "/nonexistent/space.txt"])), 2);
    let o = run(&["milliken", "build", "999", "--depth", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown coding variant"));
}

#[test]
fn resource_limit_exits_2() {
    let o = run(&["urysohn", "1", "2", "--cap", "3", "--least", "--limit", "32"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource limit"));
}

#[test]
fn katetov_verdicts() {
    let x = file("path3.txt", PATH3);
    let o = run(&["katetov", &x, "1", "1", "1"]);
    assert_eq!((code(&o), stdout(&o)), (0, "katetov\n".to_string()));
    let o = run(&["katetov", &x, "1", "3", "1"]);
    assert_eq!((code(&o), stdout(&o)), (1, "not katetov: pair (0,1)\n".to_string()));
    let o = run(&["extend", &x, "1", "1", "1"]);
    assert_eq!(stdout(&o), "points: 4\n0 1 2 1\n1 0 1 1\n2 1 0 1\n1 1 1 0\n");
}

#[test]
fn urysohn_output_reparses_with_provenance_as_comments() {
    let o = run(&["urysohn", "1", "2", "--cap", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("# ")));
    let x = parse_space(&text).unwrap();
    assert!(x.len() >= 7);
    let o = run(&["--json", "urysohn", "1", "2", "--cap", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let m: MatrixJson = serde_json::from_value(v["space"].clone()).unwrap();
    assert_eq!(parse_space(&json_to_text(&m)).unwrap(), x);
}

#[test]
fn json_and_text_agree_for_iso() {
    let x = file("path3-iso.txt", PATH3);
    let text = stdout(&run(&["iso", &x]));
    assert!(text.starts_with("isometries: 2\n"));
    let v: serde_json::Value = serde_json::from_slice(&run(&["--json", "iso", &x]).stdout).unwrap();
    assert_eq!(v["order"], 2);
    let m: MatrixJson = serde_json::from_value(v["canonical"].clone()).unwrap();
    let canonical_text = text.split_once("points:").map(|(_, rest)| format!("points:{rest}")).unwrap();
    assert_eq!(parse_space(&json_to_text(&m)).unwrap(), parse_space(&canonical_text).unwrap());
}

#[test]
fn arrow_reports_a_coloring_when_false() {
    let k = |n: usize| {
        let rows: Vec<String> =
            (0..n).map(|i| (0..n).map(|j| if i == j { "0" } else { "1" }).collect::<Vec<_>>().join(" ")).collect();
        format!("points: {n}\n{}\n", rows.join("\n"))
    };
    let (k5, k3, k2) = (file("k5.txt", &k(5)), file("k3.txt", &k(3)), file("k2.txt", &k(2)));
    let o = run(&["arrow", &k5, &k3, &k2]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("arrow fails: coloring "));
    let k6 = file("k6.txt", &k(6));
    assert_eq!(code(&run(&["arrow", &k6, &k3, &k2])), 0);
}

#[test]
fn ultrametric_verbs() {
    let u = file("u4.txt", "points: 4\n0 1 2 2\n1 0 2 2\n2 2 0 1\n2 2 1 0\n");
    let o = run(&["ultra", "degree", &u]);
    assert!(stdout(&o).ends_with("| 8 | 8 | 1\n"), "{}", stdout(&o));
    let o = run(&["ultra", "fichet", &u, "--p", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("exact"));
    let x = file("not-ultra.txt", PATH3);
    assert_eq!(code(&run(&["ultra", "degree", &x])), 1);
}

#[test]
fn degree_table_header() {
    let x = file("path3-degree.txt", PATH3);
    let o = run(&["degree", &x]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(first, "space | LO | iso | degree");
}

#[test]
fn coloring_verbs() {
    let x = file("path3-color.txt", PATH3);
    let p = file("pair.txt", PAIR);
    let o = run(&["color", "indiv", &x, &p]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("colorings 8 monochromatic 6"));
    let o = run(&["--seed", "3", "color", "indiv", &x, &p, "--samples", "5"]);
    assert!(stdout(&o).contains("colorings 5"));
    let o = run(&["color", "greedy", &x, &p, "--coloring", "0,0,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("full copy"));
}

#[test]
fn annulus_names_the_failed_hypothesis() {
    let x = file("line.txt", "points: 3\n0 1/5 1\n1/5 0 4/5\n1 4/5 0\n");
    let o =
        run(&["color", "annulus", &x, "--center", "0", "--chain", "1,2", "--r", "2/5", "--n", "1", "--eps", "1/20"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("start-inside"));
}

#[test]
fn hedgehog_verify_and_tamper() {
    let p = file("prefix.txt", "points: 3\n0 1/2 1\n1/2 0 1/2\n1 1/2 0\n");
    let o = run(&["hedgehog", "verify", &p, "--m", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["hedgehog", "verify", &p, "--m", "2", "--tamper", "0=1/3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("labelNotPreserved"));
}

#[test]
fn milliken_build_and_embed() {
    let o = run(&["milliken", "build", "134", "--depth", "3"]);
    assert_eq!((code(&o), stdout(&o)), (0, "134 depth 3: 105 points, metric\n".to_string()));
    let far = file("far.txt", "points: 4\n0 9 9 9\n9 0 9 9\n9 9 0 9\n9 9 9 0\n");
    let o = run(&["milliken", "embed", "2379", &far, "--depth", "5"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "depth exhausted: greedy construction needs depth 7, have 5\n");
    let o = run(&["milliken", "embed", "2379", &far, "--depth", "5", "--search"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("embedded: "));
}
