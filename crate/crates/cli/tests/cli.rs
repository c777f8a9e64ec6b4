use std::path::Path;
use std::process::{Command, Output};

use ramsey_cli::manifest::{read_manifests, verify};

fn ramsey(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey"))
        .args(args)
        .env("RAMSEY_RUN_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn ramsey_exact_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramsey(dir.path(), &["ramsey", "--red", "P3", "--blue", "P4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["value"], 4);
    assert_eq!(v["status"], "exact");
    let ms = read_manifests(dir.path()).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].command, "ramsey");
    assert!(verify(dir.path(), &ms[0]).unwrap());
    let again = ramsey(dir.path(), &["ramsey", "--red", "P3", "--blue", "P4"]);
    assert_eq!(again.stdout, o.stdout);
    let ms = read_manifests(dir.path()).unwrap();
    assert_eq!(ms.len(), 2);
    assert_eq!(ms[0].result_digest, ms[1].result_digest);
}

#[test]
fn lower_bound_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "tabu",
        "--order",
        "3",
        "--red",
        "P3",
        "--blue",
        "P3",
        "--iters",
        "50",
        "--restarts",
        "2",
    ];
    let o = ramsey(dir.path(), &args);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["status"], "budget-exhausted");
}

#[test]
fn invalid_input_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramsey(dir.path(), &["oracle", "--red", "Q7", "--blue", "P3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ramsey(
        dir.path(),
        &["search", "--order", "10", "--red", "P3", "--blue", "P3"],
    );
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    let o = ramsey(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "oracle",
            "--red",
            "P3",
            "--blue",
            "P3",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn oracle_and_objective() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramsey(dir.path(), &["oracle", "--red", "P6", "--blue", "P6"]);
    let v = stdout_json(&o);
    let exact: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .filter(|x| x["kind"] == "exact")
        .map(|x| x["source"].as_str().unwrap())
        .collect();
    assert_eq!(exact, ["paths", "burr-erdos"]);
    let o = ramsey(
        dir.path(),
        &[
            "objective",
            "--order",
            "3",
            "--red",
            "P3",
            "--blue",
            "P3",
            "--bits",
            "111",
        ],
    );
    assert_eq!(stdout_json(&o)["total"], 1);
}

#[test]
fn enumerate_with_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let full = stdout_json(&ramsey(dir.path(), &["enumerate", "--order", "6"]));
    assert_eq!(full["classes"], 156);
    let first = stdout_json(&ramsey(
        dir.path(),
        &["enumerate", "--order", "6", "--limit", "100"],
    ));
    assert_eq!(first["finished"], false);
    let token = first["checkpoint"].as_str().unwrap();
    let rest = stdout_json(&ramsey(dir.path(), &["enumerate", "--resume", token]));
    assert_eq!(rest["finished"], true);
    assert_eq!(
        first["classes"].as_u64().unwrap() + rest["classes"].as_u64().unwrap(),
        156
    );
}

#[test]
fn search_writes_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.txt");
    let o = ramsey(
        dir.path(),
        &[
            "search",
            "--order",
            "5",
            "--red",
            "K3",
            "--blue",
            "K3",
            "--witness-out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    let c: ramsey_core::Coloring = lines[0].parse().unwrap();
    assert_eq!(c.red_graph().edge_count(), 5);
}

#[test]
fn table_and_trees() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramsey(dir.path(), &["table", "--orders", "4", "4", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = ramsey_cli::table::parse_csv(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(doc.cells.len(), 3);
    let o = ramsey(dir.path(), &["trees", "--order", "6"]);
    assert_eq!(stdout_json(&o).as_array().unwrap().len(), 6);
}

#[test]
fn aqo_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramsey(
        dir.path(),
        &[
            "aqo",
            "--red",
            "P3",
            "--blue",
            "K3",
            "--order",
            "3",
            "--runtime",
            "10",
            "--steps",
            "200",
            "--shots",
            "8",
            "--sweep",
            "1,5,25",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("kind,index,runtime,objective,overlap"));
    assert_eq!(text.lines().filter(|l| l.starts_with("sweep")).count(), 3);
    let o = ramsey(
        dir.path(),
        &["aqo", "--red", "P3", "--blue", "P3", "--ramsey"],
    );
    assert_eq!(stdout_json(&o)["result"]["value"], 3);
}
