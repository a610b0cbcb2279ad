use std::path::Path;
use std::process::{Command, Output};

fn grouplaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouplaw")).args(args).env_remove("GROUPLAW_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exact_commuting_probability() {
    let o = grouplaw(&["exact", "--set", "group=sym(3)", "--set", "law=[x1,x2]"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("sym(3),6,1/2,"), "{}", stdout(&o));
}

#[test]
fn dry_run_echoes_config() {
    let o = grouplaw(&["estimate", "--dry-run", "--seed", "9", "--set", "group=lattice(2)", "--set", "law=[x1,x2]"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("kind = estimate") && out.contains("walk.seed = 9"), "{out}");
    assert!(stderr(&o).contains("config ok"));
}

fn files(dir: &Path) -> Vec<String> {
    ["results.jsonl", "summary.csv", "provenance.json"].iter().map(|f| std::fs::read_to_string(dir.join(f)).unwrap()).collect()
}

#[test]
fn reports_are_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let common = ["--set", "group=heisenberg(2)", "--set", "law=[x1,x2]", "--set", "walk.trials=400", "--set", "walk.steps=30"];
    let first: Vec<&str> = ["estimate", "--threads", "1", "--out", a.to_str().unwrap()].iter().copied().chain(common).collect();
    assert!(grouplaw(&first).status.success());
    let written = files(&a);
    assert!(written[0].contains("\"p_hat\""));

    let config = dir.path().join("echo.cfg");
    let provenance: serde_json::Value = serde_json::from_str(&written[2]).unwrap();
    std::fs::write(&config, provenance["config"].as_str().unwrap()).unwrap();
    let second = grouplaw(&["estimate", "--threads", "2", "--config", config.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(files(&b)[0], written[0]);
    assert_eq!(files(&b)[1], written[1]);
}

#[test]
fn bad_input_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    std::fs::write(&config, "kind = estimate\ngroup = lattice(2)\nwalk.trails = 10\n").unwrap();
    let o = grouplaw(&["estimate", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = grouplaw(&["exact", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = grouplaw(&["reproduce", "4.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown section"), "{}", stderr(&o));
}
