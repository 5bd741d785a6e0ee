// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use smtquery::testkit::{mock_solver, FIXTURES};

struct Env {
    dir: tempfile::TempDir,
}

impl Env {
    /// A copy of the fixture corpus under `smt/` in a fresh directory.
    fn new() -> Env {
        let dir = tempfile::tempdir().unwrap();
        copy_tree(Path::new(FIXTURES), &dir.path().join("smt"));
        Env { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn cmd(&self, args: &[&str]) -> Command {
        let mut c = Command::new(env!("CARGO_BIN_EXE_smtquery"));
        c.current_dir(self.path())
            .args(["--root", "smt", "--jobs", "2"])
            .args(args);
        c
    }

    fn run(&self, args: &[&str]) -> Output {
        self.cmd(args).output().unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}\n{}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }
}

fn copy_tree(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        let target = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_tree(&p, &target);
        } else {
            std::fs::copy(&p, &target).unwrap();
        }
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn no_arguments_prints_help_and_fails() {
    let out = Command::new(env!("CARGO_BIN_EXE_smtquery"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    let text =
        String::from_utf8_lossy(&out.stderr).into_owned() + &String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"));
    assert!(
        text.contains("isPatternMatching")
            && text.contains("Restrict2WEQ")
            && text.contains("VarDepPlot")
    );
}

#[test]
fn usage_and_runtime_errors_have_distinct_codes() {
    let env = Env::new();
    assert_eq!(code(&env.run(&["frobnicate"])), 1);
    assert_eq!(code(&env.run(&["--jobs", "many", "initdb"])), 1);
    assert_eq!(code(&env.run(&["--help"])), 0);
    // No database yet.
    assert_eq!(
        code(&env.run(&["qlang", "--query", "Select Name From *"])),
        2
    );
    env.ok(&["initdb"]);
    assert_eq!(code(&env.run(&["initdb"])), 2);
    env.ok(&["initdb", "--force"]);
    let bad = env.run(&["qlang", "--query", "Select Name From * Where (hasWEQ And"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("column"));
}

#[test]
fn initdb_and_allocate_new() {
    let env = Env::new();
    assert_eq!(
        env.ok(&["initdb"]),
        "Initialized data/smtquery.db with 20 instance(s)\n"
    );
    assert!(env.path().join("data/smtquery.db").exists());
    assert_eq!(env.ok(&["allocateNew"]), "0 new instance(s)\n");
    let extra = env.path().join("smt/extra/t1");
    std::fs::create_dir_all(&extra).unwrap();
    std::fs::write(
        extra.join("n.smt2"),
        "(declare-fun x () String)(assert (= x \"a\"))",
    )
    .unwrap();
    assert_eq!(env.ok(&["allocateNew"]), "1 new instance(s)\n");
    assert_eq!(
        env.ok(&["qlang", "--query", "Select Name From extra"]),
        "extra:t1:n.smt2\n"
    );
}

#[test]
fn translate25_ingests_converted_copies() {
    let env = Env::new();
    let old = env.path().join("smt/legacy/t");
    std::fs::create_dir_all(&old).unwrap();
    let text = "(declare-fun x () String)(assert (str.in.re x (str.to.re \"\\x41\")))";
    std::fs::write(old.join("old.smt2"), text).unwrap();
    env.ok(&["--translate25", "initdb"]);
    assert_eq!(std::fs::read_to_string(old.join("old.smt2")).unwrap(), text);
    let got = env.ok(&[
        "qlang",
        "--query",
        "Select Content From legacy Where hasRegex",
    ]);
    assert!(
        got.contains("(str.in_re x (str.to_re \"\\u{41}\"))"),
        "{got}"
    );
}

#[test]
fn one_shot_output_equals_repl_output() {
    let env = Env::new();
    env.ok(&["initdb"]);
    for q in [
        "Select Name From * Where (isQuadratic And (Not hasRegex))",
        "Extract Count From woorpje, kaluza:regex Where hasWEQ",
        "Select Hash From pisa",
    ] {
        let one_shot = env.ok(&["qlang", "--query", q]);
        let mut child = env
            .cmd(&["qlang"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        child
            .stdin
            .take()
            .unwrap()
            .write_all(format!("{q}\nexit\n").as_bytes())
            .unwrap();
        let out = child.wait_with_output().unwrap();
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap(), one_shot, "{q}");
    }
}

fn solvers_conf(env: &Env) -> PathBuf {
    let bin = env.path().join("bin");
    std::fs::create_dir_all(&bin).unwrap();
    mock_solver(
        &bin,
        "mocksat",
        "echo sat; echo '((define-fun X () String \"\"))'",
    );
    mock_solver(&bin, "mockunknown", "echo unknown");
    let conf = env.path().join("solvers.conf");
    std::fs::write(
        &conf,
        "MOCKSAT | bin/mocksat | {file} | 5\nMOCKUNK | bin/mockunknown\n",
    )
    .unwrap();
    conf
}

#[test]
fn smtsolver_and_update_results() {
    let env = Env::new();
    solvers_conf(&env);
    env.ok(&["initdb"]);
    let out = env.ok(&["smtsolver", "MOCKSAT", "woorpje", "track01", "xyz.smt2"]);
    let first = out.lines().next().unwrap();
    let (verdict, time) = first.split_once(' ').unwrap();
    assert_eq!(verdict, "Satisfied");
    assert!(
        time.ends_with('s') && time.trim_end_matches('s').parse::<f64>().is_ok(),
        "{out}"
    );
    assert_eq!(
        code(&env.run(&["smtsolver", "NOPE", "woorpje", "track01", "xyz.smt2"])),
        2
    );
    assert_eq!(
        code(&env.run(&["smtsolver", "MOCKSAT", "woorpje", "track01", "missing.smt2"])),
        2
    );

    assert_eq!(
        env.ok(&["updateResults"]),
        "40 run(s), 40 validation record(s)\n"
    );
    assert_eq!(
        env.ok(&["updateResults"]),
        "0 run(s), 0 validation record(s)\n"
    );
    let table = env.ok(&[
        "qlang",
        "--query",
        "Extract ResultsTable From woorpje:track01",
    ]);
    let sat_row = table.lines().find(|l| l.starts_with("SAT")).unwrap();
    assert_eq!(
        sat_row.split_whitespace().collect::<Vec<_>>(),
        ["SAT", "3", "0"]
    );
    let names = env.ok(&[
        "qlang",
        "--query",
        "Select Name From slog Where isSAT(mocksat)",
    ]);
    assert_eq!(names.lines().count(), 4);
}

#[test]
fn config_file_supplies_defaults() {
    let env = Env::new();
    std::fs::write(
        env.path().join("smtquery.toml"),
        "root = \"smt\"\ndb = \"elsewhere/q.db\"\njobs = 1\noutput = \"exports\"\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_smtquery"))
        .current_dir(env.path())
        .arg("initdb")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(env.path().join("elsewhere/q.db").exists());
    let out = Command::new(env!("CARGO_BIN_EXE_smtquery"))
        .current_dir(env.path())
        .args(["qlang", "--query", "Extract VarDepPlot From appendix"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env.path().join("exports").is_dir());

    std::fs::write(env.path().join("smtquery.toml"), "colour = \"blue\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_smtquery"))
        .current_dir(env.path())
        .arg("allocateNew")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
