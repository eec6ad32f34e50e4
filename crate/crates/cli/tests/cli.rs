// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

fn rdfvc(repo: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdfvc"))
        .arg("--repo")
        .arg(repo)
        .arg("--porcelain")
        .args(args)
        .env_remove("RDFVC_SERVER")
        .env("RDFVC_AUTHOR", "cli-test")
        .output()
        .unwrap()
}

fn ok(repo: &Path, args: &[&str]) -> String {
    let out = rdfvc(repo, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn conflicted_merge_then_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("r");
    let d = dir.path();
    assert_eq!(ok(&repo, &["init"]), "init\tmain\n");
    let base = write(d, "base.nq", "<http://e/a> <http://e/p> <http://e/o> .\n");
    let with_b = write(d, "b.nq", "<http://e/a> <http://e/p> <http://e/o> .\n<http://e/b> <http://e/p> _:x .\n");
    let first = ok(&repo, &["commit", "-m", "base", "-f", &base]);
    assert!(first.starts_with("commit\t"));
    assert!(first.ends_with("\t1\t0\n"));
    ok(&repo, &["branch", "side"]);
    ok(&repo, &["commit", "-m", "add b", "-f", &with_b]);
    ok(&repo, &["commit", "-m", "drop b", "-f", &base]);
    ok(&repo, &["checkout", "side"]);
    ok(&repo, &["commit", "-m", "side b", "-f", &with_b]);
    ok(&repo, &["checkout", "main"]);

    let conflicts = d.join("conflicts.txt");
    let out = rdfvc(&repo, &["merge", "side", "--strategy", "touch", "-o", conflicts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = stdout.lines().collect();
    assert!(lines[0].starts_with("merge\tconflicts\t"));
    assert!(lines[0].ends_with("\t1"));
    let class = lines[1].strip_prefix("conflict\ttheirs-added-ours-removed\t").unwrap();
    assert!(std::fs::read_to_string(&conflicts).unwrap().contains(class));
    assert!(ok(&repo, &["status"]).lines().nth(1).unwrap().starts_with("pending\t"));
    assert_eq!(rdfvc(&repo, &["commit", "-m", "x", "-f", &base]).status.code(), Some(1));

    let resolution = write(d, "res.txt", &format!("keep {class}\n"));
    let resolved = ok(&repo, &["resolve", "-f", &resolution]);
    assert!(resolved.starts_with("resolve\t"));
    let log = ok(&repo, &["log"]);
    let top: Vec<_> = log.lines().next().unwrap().split('\t').collect();
    assert_eq!(top[1].split(',').count(), 2);
    assert_eq!((top[3], top[4]), ("cli-test", "touch+manual"));
    assert!(ok(&repo, &["show"]).contains("<http://e/b> <http://e/p> _:"));

    let first_id = first.split('\t').nth(1).unwrap();
    let diff = ok(&repo, &["diff", first_id, "main"]);
    let mut lines = diff.lines();
    assert_eq!(lines.next(), Some("diff\t1\t0"));
    assert!(lines.next().unwrap().starts_with("A <http://e/b> <http://e/p> _:"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("r");
    assert_eq!(rdfvc(&repo, &["status"]).status.code(), Some(1));
    assert_eq!(rdfvc(&repo, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(rdfvc(&repo, &["--help"]).status.code(), Some(0));
    assert_eq!(rdfvc(&repo, &["merge"]).status.code(), Some(1));
    ok(&repo, &["init"]);
    assert_eq!(rdfvc(&repo, &["merge", "main", "--strategy", "nope"]).status.code(), Some(1));
    assert_eq!(rdfvc(&repo, &["merge", "--abort"]).status.code(), Some(1));
}

#[test]
fn generate_replay_and_fuzz() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = d.join("data.nq");
    let log = d.join("log.txt");
    ok(d, &["generate", "dataset", "--size", "300", "--seed", "5", "-o", data.to_str().unwrap()]);
    let again = ok(d, &["generate", "dataset", "--size", "300", "--seed", "5"]);
    assert_eq!(std::fs::read_to_string(&data).unwrap(), again);
    assert_eq!(again.lines().count(), 300);
    ok(d, &["generate", "log", "-i", data.to_str().unwrap(), "--transactions", "30", "--seed", "6", "-o", log.to_str().unwrap()]);
    let replay = ok(d, &["verify-replay", "-i", data.to_str().unwrap(), "-l", log.to_str().unwrap()]);
    let fields: Vec<usize> = replay.trim().split('\t').skip(1).map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 30);
    assert_eq!(fields[1] + fields[2], 30);
    assert_eq!(fields[3], 0);

    let fuzz = ok(d, &["fuzz-merge", "-n", "5", "--seed", "7", "--base-size", "60"]);
    let fields: Vec<_> = fuzz.trim().split('\t').collect();
    assert_eq!(&fields[..3], ["fuzz", "5", "0"]);
    assert_eq!(fuzz, ok(d, &["fuzz-merge", "-n", "5", "--seed", "7", "--base-size", "60"]));
}

#[test]
fn replay_reports_a_broken_log() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = write(d, "d.nq", "<http://e/a> <http://e/p> <http://e/o> .\n");
    let log = write(d, "l.txt", "A <http://e/a> <http://e/p> \n");
    assert_eq!(rdfvc(d, &["verify-replay", "-i", &data, "-l", &log]).status.code(), Some(1));
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn cli_against_a_running_service() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("served");
    let mut child = Command::new(env!("CARGO_BIN_EXE_rdfvc"))
        .arg("--repo")
        .arg(&repo)
        .args(["serve", "--addr", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let _server = Server(child);
    let url = line.trim().strip_prefix("listening on ").unwrap().to_owned();

    let elsewhere = dir.path().join("not-a-repo");
    let remote = |args: &[&str]| {
        let mut full = vec!["--server", url.as_str()];
        full.extend_from_slice(args);
        rdfvc(&elsewhere, &full)
    };
    assert!(remote(&["init"]).status.success());
    let data = write(dir.path(), "d.nq", "_:a <http://e/p> _:b .\n");
    let out = remote(&["commit", "-m", "over http", "-f", &data]);
    assert!(out.status.success());
    let status = String::from_utf8(remote(&["status"]).stdout).unwrap();
    assert!(status.starts_with("status\tmain\t"));
    assert!(status.ends_with("\t1\t1\n"));
    // The service wrote into its own repository.
    assert!(ok(&repo, &["log"]).contains("over http"));
    assert!(!elsewhere.exists());
}
