//! The command-line binary, run as a subprocess.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use trirecom::cli::files::{StateFile, TraceFile};
use trirecom::SizeTargets;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trirecom"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn adjacent_ground_states_are_one_step_apart() {
    let o = run(&["path", "--n", "8", "--k", "12,12,12", "--ground", "123", "--ground", "213"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "steps: 1\nbudget ratio: 0.0020\n");
}

#[test]
fn path_from_a_state_to_itself_is_empty() {
    let file = scratch("self.json");
    let states = common::samples(6, SizeTargets::new(7, 7, 7), 1, 21);
    std::fs::write(&file, StateFile::from_partition(&states[0]).to_json()).unwrap();
    let out = scratch("self_trace.json");
    let o = run(&["path", "--n", "6", "--k", "7,7,7", "--from", s(&file), "--to", s(&file), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("steps: 0\n"));
    let v = run(&["verify", "--trace", s(&out)]);
    assert_eq!(stdout(&v).lines().next(), Some("ok: 0 steps"));
}

#[test]
fn sampled_pairs_succeed_verify_and_are_deterministic() {
    let states = common::samples(6, SizeTargets::new(6, 7, 8), 8, 4);
    for (j, pair) in states.chunks(2).enumerate() {
        let from = scratch(&format!("from{j}.json"));
        let to = scratch(&format!("to{j}.json"));
        std::fs::write(&from, StateFile::from_partition(&pair[0]).to_json()).unwrap();
        std::fs::write(&to, StateFile::from_partition(&pair[1]).to_json()).unwrap();
        let mut bytes = Vec::new();
        for attempt in 0..2 {
            let out = scratch(&format!("pair{j}_{attempt}.json"));
            let args = ["path", "--n", "6", "--k", "6,7,8", "--from", s(&from), "--to", s(&to), "--out", s(&out)];
            let o = run(&args);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            let v = run(&["verify", "--trace", s(&out)]);
            assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
            assert!(stdout(&v).contains(&format!("last: {}", pair[1].label_string())));
            bytes.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(bytes[0], bytes[1], "trace files differ between runs");
    }
}

#[test]
fn flip_granularity_has_at_least_as_many_steps() {
    let count = |g: &str| -> usize {
        let o = run(&["path", "--n", "6", "--k", "7,7,7", "--ground", "123", "--ground", "321", "--granularity", g]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o).lines().next().unwrap().trim_start_matches("steps: ").parse().unwrap()
    };
    assert!(count("flip") >= count("recom"));
}

#[test]
fn corrupted_trace_fails_with_its_index() {
    let out = scratch("corrupt.json");
    let o = run(&["path", "--n", "5", "--k", "5,5,5", "--ground", "123", "--ground", "321", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut file: TraceFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.steps.len(), 3);
    file.steps[1].untouched = file.steps[0].untouched;
    std::fs::write(&out, file.to_json()).unwrap();
    let v = run(&["verify", "--trace", s(&out)]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stderr(&v).contains("step 1"), "{}", stderr(&v));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["path", "--n", "5", "--k", "5,5,5", "--ground", "123"],
        vec!["path", "--n", "5", "--k", "5,5", "--ground", "123", "--ground", "321"],
        vec!["path", "--n", "5", "--k", "5,5,5", "--ground", "124", "--ground", "321"],
        vec!["enumerate", "--n", "4", "--k", "4,3,3", "--slack", "2"],
        vec!["render", "--out", "x.svg"],
        vec!["no-such-command"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn enumerate_and_stats_report_the_state_space() {
    let graph = scratch("graph.json");
    let o = run(&["enumerate", "--n", "4", "--k", "4,3,3", "--slack", "1", "--out", s(&graph)]);
    assert_eq!(stdout(&o), "states: 510\nedges: 7347\ncomponents: 1\n");
    let data: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(data["states"].as_array().unwrap().len(), 510);
    let o = run(&["stats", "--n", "3", "--k", "2,2,2", "--slack", "0"]);
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["components"], 2);
    assert_eq!(summary["rigid"], 12);
}

#[test]
fn rigid_demo_shows_a_state_without_moves() {
    let o = run(&["rigid-demo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("moves changing a district: 0"), "{text}");
}

#[test]
fn render_draws_one_frame_per_step() {
    let trace = scratch("render_trace.json");
    run(&["path", "--n", "5", "--k", "5,5,5", "--ground", "123", "--ground", "321", "--out", s(&trace)]);
    let svg = scratch("render.svg");
    let o = run(&["render", "--trace", s(&trace), "--out", s(&svg)]);
    assert_eq!(stdout(&o), "frames: 4\n");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 4 * 15);

    let ground = scratch("ground.svg");
    let o = run(&["render", "--ground", "123", "--n", "8", "--k", "12,12,12", "--out", s(&ground)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&ground).unwrap();
    assert_eq!(text.matches("fill=\"#d62728\"").count(), 12);
    assert_eq!(text.matches("fill=\"#1f5fbf\"").count(), 12);
    assert_eq!(text.matches("fill=\"#f2c12e\"").count(), 12);
}
