use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value as Json;

fn natcalc() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_natcalc"));
    cmd.env_remove("NATCALC_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    natcalc().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn corpus(name: &str) -> String {
    corpus_dir().join(format!("{name}.nat")).to_string_lossy().into_owned()
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn term_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn export_json(args: &[&str]) -> Json {
    let out = run(&[&["export"], args].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn step_lists_the_sending_rule() {
    let dir = tempfile::tempdir().unwrap();
    let f = term_file(dir.path(), "send.nat", "a<()>");
    let out = run(&["step", &f]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "a <| () -> 0  [Sending]\n");
}

#[test]
fn step_on_stop_prints_nothing() {
    let out = run(&["step", &corpus("stop")]);
    assert_eq!((code(&out), stdout(&out)), (0, String::new()));
}

#[test]
fn proper_step_flags_the_unpublished_opening() {
    let dir = tempfile::tempdir().unwrap();
    let f = term_file(dir.path(), "defect.nat", "new b. a<()>");
    let out = run(&["step", &f, "--system", "proper"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("a <| nu c2. () -> 0"), "{text}");
    assert!(text.contains("warning: opens c2 without publishing it"), "{text}");
}

#[test]
fn input_errors_exit_one_and_budget_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = term_file(dir.path(), "bad.nat", "a(x");
    let out = run(&["step", &bad]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error at 1:4"));
    assert_eq!(code(&run(&["step", "missing.nat"])), 1);
    assert_eq!(code(&run(&["step", &corpus("stop"), "--term", "1"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    let deep = term_file(dir.path(), "deep.nat", "new x. new y. a<(x, y)>");
    assert_eq!(code(&run(&["step", &deep, "--fresh-budget", "1"])), 2);
}

#[test]
fn bisim_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["bisim", &corpus("comm"), &corpus("comm")])), 0);
    let relay = term_file(dir.path(), "relay.nat", "new c. (c<()> | c(y). a<y>)");
    let plain = term_file(dir.path(), "plain.nat", "new c. a<()>");
    let strong = run(&["bisim", &relay, &plain, "--system", "proper"]);
    assert_eq!(code(&strong), 3);
    assert!(stdout(&strong).contains("left plays tau -> p1"), "{}", stdout(&strong));
    assert_eq!(code(&run(&["bisim", &relay, &plain, "--system", "proper", "--mode", "weak"])), 0);
    let repl = term_file(dir.path(), "repl.nat", "!a<()>");
    let out = run(&["bisim", &repl, &repl]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("inconclusive: incomplete exploration"));
    assert_eq!(code(&run(&["bisim", &repl, &repl, "--method", "bounded:3"])), 0);
    assert_eq!(code(&run(&["bisim", &repl, &repl, "--method", "bounded:x"])), 1);
}

#[test]
fn axiom_suites_pass_and_mutants_fail_with_replayable_counterexamples() {
    let out = run(&["axioms", "--cases", "50"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = run(&["axioms", "--structure", "normal-derived", "--cases", "50"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("derived fuse equals direct fuse: pass"));
    assert_eq!(code(&run(&["axioms", "--structure", "proper", "--cases", "50"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["axioms", "--mutant", "lift", "--cases", "50", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(stdout(&out).contains("composition preservation: FAIL"));
    assert!(stdout(&out).contains("replay: reproduced"));
    let json: Json = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["passed"], false);
    let failed: Vec<_> = json["results"].as_array().unwrap().iter().filter(|r| r["passed"] == false).collect();
    assert!(failed.iter().all(|r| r["counterexample"]["replayed"] == true));
    assert_eq!(code(&run(&["axioms", "--mutant", "silent", "--cases", "20"])), 5);
}

#[test]
fn axioms_accept_corpus_files_as_carrier() {
    let out = run(&["axioms", &corpus("comm"), &corpus("private_tau"), "--cases", "30", "--max-terms", "6"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("basic axioms over 6 terms, 30 sampled relations"));
}

#[test]
fn export_of_stop_is_one_complete_state() {
    let json = export_json(&[&corpus("stop")]);
    assert_eq!(json["states"].as_array().unwrap().len(), 1);
    assert_eq!(json["edges"].as_array().unwrap().len(), 0);
    assert_eq!(json["complete"], true);
}

#[test]
fn export_of_communication_matches_hand_enumeration() {
    // a<()> | a(x). 0 with a public, one more pool channel and unit data:
    // states 0 initial, 1 after the send, 2 after a receive, 3 both done
    let json = export_json(&[&corpus("comm")]);
    assert_eq!(json["states"].as_array().unwrap().len(), 4);
    let mut edges: Vec<(u64, String, u64)> = json["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (e["from"].as_u64().unwrap(), e["label"]["kind"].as_str().unwrap().to_string(), e["to"].as_u64().unwrap())
        })
        .collect();
    edges.sort();
    let r = |f, t| (f, "receive".to_string(), t);
    let mut expected = vec![
        (0, "send".to_string(), 1),
        r(0, 2),
        r(0, 2),
        r(0, 2),
        (0, "tau".to_string(), 3),
        r(1, 3),
        r(1, 3),
        r(1, 3),
        (2, "send".to_string(), 3),
    ];
    expected.sort();
    assert_eq!(edges, expected);
}

fn tau_closure(edges: &[Json], states: usize) -> BTreeSet<(u64, u64)> {
    let mut succ: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for e in edges.iter().filter(|e| e["weak"] == false && e["label"]["kind"] == "tau") {
        succ.entry(e["from"].as_u64().unwrap()).or_default().push(e["to"].as_u64().unwrap());
    }
    let mut out = BTreeSet::new();
    for s in 0..states as u64 {
        let mut queue = VecDeque::from([s]);
        let mut seen = BTreeSet::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in succ.get(&x).into_iter().flatten() {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out.extend(seen.into_iter().map(|t| (s, t)));
    }
    out
}

#[test]
fn weak_export_adds_exactly_the_tau_closure() {
    for f in corpus_files() {
        for system in ["basic", "proper"] {
            let json = export_json(&[f.to_str().unwrap(), "--weak", "--system", system]);
            let edges = json["edges"].as_array().unwrap();
            let taus: BTreeSet<_> = edges
                .iter()
                .filter(|e| e["label"]["kind"] == "tau")
                .map(|e| (e["from"].as_u64().unwrap(), e["to"].as_u64().unwrap()))
                .collect();
            assert_eq!(taus, tau_closure(edges, json["states"].as_array().unwrap().len()), "{}", f.display());
        }
    }
}

#[test]
fn exports_validate_against_the_shipped_schema() {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/export.schema.json");
    let schema: Json = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for f in corpus_files() {
        for system in ["basic", "proper"] {
            for weak in [false, true] {
                let mut args = vec![f.to_str().unwrap(), "--system", system];
                if weak {
                    args.push("--weak");
                }
                let json = export_json(&args);
                let errors: Vec<_> = validator.iter_errors(&json).map(|e| e.to_string()).collect();
                assert!(errors.is_empty(), "{} {system}: {errors:?}", f.display());
            }
        }
    }
}

#[test]
fn outputs_are_byte_deterministic() {
    for args in [
        vec!["export".to_string(), corpus("race"), "--format".into(), "dot".into(), "--weak".into()],
        vec!["trace".to_string(), corpus("race"), "--walks".into(), "3".into(), "--seed".into(), "7".into()],
        vec!["axioms".to_string(), "--mutant".into(), "fuse".into(), "--cases".into(), "20".into()],
    ] {
        let a = natcalc().args(&args).output().unwrap();
        let b = natcalc().args(&args).output().unwrap();
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn trace_seeds_change_walks() {
    let walks = |seed: &str| stdout(&run(&["trace", &corpus("race"), "--walks", "5", "--seed", seed]));
    assert_ne!(walks("1"), walks("2"));
}

#[test]
fn exhaustive_trace_lists_every_maximal_path() {
    let out = run(&["trace", &corpus("send_a"), "--exhaustive"]);
    assert_eq!(stdout(&out), "a <| ()\n");
}

#[test]
fn config_file_applies_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = term_file(dir.path(), "natcalc.toml", "[limits]\nmax_states = 2\n\n[universe]\ndata = [\"()\", true]\n");
    let comm = corpus("comm");
    assert_eq!(code(&run(&["--config", &cfg, "bisim", &comm, &comm])), 4);
    assert_eq!(code(&run(&["--config", &cfg, "--max-states", "100", "bisim", &comm, &comm])), 0);
    let via_env = natcalc().env("NATCALC_CONFIG", &cfg).args(["bisim", &comm, &comm]).output().unwrap();
    assert_eq!(code(&via_env), 4);
    let out = run(&["--config", &cfg, "step", &corpus("forward")]);
    assert!(stdout(&out).contains("a |> true"), "{}", stdout(&out));
    let broken = term_file(dir.path(), "broken.toml", "[universe]\npool = \"many\"\n");
    assert_eq!(code(&run(&["--config", &broken, "step", &comm])), 1);
    let unknown = term_file(dir.path(), "unknown.toml", "[universe]\ndata = [\"seven\"]\n");
    assert_eq!(code(&run(&["--config", &unknown, "step", &comm])), 1);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bisim"));
    assert!(!stdout(&out).contains("mutant"));
}
