use std::io::Write;
use std::process::{Command, Output, Stdio};

fn mck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mck")).args(args).output().unwrap()
}

fn mck_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mck"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn out(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn err(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn temp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("mck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

const INTRO: &str = "z:#a, w:#b |- let x,y = z,w in x : #a";

#[test]
fn check_prints_derivation() {
    let o = mck(&["check", "x:a |- \\y:a. x : a -> a"]);
    assert_eq!(code(&o), 0);
    assert_eq!(out(&o), "[Abs] x:a |- \\y:a. x : a -> a\n  [Id] x:a, y:a |- x : a\n");
    let o = mck(&["check", "x:a |- \\y:a. x"]);
    assert_eq!(code(&o), 2, "a bare term needs its type");
}

#[test]
fn check_rejects_wrong_type_and_bad_syntax() {
    let o = mck(&["check", "x:a |- \\y:a. x : a"]);
    assert_eq!(code(&o), 1);
    assert!(err(&o).contains("type error"));
    let o = mck(&["check", "x:a |- \\y:a. x ) : a"]);
    assert_eq!(code(&o), 2);
    assert!(err(&o).contains('^'), "{}", err(&o));
}

#[test]
fn nf_golden() {
    let o = mck(&["nf", INTRO]);
    assert_eq!((code(&o), out(&o)), (0, "let x = z in x\n".into()));
}

#[test]
fn normalize_strategies_and_trace() {
    let input = "z:#a, w:#b |- (\\u:#a. let x,y = u,w in x) z : #a";
    for s in ["leftmost", "rightmost", "random=7"] {
        let o = mck(&["normalize", "--strategy", s, input]);
        assert_eq!(out(&o), "z:#a, w:#b |- let x = z in x : #a\n", "{s}");
    }
    let o = mck(&["normalize", "--trace", input]);
    assert_eq!(
        out(&o),
        "0  (\\u:#a. let x,y = u,w in x) z\n1  let x,y = z,w in x  [beta1 at ε]\n2  let x = z in x  [kappa1 at ε on binding 1]\n"
    );
    let o = mck(&["normalize", "--max-steps", "1", input]);
    assert_eq!(code(&o), 1);
    let o = mck(&["normalize", "--strategy", "sideways", input]);
    assert_eq!(code(&o), 2);
}

#[test]
fn redexes_and_measures() {
    let o = mck(&["redexes", "z:#a, w:#b |- (\\u:#a. let x,y = u,w in x) z : #a"]);
    let lines: Vec<String> = out(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "beta1 at ε");
    assert!(lines.iter().any(|l| l.starts_with("kappa1")));
    let o = mck(&["measures", "f:#a -> #b |- f : #a -> #b"]);
    assert_eq!(out(&o), "eta1 1\neta2 0\nkappa 0\n");
}

#[test]
fn fck_text_and_json() {
    let o = mck(&["fck", "f:a -> b, x:a |- f x : b"]);
    assert_eq!(out(&o), "[->L^ax] f:a -> b, x:a |- f x : b\n  [ax] f:a -> b, x:a |- x : a\n");
    let o = mck(&["fck", "--json", "z:#a, w:#b |- let x = z in x : #a"]);
    let v: serde_json::Value = serde_json::from_str(&out(&o)).unwrap();
    assert_eq!(v["rule"], "K#");
    assert_eq!(v["premises"][0]["rule"], "ax");
    let o = mck(&["fck", INTRO]);
    assert_eq!(code(&o), 1, "not a normal form");
}

#[test]
fn arena_formats() {
    let o = mck(&["arena", "#a -> a"]);
    assert!(out(&o).contains("01 ∼ 1") || out(&o).contains("00 ∼ 10"), "{}", out(&o));
    let o = mck(&["arena", "--format", "dot", "#a -> a"]);
    assert_eq!(out(&o).matches("solid").count(), 2);
    assert_eq!(out(&o).matches("dashed").count(), 1);
    let o = mck(&["arena", "--format", "json", "#a |- a"]);
    let v: serde_json::Value = serde_json::from_str(&out(&o)).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    let o = mck(&["arena", "--format", "svg", "a"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn strat_unstrat_validate_pipeline() {
    let o = mck(&["strat", INTRO]);
    assert_eq!(code(&o), 0);
    let json = out(&o);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["arena_formula"], "#a -> #b -> #a");
    assert_eq!(v["views"].as_array().unwrap().len(), 3);
    let path = temp("intro.json", &json);
    let o = mck(&["unstrat", "#a, #b |- #a", "--strategy", &path]);
    assert_eq!(out(&o), "v1:#a, v2:#b |- let v3 = v1 in v3 : #a\n");
    let o = mck_stdin(&["unstrat", "#a, #b |- #a", "-s", "-"], &json);
    assert_eq!(code(&o), 0);
    let o = mck_stdin(&["validate-strategy", "#a, #b |- #a", "-s", "-"], &json);
    assert_eq!((code(&o), out(&o)), (0, "wis: true\nwell-batched: true\nlinked: true\n".into()));
    let o = mck(&["validate-strategy", "#a, #b |- #b", "-s", &path]);
    assert_eq!(code(&o), 2, "arena mismatch is a usage error");
}

#[test]
fn validate_rejects_example_strategies() {
    let s1 = r##"{"arena_formula": "#a -> a", "views": [[], [{"vertex": "1", "pointer": null}],
        [{"vertex": "1", "pointer": null}, {"vertex": "10", "pointer": 0}]]}"##;
    let o = mck_stdin(&["validate-strategy", "#a -> a", "-s", "-"], s1);
    assert_eq!(code(&o), 1);
    assert!(out(&o).contains("wis: true\nwell-batched: false"));
    let o = mck_stdin(&["unstrat", "#a -> a", "-s", "-"], s1);
    assert_eq!(code(&o), 1);
    let o = mck_stdin(&["validate-strategy", "#a -> a", "-s", "-"], "{\"views\": 3}");
    assert_eq!(code(&o), 2);
    let o = mck_stdin(&["validate-strategy", "#a -> a", "-s", "-"], &s1.replacen('{', "{\"version\": 9, ", 1));
    assert_eq!(code(&o), 2);
}

#[test]
fn roundtrip_text_and_json() {
    let o = mck(&["roundtrip", "z:#a, w:#b |- let x = z in x : #a"]);
    assert_eq!((code(&o), out(&o)), (0, "roundtrip_ok: let x = z in x\n".into()));
    let o = mck(&["roundtrip", "--json", INTRO]);
    let v: serde_json::Value = serde_json::from_str(&out(&o)).unwrap();
    assert_eq!(v["roundtrip_ok"], true);
    assert_eq!(v["term"], "let x = z in x");
}

#[test]
fn prove_and_depth() {
    let o = mck(&["prove", "|- #a -> a", "--depth", "12"]);
    assert_eq!(code(&o), 1);
    assert!(err(&o).contains("not provable (exhausted)"));
    let o = mck(&["prove", "#(a -> b), #a |- #b"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).starts_with("[KBox]"));
    let o = mck(&["prove", "--depth", "0", "a -> a"]);
    assert_eq!(code(&o), 1);
    assert!(err(&o).contains("bound exceeded"));
}

#[test]
fn search_wis_and_bound() {
    let o = mck(&["search-wis", "a |- a"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("\"arena_formula\": \"a -> a\""));
    let o = mck(&["search-wis", "(#a -> #b) -> #(a -> b)"]);
    assert_eq!(code(&o), 1);
    assert!(err(&o).contains("exhausted"));
    let o = mck(&["search-wis", "--max-views", "3", "(a -> b) -> a -> b"]);
    assert_eq!(code(&o), 1);
    assert!(err(&o).contains("bound exceeded"));
}

#[test]
fn corpus_is_deterministic() {
    let args = ["corpus", "--count", "40", "--seed", "5", "--size", "8"];
    let a = mck(&args);
    let b = mck(&args);
    assert_eq!(code(&a), 0, "{}", out(&a));
    assert_eq!(out(&a), out(&b));
    assert!(out(&a).starts_with("40 terms (seed 5, size <= 8)"));
}

#[test]
fn eta_output_is_byte_stable() {
    let args = ["normalize", "--trace", "f:#a -> #b |- f : #a -> #b"];
    assert_eq!(out(&mck(&args)), out(&mck(&args)));
}

#[test]
fn file_input() {
    let path = temp("in.txt", &format!("{INTRO}\n"));
    let o = mck(&["nf", "--file", &path]);
    assert_eq!(out(&o), "let x = z in x\n");
    let o = mck(&["nf", "--file", &path, INTRO]);
    assert_eq!(code(&o), 2);
    let o = mck(&["nf", "--file", "/nonexistent/mck"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&mck(&[])), 2);
    assert_eq!(code(&mck(&["frobnicate"])), 2);
    assert_eq!(code(&mck(&["nf"])), 2);
    let o = mck(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("search-wis"));
    assert_eq!(code(&mck(&["--version"])), 0);
}

#[test]
fn in_process_run() {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let code = mck::cli::run(["mck", "nf", INTRO], &mut std::io::empty(), &mut o, &mut e);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(o).unwrap(), "let x = z in x\n");
}
