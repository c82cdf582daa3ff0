use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn germ(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_germ"))
        .args(args)
        .env("GERM_COLOR", "0")
        .output()
        .expect("germ runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn spec(rel: &str) -> String {
    corpus(rel).display().to_string()
}

#[test]
fn gen_layout_writes_the_corpus_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.layout");
    let o = germ(&["gen-layout", "--size", "16", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(corpus("layout16.layout")).unwrap());
}

#[test]
fn gen_layout_rejects_bad_requirements() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.layout");
    let out = out.to_str().unwrap();
    assert_eq!(germ(&["gen-layout", "--size", "0", "-o", out]).status.code(), Some(2));
    assert_eq!(germ(&["gen-layout", "--size", "4", "--special", "m_throw", "-o", out]).status.code(), Some(2));
    assert_eq!(germ(&["gen-layout", "--size", "4", "--special", "9bad", "-o", out]).status.code(), Some(2));
}

#[test]
fn gen_layout_appends_extra_specials() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.layout");
    let o = germ(&["gen-layout", "--size", "3", "--special", "m_gas", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("special m_throw\nspecial m_gas\n"), "{text}");
}

#[test]
fn check_exit_codes() {
    assert_eq!(germ(&["check", "--spec", &spec("pledge/pledge.spec")]).status.code(), Some(0));
    assert_eq!(germ(&["check", "--spec", &spec("pledge/no_throw.spec")]).status.code(), Some(1));
    assert_eq!(germ(&["check", "--spec", &spec("pledge/wrong_else.spec")]).status.code(), Some(1));
    assert_eq!(germ(&["check", "--spec", &spec("pledge/missing.spec")]).status.code(), Some(2));
    assert_eq!(germ(&["check", "--spec", &spec("flag/weak.spec")]).status.code(), Some(1));
}

#[test]
fn check_text_report() {
    let o = germ(&["check", "--spec", &spec("pledge/pledge.spec")]);
    let text = stdout(&o);
    assert!(text.contains("path 3/4 [program] !b1 && !b2 && n != 0 -> else: PASS\n"), "{text}");
    assert!(text.contains("    [ok] read(refnd) == true\n"));
    assert!(text.contains("verdict: PASS (4 paths"));
    assert!(!text.contains('\u{1b}'), "no color when piped");

    let o = germ(&["check", "--spec", &spec("pledge/no_throw.spec")]);
    let text = stdout(&o);
    assert!(text.contains("witness: b1=false b2=false n=0"), "{text}");
}

#[test]
fn check_json_round_trips() {
    let o = germ(&["check", "--spec", &spec("flag/flag.spec"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "PASS");
    let obligations: Vec<_> = v["paths"].as_array().unwrap().iter().map(|p| p["obligation"].as_str().unwrap()).collect();
    assert_eq!(obligations, ["head", "step", "tail"]);
    let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn run_renders_the_initial_state_after_a_revert() {
    let o = germ(&["run", "--spec", &spec("pledge/pledge.spec"), "--bind", "n=0", "--bind", "b1=false", "--bind", "b2=false"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# final state (reverted)\n"), "{text}");
    assert!(text.contains("m_throw := Bool (Some false) load global public vacant;"));
    assert!(text.contains("m_0x00000003 := initData;   // refnd"));
}

#[test]
fn run_with_breakpoint() {
    let o = germ(&["run", "--spec", &spec("pledge/pledge.spec"), "--bind", "n=5", "--bind", "b1=false", "--bind", "b2=false", "--break", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# breakpoint 1\n"), "{text}");
    assert!(text.contains("# final state\n"));
    assert!(text.contains("// refnd"));

    let o = germ(&["run", "--spec", &spec("pledge/pledge.spec"), "--bind", "n=5", "--bind", "b1=false", "--bind", "b2=false", "--break", "9"]);
    assert!(stdout(&o).contains("# breakpoint 9 not reached"));
}

#[test]
fn run_rejects_bad_bindings() {
    let p = spec("pledge/pledge.spec");
    assert_eq!(germ(&["run", "--spec", &p, "--bind", "n=true", "--bind", "b1=false", "--bind", "b2=false"]).status.code(), Some(2));
    assert_eq!(germ(&["run", "--spec", &p, "--bind", "n=1"]).status.code(), Some(2));
    assert_eq!(germ(&["run", "--spec", &p, "--bind", "zz=1", "--bind", "n=1", "--bind", "b1=false", "--bind", "b2=false"]).status.code(), Some(2));
}

#[test]
fn parse_prints_program_and_loops() {
    let o = germ(&["parse", "--spec", &spec("flag/flag.spec")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("while (flag == 0)"), "{text}");
    assert!(text.ends_with("// loop0\n"));
}
