use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn h2mc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h2mc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
}

fn p(path: &PathBuf) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_reports_witness() {
    let k = data("four_branches.kripke");
    let o = h2mc(&["check", p(&k), p(&data("common_knowledge_seeded.formula"))]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(field(&r, "verdict"), Some("true"));
    assert_eq!(field(&r, "fragment"), Some("fixpoint_fragment"));
    assert_eq!(field(&r, "shape"), Some("tree"));
    assert_eq!(field(&r, "witness.X.size"), Some("3"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wall_time_ms: "));

    let o = h2mc(&["check", p(&k), p(&data("common_knowledge.formula"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "witness.X.size"), Some("0"));
}

#[test]
fn report_is_byte_stable() {
    let k = data("four_branches.kripke");
    let f = data("common_knowledge_seeded.formula");
    let a = h2mc(&["check", p(&k), p(&f), "--stats"]);
    let b = h2mc(&["check", p(&k), p(&f), "--stats"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(field(&stdout(&a), "stats.fixpoint_rounds").is_some());
}

#[test]
fn unsatisfied_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.formula");
    std::fs::write(&f, "forall p in ALL. G a@p\n").unwrap();
    let o = h2mc(&["check", p(&data("four_branches.kripke")), f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "verdict"), Some("false"));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.formula");
    std::fs::write(&bad, "forall p in ALL. G (a@p\n").unwrap();
    let k = data("four_branches.kripke");
    for args in [
        vec!["check", p(&k), bad.to_str().unwrap()],
        vec!["check", "/nonexistent.kripke", bad.to_str().unwrap()],
        vec!["frobnicate"],
        vec!["check", p(&k)],
        vec!["gen", "horn", p(&data("forall_exists.qbf")), "-o", dir.path().to_str().unwrap()],
    ] {
        let o = h2mc(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let sets = dir.path().join("so.formula");
    std::fs::write(&sets, "exists Y. forall p in Y. a@p\n").unwrap();
    let o = h2mc(&["check", p(&k), sets.to_str().unwrap(), "--fragment", "fixpoint"]);
    assert_eq!(o.status.code(), Some(2));
    let o = h2mc(&["check", p(&k), sets.to_str().unwrap(), "--fragment", "full"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn fragments_and_pruning_agree() {
    let k = data("four_branches.kripke");
    let f = data("common_knowledge_seeded.formula");
    let verdicts: Vec<String> = [
        vec!["check", p(&k), p(&f)],
        vec!["check", p(&k), p(&f), "--no-prune"],
        vec!["check", p(&k), p(&f), "--fragment", "full"],
        vec!["check", p(&k), p(&f), "--fragment", "fixpoint"],
    ]
    .iter()
    .map(|a| {
        let o = h2mc(a);
        assert_eq!(o.status.code(), Some(0));
        let r = stdout(&o);
        format!("{:?} {:?}", field(&r, "verdict"), field(&r, "witness.X"))
    })
    .collect();
    assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{verdicts:?}");
}

#[test]
fn gen_horn_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = h2mc(&["gen", "horn", p(&data("two_clauses.horn")), "-o", out]);
    assert_eq!(o.status.code(), Some(0));
    let k = dir.path().join("two_clauses.kripke");
    let f = dir.path().join("two_clauses.formula");
    let meta = std::fs::read_to_string(dir.path().join("two_clauses.meta")).unwrap();
    assert!(meta.contains("states: 31\n"));
    let o = h2mc(&["check", k.to_str().unwrap(), f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = h2mc(&["validate", k.to_str().unwrap(), "--expect", "tree"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "traces"), Some("10"));
    let o = h2mc(&["oracle", "horn", p(&data("two_clauses.horn"))]);
    assert_eq!(stdout(&o), "satisfiable: true\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn gen_qbf_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = h2mc(&["gen", "qbf", p(&data("forall_exists.qbf")), "-o", out]);
    assert_eq!(o.status.code(), Some(0));
    let k = dir.path().join("forall_exists.kripke");
    let f = dir.path().join("forall_exists.formula");
    let o = h2mc(&["check", k.to_str().unwrap(), f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "fragment"), Some("pi_1"));
    assert_eq!(field(&stdout(&o), "traces"), Some("9"));
    let o = h2mc(&["classify", f.to_str().unwrap()]);
    assert_eq!(field(&stdout(&o), "so_alternations"), Some("1"));
}

#[test]
fn oracle_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("f.qbf");
    std::fs::write(&q, "a 1 0\n1 | 1\n").unwrap();
    let o = h2mc(&["oracle", "qbf", q.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "valid: false\n");
}

#[test]
fn traces_validate_unroll() {
    let d = data("diamond.kripke");
    let o = h2mc(&["traces", p(&d)]);
    assert_eq!(stdout(&o), "0: {}{a}{}\n1: {}{b}{}\n");
    let o = h2mc(&["validate", p(&d), "--expect", "tree"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "shape"), Some("acyclic"));
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.kripke");
    let o = h2mc(&["unroll", p(&d), "-o", u.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = h2mc(&["validate", u.to_str().unwrap(), "--expect", "tree"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&h2mc(&["traces", u.to_str().unwrap()])), "0: {}{a}{}\n1: {}{b}{}\n");

    let cyc = dir.path().join("c.kripke");
    std::fs::write(&cyc, "state s:\nstate t:\ninit s\nedge s t\nedge t s\n").unwrap();
    assert_eq!(h2mc(&["traces", cyc.to_str().unwrap()]).status.code(), Some(2));
    let o = h2mc(&["validate", cyc.to_str().unwrap()]);
    assert_eq!(field(&stdout(&o), "shape"), Some("cyclic"));
}
