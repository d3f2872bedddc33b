//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//!
//! Criteria listed in `KNOWN_GAPS` are reported like any other but do not fail the
//! run; each prints the reason on a `note:` line.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use h2mc_core::formula::{dualize, parse_formula, Formula, FixpointBinder, Quantifier, SetVar};
use h2mc_core::kripke::*;
use h2mc_core::reductions::*;
use h2mc_core::semantics::*;
use rand::Rng;

/// The example's only conjunct ranges over the set being built, so the least
/// fixpoint is empty rather than the three traces the accompanying text describes.
const KNOWN_GAPS: &[u32] = &[1];

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
        notes: Vec::new(),
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn load(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn fix_of(f: &Formula) -> &FixpointBinder {
    match &f.prefix[0] {
        Quantifier::Fixpoint(b) => b,
        _ => panic!("expected a fixpoint item"),
    }
}

/// Trace index of each root-to-leaf path, in leaf order.
fn leaf_traces(k: &KripkeStructure, ts: &TraceSet) -> Vec<usize> {
    leaves(k)
        .into_iter()
        .map(|leaf| {
            let mut path = vec![leaf];
            let mut s = leaf;
            while s != k.initial() {
                s = (0..k.num_states())
                    .find(|&p| p != s && k.successors(p).contains(&s))
                    .unwrap();
                path.push(s);
            }
            let word = path.iter().rev().map(|&s| k.label(s)).collect();
            ts.index_of(&Trace::new(word)).unwrap()
        })
        .collect()
}

fn gen(kind: &str, input: &Path, dir: &Path) -> (KripkeStructure, Formula, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_h2mc"))
        .args(["gen", kind, input.to_str().unwrap(), "-o", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stem = input.file_stem().unwrap().to_str().unwrap();
    let k = parse_kripke(&load(&dir.join(format!("{stem}.kripke")))).unwrap();
    let f = parse_formula(&load(&dir.join(format!("{stem}.formula")))).unwrap();
    (k, f, load(&dir.join(format!("{stem}.meta"))))
}

fn depth(k: &KripkeStructure) -> usize {
    let mut d = 0;
    let mut s = k.initial();
    while let Some(&t) = k.successors(s).iter().find(|&&t| t != s) {
        s = t;
        d += 1;
    }
    d
}

fn c1_example() -> Outcome {
    let k = load_structure("four_branches.kripke");
    let ts = extract_traces(&k).unwrap();
    let pi = leaf_traces(&k, &ts);
    let want = TraceSubset::from_indices(ts.len(), pi[..3].iter().copied());
    let f = parse_formula(&load(&data("common_knowledge.formula"))).unwrap();
    let r = check(&k, &f).unwrap();
    let got = r.fixpoint_witnesses[&SetVar::new("X")].clone();
    let mut o = outcome(
        r.verdict && got == want,
        format!(
            "verdict {} (want true), X = {:?} (want {:?})",
            r.verdict,
            got.to_vec(),
            want.to_vec()
        ),
    );
    o.notes.push(
        "with X empty the conjunct `forall p in X, q in ALL : ... -> q in X` holds \
         vacuously, so the least solution is the empty set"
            .into(),
    );
    let seeded = parse_formula(&load(&data("common_knowledge_seeded.formula"))).unwrap();
    let (a, rounds) =
        compute_fixpoint_rounds(&ts, &BTreeMap::new(), &BTreeMap::new(), fix_of(&seeded)).unwrap();
    let sizes: Vec<usize> = rounds.iter().map(|r| r.len()).collect();
    let rs = check(&k, &seeded).unwrap();
    o.notes.push(format!(
        "adding `forall q in ALL : G a@q -> q in X` as its own conjunct: verdict {}, X = {:?} ({}), round sizes {:?}",
        rs.verdict,
        a.to_vec(),
        if a == want { "as expected" } else { "unexpected" },
        sizes
    ));
    o
}

fn load_structure(name: &str) -> KripkeStructure {
    parse_kripke(&load(&data(name))).unwrap()
}

fn c2_horn() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = data("two_clauses.horn");
    let (k, f, meta) = gen("horn", &input, dir.path());
    // state labels as drawn, branch by branch
    let figure: &[(&str, [&[&str]; 3])] = &[
        ("x1", [&["pos"], &[], &[]]),
        ("nx1", [&["neg1"], &[], &[]]),
        ("x2", [&[], &["pos"], &[]]),
        ("nx2", [&[], &["neg1"], &[]]),
        ("x3", [&["pos", "a"], &["pos"], &[]]),
        ("nx3", [&["neg1"], &["neg1"], &[]]),
        ("x4", [&[], &[], &["pos"]]),
        ("nx4", [&["a"], &[], &["neg1"]]),
        ("c1", [&["neg1", "neg2", "c"], &["neg2", "pos"], &[]]),
        ("c2", [&["neg1", "c"], &["neg2"], &["pos"]]),
    ];
    let mut bad = Vec::new();
    for (branch, labels) in figure {
        for (j, want) in labels.iter().enumerate() {
            let name = format!("{branch}_{}", j + 1);
            let Some(s) = k.state_index(&name) else {
                bad.push(name);
                continue;
            };
            let mut got: Vec<&str> = k.label_props(s);
            let mut want = want.to_vec();
            got.sort();
            want.sort();
            if got != want {
                bad.push(name);
            }
        }
    }
    let root = k.label_props(k.initial()).is_empty();
    let verdict = check(&k, &f).unwrap().verdict;
    let oracle = horn_oracle(&parse_horn(&load(&input)).unwrap());
    let pass = k.num_states() == 31
        && is_tree_shaped(&k)
        && root
        && depth(&k) == 3
        && bad.is_empty()
        && verdict
        && oracle
        && meta.contains("kind: horn\n");
    outcome(
        pass,
        format!(
            "{} states, tree {}, depth {}, mislabeled {:?}, check {verdict}, oracle {oracle}",
            k.num_states(),
            is_tree_shaped(&k),
            depth(&k),
            bad
        ),
    )
}

fn c3_qbf() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (k, f, _) = gen("qbf", &data("forall_exists.qbf"), dir.path());
    let branches = k.successors(k.initial()).len();
    let ts = extract_traces(&k).unwrap();
    let r = check(&k, &f).unwrap();
    let pass = branches == 9 && ts.len() == 9 && depth(&k) == 3 && is_tree_shaped(&k) && r.verdict;
    outcome(
        pass,
        format!(
            "{branches} branches, {} traces, depth {}, check {}",
            ts.len(),
            depth(&k),
            r.verdict
        ),
    )
}

fn c4_horn_corpus() -> Outcome {
    let mut rng = rng(1004);
    let (mut agree, mut sat) = (0, 0);
    for _ in 0..200 {
        let h = horn(&mut rng, 6, 8);
        let inst = horn_to_instance(&h);
        let v = check(&inst.structure, &inst.formula).unwrap().verdict;
        agree += (v == horn_oracle(&h)) as usize;
        sat += v as usize;
    }
    outcome(agree == 200, format!("{agree}/200 agree ({sat} satisfiable)"))
}

fn c5_qbf_corpus() -> Outcome {
    let mut rng = rng(1005);
    let (mut agree, mut valid) = (0, 0);
    for _ in 0..50 {
        let y = qbf(&mut rng, 3, 2);
        let inst = qbf_to_instance(&y).unwrap();
        let v = check(&inst.structure, &inst.formula).unwrap().verdict;
        agree += (v == qbf_oracle(&y)) as usize;
        valid += v as usize;
    }
    outcome(agree == 50, format!("{agree}/50 agree ({valid} valid)"))
}

fn c6_sol() -> Outcome {
    let mut rng = rng(1006);
    let props = strs(&["a", "b", "c"]);
    let mut ok = 0;
    for _ in 0..100 {
        let np = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=8);
        let ts = trace_set(&mut rng, n, 4, &props[..np]);
        let fb = fixpoint(&mut rng, "X", &[], &[], &props[..np], "l");
        let none = BTreeMap::new();
        let lfp = compute_fixpoint(&ts, &none, &BTreeMap::new(), &fb).unwrap();
        let sol = sol_bruteforce(&ts, &none, &BTreeMap::new(), &fb).unwrap();
        ok += (sol == vec![lfp]) as usize;
    }
    outcome(ok == 100, format!("{ok}/100 singleton and equal"))
}

fn shape(rng: &mut Rng8, fix: bool) -> FormulaShape {
    let so_items = rng.gen_range(0..=2);
    FormulaShape {
        so_items,
        fix_items: if fix { rng.gen_range(0..=1) } else { 0 },
        fo_items: rng.gen_range(1..=3),
        unique: fix && so_items == 0 && rng.gen_bool(0.3),
        sugar: fix && rng.gen_bool(0.3),
        body_depth: 2,
    }
}

fn c7_duality() -> Outcome {
    let mut rng = rng(1007);
    let aps = strs(&["a", "b"]);
    let mut ok = 0;
    for _ in 0..50 {
        let k = tree(&mut rng, 6, 3, &aps);
        let sh = shape(&mut rng, false);
        let f = formula(&mut rng, &sh, &aps);
        let d = dualize(&f).unwrap();
        ok += (check(&k, &f).unwrap().verdict != check(&k, &d).unwrap().verdict) as usize;
    }
    outcome(ok == 50, format!("{ok}/50 flipped"))
}

fn c8_unroll() -> Outcome {
    let mut rng = rng(1008);
    let aps = strs(&["a", "b"]);
    let mut ok = 0;
    for _ in 0..50 {
        let k = acyclic(&mut rng, 10, &aps);
        let u = unroll_to_tree(&k).unwrap();
        let same = extract_traces(&u).unwrap().traces() == extract_traces(&k).unwrap().traces();
        ok += (same && is_tree_shaped(&u)) as usize;
    }
    outcome(ok == 50, format!("{ok}/50 preserved"))
}

/// `t` branches of equal length; branch `i` spells `i` in binary with `a` and its
/// reversal with `b`.
fn even_tree(t: usize) -> KripkeStructure {
    let len = t.trailing_zeros() as usize + 1;
    let mut names = vec!["r".to_string()];
    let mut labels = vec![vec![]];
    let mut edges = Vec::new();
    for i in 0..t {
        let mut prev = 0;
        for j in 0..len {
            let mut l = Vec::new();
            if i >> j & 1 == 1 {
                l.push("a".to_string());
            }
            if i >> (len - 1 - j) & 1 == 1 {
                l.push("b".to_string());
            }
            names.push(format!("s{i}_{j}"));
            labels.push(l);
            edges.push((prev, names.len() - 1));
            prev = names.len() - 1;
        }
        edges.push((prev, prev));
    }
    KripkeStructure::new(strs(&["a", "b"]), names, labels, &edges, 0).unwrap()
}

fn timed(mut f: impl FnMut()) -> Duration {
    // repeat until the measurement is long enough to be meaningful
    let mut runs = 0u32;
    let start = Instant::now();
    while runs < 3 || start.elapsed() < Duration::from_millis(50) {
        f();
        runs += 1;
    }
    start.elapsed() / runs
}

fn c9_scaling() -> Outcome {
    let f = parse_formula(
        "fix X {
           forall p in ALL : G !a@p -> p in X ;
           forall p in X, q in ALL : X(a@p <-> b@q) & F(b@p | a@q) -> q in X
         }.
         forall p in ALL. forall q in ALL. exists r in X. F(a@p <-> b@r) | G(b@q <-> a@r)",
    )
    .unwrap();
    let mut times = Vec::new();
    for t in [8, 16, 32, 64] {
        let k = even_tree(t);
        let ts = extract_traces(&k).unwrap();
        assert_eq!(ts.len(), t);
        times.push(timed(|| {
            check_traces(&ts, &f, &CheckOptions::default()).unwrap();
        }));
    }
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let pass = ratios.iter().all(|&r| r <= 16.0);
    outcome(
        pass,
        format!(
            "times {:?}, ratios {:?}",
            times.iter().map(|d| format!("{:.3}ms", d.as_secs_f64() * 1e3)).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn c10_pruning() -> Outcome {
    let mut rng = rng(1010);
    let aps = strs(&["a", "b"]);
    let mut ok = 0;
    for _ in 0..200 {
        let k = tree(&mut rng, 5, 3, &aps);
        let sh = shape(&mut rng, true);
        let f = formula(&mut rng, &sh, &aps);
        let a = check_with(&k, &f, &CheckOptions::default()).unwrap().verdict;
        let b = check_with(&k, &f, &CheckOptions::no_prune()).unwrap().verdict;
        ok += (a == b) as usize;
    }
    outcome(ok == 200, format!("{ok}/200 identical"))
}

fn main() {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Outcome); 10] = [
        (1, "four-branch fixpoint regression", Some(Duration::from_secs(1)), c1_example),
        (2, "two-clause Horn instance", Some(Duration::from_secs(1)), c2_horn),
        (3, "forall-exists QBF instance", Some(Duration::from_secs(300)), c3_qbf),
        (4, "Horn oracle corpus", Some(Duration::from_secs(60)), c4_horn_corpus),
        (5, "QBF oracle corpus", Some(Duration::from_secs(600)), c5_qbf_corpus),
        (6, "fixpoint equals brute-force solutions", Some(Duration::from_secs(60)), c6_sol),
        (7, "dualization flips verdicts", None, c7_duality),
        (8, "unrolling preserves traces", None, c8_unroll),
        (9, "fixpoint check scaling", None, c9_scaling),
        (10, "pruned and unpruned verdicts", None, c10_pruning),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = o.pass && in_time;
        let limit = limit.map(|l| format!(" limit {}s", l.as_secs())).unwrap_or_default();
        println!(
            "{} {id:>2} {name}: {} [{:.3}s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
        for n in &o.notes {
            println!("       note: {n}");
        }
        if !pass {
            failed.push(id);
        }
    }
    let unexpected: Vec<u32> = failed.iter().copied().filter(|i| !KNOWN_GAPS.contains(i)).collect();
    println!(
        "acceptance: {}/10 passed; failed {:?}; known gaps {:?}",
        10 - failed.len(),
        failed,
        KNOWN_GAPS
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
