mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use h2mc_core::formula::*;
use h2mc_core::semantics::{check_traces, eval_qformula, CheckOptions};
use h2mc_core::Error;

const EXAMPLE1: &str = "
fix X { forall p in X, q in ALL : G a@q | G(a@p <-> a@q) | G(b@p <-> b@q) -> q in X }.
forall p in X. !b@p
";

fn props(n: usize) -> Vec<String> {
    ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect()
}

#[test]
fn example1_structure() {
    let f = parse_formula(EXAMPLE1).unwrap();
    assert_eq!(f.prefix.len(), 2);
    let Quantifier::Fixpoint(fb) = &f.prefix[0] else {
        panic!("expected a fixpoint item")
    };
    assert_eq!(fb.set, SetVar::new("X"));
    assert_eq!(fb.conjuncts.len(), 1);
    let c = &fb.conjuncts[0];
    assert_eq!(
        c.binders,
        vec![
            (TraceVar::new("p"), SetVar::new("X")),
            (TraceVar::new("q"), SetVar::all())
        ]
    );
    assert_eq!(c.target, 1);
    assert_eq!(
        f.prefix[1],
        Quantifier::FoForall(TraceVar::new("p"), SetVar::new("X"))
    );
    assert_eq!(f.body, Body::not(Body::atom("b", "p")));
    assert_eq!(classify_fragment(&f), Fragment::FixpointFragment);
}

#[test]
fn minimal_formula() {
    let f = parse_formula("forall p in ALL. a@p").unwrap();
    assert_eq!(
        f.prefix,
        vec![Quantifier::FoForall(TraceVar::new("p"), SetVar::all())]
    );
    assert_eq!(f.body, Body::atom("a", "p"));
    assert_eq!(f.alphabet, BTreeSet::from(["a".to_string()]));
}

#[test]
fn parse_errors() {
    let cases: &[(&str, fn(&Error) -> bool)] = &[
        ("exists X. forall p in ALL. G (p in X)", |e| {
            matches!(e, Error::MembershipUnderTemporal(_))
        }),
        ("forall p in ALL. X (p in ALL) ", |e| {
            matches!(e, Error::MembershipUnderTemporal(_))
        }),
        ("forall p in ALL. (p in ALL) U a@p", |e| {
            matches!(e, Error::MembershipUnderTemporal(_))
        }),
        ("forall p in ALL. a@q", |e| matches!(e, Error::UnboundTrace(_))),
        ("forall p in Y. a@p", |e| matches!(e, Error::UnboundSet(_))),
        ("forall p in ALL. forall p in ALL. a@p", |e| {
            matches!(e, Error::Rebinding(_))
        }),
        ("exists X. exists X. true", |e| matches!(e, Error::Rebinding(_))),
        ("forall p in ALL. a@p &", |e| matches!(e, Error::Syntax { .. })),
        ("forall p in ALL a@p", |e| matches!(e, Error::Syntax { .. })),
        ("fix X { forall p in ALL : a@p -> p in Y }. true", |e| {
            matches!(e, Error::Fixpoint(_) | Error::UnboundSet(_))
        }),
        ("fix X { forall p in ALL : a@p }. true", |e| {
            matches!(e, Error::Fixpoint(_) | Error::Syntax { .. })
        }),
        ("fix X { forall p in ALL : (p in X) -> p in X }. true", |e| {
            matches!(e, Error::Fixpoint(_))
        }),
    ];
    for (text, ok) in cases {
        match parse_formula(text) {
            Err(e) => assert!(ok(&e), "{text}: unexpected error {e:?}"),
            Ok(f) => panic!("{text}: parsed as {f}"),
        }
    }
}

#[test]
fn syntax_errors_carry_positions() {
    match parse_formula("forall p in ALL.\n  a@p & & b@p") {
        Err(Error::Syntax { line, col, .. }) => {
            assert_eq!(line, 2);
            assert_eq!(col, 9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn comments_and_whitespace() {
    let f = parse_formula("# header\nforall p in ALL. # quantifier\n  G a@p # body\n").unwrap();
    assert_eq!(f.body, Body::globally(Body::atom("a", "p")));
}

#[test]
fn precedence() {
    let f = parse_formula("forall p in ALL. !a@p & b@p | c@p -> a@p U b@p U c@p <-> G a@p").unwrap();
    let a = || Body::atom("a", "p");
    let b = || Body::atom("b", "p");
    let c = || Body::atom("c", "p");
    let expected = Body::iff(
        Body::implies(
            Body::or(Body::and(Body::not(a()), b()), c()),
            Body::until(a(), Body::until(b(), c())),
        ),
        Body::globally(a()),
    );
    assert_eq!(f.body, expected);
}

#[test]
fn print_parse_round_trip() {
    let mut rng = rng(11);
    let p = props(3);
    for i in 0..1000 {
        let shape = FormulaShape {
            so_items: i % 3,
            fix_items: (i / 3) % 2,
            fo_items: 1 + i % 4,
            unique: i % 5 == 0,
            sugar: true,
            body_depth: 3,
        };
        let f = formula(&mut rng, &shape, &p);
        let text = f.to_string();
        let g = parse_formula(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(f, g, "{text}");
        let pretty = parse_formula(&f.to_pretty_string()).unwrap();
        assert_eq!(f, pretty);
    }
}

#[test]
fn trace_equality_expansion() {
    let f = parse_formula("forall p in ALL. forall q in ALL. p == q")
        .unwrap()
        .with_alphabet(["a".to_string(), "b".to_string()]);
    let g = expand_sugar(&f).unwrap();
    let iff = |x: &str| Body::globally(Body::iff(Body::atom(x, "p"), Body::atom(x, "q")));
    assert_eq!(g.body, Body::and(iff("a"), iff("b")));
    assert_eq!(g.prefix, f.prefix);
}

#[test]
fn sugar_free_is_identity() {
    let f = parse_formula(EXAMPLE1).unwrap();
    assert_eq!(expand_sugar(&f).unwrap(), f);
}

#[test]
fn membership_is_hoisted() {
    let f = parse_formula("exists X. forall p in ALL. p in X").unwrap();
    let g = expand_sugar(&f).unwrap();
    assert!(!g.has_sugar());
    assert_eq!(g.prefix.len(), 3);
    assert!(matches!(&g.prefix[2], Quantifier::FoExists(_, x) if x.as_str() == "X"));
}

#[test]
fn unique_expansion() {
    let f = parse_formula("exists! p in ALL. a@p").unwrap();
    let g = expand_sugar(&f).unwrap();
    assert!(!g.has_sugar());
    assert!(matches!(g.prefix[0], Quantifier::FoExists(..)));
    assert!(matches!(g.prefix[1], Quantifier::FoForall(..)));
}

fn so_items(f: &Formula) -> Vec<Quantifier> {
    f.prefix
        .iter()
        .filter(|q| q.is_second_order())
        .cloned()
        .collect()
}

#[test]
fn expand_sugar_idempotent_and_keeps_second_order_items() {
    let mut rng = rng(12);
    let p = props(2);
    for i in 0..300 {
        let shape = FormulaShape {
            so_items: i % 3,
            fix_items: (i / 3) % 2,
            fo_items: 1 + i % 3,
            unique: i % 4 == 0,
            sugar: true,
            body_depth: 2,
        };
        let mut f = formula(&mut rng, &shape, &p);
        // keep `exists!` behind every set item so that expansion does not duplicate them
        if let Some(pos) = f
            .prefix
            .iter()
            .position(|q| matches!(q, Quantifier::FoExistsUnique(..)))
        {
            let q = f.prefix.remove(pos);
            f.prefix.push(q);
        }
        let g = expand_sugar(&f).unwrap();
        assert!(!g.has_sugar(), "{g}");
        assert_eq!(expand_sugar(&g).unwrap(), g);
        let before: Vec<String> = so_items(&f).iter().map(|q| q.to_string()).collect();
        let after: Vec<String> = so_items(&g).iter().map(|q| q.to_string()).collect();
        assert_eq!(before, after, "{f}");
    }
}

fn q(text: &str) -> QFormula {
    QFormula::from_formula(&parse_formula(text).unwrap())
}

#[test]
fn prenex_laws() {
    // (exists X. phi1) & phi2
    let left = q("exists X. forall p in X. a@p");
    let right = q("forall r in ALL. b@r");
    let f = prenex(&QFormula::and(left, right)).unwrap();
    assert!(matches!(f.prefix[0], Quantifier::SoExists(_)));
    // (forall X. phi1) -> psi
    let left = q("forall X. exists p in X. a@p");
    let f = prenex(&QFormula::implies(left, q("exists r in ALL. b@r"))).unwrap();
    assert!(matches!(f.prefix[0], Quantifier::SoExists(_)));
}

#[test]
fn prenex_rejects_unexpanded_unique() {
    assert!(prenex(&q("exists! p in ALL. a@p")).is_err());
}

fn random_qformula(rng: &mut Rng8, depth: usize, sets: &mut Vec<String>, traces: &mut Vec<String>, counter: &mut usize) -> QFormula {
    use rand::Rng;
    let p = props(2);
    if depth == 0 || rng.gen_bool(0.2) {
        return QFormula::Body(skeleton(rng, traces, &[], &p, 1, false));
    }
    *counter += 1;
    let id = *counter;
    match rng.gen_range(0..8) {
        0 => QFormula::not(random_qformula(rng, depth - 1, sets, traces, counter)),
        1 | 2 => {
            let (mut s2, mut t2) = (sets.clone(), traces.clone());
            let a = random_qformula(rng, depth - 1, sets, traces, counter);
            let b = random_qformula(rng, depth - 1, &mut s2, &mut t2, counter);
            if rng.gen_bool(0.5) {
                QFormula::and(a, b)
            } else {
                QFormula::implies(a, b)
            }
        }
        3 => {
            let (mut s2, mut t2) = (sets.clone(), traces.clone());
            let a = random_qformula(rng, depth - 1, sets, traces, counter);
            let b = random_qformula(rng, depth - 1, &mut s2, &mut t2, counter);
            QFormula::or(a, b)
        }
        4 => {
            let x = format!("S{id}");
            let mut s2 = sets.clone();
            s2.push(x.clone());
            let inner = random_qformula(rng, depth - 1, &mut s2, &mut traces.clone(), counter);
            let quant = if rng.gen_bool(0.5) {
                Quantifier::SoExists(SetVar::new(x))
            } else {
                Quantifier::SoForall(SetVar::new(x))
            };
            QFormula::quant(quant, inner)
        }
        5 => {
            let x = format!("Y{id}");
            let fb = fixpoint(rng, &x, sets, traces, &p, &format!("l{id}_"));
            let mut s2 = sets.clone();
            s2.push(x);
            let inner = random_qformula(rng, depth - 1, &mut s2, &mut traces.clone(), counter);
            QFormula::quant(Quantifier::Fixpoint(fb), inner)
        }
        _ => {
            use rand::seq::SliceRandom;
            let p = format!("p{id}");
            let mut doms = vec!["ALL".to_string()];
            doms.extend(sets.iter().cloned());
            let x = SetVar::new(doms.choose(rng).unwrap().clone());
            let mut t2 = traces.clone();
            t2.push(p.clone());
            let inner = random_qformula(rng, depth - 1, &mut sets.clone(), &mut t2, counter);
            let quant = if rng.gen_bool(0.5) {
                Quantifier::FoExists(TraceVar::new(p), x)
            } else {
                Quantifier::FoForall(TraceVar::new(p), x)
            };
            QFormula::quant(quant, inner)
        }
    }
}

#[test]
fn prenex_matches_direct_evaluation() {
    let mut rng = rng(13);
    let p = props(2);
    let mut nontrivial = 0;
    for i in 0..400 {
        let qf = random_qformula(&mut rng, 4, &mut vec![], &mut vec![], &mut 0);
        let f = prenex(&qf).unwrap();
        for _ in 0..2 {
            use rand::Rng;
            let n = rng.gen_range(1..=5);
            let ts = trace_set(&mut rng, n, 3, &p);
            let direct = eval_qformula(&ts, &BTreeMap::new(), &BTreeMap::new(), &qf).unwrap();
            let via_prenex = check_traces(&ts, &f, &CheckOptions::no_prune()).unwrap().verdict;
            assert_eq!(direct, via_prenex, "case {i}: {qf}\nprenex: {f}");
            let pruned = check_traces(&ts, &f, &CheckOptions::default()).unwrap().verdict;
            assert_eq!(direct, pruned, "case {i} (pruned): {qf}");
            nontrivial += direct as usize;
        }
    }
    assert!(nontrivial > 50 && nontrivial < 750, "{nontrivial}");
}

#[test]
fn alternation_counting() {
    let f = parse_formula("exists A. forall p in A. exists B. forall C. exists D. true").unwrap();
    assert_eq!(count_so_alternations(&f), 2);
    assert_eq!(classify_fragment(&f), Fragment::Sigma(2));
    let f = parse_formula("forall p in ALL. exists q in ALL. a@p").unwrap();
    assert_eq!(count_so_alternations(&f), 0);
    let f = parse_formula("forall X. forall Y. exists Z. true").unwrap();
    assert_eq!(count_so_alternations(&f), 1);
    assert_eq!(classify_fragment(&f), Fragment::Pi(1));
    assert_eq!(
        classify_fragment(&parse_formula("G true").unwrap()),
        Fragment::QuantifierFree
    );
    let mixed = parse_formula("exists Y. fix X { forall p in Y : true -> p in X }. true").unwrap();
    assert_eq!(classify_fragment(&mixed), Fragment::Mixed);
    assert_eq!(Fragment::Pi(1).to_string(), "pi_1");
}

#[test]
fn dualize_examples() {
    let f = parse_formula("exists X. forall p in X. a@p").unwrap();
    let d = dualize(&f).unwrap();
    assert_eq!(d, parse_formula("forall X. exists p in X. !a@p").unwrap());
    let qf = Formula::new(vec![], Body::True);
    assert_eq!(dualize(&qf).unwrap().body, Body::False);
    assert!(matches!(
        dualize(&parse_formula(EXAMPLE1).unwrap()),
        Err(Error::Dualize(_))
    ));
}

fn no_double_negation(b: &Body) -> Body {
    match b {
        Body::Not(x) => match &**x {
            Body::Not(y) => no_double_negation(y),
            _ => Body::not(no_double_negation(x)),
        },
        _ => b.map_children(no_double_negation),
    }
}

#[test]
fn dualize_involution_and_alternations() {
    let mut rng = rng(14);
    let p = props(2);
    for i in 0..200 {
        let shape = FormulaShape {
            so_items: i % 4,
            fix_items: 0,
            fo_items: 1 + i % 3,
            unique: false,
            sugar: false,
            body_depth: 2,
        };
        let f = formula(&mut rng, &shape, &p);
        let d = dualize(&f).unwrap();
        assert_eq!(count_so_alternations(&d), count_so_alternations(&f));
        let mut dd = dualize(&d).unwrap();
        let mut f = f;
        dd.body = no_double_negation(&dd.body);
        f.body = no_double_negation(&f.body);
        assert_eq!(dd, f);
    }
}

#[test]
fn reserved_words_are_rejected_as_names() {
    for w in ["exists", "forall", "fix", "in", "true", "X", "G"] {
        assert!(reserved_words().contains(w));
        assert!(parse_formula(&format!("forall {w} in ALL. a@{w}")).is_err(), "{w}");
    }
}
