//! One line per acceptance criterion; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::{Arc, Mutex};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use stagelet::ast::BaseAst as A;
use stagelet::examples::{self, registry, Kind};
use stagelet::insertion::{
    canon, merge, BindingClass, ClassSnapshot, Pending, PerLocus, Rhs, RhsSnapshot, VirtualBindings,
};
use stagelet::semantics::{mk_add, mk_var};
use stagelet::strategies::{build, gen_tree, shared_program, Order, SHARED_HINT};
use stagelet::{
    cadd, cdiv, cint, clam, cmul, eval_ast, genlet, run, show, with_locus, Code, CodeValue,
    Location, MemoKey, Name, Semantics, Show, Value, DEFAULT_CANON_LIMIT, DEFAULT_STEP_LIMIT,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn stagelet(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stagelet"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn eval(code: &A) -> Result<Value, String> {
    eval_ast(code, &BTreeMap::new(), DEFAULT_STEP_LIMIT).map_err(|e| e.to_string())
}

fn apply(f: &Value, args: &[i64]) -> Result<Value, String> {
    examples::apply_ints(f, args).map_err(|e| e.to_string())
}

fn v(s: &str) -> A {
    A::var(s)
}

fn lets(bindings: &[(&str, A)], body: A) -> A {
    bindings
        .iter()
        .rev()
        .fold(body, |b, (n, rhs)| A::let_(*n, rhs.clone(), b))
}

fn ack(m: i64, n: i64) -> i64 {
    match (m, n) {
        (0, n) => n + 1,
        (m, 0) => ack(m - 1, 1),
        (m, n) => ack(m - 1, ack(m, n - 1)),
    }
}

fn gib(n: u32, x: i64, y: i64) -> i64 {
    match n {
        0 => x,
        1 => y,
        _ => gib(n - 1, x, y) + gib(n - 2, x, y),
    }
}

fn ct1_exact() -> Check {
    let (code, out, err) = stagelet(&["run", "ct1"]);
    ensure!(
        (code, out.as_str(), err.as_str()) == (0, "3\n", ""),
        "run ct1: {code} {out:?} {err:?}"
    );
    let (code, out, err) = stagelet(&["show", "ct1"]);
    ensure!(
        (code, out.as_str(), err.as_str()) == (0, "(1 + 2)\n", ""),
        "show ct1: {code} {out:?} {err:?}"
    );
    Ok(())
}

fn csq_correspondence() -> Check {
    let code = show(&examples::csq()).map_err(|e| e.to_string())?;
    ensure!(
        code.alpha_eq(&A::lam("x", A::mul(v("x"), v("x")))),
        "show(csq) = {code}"
    );
    let r = apply(&run(&examples::csq()).map_err(|e| e.to_string())?, &[3])?;
    ensure!(r == Value::Int(9), "run(csq) 3 = {r}");
    Ok(())
}

fn cgib5_unrolling() -> Check {
    let yx = || A::add(v("y"), v("x"));
    let expected = A::lam(
        "x",
        A::lam(
            "y",
            A::add(A::add(A::add(yx(), v("y")), yx()), A::add(yx(), v("y"))),
        ),
    );
    let code = show(&examples::cgib5()).map_err(|e| e.to_string())?;
    ensure!(code.alpha_eq(&expected), "show(cgib5) = {code}");
    let f = run(&examples::cgib5()).map_err(|e| e.to_string())?;
    for x in 0..=3 {
        for y in 0..=3 {
            let r = apply(&f, &[x, y])?;
            ensure!(r == Value::Int(3 * x + 5 * y), "cgib5 {x} {y} = {r}");
            ensure!(gib(5, x, y) == 3 * x + 5 * y, "oracle disagrees at {x} {y}");
        }
    }
    Ok(())
}

fn clgib5_let_insertion() -> Check {
    let expected = A::lam(
        "x",
        A::lam(
            "y",
            lets(
                &[
                    ("z", v("y")),
                    ("u", v("x")),
                    ("v", A::add(v("z"), v("u"))),
                    ("w", A::add(v("v"), v("z"))),
                    ("x6", A::add(v("w"), v("v"))),
                ],
                A::add(v("x6"), v("w")),
            ),
        ),
    );
    let code = show(&examples::clgib5()).map_err(|e| e.to_string())?;
    ensure!(code.alpha_eq(&expected), "show(clgib5) = {code}");
    let nlets = code.count(&|n| matches!(n, A::Let(..)));
    ensure!(nlets == 5, "{nlets} let binders");
    let f = eval(&code)?;
    let g = eval(&examples::gib5())?;
    for x in 0..=3 {
        for y in 0..=3 {
            let (a, b) = (apply(&f, &[x, y])?, apply(&g, &[x, y])?);
            ensure!(a == b, "at {x} {y}: clgib5 {a}, gib5 {b}");
        }
    }
    Ok(())
}

fn class(key: i64, name: &Name, rhs: A) -> ClassSnapshot {
    ClassSnapshot {
        key: MemoKey(key),
        name: name.clone(),
        aliases: vec![],
        rhs: RhsSnapshot::Canonical(rhs),
    }
}

fn pairs(v: &[(i64, i64)]) -> Vec<(MemoKey, MemoKey)> {
    let set: BTreeSet<_> = v.iter().map(|&(a, b)| (MemoKey(a), MemoKey(b))).collect();
    set.into_iter().collect()
}

fn worked_example() -> Check {
    let expected = lets(
        &[
            ("a", A::add(A::Int(6), A::Int(7))),
            ("b", A::add(v("a"), A::Int(20))),
            ("c", A::add(v("a"), A::Int(30))),
        ],
        A::div(A::mul(v("b"), v("c")), A::Int(100)),
    );
    let code = show(&examples::shared_sums()).map_err(|e| e.to_string())?;
    ensure!(code.alpha_eq(&expected), "show(shared-sums) = {code}");

    // Replay: names are the locations of lines 2, 4 and 6 under locus line 1.
    let l1 = Location::from_path([1]);
    let (n2, n4, n6) = (
        Name::fresh(Location::from_path([2])),
        Name::fresh(Location::from_path([4])),
        Name::fresh(Location::from_path([6])),
    );
    let d3 = mk_add(Show::mk_int(6), Show::mk_int(7));
    let d4 = mk_add(mk_var::<Show>(n2.clone()), Show::mk_int(20));
    let d6 = mk_add(mk_var::<Show>(n2.clone()), Show::mk_int(30));
    let r3 = A::add(A::Int(6), A::Int(7));
    let r4 = A::add(A::Var(n2.clone()), A::Int(20));
    let r6 = A::add(A::Var(n2.clone()), A::Int(30));

    let v2 = PerLocus::empty().addb(MemoKey(1), n2.clone(), Rhs::Canonical(d3));
    let v4 = v2.addb(MemoKey(2), n4.clone(), Rhs::Canonical(d4));
    let v6 = v2.addb(MemoKey(3), n6.clone(), Rhs::Canonical(d6));
    let v5 = merge(
        &VirtualBindings::singleton(l1.clone(), v4.clone()),
        &VirtualBindings::singleton(l1.clone(), v6.clone()),
    )
    .at(&l1);

    let snap = |s: &PerLocus<Show>| -> Result<(Vec<_>, Vec<_>), String> {
        let mut classes = s.snapshot_classes().map_err(|e| e.to_string())?;
        classes.sort_by_key(|c| c.key);
        Ok((s.order().iter().copied().collect(), classes))
    };
    let c1 = class(1, &n2, r3);
    let c2 = class(2, &n4, r4);
    let c3 = class(3, &n6, r6);
    let want = [
        ("v2", &v2, pairs(&[(1, 1)]), vec![c1.clone()]),
        (
            "v4",
            &v4,
            pairs(&[(2, 2), (1, 1), (1, 2)]),
            vec![c1.clone(), c2.clone()],
        ),
        (
            "v6",
            &v6,
            pairs(&[(3, 3), (1, 1), (1, 3)]),
            vec![c1.clone(), c3.clone()],
        ),
        (
            "v5",
            &v5,
            pairs(&[(3, 3), (2, 2), (1, 1), (1, 3), (1, 2), (2, 3)]),
            vec![c1, c2, c3],
        ),
    ];
    for (label, store, order, classes) in want {
        let got = snap(store)?;
        ensure!(got == (order, classes), "{label} = {got:?}");
    }

    // The live store at the division node of the real generator.
    let seen: Arc<Mutex<Option<PerLocus<Show>>>> = Arc::default();
    let stash = seen.clone();
    let g: CodeValue<Show> = with_locus(move |l| {
        let x = genlet(&l, 1, cadd(cint(6), cint(7)));
        let body = cdiv(
            cmul(
                genlet(&l, 2, cadd(x.clone(), cint(20))),
                genlet(&l, 3, cadd(x, cint(30))),
            ),
            cint(100),
        );
        let (stash, locus) = (stash.clone(), l.location().clone());
        CodeValue::new(move |cfg, at| {
            let code: Code<Show> = body.apply(cfg, at)?;
            *stash.lock().unwrap() = Some(code.vb.at(&locus));
            Ok(code)
        })
    });
    show(&g).map_err(|e| e.to_string())?;
    let live = seen.lock().unwrap().clone().ok_or("store not captured")?;
    let order: Vec<_> = live.order().iter().copied().collect();
    ensure!(
        order == pairs(&[(3, 3), (2, 2), (1, 1), (1, 3), (1, 2), (2, 3)]),
        "live order {order:?}"
    );
    ensure!(live.len() == 3, "live store has {} classes", live.len());
    Ok(())
}

fn cack2_letrec() -> Check {
    let n = |s: &str| A::var(s);
    let clause = |arg: &str, callee: &str, me: &str| {
        A::lam(
            arg,
            A::if_(
                A::eq(n(arg), A::Int(0)),
                A::app(n(callee), A::Int(1)),
                A::app(n(callee), A::app(n(me), A::sub(n(arg), A::Int(1)))),
            ),
        )
    };
    let expected = A::letrec(
        vec![
            (Name::source("x"), clause("u", "y", "x")),
            (Name::source("y"), clause("v", "z", "y")),
            (Name::source("z"), A::lam("w", A::add(n("w"), A::Int(1)))),
        ],
        n("x"),
    );
    let code = show(&examples::cack2()).map_err(|e| e.to_string())?;
    ensure!(code.alpha_eq(&expected), "show(cack2) = {code}");
    let f = eval(&code)?;
    for i in 0..=10 {
        let r = apply(&f, &[i])?;
        ensure!(r == Value::Int(2 * i + 3), "A(2,{i}) = {r}");
        ensure!(r == Value::Int(ack(2, i)), "oracle disagrees at {i}");
    }
    let limits = stagelet::Limits::default();
    ensure!(
        limits.canon_limit == DEFAULT_CANON_LIMIT,
        "default round limit"
    );
    Ok(())
}

fn scope_extrusion() -> Check {
    let (code, out, _) = stagelet(&["check", "clgib5-extruded"]);
    ensure!(code == 2, "exit {code}");
    let names = out.strip_prefix("free: ").map(str::trim).unwrap_or("");
    ensure!(!names.is_empty(), "output {out:?}");
    for e in registry() {
        if e.kind == Kind::GeneratorExpectExtrusion {
            continue;
        }
        let (code, out, _) = stagelet(&["check", e.name]);
        ensure!(
            code == 0 && out == "closed\n",
            "check {}: {code} {out:?}",
            e.name
        );
    }
    Ok(())
}

fn property(cases: u32, f: impl FnOnce(&mut TestRunner) -> Result<(), String>) -> Check {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    f(&mut runner)
}

fn names_with_hint(code: &A, hint: &str) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    code.visit(&mut |node| match node {
        A::Var(n) | A::Lam(n, _) | A::Let(n, _, _) if n.hint() == Some(hint) => {
            out.insert(n.clone());
        }
        _ => {}
    });
    out
}

fn sharing() -> Check {
    property(100, |runner| {
        runner
            .run(&shared_program(), |p| {
                let code = show(&p.build()).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let shared = names_with_hint(&code, SHARED_HINT);
                prop_assert_eq!(shared.len(), 1, "{}", &code);
                let lets =
                    code.count(&|n| matches!(n, A::Let(b, _, _) if b.hint() == Some(SHARED_HINT)));
                prop_assert_eq!(lets, 1);
                let rep = shared.into_iter().next().unwrap();
                let uses = code.count(&|n| matches!(n, A::Var(x) if *x == rep));
                prop_assert_eq!(uses, p.requests());
                prop_assert!(code.free_vars().is_empty(), "alias left: {}", code);
                Ok(())
            })
            .map_err(|e| e.to_string())
    })
}

fn order_independence() -> Check {
    property(100, |runner| {
        let trees = any::<bool>().prop_flat_map(|g| gen_tree(5, g));
        runner
            .run(&trees, |t| {
                let left = show(&build(&t, Order::LeftFirst));
                let right = show(&build(&t, Order::RightFirst));
                prop_assert_eq!(left, right);
                Ok(())
            })
            .map_err(|e| e.to_string())
    })
}

fn coherence() -> Check {
    property(100, |runner| {
        runner
            .run(&gen_tree(5, false), |t| {
                let code = show(&build(&t, Order::LeftFirst))
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert!(code.free_vars().is_empty());
                let r = run(&build(&t, Order::LeftFirst))
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                let s = eval(&code).map_err(TestCaseError::fail)?;
                prop_assert!(matches!(r, Value::Int(_) | Value::Bool(_)));
                prop_assert_eq!(s, r);
                Ok(())
            })
            .map_err(|e| e.to_string())
    })
}

/// Stores built from random requests at one locus, some merged in.
fn store() -> impl Strategy<Value = PerLocus<Show>> {
    let reqs = || prop::collection::vec((0i64..5, 0u32..6), 0..7);
    (reqs(), reqs()).prop_map(|(a, b)| {
        let build = |reqs: Vec<(i64, u32)>| {
            reqs.into_iter().fold(PerLocus::empty(), |s, (k, n)| {
                s.addb(
                    MemoKey(k),
                    Name::fresh(Location::from_path([n, k as u32])),
                    Rhs::Canonical(Show::mk_int(k)),
                )
            })
        };
        let l = Location::root();
        merge(
            &VirtualBindings::singleton(l.clone(), build(a)),
            &VirtualBindings::singleton(l.clone(), build(b)),
        )
        .at(&l)
    })
}

fn permutations(keys: &[MemoKey]) -> Vec<Vec<MemoKey>> {
    if keys.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..keys.len() {
        let mut rest = keys.to_vec();
        let k = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, k);
            out.push(p);
        }
    }
    out
}

fn respects(store: &PerLocus<Show>, order: &[MemoKey]) -> bool {
    order
        .iter()
        .enumerate()
        .all(|(i, &a)| order[..i].iter().all(|&b| !store.strictly_before(a, b)))
}

/// Every preorder on every subset of three keys, each class with or
/// without an alias, in every insertion sequence.
fn small_stores() -> Vec<PerLocus<Show>> {
    let universe = [MemoKey(0), MemoKey(1), MemoKey(2)];
    let mut out = Vec::new();
    for mask in 0u8..8 {
        let keys: Vec<_> = universe
            .iter()
            .copied()
            .filter(|k| mask & (1 << k.0) != 0)
            .collect();
        let cross: Vec<_> = keys
            .iter()
            .flat_map(|&a| keys.iter().map(move |&b| (a, b)))
            .filter(|(a, b)| a != b)
            .collect();
        for rel in 0u32..(1 << cross.len()) {
            let mut order: BTreeSet<_> = keys.iter().map(|&k| (k, k)).collect();
            order.extend(
                cross
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| rel & (1 << i) != 0)
                    .map(|(_, p)| *p),
            );
            let transitive = order.iter().all(|&(a, b)| {
                order
                    .iter()
                    .all(|&(c, d)| b != c || order.contains(&(a, d)))
            });
            if !transitive {
                continue;
            }
            for aliased in 0u8..(1 << keys.len()) {
                let classes: Vec<_> = keys
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| {
                        let mut c = BindingClass::new(
                            Name::source(&format!("n{}", k.0)),
                            Rhs::Canonical(Show::mk_int(k.0)),
                        );
                        if aliased & (1 << i) != 0 {
                            c.aliases.insert(Name::source(&format!("a{}", k.0)));
                        }
                        (k, c)
                    })
                    .collect();
                for seq in permutations(&keys) {
                    let store = PerLocus::from_parts(order.clone(), classes.clone(), seq)
                        .expect("enumerated stores are valid");
                    out.push(store);
                }
            }
        }
    }
    out
}

fn machinery_algebra() -> Check {
    // merge with the empty bindings is the identity.
    property(100, |runner| {
        runner
            .run(&(store(), store()), |(a, b)| {
                let vb = VirtualBindings::singleton(Location::root(), a)
                    .with(Location::from_path([2]), b);
                prop_assert_eq!(&merge(&vb, &VirtualBindings::empty()), &vb);
                prop_assert_eq!(&merge(&VirtualBindings::empty(), &vb), &vb);
                Ok(())
            })
            .map_err(|e| e.to_string())
    })?;

    // ordered is one of the orders a brute-force filter accepts.
    property(200, |runner| {
        runner
            .run(&store(), |s| {
                let keys: Vec<_> = s.classes().keys().copied().collect();
                let valid: Vec<_> = permutations(&keys)
                    .into_iter()
                    .filter(|p| respects(&s, p))
                    .collect();
                prop_assert!(!valid.is_empty());
                prop_assert!(valid.contains(&s.ordered_keys()), "{:?}", s.ordered_keys());
                Ok(())
            })
            .map_err(|e| e.to_string())
    })?;

    // addb: an existing key gains an alias, a new key becomes the latest.
    let stores = small_stores();
    ensure!(stores.len() > 100, "only {} small stores", stores.len());
    for s in &stores {
        for k in (0..4).map(MemoKey) {
            for n in [Name::source("fresh"), Name::source(&format!("n{}", k.0))] {
                let out = s.addb(k, n.clone(), Rhs::Canonical(Show::mk_int(99)));
                match s.class(k) {
                    Some(old) => {
                        ensure!(out.order() == s.order(), "order changed on collision");
                        ensure!(
                            out.insertion_seq() == s.insertion_seq(),
                            "sequence changed on collision"
                        );
                        let new = out.class(k).unwrap();
                        let mut aliases = old.aliases.clone();
                        if n != old.name {
                            aliases.insert(n.clone());
                        }
                        ensure!(
                            new.name == old.name && new.aliases == aliases,
                            "bad alias update"
                        );
                        ensure!(new.rhs == old.rhs, "rhs replaced on collision");
                        for (j, c) in s.classes() {
                            ensure!(*j == k || out.class(*j) == Some(c), "other class changed");
                        }
                    }
                    None => {
                        let mut order = s.order().clone();
                        order.extend(s.classes().keys().map(|&j| (j, k)));
                        order.insert((k, k));
                        ensure!(out.order() == &order, "new key is not the latest");
                        let c = out.class(k).unwrap();
                        ensure!(c.name == n && c.aliases.is_empty(), "bad new class");
                        ensure!(out.len() == s.len() + 1, "class count");
                        ensure!(out.insertion_seq().last() == Some(&k), "sequence");
                    }
                }
            }
        }
    }

    // canon is the identity on canonical stores and idempotent otherwise.
    let l = Location::root();
    for s in stores.iter().take(200) {
        let vb = VirtualBindings::singleton(l.clone(), s.clone());
        let once = canon(&vb, &l, DEFAULT_CANON_LIMIT).map_err(|e| e.to_string())?;
        ensure!(once == vb, "canon changed a canonical store");
    }
    let pending = PerLocus::empty()
        .addb(
            MemoKey(0),
            Name::source("f"),
            Rhs::Pending(Pending::new(clam(|x| cadd(x, cint(1))), l.child(5))),
        )
        .addb(
            MemoKey(1),
            Name::source("g"),
            Rhs::Canonical(Show::mk_int(1)),
        );
    let vb = VirtualBindings::singleton(l.clone(), pending);
    let once = canon(&vb, &l, DEFAULT_CANON_LIMIT).map_err(|e| e.to_string())?;
    ensure!(once.at(&l).all_canonical(), "pending left after canon");
    let twice = canon(&once, &l, DEFAULT_CANON_LIMIT).map_err(|e| e.to_string())?;
    ensure!(once == twice, "canon is not idempotent");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("ct1 exactness", ct1_exact),
        ("csq correspondence", csq_correspondence),
        ("cgib5 unrolling", cgib5_unrolling),
        ("clgib5 let-insertion", clgib5_let_insertion),
        ("worked example stores", worked_example),
        ("cack2 letrec-insertion", cack2_letrec),
        ("scope-extrusion detection", scope_extrusion),
        ("sharing property", sharing),
        ("order independence", order_independence),
        ("run/show coherence", coherence),
        ("machinery algebra", machinery_algebra),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
