//! First-order syntax of generated Base code.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::name::Name;

/// Arity-2 integer constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// Integer division, truncating toward zero.
    Div,
    /// Integer equality; yields a boolean.
    Eq,
}

impl BinOp {
    pub const ALL: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Eq];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "=",
        }
    }

    pub fn sexp_tag(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Eq => "eq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseAst {
    Int(i64),
    Bool(bool),
    Var(Name),
    Succ(Arc<BaseAst>),
    Bin(BinOp, Arc<BaseAst>, Arc<BaseAst>),
    If(Arc<BaseAst>, Arc<BaseAst>, Arc<BaseAst>),
    Lam(Name, Arc<BaseAst>),
    App(Arc<BaseAst>, Arc<BaseAst>),
    Let(Name, Arc<BaseAst>, Arc<BaseAst>),
    /// Mutually recursive clauses; every clause name scopes over all
    /// right-hand sides and the body.
    LetRec(Vec<(Name, Arc<BaseAst>)>, Arc<BaseAst>),
}

impl BaseAst {
    pub fn var(name: impl Into<Name>) -> Self {
        BaseAst::Var(name.into())
    }

    pub fn succ(a: BaseAst) -> Self {
        BaseAst::Succ(Arc::new(a))
    }

    pub fn bin(op: BinOp, a: BaseAst, b: BaseAst) -> Self {
        BaseAst::Bin(op, Arc::new(a), Arc::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: BaseAst, b: BaseAst) -> Self {
        Self::bin(BinOp::Add, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: BaseAst, b: BaseAst) -> Self {
        Self::bin(BinOp::Sub, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: BaseAst, b: BaseAst) -> Self {
        Self::bin(BinOp::Mul, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: BaseAst, b: BaseAst) -> Self {
        Self::bin(BinOp::Div, a, b)
    }

    pub fn eq(a: BaseAst, b: BaseAst) -> Self {
        Self::bin(BinOp::Eq, a, b)
    }

    pub fn if_(c: BaseAst, t: BaseAst, e: BaseAst) -> Self {
        BaseAst::If(Arc::new(c), Arc::new(t), Arc::new(e))
    }

    pub fn lam(n: impl Into<Name>, body: BaseAst) -> Self {
        BaseAst::Lam(n.into(), Arc::new(body))
    }

    pub fn app(f: BaseAst, a: BaseAst) -> Self {
        BaseAst::App(Arc::new(f), Arc::new(a))
    }

    pub fn let_(n: impl Into<Name>, rhs: BaseAst, body: BaseAst) -> Self {
        BaseAst::Let(n.into(), Arc::new(rhs), Arc::new(body))
    }

    pub fn letrec(clauses: Vec<(Name, BaseAst)>, body: BaseAst) -> Self {
        assert!(!clauses.is_empty(), "letrec needs at least one clause");
        BaseAst::LetRec(
            clauses.into_iter().map(|(n, r)| (n, Arc::new(r))).collect(),
            Arc::new(body),
        )
    }

    /// Fully parenthesized concrete syntax.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        write_pretty(self, &mut out).expect("writing to a String");
        out
    }

    /// Canonical prefix form, one space between items.
    pub fn to_sexp(&self) -> String {
        let mut out = String::new();
        write_sexp(self, &mut out).expect("writing to a String");
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut bound = Vec::new();
        let mut free = BTreeSet::new();
        collect_free(self, &mut bound, &mut free);
        free
    }

    /// Equality up to consistent renaming of bound names.
    pub fn alpha_eq(&self, other: &BaseAst) -> bool {
        alpha(self, other, &mut Vec::new())
    }

    /// Number of nodes satisfying `pred`, counted over the whole tree.
    pub fn count(&self, pred: &dyn Fn(&BaseAst) -> bool) -> usize {
        let here = usize::from(pred(self));
        here + self.children().map(|c| c.count(pred)).sum::<usize>()
    }

    /// Names introduced by `Lam`, `Let` and `LetRec`, in preorder.
    pub fn binders(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit(&mut |node| match node {
            BaseAst::Lam(n, _) | BaseAst::Let(n, _, _) => out.push(n.clone()),
            BaseAst::LetRec(clauses, _) => out.extend(clauses.iter().map(|(n, _)| n.clone())),
            _ => {}
        });
        out
    }

    /// Preorder traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&BaseAst)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn children(&self) -> Box<dyn Iterator<Item = &BaseAst> + '_> {
        match self {
            BaseAst::Int(_) | BaseAst::Bool(_) | BaseAst::Var(_) => Box::new(std::iter::empty()),
            BaseAst::Succ(a) | BaseAst::Lam(_, a) => Box::new(std::iter::once(&**a)),
            BaseAst::Bin(_, a, b) | BaseAst::App(a, b) | BaseAst::Let(_, a, b) => {
                Box::new([&**a, &**b].into_iter())
            }
            BaseAst::If(c, t, e) => Box::new([&**c, &**t, &**e].into_iter()),
            BaseAst::LetRec(clauses, body) => Box::new(
                clauses
                    .iter()
                    .map(|(_, r)| &**r)
                    .chain(std::iter::once(&**body)),
            ),
        }
    }
}

impl fmt::Display for BaseAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pretty(self, f)
    }
}

fn write_pretty(ast: &BaseAst, out: &mut impl fmt::Write) -> fmt::Result {
    match ast {
        BaseAst::Int(i) => write!(out, "{i}"),
        BaseAst::Bool(b) => write!(out, "{b}"),
        BaseAst::Var(n) => write!(out, "{n}"),
        BaseAst::Succ(a) => {
            out.write_str("(succ ")?;
            write_pretty(a, out)?;
            out.write_char(')')
        }
        BaseAst::Bin(op, a, b) => {
            out.write_char('(')?;
            write_pretty(a, out)?;
            write!(out, " {} ", op.symbol())?;
            write_pretty(b, out)?;
            out.write_char(')')
        }
        BaseAst::If(c, t, e) => {
            out.write_str("(if ")?;
            write_pretty(c, out)?;
            out.write_str(" then ")?;
            write_pretty(t, out)?;
            out.write_str(" else ")?;
            write_pretty(e, out)?;
            out.write_char(')')
        }
        BaseAst::Lam(n, body) => {
            write!(out, "(fun {n} -> ")?;
            write_pretty(body, out)?;
            out.write_char(')')
        }
        BaseAst::App(fun, arg) => {
            out.write_char('(')?;
            write_pretty(fun, out)?;
            out.write_char(' ')?;
            write_pretty(arg, out)?;
            out.write_char(')')
        }
        BaseAst::Let(n, rhs, body) => {
            write!(out, "(let {n} = ")?;
            write_pretty(rhs, out)?;
            out.write_str(" in ")?;
            write_pretty(body, out)?;
            out.write_char(')')
        }
        BaseAst::LetRec(clauses, body) => {
            out.write_str("(let rec ")?;
            for (i, (n, rhs)) in clauses.iter().enumerate() {
                if i > 0 {
                    out.write_str(" and ")?;
                }
                write!(out, "{n} = ")?;
                write_pretty(rhs, out)?;
            }
            out.write_str(" in ")?;
            write_pretty(body, out)?;
            out.write_char(')')
        }
    }
}

fn write_sexp(ast: &BaseAst, out: &mut impl fmt::Write) -> fmt::Result {
    match ast {
        BaseAst::Int(i) => write!(out, "(int {i})"),
        BaseAst::Bool(b) => write!(out, "(bool {b})"),
        BaseAst::Var(n) => write!(out, "(var {n})"),
        BaseAst::Succ(a) => {
            out.write_str("(succ ")?;
            write_sexp(a, out)?;
            out.write_char(')')
        }
        BaseAst::Bin(op, a, b) => {
            write!(out, "({} ", op.sexp_tag())?;
            write_sexp(a, out)?;
            out.write_char(' ')?;
            write_sexp(b, out)?;
            out.write_char(')')
        }
        BaseAst::If(c, t, e) => {
            out.write_str("(if ")?;
            write_sexp(c, out)?;
            out.write_char(' ')?;
            write_sexp(t, out)?;
            out.write_char(' ')?;
            write_sexp(e, out)?;
            out.write_char(')')
        }
        BaseAst::Lam(n, body) => {
            write!(out, "(lam {n} ")?;
            write_sexp(body, out)?;
            out.write_char(')')
        }
        BaseAst::App(fun, arg) => {
            out.write_str("(app ")?;
            write_sexp(fun, out)?;
            out.write_char(' ')?;
            write_sexp(arg, out)?;
            out.write_char(')')
        }
        BaseAst::Let(n, rhs, body) => {
            write!(out, "(let {n} ")?;
            write_sexp(rhs, out)?;
            out.write_char(' ')?;
            write_sexp(body, out)?;
            out.write_char(')')
        }
        BaseAst::LetRec(clauses, body) => {
            out.write_str("(letrec (")?;
            for (i, (n, rhs)) in clauses.iter().enumerate() {
                if i > 0 {
                    out.write_char(' ')?;
                }
                write!(out, "({n} ")?;
                write_sexp(rhs, out)?;
                out.write_char(')')?;
            }
            out.write_str(") ")?;
            write_sexp(body, out)?;
            out.write_char(')')
        }
    }
}

fn collect_free(ast: &BaseAst, bound: &mut Vec<Name>, free: &mut BTreeSet<Name>) {
    match ast {
        BaseAst::Int(_) | BaseAst::Bool(_) => {}
        BaseAst::Var(n) => {
            if !bound.contains(n) {
                free.insert(n.clone());
            }
        }
        BaseAst::Succ(a) => collect_free(a, bound, free),
        BaseAst::Bin(_, a, b) | BaseAst::App(a, b) => {
            collect_free(a, bound, free);
            collect_free(b, bound, free);
        }
        BaseAst::If(c, t, e) => {
            collect_free(c, bound, free);
            collect_free(t, bound, free);
            collect_free(e, bound, free);
        }
        BaseAst::Lam(n, body) => {
            bound.push(n.clone());
            collect_free(body, bound, free);
            bound.pop();
        }
        BaseAst::Let(n, rhs, body) => {
            collect_free(rhs, bound, free);
            bound.push(n.clone());
            collect_free(body, bound, free);
            bound.pop();
        }
        BaseAst::LetRec(clauses, body) => {
            let mark = bound.len();
            bound.extend(clauses.iter().map(|(n, _)| n.clone()));
            for (_, rhs) in clauses {
                collect_free(rhs, bound, free);
            }
            collect_free(body, bound, free);
            bound.truncate(mark);
        }
    }
}

/// Binder pairs, innermost last. Two variables correspond when both resolve
/// to the same pair, or both are free and identical.
fn alpha(a: &BaseAst, b: &BaseAst, pairs: &mut Vec<(Name, Name)>) -> bool {
    use BaseAst::*;
    match (a, b) {
        (Int(x), Int(y)) => x == y,
        (Bool(x), Bool(y)) => x == y,
        (Var(x), Var(y)) => {
            let left = pairs.iter().rposition(|(l, _)| l == x);
            let right = pairs.iter().rposition(|(_, r)| r == y);
            match (left, right) {
                (None, None) => x == y,
                (l, r) => l == r,
            }
        }
        (Succ(x), Succ(y)) => alpha(x, y, pairs),
        (Bin(o1, a1, b1), Bin(o2, a2, b2)) => {
            o1 == o2 && alpha(a1, a2, pairs) && alpha(b1, b2, pairs)
        }
        (If(c1, t1, e1), If(c2, t2, e2)) => {
            alpha(c1, c2, pairs) && alpha(t1, t2, pairs) && alpha(e1, e2, pairs)
        }
        (App(f1, a1), App(f2, a2)) => alpha(f1, f2, pairs) && alpha(a1, a2, pairs),
        (Lam(n1, b1), Lam(n2, b2)) => {
            pairs.push((n1.clone(), n2.clone()));
            let same = alpha(b1, b2, pairs);
            pairs.pop();
            same
        }
        (Let(n1, r1, b1), Let(n2, r2, b2)) => {
            if !alpha(r1, r2, pairs) {
                return false;
            }
            pairs.push((n1.clone(), n2.clone()));
            let same = alpha(b1, b2, pairs);
            pairs.pop();
            same
        }
        (LetRec(c1, b1), LetRec(c2, b2)) => {
            if c1.len() != c2.len() {
                return false;
            }
            let mark = pairs.len();
            pairs.extend(
                c1.iter()
                    .zip(c2)
                    .map(|((n1, _), (n2, _))| (n1.clone(), n2.clone())),
            );
            let same = c1
                .iter()
                .zip(c2)
                .all(|((_, r1), (_, r2))| alpha(r1, r2, pairs))
                && alpha(b1, b2, pairs);
            pairs.truncate(mark);
            same
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Location;
    use BaseAst as A;

    fn x() -> Name {
        Name::source("x")
    }

    #[test]
    fn pretty_examples() {
        assert_eq!(A::add(A::Int(1), A::Int(2)).pretty(), "(1 + 2)");
        assert_eq!(A::var("x").pretty(), "x");
        assert_eq!(A::lam("x", A::var("x")).pretty(), "(fun x -> x)");
        assert_eq!(
            A::let_("x", A::Int(3), A::add(A::var("x"), A::var("x"))).pretty(),
            "(let x = 3 in (x + x))"
        );
        assert_eq!(
            A::if_(A::Bool(true), A::succ(A::Int(-1)), A::Int(2)).pretty(),
            "(if true then (succ -1) else 2)"
        );
        let f = Name::source("f");
        let g = Name::source("g");
        let rec = A::letrec(
            vec![(f.clone(), A::var("g")), (g.clone(), A::var("f"))],
            A::app(A::var("f"), A::Int(0)),
        );
        assert_eq!(rec.pretty(), "(let rec f = g and g = f in (f 0))");
        let fresh = A::var(Name::fresh(Location::from_path([1, 2])));
        assert_eq!(fresh.pretty(), "v1_2");
    }

    #[test]
    fn sexp_examples() {
        assert_eq!(
            A::add(A::Int(1), A::Int(2)).to_sexp(),
            "(add (int 1) (int 2))"
        );
        assert_eq!(A::lam("x", A::var("x")).to_sexp(), "(lam x (var x))");
        assert_eq!(
            A::if_(A::Bool(true), A::Int(1), A::Int(2)).to_sexp(),
            "(if (bool true) (int 1) (int 2))"
        );
        let rec = A::letrec(
            vec![
                (Name::source("a"), A::Int(1)),
                (Name::source("b"), A::Int(2)),
            ],
            A::var("a"),
        );
        assert_eq!(rec.to_sexp(), "(letrec ((a (int 1)) (b (int 2))) (var a))");
        assert_eq!(
            A::let_("x", A::succ(A::Int(0)), A::var("x")).to_sexp(),
            "(let x (succ (int 0)) (var x))"
        );
    }

    #[test]
    fn free_vars_examples() {
        assert!(A::lam("x", A::var("x")).free_vars().is_empty());
        let fv = A::add(A::var("y"), A::Int(1)).free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), vec![Name::source("y")]);
        // letrec names scope over every clause
        let rec = A::letrec(
            vec![
                (Name::source("f"), A::var("g")),
                (Name::source("g"), A::var("h")),
            ],
            A::var("f"),
        );
        assert_eq!(
            rec.free_vars().into_iter().collect::<Vec<_>>(),
            vec![Name::source("h")]
        );
        // let does not bind in its own rhs
        let l = A::let_("x", A::var("x"), A::var("x"));
        assert_eq!(l.free_vars().into_iter().collect::<Vec<_>>(), vec![x()]);
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(A::lam("x", A::var("x")).alpha_eq(&A::lam("y", A::var("y"))));
        let a = A::lam("x", A::lam("y", A::var("x")));
        let b = A::lam("a", A::lam("b", A::var("b")));
        assert!(!a.alpha_eq(&b));
        // free names must match exactly
        assert!(!A::var("x").alpha_eq(&A::var("y")));
        // a bound name never matches a free one
        assert!(!A::lam("x", A::var("x")).alpha_eq(&A::lam("y", A::var("x"))));
        let s1 = A::lam("x", A::mul(A::var("x"), A::var("x")));
        let s2 = A::lam(
            Name::fresh(Location::root()),
            A::mul(
                A::var(Name::fresh(Location::root())),
                A::var(Name::fresh(Location::root())),
            ),
        );
        assert!(s1.alpha_eq(&s2));
    }

    #[test]
    fn alpha_eq_shadowing() {
        // fun x -> fun x -> x  ~  fun a -> fun b -> b
        let a = A::lam("x", A::lam("x", A::var("x")));
        let b = A::lam("a", A::lam("b", A::var("b")));
        let c = A::lam("a", A::lam("b", A::var("a")));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn alpha_eq_letrec_is_positional() {
        let f = Name::source("f");
        let g = Name::source("g");
        let a = A::letrec(
            vec![(f.clone(), A::var("g")), (g.clone(), A::Int(1))],
            A::var("f"),
        );
        let b = A::letrec(
            vec![
                (Name::source("p"), A::var("q")),
                (Name::source("q"), A::Int(1)),
            ],
            A::var("p"),
        );
        let swapped = A::letrec(
            vec![
                (Name::source("q"), A::Int(1)),
                (Name::source("p"), A::var("q")),
            ],
            A::var("p"),
        );
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&swapped));
    }

    #[test]
    fn binders_and_counts() {
        let t = A::lam(
            "x",
            A::let_("y", A::Int(1), A::add(A::var("x"), A::var("y"))),
        );
        assert_eq!(t.binders(), vec![x(), Name::source("y")]);
        assert_eq!(t.count(&|n| matches!(n, A::Var(_))), 2);
    }
}
