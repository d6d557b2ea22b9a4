//! Random generator trees for property tests.
//!
//! A [`GenTree`] describes a generator over integers and booleans. Variable
//! references and locus targets are indices resolved modulo what is in scope
//! when the tree is built, so every tree builds to a well-scoped generator:
//! a `genlet` right-hand side only sees variables bound outside its target
//! locus. Memo keys are derived from the right-hand side, so equal keys at a
//! locus always mean equal bindings.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use proptest::prelude::*;

use crate::ast::BinOp;
use crate::codec::{
    cadd, capp, cbinop, cbool, ceq, cif, cint, clam, clet, csub, csucc, Code, CodeValue,
};
use crate::insertion::{genlet, genlet_named, with_locus, Locus};
use crate::name::Name;
use crate::semantics::Semantics;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntTree {
    Lit(i64),
    /// The `i`-th innermost integer variable in scope, modulo their number.
    Var(usize),
    Add(Arc<IntTree>, Arc<IntTree>),
    Sub(Arc<IntTree>, Arc<IntTree>),
    Scale(i64, Arc<IntTree>),
    Succ(Arc<IntTree>),
    If(Arc<BoolTree>, Arc<IntTree>, Arc<IntTree>),
    /// `let v = rhs in body`, placed where it stands.
    Let(Arc<IntTree>, Arc<IntTree>),
    /// `(fun v -> body) arg`.
    Beta(Arc<IntTree>, Arc<IntTree>),
    /// A `with_locus` around the subtree.
    Locus(Arc<IntTree>),
    /// A `genlet` to the `target`-th innermost locus, modulo their number;
    /// the right-hand side is used inline when no locus is in scope.
    Genlet {
        target: usize,
        rhs: Arc<IntTree>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolTree {
    Lit(bool),
    Eq(Arc<IntTree>, Arc<IntTree>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GenTree {
    Int(IntTree),
    Bool(BoolTree),
}

impl IntTree {
    pub fn has_genlet(&self) -> bool {
        match self {
            IntTree::Lit(_) | IntTree::Var(_) => false,
            IntTree::Genlet { .. } => true,
            IntTree::Scale(_, a) | IntTree::Succ(a) | IntTree::Locus(a) => a.has_genlet(),
            IntTree::Add(a, b) | IntTree::Sub(a, b) | IntTree::Let(a, b) | IntTree::Beta(a, b) => {
                a.has_genlet() || b.has_genlet()
            }
            IntTree::If(c, t, e) => c.has_genlet() || t.has_genlet() || e.has_genlet(),
        }
    }
}

impl BoolTree {
    pub fn has_genlet(&self) -> bool {
        match self {
            BoolTree::Lit(_) => false,
            BoolTree::Eq(a, b) => a.has_genlet() || b.has_genlet(),
        }
    }
}

impl GenTree {
    pub fn has_genlet(&self) -> bool {
        match self {
            GenTree::Int(t) => t.has_genlet(),
            GenTree::Bool(t) => t.has_genlet(),
        }
    }
}

/// Which child of a node is generated first. Results are combined the
/// same way either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    LeftFirst,
    RightFirst,
}

struct Ctx<X: Semantics> {
    vars: Vec<CodeValue<X>>,
    /// Each locus with the number of variables in scope at it.
    loci: Vec<(Locus, usize)>,
    order: Order,
}

impl<X: Semantics> Clone for Ctx<X> {
    fn clone(&self) -> Self {
        Ctx {
            vars: self.vars.clone(),
            loci: self.loci.clone(),
            order: self.order,
        }
    }
}

impl<X: Semantics> Ctx<X> {
    fn new(order: Order) -> Self {
        Ctx {
            vars: Vec::new(),
            loci: Vec::new(),
            order,
        }
    }

    fn with_var(&self, v: CodeValue<X>) -> Self {
        let mut c = self.clone();
        c.vars.push(v);
        c
    }

    fn with_locus(&self, l: Locus) -> Self {
        let mut c = self.clone();
        c.loci.push((l, c.vars.len()));
        c
    }
}

/// Memo key of a binding, determined by its right-hand side.
pub fn key_of(rhs: &IntTree) -> i64 {
    let mut h = DefaultHasher::new();
    rhs.hash(&mut h);
    h.finish() as i64
}

pub fn build<X: Semantics>(t: &GenTree, order: Order) -> CodeValue<X> {
    let ctx = Ctx::new(order);
    match t {
        GenTree::Int(t) => build_int(t, &ctx),
        GenTree::Bool(t) => build_bool(t, &ctx),
    }
}

fn build_bool<X: Semantics>(t: &BoolTree, ctx: &Ctx<X>) -> CodeValue<X> {
    match t {
        BoolTree::Lit(b) => cbool(*b),
        BoolTree::Eq(a, b) => binop(ctx.order, BinOp::Eq, build_int(a, ctx), build_int(b, ctx)),
    }
}

fn build_int<X: Semantics>(t: &IntTree, ctx: &Ctx<X>) -> CodeValue<X> {
    match t {
        IntTree::Lit(i) => cint(*i),
        IntTree::Var(i) => match ctx.vars.len() {
            0 => cint(*i as i64),
            n => ctx.vars[n - 1 - i % n].clone(),
        },
        IntTree::Add(a, b) => binop(ctx.order, BinOp::Add, build_int(a, ctx), build_int(b, ctx)),
        IntTree::Sub(a, b) => binop(ctx.order, BinOp::Sub, build_int(a, ctx), build_int(b, ctx)),
        IntTree::Scale(k, a) => binop(ctx.order, BinOp::Mul, cint(*k), build_int(a, ctx)),
        IntTree::Succ(a) => csucc(build_int(a, ctx)),
        IntTree::If(c, t, e) => {
            let (c, t, e) = (build_bool(c, ctx), build_int(t, ctx), build_int(e, ctx));
            match ctx.order {
                Order::LeftFirst => cif(c, t, e),
                Order::RightFirst => rev_if(c, t, e),
            }
        }
        IntTree::Let(rhs, body) => {
            let rhs = build_int(rhs, ctx);
            let (body, ctx) = (body.clone(), ctx.clone());
            let order = ctx.order;
            let body = move |v| build_int(&body, &ctx.with_var(v));
            match order {
                Order::LeftFirst => clet(rhs, body),
                Order::RightFirst => rev_let(rhs, body),
            }
        }
        IntTree::Beta(body, arg) => {
            let (body, inner) = (body.clone(), ctx.clone());
            let f = clam(move |v| build_int(&body, &inner.with_var(v)));
            let a = build_int(arg, ctx);
            match ctx.order {
                Order::LeftFirst => capp(f, a),
                Order::RightFirst => rev_app(f, a),
            }
        }
        IntTree::Locus(body) => {
            let (body, ctx) = (body.clone(), ctx.clone());
            with_locus(move |l| build_int(&body, &ctx.with_locus(l)))
        }
        IntTree::Genlet { target, rhs } => match ctx.loci.len() {
            0 => build_int(rhs, ctx),
            n => {
                let idx = n - 1 - target % n;
                let (locus, nvars) = ctx.loci[idx].clone();
                let inner = Ctx {
                    vars: ctx.vars[..nvars].to_vec(),
                    loci: ctx.loci[..=idx].to_vec(),
                    order: ctx.order,
                };
                genlet(&locus, key_of(rhs), build_int(rhs, &inner))
            }
        },
    }
}

fn binop<X: Semantics>(order: Order, op: BinOp, a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    match order {
        Order::LeftFirst => match op {
            BinOp::Add => cadd(a, b),
            BinOp::Sub => csub(a, b),
            BinOp::Eq => ceq(a, b),
            _ => cbinop(op, a, b),
        },
        Order::RightFirst => CodeValue::new(move |cfg, at| {
            let b = b.apply(cfg, &at.child(2))?;
            let a = a.apply(cfg, &at.child(1))?;
            Ok(Code {
                den: X::mk_binop(op, a.den, b.den),
                vb: a.vb.merge(&b.vb),
            })
        }),
    }
}

fn rev_if<X: Semantics>(c: CodeValue<X>, t: CodeValue<X>, e: CodeValue<X>) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let e = e.apply(cfg, &at.child(3))?;
        let t = t.apply(cfg, &at.child(2))?;
        let c = c.apply(cfg, &at.child(1))?;
        Ok(Code {
            den: X::mk_if(c.den, t.den, e.den),
            vb: c.vb.merge(&t.vb).merge(&e.vb),
        })
    })
}

fn rev_app<X: Semantics>(f: CodeValue<X>, a: CodeValue<X>) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let a = a.apply(cfg, &at.child(2))?;
        let f = f.apply(cfg, &at.child(1))?;
        Ok(Code {
            den: X::mk_app(f.den, a.den),
            vb: f.vb.merge(&a.vb),
        })
    })
}

fn rev_let<X: Semantics>(
    rhs: CodeValue<X>,
    body: impl Fn(CodeValue<X>) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let name = Name::fresh(at.clone());
        let b = body(CodeValue::var(name.clone())).apply(cfg, &at.child(2))?;
        let r = rhs.apply(cfg, &at.child(1))?;
        Ok(Code {
            den: X::mk_let(name, r.den, b.den),
            vb: r.vb.merge(&b.vb),
        })
    })
}

/// Integer trees of nesting depth at most `depth`.
pub fn int_tree(depth: u32, with_genlet: bool) -> BoxedStrategy<IntTree> {
    let leaf = prop_oneof![
        (-20i64..=20).prop_map(IntTree::Lit),
        (0usize..4).prop_map(IntTree::Var)
    ];
    leaf.prop_recursive(depth, 48, 3, move |inner| {
        let a = || inner.clone().prop_map(Arc::new);
        let cond = (a(), a()).prop_map(|(x, y)| Arc::new(BoolTree::Eq(x, y)));
        let plain = prop_oneof![
            (a(), a()).prop_map(|(x, y)| IntTree::Add(x, y)),
            (a(), a()).prop_map(|(x, y)| IntTree::Sub(x, y)),
            (-3i64..=3, a()).prop_map(|(k, x)| IntTree::Scale(k, x)),
            a().prop_map(IntTree::Succ),
            (cond, a(), a()).prop_map(|(c, t, e)| IntTree::If(c, t, e)),
            (a(), a()).prop_map(|(r, b)| IntTree::Let(r, b)),
            (a(), a()).prop_map(|(b, x)| IntTree::Beta(b, x)),
        ];
        if with_genlet {
            prop_oneof![
                4 => plain,
                1 => a().prop_map(IntTree::Locus),
                2 => (0usize..3, a()).prop_map(|(target, rhs)| IntTree::Genlet { target, rhs }),
            ]
            .boxed()
        } else {
            plain.boxed()
        }
    })
    .boxed()
}

/// Closed trees of integer or boolean type. With `with_genlet`, the root
/// is a locus so that bindings have somewhere to go.
pub fn gen_tree(depth: u32, with_genlet: bool) -> BoxedStrategy<GenTree> {
    let int = int_tree(depth.saturating_sub(1), with_genlet);
    let root = if with_genlet {
        int.prop_map(|t| IntTree::Locus(Arc::new(t))).boxed()
    } else {
        int
    };
    let root2 = root.clone();
    prop_oneof![
        3 => root.prop_map(GenTree::Int),
        1 => (root2.clone(), root2).prop_map(|(a, b)| GenTree::Bool(BoolTree::Eq(Arc::new(a), Arc::new(b)))),
    ]
    .boxed()
}

/// `k` requests of one binding at one locus, mixed with unrelated code:
/// `fun x -> locus (f1 + shared) + ... + (fk + shared)`.
#[derive(Debug, Clone)]
pub struct SharedProgram {
    pub rhs: IntTree,
    pub fillers: Vec<IntTree>,
}

/// Hint of every request of the shared binding.
pub const SHARED_HINT: &str = "shared";

impl SharedProgram {
    pub fn requests(&self) -> usize {
        self.fillers.len()
    }

    pub fn build<X: Semantics>(&self) -> CodeValue<X> {
        let this = self.clone();
        clam(move |x| {
            let this = this.clone();
            with_locus(move |l| {
                let outer = Ctx::new(Order::LeftFirst).with_var(x.clone());
                let inside = outer.with_locus(l.clone());
                let key = key_of(&this.rhs);
                this.fillers
                    .iter()
                    .map(|f| {
                        let shared =
                            genlet_named(Some(SHARED_HINT), &l, key, build_int(&this.rhs, &outer));
                        cadd(build_int(f, &inside), shared)
                    })
                    .reduce(cadd)
                    .expect("at least one request")
            })
        })
    }
}

/// Programs with between 1 and 5 requests of the shared binding.
pub fn shared_program() -> impl Strategy<Value = SharedProgram> {
    (
        int_tree(3, false),
        prop::collection::vec(int_tree(3, false), 1..=5),
    )
        .prop_map(|(rhs, fillers)| SharedProgram { rhs, fillers })
}
