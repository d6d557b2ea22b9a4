//! The named Base programs and generators, addressable by name.

use std::collections::BTreeMap;

use crate::ast::BaseAst as A;
use crate::codec::{
    cadd, capp, cdiv, ceq, cif, cint, clam, clet, cmul, csub, run_with, show_with, CodeValue,
    Limits,
};
use crate::error::Result;
use crate::eval::eval_ast_with;
use crate::insertion::{genlet, genletrec, with_locus, with_locus_rec, Locus};
use crate::name::Name;
use crate::semantics::{Run, Semantics, Show};
use crate::value::{Fuel, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    BaseProgram,
    Generator,
    /// A generator whose locus is deliberately misplaced.
    GeneratorExpectExtrusion,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::BaseProgram => "base-program",
            Kind::Generator => "generator",
            Kind::GeneratorExpectExtrusion => "generator-expect-extrusion",
        }
    }

    pub fn is_generator(self) -> bool {
        !matches!(self, Kind::BaseProgram)
    }
}

/// A generator built once per semantics.
#[derive(Clone, Copy)]
pub struct Generator {
    pub show: fn() -> CodeValue<Show>,
    pub run: fn() -> CodeValue<Run>,
}

#[derive(Clone, Copy)]
pub enum Builder {
    Base(fn() -> A),
    Gen(Generator),
}

#[derive(Clone, Copy)]
pub struct ExampleEntry {
    pub name: &'static str,
    pub kind: Kind,
    /// Integer arguments the program's value takes.
    pub arity: usize,
    /// The hand-written Base program this generator should agree with.
    pub counterpart: Option<&'static str>,
    pub builder: Builder,
}

impl ExampleEntry {
    /// The code: the program itself, or what the generator generates.
    pub fn code(&self, limits: &Limits) -> Result<A> {
        match self.builder {
            Builder::Base(build) => Ok(build()),
            Builder::Gen(g) => show_with(&(g.show)(), limits),
        }
    }

    /// The meaning before any arguments are supplied.
    pub fn value(&self, limits: &Limits) -> Result<Value> {
        match self.builder {
            Builder::Base(build) => eval_ast_with(&build(), &BTreeMap::new(), &mut limits.fuel()),
            Builder::Gen(g) => run_with(&(g.run)(), limits),
        }
    }

    /// The meaning applied to `args`, one evaluation budget for everything.
    pub fn run_on(&self, args: &[i64], limits: &Limits) -> Result<Value> {
        let mut fuel = limits.fuel();
        let v = match self.builder {
            Builder::Base(build) => eval_ast_with(&build(), &BTreeMap::new(), &mut fuel)?,
            Builder::Gen(g) => run_with(&(g.run)(), limits)?,
        };
        v.apply_ints(args, &mut fuel)
    }
}

/// Uncurried application of `v` to integer arguments.
pub fn apply_ints(v: &Value, args: &[i64]) -> Result<Value> {
    v.apply_ints(args, &mut Fuel::default())
}

pub fn registry() -> Vec<ExampleEntry> {
    fn base(name: &'static str, arity: usize, build: fn() -> A) -> ExampleEntry {
        ExampleEntry {
            name,
            kind: Kind::BaseProgram,
            arity,
            counterpart: None,
            builder: Builder::Base(build),
        }
    }
    fn generator(
        name: &'static str,
        kind: Kind,
        arity: usize,
        counterpart: Option<&'static str>,
        g: Generator,
    ) -> ExampleEntry {
        ExampleEntry {
            name,
            kind,
            arity,
            counterpart,
            builder: Builder::Gen(g),
        }
    }
    macro_rules! both {
        ($f:ident) => {
            Generator {
                show: $f::<Show>,
                run: $f::<Run>,
            }
        };
    }
    vec![
        base("t1", 0, t1),
        base("sq", 1, sq),
        base("gib5", 2, gib5),
        base("ack2", 1, ack2),
        generator("ct1", Kind::Generator, 0, Some("t1"), both!(ct1)),
        generator("csq", Kind::Generator, 1, Some("sq"), both!(csq)),
        generator("cgib5", Kind::Generator, 2, Some("gib5"), both!(cgib5)),
        generator("clet-intro", Kind::Generator, 1, None, both!(clet_intro)),
        generator("clgib5", Kind::Generator, 2, Some("gib5"), both!(clgib5)),
        generator(
            "shared-sums-plain",
            Kind::Generator,
            0,
            None,
            both!(shared_sums_plain),
        ),
        generator("shared-sums", Kind::Generator, 0, None, both!(shared_sums)),
        generator("cack2", Kind::Generator, 1, Some("ack2"), both!(cack2)),
        generator(
            "clgib5-extruded",
            Kind::GeneratorExpectExtrusion,
            2,
            None,
            both!(clgib5_extruded),
        ),
    ]
}

pub fn lookup(name: &str) -> Option<ExampleEntry> {
    registry().into_iter().find(|e| e.name == name)
}

fn n(s: &str) -> Name {
    Name::source(s)
}

/// `1 + 2`
pub fn t1() -> A {
    A::add(A::Int(1), A::Int(2))
}

/// `fun x -> x * x`
pub fn sq() -> A {
    A::lam("x", A::mul(A::var("x"), A::var("x")))
}

/// Fifth element of the Fibonacci-like sequence starting `x, y`.
pub fn gib5() -> A {
    let step = A::lam(
        "n",
        A::if_(
            A::eq(A::var("n"), A::Int(0)),
            A::var("x"),
            A::if_(
                A::eq(A::var("n"), A::Int(1)),
                A::var("y"),
                A::add(
                    A::app(A::var("loop"), A::sub(A::var("n"), A::Int(1))),
                    A::app(A::var("loop"), A::sub(A::var("n"), A::Int(2))),
                ),
            ),
        ),
    );
    A::lam(
        "x",
        A::lam(
            "y",
            A::letrec(vec![(n("loop"), step)], A::app(A::var("loop"), A::Int(5))),
        ),
    )
}

/// The two-argument Ackermann function at `m = 2`.
pub fn ack2() -> A {
    let ack = |m: A, n: A| A::app(A::app(A::var("ack"), m), n);
    let body = A::lam(
        "m",
        A::lam(
            "n",
            A::if_(
                A::eq(A::var("m"), A::Int(0)),
                A::add(A::var("n"), A::Int(1)),
                A::if_(
                    A::eq(A::var("n"), A::Int(0)),
                    ack(A::sub(A::var("m"), A::Int(1)), A::Int(1)),
                    ack(
                        A::sub(A::var("m"), A::Int(1)),
                        ack(A::var("m"), A::sub(A::var("n"), A::Int(1))),
                    ),
                ),
            ),
        ),
    );
    A::letrec(vec![(n("ack"), body)], A::app(A::var("ack"), A::Int(2)))
}

pub fn ct1<X: Semantics>() -> CodeValue<X> {
    cadd(cint(1), cint(2))
}

pub fn csq<X: Semantics>() -> CodeValue<X> {
    clam(|x| cmul(x.clone(), x))
}

/// `gib5` with the loop unrolled at generation time.
pub fn cgib5<X: Semantics>() -> CodeValue<X> {
    fn unroll<X: Semantics>(k: u32, x: &CodeValue<X>, y: &CodeValue<X>) -> CodeValue<X> {
        match k {
            0 => x.clone(),
            1 => y.clone(),
            _ => cadd(unroll(k - 1, x, y), unroll(k - 2, x, y)),
        }
    }
    clam(|x| clam(move |y| unroll(5, &x, &y)))
}

/// `fun x -> let y = 1 + 2 in x + y`, the let placed locally.
pub fn clet_intro<X: Semantics>() -> CodeValue<X> {
    clam(|x| clet(ct1(), move |y| cadd(x.clone(), y)))
}

/// The unrolled loop, each intermediate bound once at `l`.
fn gib_shared<X: Semantics>(k: i64, l: &Locus, x: &CodeValue<X>, y: &CodeValue<X>) -> CodeValue<X> {
    match k {
        0 => x.clone(),
        1 => y.clone(),
        _ => cadd(
            genlet(l, k - 1, gib_shared(k - 1, l, x, y)),
            genlet(l, k - 2, gib_shared(k - 2, l, x, y)),
        ),
    }
}

pub fn clgib5<X: Semantics>() -> CodeValue<X> {
    clam(|x| {
        clam(move |y| {
            let x = x.clone();
            with_locus(move |l| gib_shared(5, &l, &x, &y))
        })
    })
}

/// `clgib5` with the locus above the inner lambda: the bindings that
/// mention `y` land outside its scope.
pub fn clgib5_extruded<X: Semantics>() -> CodeValue<X> {
    clam(|x| {
        with_locus(move |l| {
            let x = x.clone();
            clam(move |y| gib_shared(5, &l, &x, &y))
        })
    })
}

/// `((x + 20) * (x + 30)) / 100` with `x` bound at the host level only.
pub fn shared_sums_plain<X: Semantics>() -> CodeValue<X> {
    with_locus(|_| {
        let x = cadd(cint(6), cint(7));
        cdiv(
            cmul(cadd(x.clone(), cint(20)), cadd(x, cint(30))),
            cint(100),
        )
    })
}

/// The same expression with every sum bound once.
pub fn shared_sums<X: Semantics>() -> CodeValue<X> {
    with_locus(|l| {
        let x = genlet(&l, 1, cadd(cint(6), cint(7)));
        cdiv(
            cmul(
                genlet(&l, 2, cadd(x.clone(), cint(20))),
                genlet(&l, 3, cadd(x, cint(30))),
            ),
            cint(100),
        )
    })
}

/// Ackermann specialized to its first argument; every `ack m` needed is
/// generated once, as one clause of a mutually recursive letrec.
pub fn cack2<X: Semantics>() -> CodeValue<X> {
    fn ack<X: Semantics>(l: &Locus, m: i64) -> CodeValue<X> {
        let l = l.clone();
        clam(move |n| {
            if m == 0 {
                cadd(n, cint(1))
            } else {
                cif(
                    ceq(n.clone(), cint(0)),
                    capp(genletrec(&l, m - 1, ack(&l, m - 1)), cint(1)),
                    capp(
                        genletrec(&l, m - 1, ack(&l, m - 1)),
                        capp(genletrec(&l, m, ack(&l, m)), csub(n, cint(1))),
                    ),
                )
            }
        })
    }
    with_locus_rec(|l| genletrec(&l, 2, ack(&l, 2)))
}
