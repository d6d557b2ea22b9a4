//! Code-generating combinators.
//!
//! A [`CodeValue`] is a deterministic function from the [`Location`] it is
//! generated at to a [`Code`]: the denotation of the generated expression
//! plus the virtual bindings floating up from inside it. Combinators place
//! their children at `child(1)`, `child(2)`, `child(3)` of their own
//! location, and binders use their own location as the fresh name, so
//! generated names are unique without any counter or state.
//!
//! Binders take host closures (higher-order abstract syntax): `clam(|x|
//! cmul(x.clone(), x))` generates `fun v -> v * v`.

use std::fmt;
use std::sync::Arc;

use crate::ast::{BaseAst, BinOp};
use crate::error::{Error, Result};
use crate::insertion::VirtualBindings;
use crate::name::{Location, Name};
use crate::semantics::{mk_var, Denotation, Run, Semantics, Show};
use crate::value::{Fuel, Value, DEFAULT_DEPTH_LIMIT, DEFAULT_STEP_LIMIT};

pub const DEFAULT_CANON_LIMIT: usize = 10_000;

/// Generation-time settings, threaded to every combinator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    /// Forcing rounds allowed per recursive locus before giving up.
    pub canon_limit: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            canon_limit: DEFAULT_CANON_LIMIT,
        }
    }
}

/// Every bound used by [`run_with`] and [`show_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub step_limit: u64,
    pub depth_limit: usize,
    pub canon_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            step_limit: DEFAULT_STEP_LIMIT,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            canon_limit: DEFAULT_CANON_LIMIT,
        }
    }
}

impl Limits {
    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            canon_limit: self.canon_limit,
        }
    }

    pub fn fuel(&self) -> Fuel {
        Fuel::with_depth_limit(self.step_limit, self.depth_limit)
    }
}

/// A generated expression together with its pending let-bindings.
pub struct Code<X: Semantics> {
    pub den: Denotation<X>,
    pub vb: VirtualBindings<X>,
}

impl<X: Semantics> Clone for Code<X> {
    fn clone(&self) -> Self {
        Code {
            den: self.den.clone(),
            vb: self.vb.clone(),
        }
    }
}

impl<X: Semantics> fmt::Debug for Code<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Code")
            .field("den", &self.den)
            .field("vb", &self.vb)
            .finish()
    }
}

impl<X: Semantics> Code<X> {
    pub fn plain(den: Denotation<X>) -> Self {
        Code {
            den,
            vb: VirtualBindings::empty(),
        }
    }
}

type GenFn<X> = dyn Fn(&GenConfig, &Location) -> Result<Code<X>> + Send + Sync;

/// A code generator.
pub struct CodeValue<X: Semantics>(Arc<GenFn<X>>);

impl<X: Semantics> Clone for CodeValue<X> {
    fn clone(&self) -> Self {
        CodeValue(self.0.clone())
    }
}

impl<X: Semantics> fmt::Debug for CodeValue<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CodeValue<{}>@{:p}", X::NAME, Arc::as_ptr(&self.0))
    }
}

impl<X: Semantics> CodeValue<X> {
    pub fn new(
        f: impl Fn(&GenConfig, &Location) -> Result<Code<X>> + Send + Sync + 'static,
    ) -> Self {
        CodeValue(Arc::new(f))
    }

    pub fn apply(&self, cfg: &GenConfig, at: &Location) -> Result<Code<X>> {
        (self.0)(cfg, at)
    }

    pub fn same(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Reference to `name`, wherever it is placed.
    pub(crate) fn var(name: Name) -> Self {
        CodeValue::new(move |_, _| Ok(Code::plain(mk_var(name.clone()))))
    }
}

pub fn cint<X: Semantics>(i: i64) -> CodeValue<X> {
    CodeValue::new(move |_, _| Ok(Code::plain(X::mk_int(i))))
}

pub fn cbool<X: Semantics>(b: bool) -> CodeValue<X> {
    CodeValue::new(move |_, _| Ok(Code::plain(X::mk_bool(b))))
}

pub fn csucc<X: Semantics>(a: CodeValue<X>) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let a = a.apply(cfg, &at.child(1))?;
        Ok(Code {
            den: X::mk_succ(a.den),
            vb: a.vb,
        })
    })
}

pub fn cbinop<X: Semantics>(op: BinOp, a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let a = a.apply(cfg, &at.child(1))?;
        let b = b.apply(cfg, &at.child(2))?;
        Ok(Code {
            den: X::mk_binop(op, a.den, b.den),
            vb: a.vb.merge(&b.vb),
        })
    })
}

pub fn cadd<X: Semantics>(a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    cbinop(BinOp::Add, a, b)
}

pub fn csub<X: Semantics>(a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    cbinop(BinOp::Sub, a, b)
}

pub fn cmul<X: Semantics>(a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    cbinop(BinOp::Mul, a, b)
}

pub fn cdiv<X: Semantics>(a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    cbinop(BinOp::Div, a, b)
}

pub fn ceq<X: Semantics>(a: CodeValue<X>, b: CodeValue<X>) -> CodeValue<X> {
    cbinop(BinOp::Eq, a, b)
}

pub fn cif<X: Semantics>(c: CodeValue<X>, t: CodeValue<X>, e: CodeValue<X>) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let c = c.apply(cfg, &at.child(1))?;
        let t = t.apply(cfg, &at.child(2))?;
        let e = e.apply(cfg, &at.child(3))?;
        Ok(Code {
            den: X::mk_if(c.den, t.den, e.den),
            vb: c.vb.merge(&t.vb).merge(&e.vb),
        })
    })
}

pub fn capp<X: Semantics>(f: CodeValue<X>, a: CodeValue<X>) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let f = f.apply(cfg, &at.child(1))?;
        let a = a.apply(cfg, &at.child(2))?;
        Ok(Code {
            den: X::mk_app(f.den, a.den),
            vb: f.vb.merge(&a.vb),
        })
    })
}

pub fn clam<X: Semantics>(
    body: impl Fn(CodeValue<X>) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    clam_named(None, body)
}

/// `clam` whose bound variable renders as `hint_<path>`.
pub fn clam_named<X: Semantics>(
    hint: Option<&str>,
    body: impl Fn(CodeValue<X>) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    let hint: Option<Arc<str>> = hint.map(Arc::from);
    CodeValue::new(move |cfg, at| {
        let name = Name::fresh_hinted(at.clone(), hint.as_deref());
        let inner = body(CodeValue::var(name.clone())).apply(cfg, &at.child(1))?;
        Ok(Code {
            den: X::mk_lam(name, inner.den),
            vb: inner.vb,
        })
    })
}

/// A let-binding placed exactly here.
pub fn clet<X: Semantics>(
    rhs: CodeValue<X>,
    body: impl Fn(CodeValue<X>) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    clet_named(None, rhs, body)
}

pub fn clet_named<X: Semantics>(
    hint: Option<&str>,
    rhs: CodeValue<X>,
    body: impl Fn(CodeValue<X>) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    let hint: Option<Arc<str>> = hint.map(Arc::from);
    CodeValue::new(move |cfg, at| {
        let name = Name::fresh_hinted(at.clone(), hint.as_deref());
        let r = rhs.apply(cfg, &at.child(1))?;
        let b = body(CodeValue::var(name.clone())).apply(cfg, &at.child(2))?;
        Ok(Code {
            den: X::mk_let(name, r.den, b.den),
            vb: r.vb.merge(&b.vb),
        })
    })
}

/// Generates at the root and checks that no binding is left floating.
pub fn generate<X: Semantics>(c: &CodeValue<X>, cfg: &GenConfig) -> Result<Denotation<X>> {
    let Code { den, vb } = c.apply(cfg, &Location::root())?;
    if vb.is_empty() {
        Ok(den)
    } else {
        Err(Error::ResidualBindings(vb.orphans()))
    }
}

/// The generated code.
pub fn show(c: &CodeValue<Show>) -> Result<BaseAst> {
    show_with(c, &Limits::default())
}

pub fn show_with(c: &CodeValue<Show>, limits: &Limits) -> Result<BaseAst> {
    generate(c, &limits.gen_config())?.apply_closed(&mut limits.fuel())
}

/// The value the generated code denotes.
pub fn run(c: &CodeValue<Run>) -> Result<Value> {
    run_with(c, &Limits::default())
}

pub fn run_with(c: &CodeValue<Run>, limits: &Limits) -> Result<Value> {
    generate(c, &limits.gen_config())?.apply_closed(&mut limits.fuel())
}
