//! Denotations of Base terms under the two semantics.
//!
//! A [`Denotation`] maps an environment to a semantic value. [`Run`] builds
//! evaluating denotations whose values are [`Value`]s; [`Show`] builds
//! denotations that produce the [`BaseAst`] of the term. The variable rule is
//! shared ([`mk_var`]); everything else goes through the per-semantics
//! constructors of [`Semantics`].

use std::fmt;
use std::sync::Arc;

use crate::ast::{BaseAst, BinOp};
use crate::env::PEnv;
use crate::error::{Error, Result};
use crate::name::Name;
use crate::value::{self, Fuel, Func, Value};

type DenFn<X> = dyn Fn(&Env<X>, &mut Fuel) -> Result<<X as Semantics>::Val> + Send + Sync;

/// Meaning of a (possibly open) term.
pub struct Denotation<X: Semantics>(Arc<DenFn<X>>);

impl<X: Semantics> Clone for Denotation<X> {
    fn clone(&self) -> Self {
        Denotation(self.0.clone())
    }
}

impl<X: Semantics> Denotation<X> {
    pub fn new(f: impl Fn(&Env<X>, &mut Fuel) -> Result<X::Val> + Send + Sync + 'static) -> Self {
        Denotation(Arc::new(f))
    }

    pub fn apply(&self, env: &Env<X>, fuel: &mut Fuel) -> Result<X::Val> {
        (self.0)(env, fuel)
    }

    /// Applies the denotation to the empty environment.
    pub fn apply_closed(&self, fuel: &mut Fuel) -> Result<X::Val> {
        self.apply(&Env::empty(), fuel)
    }

    /// Identity of the underlying closure.
    pub fn same(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl<X: Semantics> fmt::Debug for Denotation<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Denotation<{}>@{:p}", X::NAME, Arc::as_ptr(&self.0))
    }
}

/// Environment entry. `Recursive` names clause `usize` of a letrec group and
/// is re-derived on every lookup, so recursive groups hold no cycles.
pub enum Entry<X: Semantics> {
    Ready(X::Val),
    Recursive(Arc<RecFrame<X>>, usize),
}

impl<X: Semantics> Clone for Entry<X> {
    fn clone(&self) -> Self {
        match self {
            Entry::Ready(v) => Entry::Ready(v.clone()),
            Entry::Recursive(f, i) => Entry::Recursive(f.clone(), *i),
        }
    }
}

impl<X: Semantics> fmt::Debug for Entry<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Ready(v) => write!(f, "{v:?}"),
            Entry::Recursive(_, i) => write!(f, "<rec clause {i}>"),
        }
    }
}

pub struct RecFrame<X: Semantics> {
    base: Env<X>,
    clauses: Arc<[(Name, Denotation<X>)]>,
}

impl<X: Semantics> RecFrame<X> {
    fn env(self: &Arc<Self>) -> Env<X> {
        let inner = self
            .clauses
            .iter()
            .enumerate()
            .fold(self.base.0.clone(), |env, (i, (n, _))| {
                env.extend(n.clone(), Entry::Recursive(self.clone(), i))
            });
        Env(inner)
    }
}

/// Persistent map from names to semantic values.
pub struct Env<X: Semantics>(PEnv<Entry<X>>);

impl<X: Semantics> Clone for Env<X> {
    fn clone(&self) -> Self {
        Env(self.0.clone())
    }
}

impl<X: Semantics> Default for Env<X> {
    fn default() -> Self {
        Env(PEnv::empty())
    }
}

impl<X: Semantics> fmt::Debug for Env<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<X: Semantics> Env<X> {
    pub fn empty() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn extend(&self, name: Name, value: X::Val) -> Self {
        Env(self.0.extend(name, Entry::Ready(value)))
    }

    #[must_use]
    pub fn restrict(&self, name: &Name) -> Self {
        Env(self.0.restrict(name))
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.0.contains(name)
    }

    pub fn entry(&self, name: &Name) -> Option<&Entry<X>> {
        self.0.lookup(name)
    }

    /// Every name in `aliases` now means whatever `rep` means here.
    #[must_use]
    pub fn alias<'a>(&self, rep: &Name, aliases: impl IntoIterator<Item = &'a Name>) -> Self {
        let target = match self.entry(rep) {
            Some(e) => e.clone(),
            None => match X::unbound(rep) {
                Ok(v) => Entry::Ready(v),
                // Unbound under a strict semantics: leave the aliases
                // unbound too, so the lookup reports the failure.
                Err(_) => return self.clone(),
            },
        };
        let inner = aliases.into_iter().fold(self.0.clone(), |env, a| {
            env.extend(a.clone(), target.clone())
        });
        Env(inner)
    }
}

/// One semantics of Base: the strict constructors of denotations.
pub trait Semantics: Copy + Default + fmt::Debug + Send + Sync + 'static {
    type Val: Clone + Send + Sync + fmt::Debug + 'static;

    const NAME: &'static str;

    /// Meaning of a reference to a name the environment does not bind.
    fn unbound(name: &Name) -> Result<Self::Val>;

    fn mk_int(i: i64) -> Denotation<Self>;
    fn mk_bool(b: bool) -> Denotation<Self>;
    fn mk_succ(d: Denotation<Self>) -> Denotation<Self>;
    fn mk_binop(op: BinOp, d1: Denotation<Self>, d2: Denotation<Self>) -> Denotation<Self>;
    fn mk_if(c: Denotation<Self>, t: Denotation<Self>, e: Denotation<Self>) -> Denotation<Self>;
    fn mk_lam(n: Name, body: Denotation<Self>) -> Denotation<Self>;
    fn mk_app(d1: Denotation<Self>, d2: Denotation<Self>) -> Denotation<Self>;
    fn mk_let(n: Name, rhs: Denotation<Self>, body: Denotation<Self>) -> Denotation<Self>;
    /// `clauses` must be non-empty with distinct names.
    fn mk_letrec(
        clauses: Vec<(Name, Denotation<Self>)>,
        body: Denotation<Self>,
    ) -> Denotation<Self>;
}

/// The variable rule, common to both semantics.
pub fn mk_var<X: Semantics>(n: Name) -> Denotation<X> {
    Denotation::new(move |env: &Env<X>, fuel: &mut Fuel| match env.entry(&n) {
        Some(Entry::Ready(v)) => Ok(v.clone()),
        Some(Entry::Recursive(frame, i)) => {
            fuel.tick()?;
            let rec_env = frame.env();
            let clause = frame.clauses[*i].1.clone();
            fuel.descend(|fuel| clause.apply(&rec_env, fuel))
        }
        None => X::unbound(&n),
    })
}

pub fn mk_add<X: Semantics>(a: Denotation<X>, b: Denotation<X>) -> Denotation<X> {
    X::mk_binop(BinOp::Add, a, b)
}

pub fn mk_sub<X: Semantics>(a: Denotation<X>, b: Denotation<X>) -> Denotation<X> {
    X::mk_binop(BinOp::Sub, a, b)
}

pub fn mk_mul<X: Semantics>(a: Denotation<X>, b: Denotation<X>) -> Denotation<X> {
    X::mk_binop(BinOp::Mul, a, b)
}

pub fn mk_div<X: Semantics>(a: Denotation<X>, b: Denotation<X>) -> Denotation<X> {
    X::mk_binop(BinOp::Div, a, b)
}

pub fn mk_eq<X: Semantics>(a: Denotation<X>, b: Denotation<X>) -> Denotation<X> {
    X::mk_binop(BinOp::Eq, a, b)
}

fn check_clauses<X: Semantics>(clauses: &[(Name, Denotation<X>)]) {
    assert!(!clauses.is_empty(), "letrec needs at least one clause");
    for (i, (n, _)) in clauses.iter().enumerate() {
        assert!(
            clauses[..i].iter().all(|(m, _)| m != n),
            "duplicate letrec clause name `{n}`"
        );
    }
}

/// The evaluating semantics.
#[derive(Debug, Clone, Copy, Default)]
pub struct Run;

impl Semantics for Run {
    type Val = Value;

    const NAME: &'static str = "run";

    fn unbound(name: &Name) -> Result<Value> {
        Err(Error::UnboundVariable(name.clone()))
    }

    fn mk_int(i: i64) -> Denotation<Self> {
        Denotation::new(move |_, _| Ok(Value::Int(i)))
    }

    fn mk_bool(b: bool) -> Denotation<Self> {
        Denotation::new(move |_, _| Ok(Value::Bool(b)))
    }

    fn mk_succ(d: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| value::succ(&d.apply(env, fuel)?))
    }

    fn mk_binop(op: BinOp, d1: Denotation<Self>, d2: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| {
            let a = d1.apply(env, fuel)?;
            let b = d2.apply(env, fuel)?;
            op.apply(&a, &b)
        })
    }

    fn mk_if(c: Denotation<Self>, t: Denotation<Self>, e: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| {
            if c.apply(env, fuel)?.as_bool()? {
                t.apply(env, fuel)
            } else {
                e.apply(env, fuel)
            }
        })
    }

    fn mk_lam(n: Name, body: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env: &Env<Run>, _| {
            let (n, body, env) = (n.clone(), body.clone(), env.clone());
            Ok(Value::Fun(Func::native(move |x, fuel| {
                body.apply(&env.extend(n.clone(), x), fuel)
            })))
        })
    }

    fn mk_app(d1: Denotation<Self>, d2: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| {
            let f = d1.apply(env, fuel)?;
            let a = d2.apply(env, fuel)?;
            f.apply(a, fuel)
        })
    }

    fn mk_let(n: Name, rhs: Denotation<Self>, body: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env: &Env<Run>, fuel| {
            let x = rhs.apply(env, fuel)?;
            body.apply(&env.extend(n.clone(), x), fuel)
        })
    }

    fn mk_letrec(
        clauses: Vec<(Name, Denotation<Self>)>,
        body: Denotation<Self>,
    ) -> Denotation<Self> {
        check_clauses(&clauses);
        let clauses: Arc<[(Name, Denotation<Run>)]> = clauses.into();
        Denotation::new(move |env: &Env<Run>, fuel| {
            let frame = Arc::new(RecFrame {
                base: env.clone(),
                clauses: clauses.clone(),
            });
            body.apply(&frame.env(), fuel)
        })
    }
}

/// The symbolic semantics: denotations produce the code of the term.
#[derive(Debug, Clone, Copy, Default)]
pub struct Show;

impl Semantics for Show {
    type Val = BaseAst;

    const NAME: &'static str = "show";

    /// Unbound names appear literally, so ill-scoped code stays inspectable.
    fn unbound(name: &Name) -> Result<BaseAst> {
        Ok(BaseAst::Var(name.clone()))
    }

    fn mk_int(i: i64) -> Denotation<Self> {
        Denotation::new(move |_, _| Ok(BaseAst::Int(i)))
    }

    fn mk_bool(b: bool) -> Denotation<Self> {
        Denotation::new(move |_, _| Ok(BaseAst::Bool(b)))
    }

    fn mk_succ(d: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| Ok(BaseAst::succ(d.apply(env, fuel)?)))
    }

    fn mk_binop(op: BinOp, d1: Denotation<Self>, d2: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| {
            let a = d1.apply(env, fuel)?;
            let b = d2.apply(env, fuel)?;
            Ok(BaseAst::bin(op, a, b))
        })
    }

    fn mk_if(c: Denotation<Self>, t: Denotation<Self>, e: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| {
            let c = c.apply(env, fuel)?;
            let t = t.apply(env, fuel)?;
            let e = e.apply(env, fuel)?;
            Ok(BaseAst::if_(c, t, e))
        })
    }

    fn mk_lam(n: Name, body: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env: &Env<Show>, fuel| {
            let inner = env.extend(n.clone(), BaseAst::Var(n.clone()));
            Ok(BaseAst::lam(n.clone(), body.apply(&inner, fuel)?))
        })
    }

    fn mk_app(d1: Denotation<Self>, d2: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env, fuel| {
            let f = d1.apply(env, fuel)?;
            let a = d2.apply(env, fuel)?;
            Ok(BaseAst::app(f, a))
        })
    }

    fn mk_let(n: Name, rhs: Denotation<Self>, body: Denotation<Self>) -> Denotation<Self> {
        Denotation::new(move |env: &Env<Show>, fuel| {
            let r = rhs.apply(env, fuel)?;
            let inner = env.extend(n.clone(), BaseAst::Var(n.clone()));
            Ok(BaseAst::let_(n.clone(), r, body.apply(&inner, fuel)?))
        })
    }

    fn mk_letrec(
        clauses: Vec<(Name, Denotation<Self>)>,
        body: Denotation<Self>,
    ) -> Denotation<Self> {
        check_clauses(&clauses);
        Denotation::new(move |env: &Env<Show>, fuel| {
            let inner = clauses.iter().fold(env.clone(), |e, (n, _)| {
                e.extend(n.clone(), BaseAst::Var(n.clone()))
            });
            let built = clauses
                .iter()
                .map(|(n, d)| Ok((n.clone(), d.apply(&inner, fuel)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(BaseAst::letrec(built, body.apply(&inner, fuel)?))
        })
    }
}
