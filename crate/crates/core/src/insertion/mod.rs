//! Let- and letrec-insertion.
//!
//! [`genlet`] returns a reference to a fresh variable and attaches a virtual
//! binding for it; the binding floats up with the code that uses it until
//! the [`with_locus`] it names turns every binding collected there into
//! real, dependency-ordered `let`s. Bindings with the same memo key at the
//! same locus are shared: later requests become aliases of the first.
//!
//! [`genletrec`] and [`with_locus_rec`] do the same for recursive
//! definitions. The right-hand side is kept unevaluated until the locus
//! canonicalizes its bindings ([`canon`]), which is what lets a definition
//! request itself.

mod store;

use std::collections::BTreeSet;
use std::sync::Arc;

pub use store::{
    BindingClass, ClassSnapshot, LocusSnapshot, MemoKey, Pending, PerLocus, Rhs, RhsSnapshot,
    VirtualBindings,
};

use crate::codec::{Code, CodeValue, GenConfig};
use crate::error::{Error, Result};
use crate::name::{Location, Name};
use crate::semantics::{mk_var, Denotation, Semantics};

/// Where inserted bindings materialize. Only handed out by
/// [`with_locus`] and [`with_locus_rec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Locus(Location);

impl Locus {
    pub fn location(&self) -> &Location {
        &self.0
    }
}

pub fn addb<X: Semantics>(k: MemoKey, n: Name, rhs: Rhs<X>, v: &PerLocus<X>) -> PerLocus<X> {
    v.addb(k, n, rhs)
}

pub fn merge<X: Semantics>(a: &VirtualBindings<X>, b: &VirtualBindings<X>) -> VirtualBindings<X> {
    a.merge(b)
}

pub fn ordered<X: Semantics>(v: &PerLocus<X>) -> Vec<BindingClass<X>> {
    v.ordered()
}

/// `d`, with every alias meaning the representative.
pub fn subst<X: Semantics>(rep: Name, aliases: BTreeSet<Name>, d: Denotation<X>) -> Denotation<X> {
    if aliases.is_empty() {
        return d;
    }
    Denotation::new(move |env, fuel| d.apply(&env.alias(&rep, &aliases), fuel))
}

fn canonical_rhss<X: Semantics>(classes: &[BindingClass<X>]) -> Result<Vec<Denotation<X>>> {
    classes
        .iter()
        .map(|c| match &c.rhs {
            Rhs::Canonical(d) => Ok(d.clone()),
            Rhs::Pending(_) => Err(Error::PendingBinding {
                name: c.name.clone(),
            }),
        })
        .collect()
}

/// Nested lets, first class outermost.
pub fn bind_lets<X: Semantics>(
    classes: &[BindingClass<X>],
    d: Denotation<X>,
) -> Result<Denotation<X>> {
    let rhss = canonical_rhss(classes)?;
    Ok(classes.iter().zip(rhss).rev().fold(d, |body, (c, rhs)| {
        X::mk_let(
            c.name.clone(),
            rhs,
            subst(c.name.clone(), c.aliases.clone(), body),
        )
    }))
}

/// One letrec over all classes. Every clause and the body see every alias.
pub fn bind_letrec<X: Semantics>(
    classes: &[BindingClass<X>],
    d: Denotation<X>,
) -> Result<Denotation<X>> {
    if classes.is_empty() {
        return Ok(d);
    }
    let rhss = canonical_rhss(classes)?;
    let renames: Arc<[(Name, BTreeSet<Name>)]> = classes
        .iter()
        .filter(|c| !c.aliases.is_empty())
        .map(|c| (c.name.clone(), c.aliases.clone()))
        .collect();
    let with_aliases = |d: Denotation<X>| -> Denotation<X> {
        if renames.is_empty() {
            return d;
        }
        let renames = renames.clone();
        Denotation::new(move |env, fuel| {
            let env = renames
                .iter()
                .fold(env.clone(), |e, (rep, aliases)| e.alias(rep, aliases));
            d.apply(&env, fuel)
        })
    };
    let clauses = classes
        .iter()
        .zip(rhss)
        .map(|(c, rhs)| (c.name.clone(), with_aliases(rhs)))
        .collect();
    Ok(X::mk_letrec(clauses, with_aliases(d)))
}

pub fn genlet<X: Semantics>(l: &Locus, k: impl Into<MemoKey>, c: CodeValue<X>) -> CodeValue<X> {
    genlet_named(None, l, k, c)
}

/// `genlet` whose variable renders as `hint_<path>`.
pub fn genlet_named<X: Semantics>(
    hint: Option<&str>,
    l: &Locus,
    k: impl Into<MemoKey>,
    c: CodeValue<X>,
) -> CodeValue<X> {
    let (locus, key) = (l.0.clone(), k.into());
    let hint: Option<Arc<str>> = hint.map(Arc::from);
    CodeValue::new(move |cfg, at| {
        let Code { den, vb } = c.apply(cfg, &at.child(2))?;
        let name = Name::fresh_hinted(at.clone(), hint.as_deref());
        let vb = vb.modify(&locus, |v| v.addb(key, name.clone(), Rhs::Canonical(den)));
        Ok(Code {
            den: mk_var(name),
            vb,
        })
    })
}

pub fn with_locus<X: Semantics>(
    body: impl Fn(Locus) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let Code { den, vb } = body(Locus(at.clone())).apply(cfg, &at.child(1))?;
        let den = bind_lets(&vb.at(at).ordered(), den)?;
        Ok(Code {
            den,
            vb: vb.without(at),
        })
    })
}

pub fn genletrec<X: Semantics>(l: &Locus, k: impl Into<MemoKey>, c: CodeValue<X>) -> CodeValue<X> {
    genletrec_named(None, l, k, c)
}

pub fn genletrec_named<X: Semantics>(
    hint: Option<&str>,
    l: &Locus,
    k: impl Into<MemoKey>,
    c: CodeValue<X>,
) -> CodeValue<X> {
    let (locus, key) = (l.0.clone(), k.into());
    let hint: Option<Arc<str>> = hint.map(Arc::from);
    CodeValue::new(move |_, at| {
        let name = Name::fresh_hinted(at.clone(), hint.as_deref());
        let pending = Rhs::Pending(Pending::new(c.clone(), at.child(2)));
        let store = PerLocus::empty().addb(key, name.clone(), pending);
        Ok(Code {
            den: mk_var(name),
            vb: VirtualBindings::singleton(locus.clone(), store),
        })
    })
}

/// Forces pending classes at `locus`, earliest inserted first, merging
/// whatever bindings each one produces, until none are left pending.
pub fn canon<X: Semantics>(
    vb: &VirtualBindings<X>,
    locus: &Location,
    round_limit: usize,
) -> Result<VirtualBindings<X>> {
    canon_with(
        vb,
        locus,
        &GenConfig {
            canon_limit: round_limit,
        },
    )
}

fn canon_with<X: Semantics>(
    vb: &VirtualBindings<X>,
    locus: &Location,
    cfg: &GenConfig,
) -> Result<VirtualBindings<X>> {
    let mut vb = vb.clone();
    let mut rounds = 0;
    loop {
        let here = vb.at(locus);
        let Some(key) = here.pending_keys().first().copied() else {
            return Ok(vb);
        };
        if rounds >= cfg.canon_limit {
            return Err(Error::CanonLimitExceeded {
                locus: locus.clone(),
                pending: here.pending_keys(),
                limit: cfg.canon_limit,
            });
        }
        rounds += 1;
        let Some(Rhs::Pending(pending)) = here.class(key).map(|c| &c.rhs) else {
            unreachable!("pending_keys lists only pending classes");
        };
        let produced = pending.force(cfg)?;
        let updated = here.with_rhs(key, Rhs::Canonical(produced.den));
        vb = vb.with(locus.clone(), updated).merge(&produced.vb);
    }
}

pub fn with_locus_rec<X: Semantics>(
    body: impl Fn(Locus) -> CodeValue<X> + Send + Sync + 'static,
) -> CodeValue<X> {
    CodeValue::new(move |cfg, at| {
        let Code { den, vb } = body(Locus(at.clone())).apply(cfg, &at.child(1))?;
        let vb = canon_with(&vb, at, cfg)?;
        let here = vb.at(at);
        let classes: Vec<_> = here
            .insertion_seq()
            .iter()
            .map(|k| here.classes()[k].clone())
            .collect();
        Ok(Code {
            den: bind_letrec(&classes, den)?,
            vb: vb.without(at),
        })
    })
}
