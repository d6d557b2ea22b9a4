//! Virtual bindings: let-bindings requested but not yet placed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::BaseAst;
use crate::codec::{Code, CodeValue, GenConfig};
use crate::error::{Error, OrphanedLocus, Result};
use crate::name::{Location, Name};
use crate::semantics::{Denotation, Semantics, Show};
use crate::value::Fuel;

/// Identifies an equivalence class of bindings at one locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemoKey(pub i64);

impl From<i64> for MemoKey {
    fn from(k: i64) -> Self {
        MemoKey(k)
    }
}

impl fmt::Display for MemoKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unevaluated right-hand side, anchored where its `genletrec` put it.
pub struct Pending<X: Semantics> {
    code: CodeValue<X>,
    at: Location,
}

impl<X: Semantics> Clone for Pending<X> {
    fn clone(&self) -> Self {
        Pending {
            code: self.code.clone(),
            at: self.at.clone(),
        }
    }
}

impl<X: Semantics> Pending<X> {
    pub fn new(code: CodeValue<X>, at: Location) -> Self {
        Pending { code, at }
    }

    pub fn anchor(&self) -> &Location {
        &self.at
    }

    /// Generates the right-hand side at its anchor; the same every time.
    pub fn force(&self, cfg: &GenConfig) -> Result<Code<X>> {
        self.code.apply(cfg, &self.at)
    }
}

pub enum Rhs<X: Semantics> {
    Canonical(Denotation<X>),
    Pending(Pending<X>),
}

impl<X: Semantics> Clone for Rhs<X> {
    fn clone(&self) -> Self {
        match self {
            Rhs::Canonical(d) => Rhs::Canonical(d.clone()),
            Rhs::Pending(p) => Rhs::Pending(p.clone()),
        }
    }
}

impl<X: Semantics> Rhs<X> {
    pub fn is_pending(&self) -> bool {
        matches!(self, Rhs::Pending(_))
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, Rhs::Canonical(_))
    }
}

/// Identity comparison: the same denotation, or the same generator at the
/// same anchor.
impl<X: Semantics> PartialEq for Rhs<X> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rhs::Canonical(a), Rhs::Canonical(b)) => a.same(b),
            (Rhs::Pending(a), Rhs::Pending(b)) => a.code.same(&b.code) && a.at == b.at,
            _ => false,
        }
    }
}

impl<X: Semantics> fmt::Debug for Rhs<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Canonical(d) => write!(f, "Canonical({d:?})"),
            Rhs::Pending(p) => write!(f, "Pending(at {})", p.at),
        }
    }
}

/// One equivalence class: the name to bind, its right-hand side, and the
/// other names that must be renamed to it.
pub struct BindingClass<X: Semantics> {
    pub name: Name,
    pub rhs: Rhs<X>,
    pub aliases: BTreeSet<Name>,
}

impl<X: Semantics> Clone for BindingClass<X> {
    fn clone(&self) -> Self {
        BindingClass {
            name: self.name.clone(),
            rhs: self.rhs.clone(),
            aliases: self.aliases.clone(),
        }
    }
}

impl<X: Semantics> PartialEq for BindingClass<X> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.rhs == other.rhs && self.aliases == other.aliases
    }
}

impl<X: Semantics> fmt::Debug for BindingClass<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BindingClass")
            .field("name", &self.name)
            .field("rhs", &self.rhs)
            .field("aliases", &self.aliases)
            .finish()
    }
}

impl<X: Semantics> BindingClass<X> {
    pub fn new(name: Name, rhs: Rhs<X>) -> Self {
        BindingClass {
            name,
            rhs,
            aliases: BTreeSet::new(),
        }
    }
}

/// How a colliding class's right-hand side is chosen.
#[derive(Clone, Copy)]
enum Collision {
    /// Keep whatever is there.
    KeepExisting,
    /// A canonical rhs replaces a pending one; otherwise keep.
    PreferCanonical,
}

/// Bindings destined for a single locus: a preorder over memo keys and one
/// class per key.
pub struct PerLocus<X: Semantics> {
    order: BTreeSet<(MemoKey, MemoKey)>,
    classes: BTreeMap<MemoKey, BindingClass<X>>,
    seq: Vec<MemoKey>,
}

impl<X: Semantics> Clone for PerLocus<X> {
    fn clone(&self) -> Self {
        PerLocus {
            order: self.order.clone(),
            classes: self.classes.clone(),
            seq: self.seq.clone(),
        }
    }
}

impl<X: Semantics> Default for PerLocus<X> {
    fn default() -> Self {
        PerLocus {
            order: BTreeSet::new(),
            classes: BTreeMap::new(),
            seq: Vec::new(),
        }
    }
}

impl<X: Semantics> PartialEq for PerLocus<X> {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.classes == other.classes && self.seq == other.seq
    }
}

impl<X: Semantics> fmt::Debug for PerLocus<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerLocus")
            .field("order", &self.order)
            .field("classes", &self.classes)
            .field("seq", &self.seq)
            .finish()
    }
}

impl<X: Semantics> PerLocus<X> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a store from raw parts, checking every invariant.
    pub fn from_parts(
        order: impl IntoIterator<Item = (MemoKey, MemoKey)>,
        classes: impl IntoIterator<Item = (MemoKey, BindingClass<X>)>,
        seq: Vec<MemoKey>,
    ) -> Result<Self> {
        let store = PerLocus {
            order: order.into_iter().collect(),
            classes: classes.into_iter().collect(),
            seq,
        };
        store.validate()?;
        Ok(store)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidStore(m));
        let seq_keys: BTreeSet<_> = self.seq.iter().copied().collect();
        if seq_keys.len() != self.seq.len() {
            return bad("insertion sequence repeats a key".into());
        }
        if !seq_keys.iter().eq(self.classes.keys()) {
            return bad("insertion sequence and classes disagree".into());
        }
        for &(a, b) in &self.order {
            if !self.classes.contains_key(&a) || !self.classes.contains_key(&b) {
                return bad(format!("order mentions unknown key in ({a}, {b})"));
            }
        }
        for k in self.classes.keys() {
            if !self.order.contains(&(*k, *k)) {
                return bad(format!("order is not reflexive at {k}"));
            }
        }
        for &(a, b) in &self.order {
            for &(c, d) in &self.order {
                if b == c && !self.order.contains(&(a, d)) {
                    return bad(format!("order is not transitive: ({a}, {b}), ({c}, {d})"));
                }
            }
        }
        for (k, class) in &self.classes {
            if class.aliases.contains(&class.name) {
                return bad(format!("class {k} lists its representative as an alias"));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn order(&self) -> &BTreeSet<(MemoKey, MemoKey)> {
        &self.order
    }

    pub fn classes(&self) -> &BTreeMap<MemoKey, BindingClass<X>> {
        &self.classes
    }

    pub fn class(&self, k: MemoKey) -> Option<&BindingClass<X>> {
        self.classes.get(&k)
    }

    /// Keys in first-insertion order.
    pub fn insertion_seq(&self) -> &[MemoKey] {
        &self.seq
    }

    pub fn all_canonical(&self) -> bool {
        self.classes.values().all(|c| c.rhs.is_canonical())
    }

    pub fn pending_keys(&self) -> Vec<MemoKey> {
        self.seq
            .iter()
            .copied()
            .filter(|k| self.classes[k].rhs.is_pending())
            .collect()
    }

    /// `a` comes strictly before `b`.
    pub fn strictly_before(&self, a: MemoKey, b: MemoKey) -> bool {
        self.order.contains(&(a, b)) && !self.order.contains(&(b, a))
    }

    /// Adds the binding of `name` to class `k`. An existing class gains
    /// `name` as an alias and keeps its rhs; a new class becomes the latest
    /// in the order.
    #[must_use]
    pub fn addb(&self, k: MemoKey, name: Name, rhs: Rhs<X>) -> Self {
        self.insert_class(k, BindingClass::new(name, rhs), Collision::KeepExisting)
    }

    /// Adds a whole class, as merge does: on collision the incoming
    /// representative and aliases join the existing class.
    #[must_use]
    pub fn add_class(&self, k: MemoKey, class: BindingClass<X>) -> Self {
        self.insert_class(k, class, Collision::PreferCanonical)
    }

    fn insert_class(&self, k: MemoKey, incoming: BindingClass<X>, rule: Collision) -> Self {
        let mut out = self.clone();
        match out.classes.get_mut(&k) {
            Some(existing) => {
                existing.aliases.insert(incoming.name);
                existing.aliases.extend(incoming.aliases);
                let rep = existing.name.clone();
                existing.aliases.remove(&rep);
                if let Collision::PreferCanonical = rule {
                    if existing.rhs.is_pending() && incoming.rhs.is_canonical() {
                        existing.rhs = incoming.rhs;
                    }
                }
            }
            None => {
                let mut class = incoming;
                let rep = class.name.clone();
                class.aliases.remove(&rep);
                for &prev in self.classes.keys() {
                    out.order.insert((prev, k));
                }
                out.order.insert((k, k));
                out.classes.insert(k, class);
                out.seq.push(k);
            }
        }
        out
    }

    /// Replaces the rhs of class `k`, keeping its name and aliases.
    #[must_use]
    pub fn with_rhs(&self, k: MemoKey, rhs: Rhs<X>) -> Self {
        let mut out = self.clone();
        if let Some(c) = out.classes.get_mut(&k) {
            c.rhs = rhs;
        }
        out
    }

    /// Keys in an order consistent with the preorder. Among keys with no
    /// remaining strict predecessor, the earliest inserted goes first.
    pub fn ordered_keys(&self) -> Vec<MemoKey> {
        let mut remaining = self.seq.clone();
        let mut out = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|&k| !remaining.iter().any(|&p| self.strictly_before(p, k)))
                .expect("the strict part of a preorder is acyclic");
            out.push(remaining.remove(pos));
        }
        out
    }

    pub fn ordered(&self) -> Vec<BindingClass<X>> {
        self.ordered_keys()
            .into_iter()
            .map(|k| self.classes[&k].clone())
            .collect()
    }
}

/// Pending bindings of every locus, keyed by locus location. Absent loci
/// have no bindings; empty stores are never kept.
pub struct VirtualBindings<X: Semantics>(BTreeMap<Location, PerLocus<X>>);

impl<X: Semantics> Clone for VirtualBindings<X> {
    fn clone(&self) -> Self {
        VirtualBindings(self.0.clone())
    }
}

impl<X: Semantics> Default for VirtualBindings<X> {
    fn default() -> Self {
        VirtualBindings(BTreeMap::new())
    }
}

impl<X: Semantics> PartialEq for VirtualBindings<X> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<X: Semantics> fmt::Debug for VirtualBindings<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl<X: Semantics> VirtualBindings<X> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(locus: Location, store: PerLocus<X>) -> Self {
        Self::empty().with(locus, store)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn loci(&self) -> impl Iterator<Item = &Location> {
        self.0.keys()
    }

    pub fn get(&self, locus: &Location) -> Option<&PerLocus<X>> {
        self.0.get(locus)
    }

    /// The store at `locus`, empty if absent.
    pub fn at(&self, locus: &Location) -> PerLocus<X> {
        self.0.get(locus).cloned().unwrap_or_default()
    }

    #[must_use]
    pub fn with(&self, locus: Location, store: PerLocus<X>) -> Self {
        let mut out = self.clone();
        if store.is_empty() {
            out.0.remove(&locus);
        } else {
            out.0.insert(locus, store);
        }
        out
    }

    #[must_use]
    pub fn without(&self, locus: &Location) -> Self {
        let mut out = self.clone();
        out.0.remove(locus);
        out
    }

    #[must_use]
    pub fn modify(&self, locus: &Location, f: impl FnOnce(&PerLocus<X>) -> PerLocus<X>) -> Self {
        self.with(locus.clone(), f(&self.at(locus)))
    }

    /// Adds the classes of `other` into `self`, locus by locus, in an order
    /// consistent with `other`'s preorder.
    #[must_use]
    pub fn merge(&self, other: &Self) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for (locus, incoming) in &other.0 {
            let merged = incoming
                .ordered_keys()
                .into_iter()
                .fold(out.at(locus), |acc, k| {
                    acc.add_class(k, incoming.classes[&k].clone())
                });
            out = out.with(locus.clone(), merged);
        }
        out
    }

    pub fn orphans(&self) -> Vec<OrphanedLocus> {
        self.0
            .iter()
            .map(|(locus, store)| OrphanedLocus {
                locus: locus.clone(),
                keys: store.insertion_seq().to_vec(),
            })
            .collect()
    }
}

/// A comparable rendering of a class, for inspecting stores of generated code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSnapshot {
    pub key: MemoKey,
    pub name: Name,
    pub aliases: Vec<Name>,
    pub rhs: RhsSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RhsSnapshot {
    /// The generated right-hand side, free names left as they are.
    Canonical(BaseAst),
    /// The anchor of a not-yet-forced generator.
    Pending(Location),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocusSnapshot {
    pub locus: Location,
    pub order: Vec<(MemoKey, MemoKey)>,
    pub insertion_seq: Vec<MemoKey>,
    pub classes: Vec<ClassSnapshot>,
}

impl PerLocus<Show> {
    pub fn snapshot_classes(&self) -> Result<Vec<ClassSnapshot>> {
        self.seq
            .iter()
            .map(|k| {
                let c = &self.classes[k];
                let rhs = match &c.rhs {
                    Rhs::Canonical(d) => {
                        RhsSnapshot::Canonical(d.apply_closed(&mut Fuel::default())?)
                    }
                    Rhs::Pending(p) => RhsSnapshot::Pending(p.at.clone()),
                };
                Ok(ClassSnapshot {
                    key: *k,
                    name: c.name.clone(),
                    aliases: c.aliases.iter().cloned().collect(),
                    rhs,
                })
            })
            .collect()
    }
}

impl VirtualBindings<Show> {
    pub fn snapshot(&self) -> Result<Vec<LocusSnapshot>> {
        self.0
            .iter()
            .map(|(locus, store)| {
                Ok(LocusSnapshot {
                    locus: locus.clone(),
                    order: store.order.iter().copied().collect(),
                    insertion_seq: store.seq.clone(),
                    classes: store.snapshot_classes()?,
                })
            })
            .collect()
    }
}
