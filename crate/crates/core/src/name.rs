//! Names of generated variables and the tree positions they are drawn from.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// A path of child indices from the root of a generator's evaluation tree.
///
/// Stored root-to-leaf. [`Location::child`] is the `cons` of the path
/// notation: it descends one level, so `root().child(1).child(2)` is the
/// path whose leaf-first spelling is `[2, 1]`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location(Vec<u32>);

impl Location {
    pub fn root() -> Self {
        Location(Vec::new())
    }

    /// Builds a location from a root-to-leaf path.
    pub fn from_path(path: impl Into<Vec<u32>>) -> Self {
        Location(path.into())
    }

    pub fn child(&self, index: u32) -> Self {
        let mut path = Vec::with_capacity(self.0.len() + 1);
        path.extend_from_slice(&self.0);
        path.push(index);
        Location(path)
    }

    /// Root-to-leaf child indices.
    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    fn write_path(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("_")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{step}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A variable name: either written by hand in a Base program, or created by
/// a generator from the location of its binder.
///
/// Fresh names compare by location only; the hint affects rendering and
/// nothing else. Source names never equal fresh ones.
#[derive(Clone)]
pub enum Name {
    Source(Arc<str>),
    Fresh {
        at: Location,
        hint: Option<Arc<str>>,
    },
}

impl Name {
    pub fn source(text: &str) -> Self {
        Name::Source(Arc::from(text))
    }

    pub fn fresh(at: Location) -> Self {
        Name::Fresh { at, hint: None }
    }

    pub fn fresh_hinted(at: Location, hint: Option<&str>) -> Self {
        Name::Fresh {
            at,
            hint: hint.map(Arc::from),
        }
    }

    pub fn is_fresh(&self) -> bool {
        matches!(self, Name::Fresh { .. })
    }

    pub fn location(&self) -> Option<&Location> {
        match self {
            Name::Fresh { at, .. } => Some(at),
            Name::Source(_) => None,
        }
    }

    pub fn hint(&self) -> Option<&str> {
        match self {
            Name::Fresh { hint, .. } => hint.as_deref(),
            Name::Source(_) => None,
        }
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Name::Source(a), Name::Source(b)) => a == b,
            (Name::Fresh { at: a, .. }, Name::Fresh { at: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Name::Source(s) => {
                0u8.hash(state);
                s.hash(state);
            }
            Name::Fresh { at, .. } => {
                1u8.hash(state);
                at.hash(state);
            }
        }
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Name::Source(a), Name::Source(b)) => a.cmp(b),
            (Name::Source(_), Name::Fresh { .. }) => Ordering::Less,
            (Name::Fresh { .. }, Name::Source(_)) => Ordering::Greater,
            (Name::Fresh { at: a, .. }, Name::Fresh { at: b, .. }) => a.cmp(b),
        }
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `v1_2` for the fresh name at root-to-leaf path `[1, 2]`; with a hint,
/// `hint_1_2`. A hinted name at the root renders as the bare hint.
impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Source(s) => f.write_str(s),
            Name::Fresh { at, hint: None } => {
                f.write_str("v")?;
                at.write_path(f)
            }
            Name::Fresh {
                at,
                hint: Some(hint),
            } => {
                f.write_str(hint)?;
                if !at.is_root() {
                    f.write_str("_")?;
                    at.write_path(f)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Name {
    fn from(text: &str) -> Self {
        Name::source(text)
    }
}
