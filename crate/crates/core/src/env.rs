//! Persistent finite maps from names, shared by the interpreters.

use std::fmt;
use std::sync::Arc;

use crate::name::Name;

struct Node<T> {
    name: Name,
    entry: T,
    next: Option<Arc<Node<T>>>,
}

/// An immutable association list. Extension shares the tail, so the
/// original map is never disturbed; the innermost binding shadows.
pub struct PEnv<T> {
    head: Option<Arc<Node<T>>>,
}

impl<T> Clone for PEnv<T> {
    fn clone(&self) -> Self {
        PEnv {
            head: self.head.clone(),
        }
    }
}

impl<T> Default for PEnv<T> {
    fn default() -> Self {
        PEnv { head: None }
    }
}

impl<T> PEnv<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn extend(&self, name: Name, entry: T) -> Self {
        PEnv {
            head: Some(Arc::new(Node {
                name,
                entry,
                next: self.head.clone(),
            })),
        }
    }

    pub fn lookup(&self, name: &Name) -> Option<&T> {
        self.iter().find(|(n, _)| *n == name).map(|(_, e)| e)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.lookup(name).is_some()
    }

    /// Every binding, innermost first, including shadowed ones.
    pub fn iter(&self) -> impl Iterator<Item = (&Name, &T)> {
        let mut cur = self.head.as_deref();
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.next.as_deref();
            Some((&node.name, &node.entry))
        })
    }
}

impl<T: Clone> PEnv<T> {
    /// The map without any association for `name`.
    #[must_use]
    pub fn restrict(&self, name: &Name) -> Self {
        let kept: Vec<_> = self.iter().filter(|(n, _)| *n != name).collect();
        kept.into_iter().rev().fold(PEnv::empty(), |env, (n, e)| {
            env.extend(n.clone(), e.clone())
        })
    }
}

impl<T> Drop for PEnv<T> {
    // Unlink iteratively so long chains don't overflow the stack.
    fn drop(&mut self) {
        let mut cur = self.head.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut node) => cur = node.next.take(),
                Err(_) => break,
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for PEnv<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}
