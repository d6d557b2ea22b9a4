use std::fmt;

use thiserror::Error;

use crate::insertion::MemoKey;
use crate::name::{Location, Name};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Keys still present at a locus, for error reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrphanedLocus {
    pub locus: Location,
    pub keys: Vec<MemoKey>,
}

impl fmt::Display for OrphanedLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "locus {} (keys {})", self.locus, KeyList(&self.keys))
    }
}

struct KeyList<'a>(&'a [MemoKey]);

impl fmt::Display for KeyList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),

    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        expected: &'static str,
        found: String,
    },

    #[error("division by zero")]
    DivisionByZero,

    #[error("integer overflow")]
    Overflow,

    #[error("evaluation exceeded the step limit of {limit}")]
    StepLimitExceeded { limit: u64 },

    #[error("evaluation exceeded the nesting depth limit of {limit}")]
    DepthLimitExceeded { limit: usize },

    #[error("virtual bindings never reached their locus: {}", OrphanList(.0))]
    ResidualBindings(Vec<OrphanedLocus>),

    #[error(
        "canonicalization at locus {locus} did not finish within {limit} rounds (pending keys {})",
        KeyList(.pending)
    )]
    CanonLimitExceeded {
        locus: Location,
        pending: Vec<MemoKey>,
        limit: usize,
    },

    #[error("binding `{name}` is still pending; genletrec needs a recursive locus")]
    PendingBinding { name: Name },

    #[error("malformed binding store: {0}")]
    InvalidStore(String),
}

struct OrphanList<'a>(&'a [OrphanedLocus]);

impl fmt::Display for OrphanList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}
