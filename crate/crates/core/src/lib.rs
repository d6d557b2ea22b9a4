//! Staged code generation over a small functional language, with
//! let-insertion and letrec-insertion that need no host effects.
//!
//! A generator is a [`CodeValue`]: a function from the location it is placed
//! at to generated code plus the bindings it still wants inserted. The same
//! generator can be interpreted as code ([`Show`]) or run directly ([`Run`]).

pub mod ast;
pub mod codec;
mod env;
pub mod error;
pub mod eval;
pub mod examples;
pub mod insertion;
pub mod name;
pub mod semantics;
#[cfg(feature = "proptest-support")]
pub mod strategies;
pub mod value;

pub use ast::{BaseAst, BinOp};
pub use codec::{
    cadd, capp, cbinop, cbool, cdiv, ceq, cif, cint, clam, clam_named, clet, clet_named, cmul,
    csub, csucc, generate, run, run_with, show, show_with, Code, CodeValue, GenConfig, Limits,
    DEFAULT_CANON_LIMIT,
};
pub use error::{Error, OrphanedLocus, Result};
pub use eval::{eval_ast, eval_ast_with, eval_closed};
pub use insertion::{
    canon, genlet, genlet_named, genletrec, genletrec_named, with_locus, with_locus_rec, Locus,
    MemoKey, VirtualBindings,
};
pub use name::{Location, Name};
pub use semantics::{Denotation, Env, Run, Semantics, Show};
pub use value::{Fuel, Value, DEFAULT_DEPTH_LIMIT, DEFAULT_STEP_LIMIT};
