//! Run-time values shared by the reference interpreter and the run semantics.

use std::fmt;
use std::sync::Arc;

use crate::ast::BinOp;
use crate::error::{Error, Result};
use crate::eval::Closure;

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;
pub const DEFAULT_DEPTH_LIMIT: usize = 50_000;

/// Host stack kept free before recursing, and the size of each extra
/// segment allocated when it runs out.
const RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

type NativeFn = dyn Fn(Value, &mut Fuel) -> Result<Value> + Send + Sync;

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Fun(Func),
}

/// A function value: either a closure over Base syntax (built by the
/// reference interpreter) or a host closure (built by the run semantics).
#[derive(Clone)]
pub struct Func(Arc<FuncRepr>);

enum FuncRepr {
    Native(Box<NativeFn>),
    Closure(Closure),
}

impl Func {
    pub fn native(f: impl Fn(Value, &mut Fuel) -> Result<Value> + Send + Sync + 'static) -> Self {
        Func(Arc::new(FuncRepr::Native(Box::new(f))))
    }

    pub(crate) fn closure(c: Closure) -> Self {
        Func(Arc::new(FuncRepr::Closure(c)))
    }

    pub(crate) fn as_closure(&self) -> Option<&Closure> {
        match &*self.0 {
            FuncRepr::Closure(c) => Some(c),
            FuncRepr::Native(_) => None,
        }
    }

    /// One beta step.
    pub fn call(&self, arg: Value, fuel: &mut Fuel) -> Result<Value> {
        match &*self.0 {
            FuncRepr::Native(f) => {
                fuel.tick()?;
                fuel.descend(|fuel| f(arg, fuel))
            }
            FuncRepr::Closure(c) => crate::eval::apply_closure(c, arg, fuel),
        }
    }
}

impl Value {
    pub fn as_int(&self) -> Result<i64> {
        match self {
            Value::Int(i) => Ok(*i),
            other => Err(mismatch("integer", other)),
        }
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(mismatch("boolean", other)),
        }
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, Value::Fun(_))
    }

    pub fn apply(&self, arg: Value, fuel: &mut Fuel) -> Result<Value> {
        match self {
            Value::Fun(f) => f.call(arg, fuel),
            other => Err(mismatch("function", other)),
        }
    }

    /// Applies `self` to each integer in turn, left to right.
    pub fn apply_ints(&self, args: &[i64], fuel: &mut Fuel) -> Result<Value> {
        args.iter()
            .try_fold(self.clone(), |f, &a| f.apply(Value::Int(a), fuel))
    }

    pub(crate) fn describe(&self) -> String {
        match self {
            Value::Int(i) => format!("integer {i}"),
            Value::Bool(b) => format!("boolean {b}"),
            Value::Fun(_) => "function".to_string(),
        }
    }
}

pub(crate) fn mismatch(expected: &'static str, found: &Value) -> Error {
    Error::TypeMismatch {
        expected,
        found: found.describe(),
    }
}

/// Integers and booleans compare structurally; functions are never equal.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Fun(_) => f.write_str("<fun>"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "Int({i})"),
            Value::Bool(b) => write!(f, "Bool({b})"),
            Value::Fun(_) => f.write_str("Fun(..)"),
        }
    }
}

impl BinOp {
    /// Strict integer primitive; both operands are already values.
    pub fn apply(self, a: &Value, b: &Value) -> Result<Value> {
        let (x, y) = (a.as_int()?, b.as_int()?);
        let int = |r: Option<i64>| r.map(Value::Int).ok_or(Error::Overflow);
        match self {
            BinOp::Add => int(x.checked_add(y)),
            BinOp::Sub => int(x.checked_sub(y)),
            BinOp::Mul => int(x.checked_mul(y)),
            BinOp::Div if y == 0 => Err(Error::DivisionByZero),
            BinOp::Div => int(x.checked_div(y)),
            BinOp::Eq => Ok(Value::Bool(x == y)),
        }
    }
}

pub(crate) fn succ(v: &Value) -> Result<Value> {
    v.as_int()?
        .checked_add(1)
        .map(Value::Int)
        .ok_or(Error::Overflow)
}

/// Budget for one evaluation: beta and recursive-unfolding steps, and host
/// nesting depth for the closure-based run semantics.
#[derive(Debug, Clone)]
pub struct Fuel {
    step_limit: u64,
    steps: u64,
    depth_limit: usize,
    depth: usize,
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(DEFAULT_STEP_LIMIT)
    }
}

impl Fuel {
    pub fn new(step_limit: u64) -> Self {
        Fuel::with_depth_limit(step_limit, DEFAULT_DEPTH_LIMIT)
    }

    pub fn with_depth_limit(step_limit: u64, depth_limit: usize) -> Self {
        Fuel {
            step_limit,
            steps: 0,
            depth_limit,
            depth: 0,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    pub fn tick(&mut self) -> Result<()> {
        if self.steps >= self.step_limit {
            return Err(Error::StepLimitExceeded {
                limit: self.step_limit,
            });
        }
        self.steps += 1;
        Ok(())
    }

    /// Runs `f` one host-recursion level deeper.
    pub fn descend<T>(&mut self, f: impl FnOnce(&mut Fuel) -> Result<T>) -> Result<T> {
        if self.depth >= self.depth_limit {
            return Err(Error::DepthLimitExceeded {
                limit: self.depth_limit,
            });
        }
        self.depth += 1;
        let out = stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || f(self));
        self.depth -= 1;
        out
    }
}
