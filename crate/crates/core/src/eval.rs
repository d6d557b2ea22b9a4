//! Reference interpreter for Base syntax.
//!
//! Call-by-value, left to right, driven by an explicit continuation stack.
//! Used as the independent oracle against which the run semantics and the
//! show semantics are cross-checked.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ast::{BaseAst, BinOp};
use crate::env::PEnv;
use crate::error::{Error, Result};
use crate::name::Name;
use crate::value::{self, mismatch, Fuel, Func, Value};

#[derive(Clone)]
pub(crate) enum Slot {
    Ready(Value),
    /// Clause `usize` of a letrec group; unfolded on every lookup.
    Rec(Arc<RecGroup>, usize),
}

pub(crate) struct RecGroup {
    clauses: Vec<(Name, Arc<BaseAst>)>,
    base: AstEnv,
}

impl RecGroup {
    fn env(self: &Arc<Self>) -> AstEnv {
        self.clauses
            .iter()
            .enumerate()
            .fold(self.base.clone(), |env, (i, (n, _))| {
                env.extend(n.clone(), Slot::Rec(self.clone(), i))
            })
    }
}

pub(crate) type AstEnv = PEnv<Slot>;

pub(crate) struct Closure {
    param: Name,
    body: Arc<BaseAst>,
    env: AstEnv,
}

enum Kont {
    BinLeft {
        op: BinOp,
        rhs: Arc<BaseAst>,
        env: AstEnv,
    },
    BinRight {
        op: BinOp,
        left: Value,
    },
    Succ,
    If {
        then: Arc<BaseAst>,
        els: Arc<BaseAst>,
        env: AstEnv,
    },
    AppFun {
        arg: Arc<BaseAst>,
        env: AstEnv,
    },
    AppArg {
        fun: Value,
    },
    Let {
        name: Name,
        body: Arc<BaseAst>,
        env: AstEnv,
    },
}

enum State {
    Eval(Arc<BaseAst>, AstEnv),
    Return(Value),
}

/// Evaluates `ast` with the free names bound by `env`, aborting after
/// `step_limit` beta and recursive-unfolding steps.
pub fn eval_ast(ast: &BaseAst, env: &BTreeMap<Name, Value>, step_limit: u64) -> Result<Value> {
    eval_ast_with(ast, env, &mut Fuel::new(step_limit))
}

pub fn eval_ast_with(ast: &BaseAst, env: &BTreeMap<Name, Value>, fuel: &mut Fuel) -> Result<Value> {
    let env = env.iter().fold(AstEnv::empty(), |e, (n, v)| {
        e.extend(n.clone(), Slot::Ready(v.clone()))
    });
    run(State::Eval(Arc::new(ast.clone()), env), fuel)
}

/// Evaluates a closed program.
pub fn eval_closed(ast: &BaseAst, fuel: &mut Fuel) -> Result<Value> {
    eval_ast_with(ast, &BTreeMap::new(), fuel)
}

pub(crate) fn apply_closure(c: &Closure, arg: Value, fuel: &mut Fuel) -> Result<Value> {
    fuel.tick()?;
    let env = c.env.extend(c.param.clone(), Slot::Ready(arg));
    run(State::Eval(c.body.clone(), env), fuel)
}

fn closure(param: &Name, body: &Arc<BaseAst>, env: AstEnv) -> Value {
    Value::Fun(Func::closure(Closure {
        param: param.clone(),
        body: body.clone(),
        env,
    }))
}

fn run(mut state: State, fuel: &mut Fuel) -> Result<Value> {
    let mut stack: Vec<Kont> = Vec::new();
    loop {
        state = match state {
            State::Eval(ast, env) => match &*ast {
                BaseAst::Int(i) => State::Return(Value::Int(*i)),
                BaseAst::Bool(b) => State::Return(Value::Bool(*b)),
                BaseAst::Var(n) => match env.lookup(n) {
                    None => return Err(Error::UnboundVariable(n.clone())),
                    Some(Slot::Ready(v)) => State::Return(v.clone()),
                    Some(Slot::Rec(group, i)) => {
                        fuel.tick()?;
                        let rec_env = group.env();
                        let rhs = &group.clauses[*i].1;
                        match &**rhs {
                            BaseAst::Lam(p, b) => State::Return(closure(p, b, rec_env)),
                            _ => State::Eval(rhs.clone(), rec_env),
                        }
                    }
                },
                BaseAst::Succ(a) => {
                    stack.push(Kont::Succ);
                    State::Eval(a.clone(), env)
                }
                BaseAst::Bin(op, a, b) => {
                    stack.push(Kont::BinLeft {
                        op: *op,
                        rhs: b.clone(),
                        env: env.clone(),
                    });
                    State::Eval(a.clone(), env)
                }
                BaseAst::If(c, t, e) => {
                    stack.push(Kont::If {
                        then: t.clone(),
                        els: e.clone(),
                        env: env.clone(),
                    });
                    State::Eval(c.clone(), env)
                }
                BaseAst::Lam(p, b) => State::Return(closure(p, b, env)),
                BaseAst::App(f, a) => {
                    stack.push(Kont::AppFun {
                        arg: a.clone(),
                        env: env.clone(),
                    });
                    State::Eval(f.clone(), env)
                }
                BaseAst::Let(n, r, b) => {
                    stack.push(Kont::Let {
                        name: n.clone(),
                        body: b.clone(),
                        env: env.clone(),
                    });
                    State::Eval(r.clone(), env)
                }
                BaseAst::LetRec(clauses, body) => {
                    let group = Arc::new(RecGroup {
                        clauses: clauses.clone(),
                        base: env,
                    });
                    State::Eval(body.clone(), group.env())
                }
            },
            State::Return(v) => match stack.pop() {
                None => return Ok(v),
                Some(Kont::BinLeft { op, rhs, env }) => {
                    stack.push(Kont::BinRight { op, left: v });
                    State::Eval(rhs, env)
                }
                Some(Kont::BinRight { op, left }) => State::Return(op.apply(&left, &v)?),
                Some(Kont::Succ) => State::Return(value::succ(&v)?),
                Some(Kont::If { then, els, env }) => {
                    State::Eval(if v.as_bool()? { then } else { els }, env)
                }
                Some(Kont::AppFun { arg, env }) => {
                    stack.push(Kont::AppArg { fun: v });
                    State::Eval(arg, env)
                }
                Some(Kont::AppArg { fun }) => match &fun {
                    Value::Fun(f) => match f.as_closure() {
                        Some(c) => {
                            fuel.tick()?;
                            State::Eval(
                                c.body.clone(),
                                c.env.extend(c.param.clone(), Slot::Ready(v)),
                            )
                        }
                        None => State::Return(f.call(v, fuel)?),
                    },
                    other => return Err(mismatch("function", other)),
                },
                Some(Kont::Let { name, body, env }) => {
                    State::Eval(body, env.extend(name, Slot::Ready(v)))
                }
            },
        };
    }
}
