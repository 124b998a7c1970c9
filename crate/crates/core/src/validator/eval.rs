//! Direct interpretation of source expressions, exact and in floating point.

use std::collections::BTreeMap;

use crate::algebra::rational::{self, Rational};
use crate::algebra::{Bindings, ParamSymbol};
use crate::frontend::Expr;

use super::ValidationError;

pub(crate) struct Env<'a> {
    pub index: BTreeMap<&'a str, usize>,
    pub bindings: &'a Bindings,
}

impl<'a> Env<'a> {
    pub fn new(vars: &'a [String], bindings: &'a Bindings) -> Self {
        Env {
            index: vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect(),
            bindings,
        }
    }

    pub fn param(&self, name: &str) -> Result<Rational, ValidationError> {
        self.bindings
            .get(&ParamSymbol::new(name))
            .cloned()
            .ok_or_else(|| ValidationError::UnboundParameter(name.to_string()))
    }
}

pub(crate) fn exact(
    e: &Expr,
    env: &Env,
    state: &[Rational],
    draws: &BTreeMap<usize, Rational>,
) -> Result<Rational, ValidationError> {
    Ok(match e {
        Expr::Num(r) => r.clone(),
        Expr::Ident(n) => match env.index.get(n.as_str()) {
            Some(&i) => state[i].clone(),
            None => env.param(n)?,
        },
        Expr::Draw(d) => draws[&d.id].clone(),
        Expr::Neg(a) => -exact(a, env, state, draws)?,
        Expr::Add(a, b) => exact(a, env, state, draws)? + exact(b, env, state, draws)?,
        Expr::Sub(a, b) => exact(a, env, state, draws)? - exact(b, env, state, draws)?,
        Expr::Mul(a, b) => exact(a, env, state, draws)? * exact(b, env, state, draws)?,
        Expr::Div(a, d) => exact(a, env, state, draws)? / d,
        Expr::Pow(a, k) => rational::pow(&exact(a, env, state, draws)?, *k),
    })
}

/// Expression with variables resolved to state slots and parameters to numbers.
#[derive(Clone, Debug)]
pub(crate) enum CExpr {
    Const(f64),
    Var(usize),
    Draw(usize),
    Neg(Box<CExpr>),
    Add(Box<CExpr>, Box<CExpr>),
    Sub(Box<CExpr>, Box<CExpr>),
    Mul(Box<CExpr>, Box<CExpr>),
    Pow(Box<CExpr>, u32),
}

pub(crate) fn compile(e: &Expr, env: &Env) -> Result<CExpr, ValidationError> {
    let b = |x: &Expr| compile(x, env).map(Box::new);
    Ok(match e {
        Expr::Num(r) => CExpr::Const(rational::to_f64(r)),
        Expr::Ident(n) => match env.index.get(n.as_str()) {
            Some(&i) => CExpr::Var(i),
            None => CExpr::Const(rational::to_f64(&env.param(n)?)),
        },
        Expr::Draw(d) => CExpr::Draw(d.id),
        Expr::Neg(a) => CExpr::Neg(b(a)?),
        Expr::Add(x, y) => CExpr::Add(b(x)?, b(y)?),
        Expr::Sub(x, y) => CExpr::Sub(b(x)?, b(y)?),
        Expr::Mul(x, y) => CExpr::Mul(b(x)?, b(y)?),
        Expr::Div(a, d) => CExpr::Mul(b(a)?, Box::new(CExpr::Const(1.0 / rational::to_f64(d)))),
        Expr::Pow(a, k) => CExpr::Pow(b(a)?, *k),
    })
}

impl CExpr {
    pub fn eval(&self, state: &[f64], draw: &mut dyn FnMut(usize) -> f64) -> f64 {
        match self {
            CExpr::Const(c) => *c,
            CExpr::Var(i) => state[*i],
            CExpr::Draw(id) => draw(*id),
            CExpr::Neg(a) => -a.eval(state, draw),
            CExpr::Add(a, b) => a.eval(state, draw) + b.eval(state, draw),
            CExpr::Sub(a, b) => a.eval(state, draw) - b.eval(state, draw),
            CExpr::Mul(a, b) => a.eval(state, draw) * b.eval(state, draw),
            CExpr::Pow(a, k) => a.eval(state, draw).powi(*k as i32),
        }
    }
}
