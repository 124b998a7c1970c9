//! Exact state distributions for programs whose draws have finite support.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::Bindings;
use crate::frontend::{Assign, Cond, Expr, Rhs, Stmt, ValidatedProgram};

use super::eval::{exact, Env};
use super::ValidationError;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

type Dist = BTreeMap<Vec<Rational>, Rational>;

/// Joint distribution of the source variables after `n` iterations.
#[derive(Clone, Debug)]
pub struct StateDist {
    pub n: u64,
    pub vars: Vec<String>,
    pub states: BTreeMap<Vec<Rational>, Rational>,
}

impl StateDist {
    pub fn mass(&self) -> Rational {
        self.states.values().fold(Rational::zero(), |a, p| a + p)
    }

    /// `E[∏ x_i^e_i]` over the listed `(variable index, exponent)` pairs.
    pub fn moment(&self, factors: &[(usize, u32)]) -> Rational {
        let mut acc = Rational::zero();
        for (s, p) in &self.states {
            let mut v = p.clone();
            for &(i, e) in factors {
                v *= rational::pow(&s[i], e);
            }
            acc += v;
        }
        acc
    }

    pub fn raw(&self, var: &str, j: u32) -> Option<Rational> {
        let i = self.vars.iter().position(|v| v == var)?;
        Some(self.moment(&[(i, j)]))
    }
}

struct Enumerator<'a> {
    env: Env<'a>,
    supports: BTreeMap<usize, Vec<(Rational, Rational)>>,
    cap: usize,
}

impl Enumerator<'_> {
    /// Every joint outcome of the draws in `exprs`, with its probability.
    fn draw_outcomes(&self, exprs: &[&Expr]) -> Vec<(BTreeMap<usize, Rational>, Rational)> {
        let mut ids = Vec::new();
        for e in exprs {
            e.visit_draws(&mut |d| ids.push(d.id));
        }
        let mut out = vec![(BTreeMap::new(), Rational::one())];
        for id in ids {
            let support = &self.supports[&id];
            out = out
                .into_iter()
                .flat_map(|(vals, p)| {
                    support.iter().map(move |(v, w)| {
                        let mut vals = vals.clone();
                        vals.insert(id, v.clone());
                        (vals, &p * w)
                    })
                })
                .collect();
        }
        out
    }

    fn assign(&self, dist: Dist, a: &Assign) -> Result<Dist, ValidationError> {
        let target = self.env.index[a.var.as_str()];
        let mut out = Dist::new();
        for (state, p) in dist {
            let mut push = |value: Rational, w: Rational| {
                if w.is_zero() {
                    return;
                }
                let mut s = state.clone();
                s[target] = value;
                *out.entry(s).or_insert_with(Rational::zero) += w;
            };
            match &a.rhs {
                Rhs::Det(e) => {
                    for (draws, w) in self.draw_outcomes(&[e]) {
                        push(exact(e, &self.env, &state, &draws)?, &p * w);
                    }
                }
                Rhs::Branch { prob, then, otherwise } => {
                    let q = exact(prob, &self.env, &state, &BTreeMap::new())?;
                    for (draws, w) in self.draw_outcomes(&[then]) {
                        push(exact(then, &self.env, &state, &draws)?, &p * &q * w);
                    }
                    let r = Rational::one() - &q;
                    for (draws, w) in self.draw_outcomes(&[otherwise]) {
                        push(exact(otherwise, &self.env, &state, &draws)?, &p * &r * w);
                    }
                }
            }
        }
        if out.len() > self.cap {
            return Err(ValidationError::StateExplosion(out.len()));
        }
        Ok(out)
    }

    fn block(&self, dist: Dist, body: &[Assign]) -> Result<Dist, ValidationError> {
        body.iter().try_fold(dist, |d, a| self.assign(d, a))
    }

    fn stmt(&self, dist: Dist, s: &Stmt) -> Result<Dist, ValidationError> {
        match s {
            Stmt::Assign(a) => self.assign(dist, a),
            Stmt::If(b) => {
                let mut then_in = Dist::new();
                let mut else_in = Dist::new();
                for (state, p) in dist {
                    let q = match &b.cond {
                        Cond::Flip(e) => exact(e, &self.env, &state, &BTreeMap::new())?,
                        Cond::Var(v) => state[self.env.index[v.as_str()]].clone(),
                    };
                    let r = Rational::one() - &q;
                    if !q.is_zero() {
                        *then_in.entry(state.clone()).or_insert_with(Rational::zero) += &p * &q;
                    }
                    if !r.is_zero() {
                        *else_in.entry(state).or_insert_with(Rational::zero) += &p * &r;
                    }
                }
                let mut out = self.block(then_in, &b.then_body)?;
                for (s, p) in self.block(else_in, &b.else_body)? {
                    *out.entry(s).or_insert_with(Rational::zero) += p;
                }
                if out.len() > self.cap {
                    return Err(ValidationError::StateExplosion(out.len()));
                }
                Ok(out)
            }
        }
    }
}

/// Distributions after `0..=n_max` iterations of the source loop.
pub fn enumerate_exact(
    vp: &ValidatedProgram,
    bindings: &Bindings,
    n_max: u64,
) -> Result<Vec<StateDist>, ValidationError> {
    enumerate_exact_capped(vp, bindings, n_max, DEFAULT_STATE_CAP)
}

/// As [`enumerate_exact`], failing once more than `cap` states are live.
pub fn enumerate_exact_capped(
    vp: &ValidatedProgram,
    bindings: &Bindings,
    n_max: u64,
    cap: usize,
) -> Result<Vec<StateDist>, ValidationError> {
    if !vp.is_finite_support() {
        return Err(ValidationError::InfiniteSupport);
    }
    let vars = vp.source.variables();
    let mut supports = BTreeMap::new();
    for (id, spec) in &vp.draws {
        let s = spec.support(bindings)?.ok_or(ValidationError::InfiniteSupport)?;
        supports.insert(*id, s);
    }
    let en = Enumerator {
        env: Env::new(&vars, bindings),
        supports,
        cap,
    };
    let mut dist = Dist::new();
    dist.insert(vec![Rational::zero(); vars.len()], Rational::one());
    dist = en.block(dist, &vp.source.inits)?;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        out.push(StateDist {
            n,
            vars: vars.clone(),
            states: dist.clone(),
        });
        if n < n_max {
            dist = vp.source.body.iter().try_fold(dist, |d, s| en.stmt(d, s))?;
        }
    }
    Ok(out)
}
