//! Seeded Monte Carlo runs of the source loop.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::Bindings;
use crate::distributions::Sampler;
use crate::frontend::{Assign, Cond, Rhs, Stmt, ValidatedProgram};

use super::eval::{compile, CExpr, Env};
use super::ValidationError;

/// Sampled values, indexed `[checkpoint][variable][run]`.
#[derive(Clone, Debug)]
pub struct Samples {
    pub checkpoints: Vec<u64>,
    pub vars: Vec<String>,
    pub values: Vec<Vec<Vec<f64>>>,
}

impl Samples {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Per-run values of `∏ x_i^e_i` at checkpoint `c`.
    pub fn products(&self, c: usize, factors: &[(usize, u32)]) -> Vec<f64> {
        let runs = self.values[c].first().map_or(0, Vec::len);
        (0..runs)
            .map(|r| {
                factors
                    .iter()
                    .map(|&(i, e)| self.values[c][i][r].powi(e as i32))
                    .product()
            })
            .collect()
    }
}

enum CRhs {
    Det(CExpr),
    Branch { prob: CExpr, then: CExpr, otherwise: CExpr },
}

enum CStmt {
    Assign(usize, CRhs),
    If {
        flip: Option<CExpr>,
        var: usize,
        then_body: Vec<(usize, CRhs)>,
        else_body: Vec<(usize, CRhs)>,
    },
}

struct Machine {
    inits: Vec<(usize, CRhs)>,
    body: Vec<CStmt>,
    samplers: BTreeMap<usize, Sampler>,
    width: usize,
}

fn compile_assign(a: &Assign, env: &Env) -> Result<(usize, CRhs), ValidationError> {
    let rhs = match &a.rhs {
        Rhs::Det(e) => CRhs::Det(compile(e, env)?),
        Rhs::Branch { prob, then, otherwise } => CRhs::Branch {
            prob: compile(prob, env)?,
            then: compile(then, env)?,
            otherwise: compile(otherwise, env)?,
        },
    };
    Ok((env.index[a.var.as_str()], rhs))
}

impl Machine {
    fn build(vp: &ValidatedProgram, vars: &[String], bindings: &Bindings) -> Result<Self, ValidationError> {
        let env = Env::new(vars, bindings);
        let block = |b: &[Assign]| b.iter().map(|a| compile_assign(a, &env)).collect::<Result<Vec<_>, _>>();
        let mut body = Vec::new();
        for s in &vp.source.body {
            body.push(match s {
                Stmt::Assign(a) => {
                    let (v, r) = compile_assign(a, &env)?;
                    CStmt::Assign(v, r)
                }
                Stmt::If(b) => {
                    let (flip, var) = match &b.cond {
                        Cond::Flip(e) => (Some(compile(e, &env)?), 0),
                        Cond::Var(v) => (None, env.index[v.as_str()]),
                    };
                    CStmt::If {
                        flip,
                        var,
                        then_body: block(&b.then_body)?,
                        else_body: block(&b.else_body)?,
                    }
                }
            });
        }
        let mut samplers = BTreeMap::new();
        for (id, spec) in &vp.draws {
            samplers.insert(*id, spec.sampler(bindings)?);
        }
        Ok(Machine {
            inits: block(&vp.source.inits)?,
            body,
            samplers,
            width: vars.len(),
        })
    }

    fn run(&self, checkpoints: &[u64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let mut state = vec![0.0; self.width];
        for (v, r) in &self.inits {
            self.exec(*v, r, &mut state, rng);
        }
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut n = 0u64;
        for &c in checkpoints {
            while n < c {
                for s in &self.body {
                    match s {
                        CStmt::Assign(v, r) => self.exec(*v, r, &mut state, rng),
                        CStmt::If { flip, var, then_body, else_body } => {
                            let take = match flip {
                                Some(p) => {
                                    let p = p.eval(&state, &mut |_| 0.0);
                                    rng.random::<f64>() < p
                                }
                                None => state[*var] != 0.0,
                            };
                            let branch = if take { then_body } else { else_body };
                            for (v, r) in branch {
                                self.exec(*v, r, &mut state, rng);
                            }
                        }
                    }
                }
                n += 1;
            }
            out.push(state.clone());
        }
        out
    }

    fn exec(&self, var: usize, rhs: &CRhs, state: &mut [f64], rng: &mut ChaCha8Rng) {
        let samplers = &self.samplers;
        let value = match rhs {
            CRhs::Det(e) => e.eval(state, &mut |id| samplers[&id].draw(&mut *rng)),
            CRhs::Branch { prob, then, otherwise } => {
                let p = prob.eval(state, &mut |_| 0.0);
                let chosen = if rng.random::<f64>() < p { then } else { otherwise };
                chosen.eval(state, &mut |id| samplers[&id].draw(&mut *rng))
            }
        };
        state[var] = value;
    }
}

/// Runs the loop `runs` times and records the source variables at each
/// checkpoint. Run `r` uses stream `r` of a ChaCha8 generator seeded with
/// `seed`, so results do not depend on the thread count.
pub fn simulate(
    vp: &ValidatedProgram,
    bindings: &Bindings,
    checkpoints: &[u64],
    runs: usize,
    seed: u64,
) -> Result<Samples, ValidationError> {
    let vars = vp.source.variables();
    let machine = Machine::build(vp, &vars, bindings)?;
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let per_run: Vec<Vec<Vec<f64>>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            machine.run(&cps, &mut rng)
        })
        .collect();
    let mut values = vec![vec![Vec::with_capacity(runs); vars.len()]; cps.len()];
    for run in per_run {
        for (c, state) in run.into_iter().enumerate() {
            for (i, v) in state.into_iter().enumerate() {
                values[c][i].push(v);
            }
        }
    }
    Ok(Samples {
        checkpoints: cps,
        vars,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn reproducible() {
        let p = corpus::find("StutteringP").unwrap();
        let vp = p.load().unwrap();
        let a = simulate(&vp, &p.default_bindings(), &[3, 1], 500, 7).unwrap();
        let b = simulate(&vp, &p.default_bindings(), &[1, 3], 500, 7).unwrap();
        assert_eq!(a.checkpoints, vec![1, 3]);
        assert_eq!(a.values, b.values);
        let c = simulate(&vp, &p.default_bindings(), &[1, 3], 500, 8).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn binomial_mean() {
        let p = corpus::find("Binomial").unwrap();
        let vp = p.load().unwrap();
        let s = simulate(&vp, &p.default_bindings(), &[10], 20_000, 1).unwrap();
        let m = mean(&s.values[0][0]);
        // sd of the mean is sqrt(2.5 / 20000) ≈ 0.011
        assert!((m - 5.0).abs() < 0.06, "{m}");
    }

    #[test]
    fn multipath_mean() {
        let p = corpus::find("Multipath_walk").unwrap();
        let vp = p.load().unwrap();
        let s = simulate(&vp, &Bindings::new(), &[4], 20_000, 3).unwrap();
        let x = s.var_index("x").unwrap();
        // each step moves by +3/8 - 1/8 on average
        let m = mean(&s.values[0][x]);
        assert!((m - 1.0).abs() < 0.05, "{m}");
    }
}
