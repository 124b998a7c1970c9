//! Rewrites `if` blocks into single-path updates guarded by 0/1 coins.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::ast::{Assign, Cond, DistKind, Expr, IfBlock, Program, Rhs, Stmt};
use super::ModelError;

struct Fresh {
    taken: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    fn name(&mut self, prefix: &str) -> String {
        loop {
            let candidate = format!("_{prefix}{}", self.counter);
            self.counter += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

fn is_bit(e: &Expr) -> bool {
    matches!(e.as_constant(), Some(r) if r.is_zero() || r.is_one())
}

/// Whether `var` is assigned before the block by a state-free 0/1 update.
fn is_local_bit(body: &[Stmt], upto: usize, var: &str, vars: &BTreeSet<String>) -> bool {
    let Some(assign) = body[..upto].iter().find_map(|s| match s {
        Stmt::Assign(a) if a.var == var => Some(a),
        _ => None,
    }) else {
        return false;
    };
    let mut stateful = false;
    for e in assign.rhs.exprs() {
        e.visit_idents(&mut |n| stateful |= vars.contains(n));
    }
    if stateful {
        return false;
    }
    match &assign.rhs {
        Rhs::Branch { then, otherwise, .. } => is_bit(then) && is_bit(otherwise),
        Rhs::Det(Expr::Draw(d)) => d.kind == DistKind::Bernoulli,
        Rhs::Det(e) => is_bit(e),
    }
}

/// Variables of both branches in an order that keeps every pair that
/// reference each other in their branch order.
fn merged_order(block: &IfBlock) -> Result<Vec<String>, ModelError> {
    let mut nodes: Vec<String> = Vec::new();
    for a in block.then_body.iter().chain(&block.else_body) {
        if !nodes.contains(&a.var) {
            nodes.push(a.var.clone());
        }
    }
    let idx = |v: &str| nodes.iter().position(|n| n == v).unwrap();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for branch in [&block.then_body, &block.else_body] {
        for (i, a) in branch.iter().enumerate() {
            for b in &branch[i + 1..] {
                let linked = b.rhs.exprs().iter().any(|e| e.mentions(&a.var))
                    || a.rhs.exprs().iter().any(|e| e.mentions(&b.var));
                if linked {
                    edges.insert((idx(&a.var), idx(&b.var)));
                }
            }
        }
    }
    let mut indeg = vec![0usize; nodes.len()];
    for &(_, to) in &edges {
        indeg[to] += 1;
    }
    let mut done = vec![false; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    while order.len() < nodes.len() {
        let Some(next) = (0..nodes.len()).find(|&i| !done[i] && indeg[i] == 0) else {
            let (a, b) = edges
                .iter()
                .find(|(a, b)| !done[*a] && !done[*b])
                .copied()
                .unwrap_or((0, 0));
            return Err(ModelError::InconsistentBranchOrder {
                first: nodes[a].clone(),
                second: nodes[b].clone(),
                line: block.line,
            });
        };
        done[next] = true;
        order.push(nodes[next].clone());
        for &(from, to) in &edges {
            if from == next {
                indeg[to] -= 1;
            }
        }
    }
    Ok(order)
}

fn guarded(t: &str, e: Expr, positive: bool) -> Expr {
    let guard = if positive {
        Expr::ident(t)
    } else {
        Expr::sub(Expr::num(1), Expr::ident(t))
    };
    Expr::mul(guard, e)
}

/// Replaces each `if` block by coin-guarded single-path updates. Programs
/// without `if` blocks come back unchanged.
pub fn desugar_multipath(p: &Program) -> Result<Program, ModelError> {
    if !p.has_multipath() {
        return Ok(p.clone());
    }
    let vars: BTreeSet<String> = p.variables().into_iter().collect();
    let mut taken: BTreeSet<String> = vars.clone();
    taken.extend(p.params());
    let mut fresh = Fresh { taken, counter: 0 };
    let mut inits = p.inits.clone();
    let mut body = Vec::new();
    for (pos, stmt) in p.body.iter().enumerate() {
        let block = match stmt {
            Stmt::Assign(a) => {
                body.push(Stmt::Assign(a.clone()));
                continue;
            }
            Stmt::If(b) => b,
        };
        let line = block.line;
        let t = match &block.cond {
            Cond::Flip(prob) => {
                let t = fresh.name("t");
                inits.push(Assign::new(&t, Rhs::Det(Expr::num(0)), line));
                body.push(Stmt::Assign(Assign::new(
                    &t,
                    Rhs::Branch {
                        prob: prob.clone(),
                        then: Expr::num(1),
                        otherwise: Expr::num(0),
                    },
                    line,
                )));
                t
            }
            Cond::Var(v) => {
                if !is_local_bit(&p.body, pos, v, &vars) {
                    return Err(ModelError::UnsupportedCondition { var: v.clone(), line });
                }
                v.clone()
            }
        };
        for var in merged_order(block)? {
            let find = |branch: &[Assign]| branch.iter().find(|a| a.var == var).cloned();
            let then_a = find(&block.then_body);
            let else_a = find(&block.else_body);
            let line = then_a.as_ref().or(else_a.as_ref()).map_or(line, |a| a.line);
            let mut side = |a: Option<Assign>, coin: &str| -> Expr {
                match a.map(|a| a.rhs) {
                    None => Expr::ident(&var),
                    Some(Rhs::Det(e)) => e,
                    Some(Rhs::Branch { prob, then, otherwise }) => {
                        let f = fresh.name(coin);
                        inits.push(Assign::new(&f, Rhs::Det(Expr::num(0)), line));
                        body.push(Stmt::Assign(Assign::new(
                            &f,
                            Rhs::Branch {
                                prob,
                                then: Expr::num(1),
                                otherwise: Expr::num(0),
                            },
                            line,
                        )));
                        Expr::add(
                            Expr::mul(then, Expr::ident(&f)),
                            Expr::mul(otherwise, Expr::sub(Expr::num(1), Expr::ident(&f))),
                        )
                    }
                }
            };
            let e1 = side(then_a, "f");
            let e2 = side(else_a, "g");
            let rhs = Expr::add(guarded(&t, e1, true), guarded(&t, e2, false));
            body.push(Stmt::Assign(Assign::new(&var, Rhs::Det(rhs), line)));
        }
    }
    Ok(Program { inits, body })
}
