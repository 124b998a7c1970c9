//! Shape checks and conversion of updates to polynomials over step atoms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraError, ParamSymbol, Poly, RatFunc, Rational};
use crate::distributions::DistSpec;

use super::ast::{DistKind, Expr, Program, Rhs, Stmt};
use super::desugar::desugar_multipath;
use super::ModelError;

/// Polynomial atoms of an update. Inside the loop body `Cur(i)` is variable
/// `i` at step n and `Next(i)` its step-(n+1) value; in initializations
/// `Cur(i)` is the initial value of variable `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Cur(usize),
    Next(usize),
    Draw(usize),
}

pub type APoly = Poly<Atom, RatFunc>;

#[derive(Clone, Debug)]
pub enum PolyRhs {
    Det(APoly),
    Branch {
        prob: RatFunc,
        then: APoly,
        otherwise: APoly,
    },
}

impl PolyRhs {
    pub fn values(&self) -> Vec<&APoly> {
        match self {
            PolyRhs::Det(p) => vec![p],
            PolyRhs::Branch { then, otherwise, .. } => vec![then, otherwise],
        }
    }

    /// `E`-style image of `v^e`: `p·then^e + (1−p)·otherwise^e`.
    pub fn power_image(&self, e: u32) -> APoly {
        match self {
            PolyRhs::Det(p) => p.pow(e),
            PolyRhs::Branch { prob, then, otherwise } => {
                let q = RatFunc::one().sub(prob);
                then.pow(e).scale(prob).add(&otherwise.pow(e).scale(&q))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub var: usize,
    pub rhs: PolyRhs,
    pub line: usize,
    /// The update reads no program state.
    pub iteration_local: bool,
    /// Added for a variable that is initialized but never updated.
    pub implicit: bool,
}

#[derive(Clone, Debug)]
pub struct ValidatedProgram {
    /// The program as written.
    pub source: Program,
    /// Single-path form after desugaring `if` blocks.
    pub program: Program,
    /// Variables in body order.
    pub vars: Vec<String>,
    /// Variables introduced by desugaring.
    pub synthetic: Vec<bool>,
    pub params: Vec<ParamSymbol>,
    /// Initializations in source order.
    pub inits: Vec<Step>,
    /// Updates in body order; `body[i].var == i`.
    pub body: Vec<Step>,
    pub draws: BTreeMap<usize, DistSpec>,
}

impl ValidatedProgram {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Coefficients of the variable's own step-n value, one per branch.
    pub fn self_coefficients(&self, i: usize) -> Vec<APoly> {
        self.body[i]
            .rhs
            .values()
            .into_iter()
            .map(|p| p.coefficients_in(&Atom::Cur(i)).remove(&1).unwrap_or_else(APoly::zero))
            .collect()
    }

    /// Degree of the update in the other program variables, at least 1.
    pub fn nonself_degree(&self, i: usize) -> u32 {
        let mut d = 1;
        for p in self.body[i].rhs.values() {
            for (m, _) in p.terms() {
                if m.exponent(&Atom::Cur(i)) > 0 {
                    continue;
                }
                let deg: u32 = m
                    .factors()
                    .iter()
                    .filter(|(a, _)| matches!(a, Atom::Next(_) | Atom::Cur(_)))
                    .map(|(_, e)| *e)
                    .sum();
                d = d.max(deg);
            }
        }
        d
    }

    pub fn is_finite_support(&self) -> bool {
        self.draws.values().all(DistSpec::is_finite_support)
    }

    /// Variables that were in the source program.
    pub fn source_vars(&self) -> impl Iterator<Item = (usize, &str)> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.synthetic[*i])
            .map(|(i, v)| (i, v.as_str()))
    }
}

enum Scope {
    Init,
    Body { own: usize },
}

struct Ctx<'a> {
    index: BTreeMap<&'a str, usize>,
}

impl Ctx<'_> {
    fn is_var(&self, n: &str) -> bool {
        self.index.contains_key(n)
    }

    fn to_poly(
        &self,
        e: &Expr,
        scope: &Scope,
        draws: &mut BTreeMap<usize, DistSpec>,
        line: usize,
    ) -> Result<APoly, ModelError> {
        Ok(match e {
            Expr::Num(r) => APoly::constant(RatFunc::from(r.clone())),
            Expr::Ident(n) => match self.index.get(n.as_str()) {
                None => APoly::constant(RatFunc::param(n)),
                Some(&j) => match scope {
                    Scope::Body { own } if j == *own => APoly::var(Atom::Cur(j)),
                    Scope::Body { .. } => APoly::var(Atom::Next(j)),
                    Scope::Init => APoly::var(Atom::Cur(j)),
                },
            },
            Expr::Draw(d) => {
                let spec = self.dist_spec(d, line)?;
                draws.insert(d.id, spec);
                APoly::var(Atom::Draw(d.id))
            }
            Expr::Neg(a) => self.to_poly(a, scope, draws, line)?.neg(),
            Expr::Add(a, b) => self
                .to_poly(a, scope, draws, line)?
                .add(&self.to_poly(b, scope, draws, line)?),
            Expr::Sub(a, b) => self
                .to_poly(a, scope, draws, line)?
                .sub(&self.to_poly(b, scope, draws, line)?),
            Expr::Mul(a, b) => self
                .to_poly(a, scope, draws, line)?
                .mul(&self.to_poly(b, scope, draws, line)?),
            Expr::Div(a, d) => self
                .to_poly(a, scope, draws, line)?
                .scale(&RatFunc::from(Rational::one() / d)),
            Expr::Pow(a, k) => self.to_poly(a, scope, draws, line)?.pow(*k),
        })
    }

    /// Parameter-only expression as a rational function.
    fn param_expr(&self, e: &Expr, line: usize, in_prob: bool) -> Result<RatFunc, ModelError> {
        let mut bad_var = None;
        e.visit_idents(&mut |n| {
            if bad_var.is_none() && self.is_var(n) {
                bad_var = Some(n.to_string());
            }
        });
        if let Some(var) = bad_var {
            return Err(if in_prob {
                ModelError::VariableInProbability { var, line }
            } else {
                ModelError::VariableInDistribution { var, line }
            });
        }
        let mut has_draw = false;
        e.visit_draws(&mut |_| has_draw = true);
        if has_draw {
            return Err(ModelError::InvalidDistribution {
                message: "random draws cannot appear in probabilities or distribution arguments"
                    .into(),
                line,
            });
        }
        let mut scratch = BTreeMap::new();
        let p = self.to_poly(e, &Scope::Body { own: usize::MAX }, &mut scratch, line)?;
        Ok(p.as_constant().unwrap_or_else(RatFunc::zero))
    }

    fn dist_spec(&self, d: &super::ast::Draw, line: usize) -> Result<DistSpec, ModelError> {
        let a: Vec<RatFunc> = d
            .args
            .iter()
            .map(|e| self.param_expr(e, line, false))
            .collect::<Result<_, _>>()?;
        Ok(match d.kind {
            DistKind::Uniform => DistSpec::Uniform { a: a[0].clone(), b: a[1].clone() },
            DistKind::Normal => DistSpec::Normal { mu: a[0].clone(), sigma2: a[1].clone() },
            DistKind::Bernoulli => DistSpec::Bernoulli { p: a[0].clone() },
            DistKind::Discrete => DistSpec::Discrete(
                a.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect(),
            ),
        })
    }
}

fn check_prob(p: &RatFunc, line: usize) -> Result<(), ModelError> {
    if let Some(r) = p.as_rational() {
        if r.is_negative() || r > Rational::one() {
            return Err(ModelError::ProbabilityOutOfRange { value: r.to_string(), line });
        }
    }
    Ok(())
}

fn check_spec(spec: &DistSpec, line: usize) -> Result<(), ModelError> {
    match spec {
        DistSpec::Bernoulli { p } => check_prob(p, line),
        DistSpec::Discrete(pairs) => {
            let mut total = Some(Rational::zero());
            for (_, p) in pairs {
                check_prob(p, line)?;
                total = match (total, p.as_rational()) {
                    (Some(t), Some(r)) => Some(t + r),
                    _ => None,
                };
            }
            match total {
                Some(t) if !t.is_one() => Err(ModelError::InvalidDistribution {
                    message: format!("discrete probabilities sum to {t}, not 1"),
                    line,
                }),
                _ => Ok(()),
            }
        }
        DistSpec::Normal { sigma2, .. } => match sigma2.as_rational() {
            Some(r) if r.is_negative() => Err(ModelError::InvalidDistribution {
                message: format!("normal variance {r} is negative"),
                line,
            }),
            _ => Ok(()),
        },
        DistSpec::Uniform { .. } => Ok(()),
    }
}

fn convert_rhs(
    ctx: &Ctx,
    rhs: &Rhs,
    scope: &Scope,
    draws: &mut BTreeMap<usize, DistSpec>,
    line: usize,
) -> Result<PolyRhs, ModelError> {
    Ok(match rhs {
        Rhs::Det(e) => PolyRhs::Det(ctx.to_poly(e, scope, draws, line)?),
        Rhs::Branch { prob, then, otherwise } => {
            let prob = ctx.param_expr(prob, line, true)?;
            check_prob(&prob, line)?;
            PolyRhs::Branch {
                prob,
                then: ctx.to_poly(then, scope, draws, line)?,
                otherwise: ctx.to_poly(otherwise, scope, draws, line)?,
            }
        }
    })
}

/// Checks the loop shape and converts it to polynomial form. `if` blocks
/// are desugared first.
pub fn validate(source: &Program) -> Result<ValidatedProgram, ModelError> {
    let program = desugar_multipath(source)?;
    let source_vars: BTreeSet<String> = source.variables().into_iter().collect();

    // (1) single assignment, everything initialized
    let mut init_seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (pos, a) in program.inits.iter().enumerate() {
        if init_seen.insert(&a.var, pos).is_some() {
            return Err(ModelError::DuplicateAssignment { var: a.var.clone(), line: a.line });
        }
    }
    let mut body_assigns = Vec::new();
    let mut body_seen = BTreeSet::new();
    for s in &program.body {
        let Stmt::Assign(a) = s else { unreachable!("desugared") };
        if !body_seen.insert(a.var.as_str()) {
            return Err(ModelError::DuplicateAssignment { var: a.var.clone(), line: a.line });
        }
        if !init_seen.contains_key(a.var.as_str()) {
            return Err(ModelError::Uninitialized { var: a.var.clone(), line: a.line });
        }
        body_assigns.push(a);
    }

    let params = program.params();
    if params.iter().any(|p| p == "n") {
        let line = program
            .assignments()
            .into_iter()
            .find(|a| a.rhs.exprs().iter().any(|e| e.mentions("n")))
            .map_or(0, |a| a.line);
        return Err(ModelError::ReservedName { name: "n".into(), line });
    }

    // Implicit identity updates first, in initialization order.
    let mut vars: Vec<String> = Vec::new();
    let mut implicit = Vec::new();
    for a in &program.inits {
        if !body_seen.contains(a.var.as_str()) {
            vars.push(a.var.clone());
            implicit.push(a.line);
        }
    }
    let n_implicit = vars.len();
    vars.extend(body_assigns.iter().map(|a| a.var.clone()));
    let ctx = Ctx {
        index: vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect(),
    };

    // (2) no forward references
    for (k, a) in program.inits.iter().enumerate() {
        for e in a.rhs.exprs() {
            let mut bad = None;
            e.visit_idents(&mut |n| {
                if bad.is_none() && init_seen.get(n).is_some_and(|&j| j >= k) {
                    bad = Some(n.to_string());
                }
            });
            if let Some(referenced) = bad {
                return Err(ModelError::ForwardReference {
                    var: a.var.clone(),
                    referenced,
                    line: a.line,
                });
            }
        }
    }
    for (k, a) in body_assigns.iter().enumerate() {
        let own = n_implicit + k;
        for e in a.rhs.exprs() {
            let mut bad = None;
            e.visit_idents(&mut |n| {
                if bad.is_none() && ctx.index.get(n).is_some_and(|&j| j > own) {
                    bad = Some(n.to_string());
                }
            });
            if let Some(referenced) = bad {
                return Err(ModelError::ForwardReference {
                    var: a.var.clone(),
                    referenced,
                    line: a.line,
                });
            }
        }
    }

    let iteration_local: Vec<bool> = (0..vars.len())
        .map(|i| {
            if i < n_implicit {
                return false;
            }
            let a = body_assigns[i - n_implicit];
            let mut reads_state = false;
            for e in a.rhs.exprs() {
                e.visit_idents(&mut |n| reads_state |= ctx.is_var(n));
            }
            !reads_state
        })
        .collect();

    // (3)-(6) per update
    let mut draws = BTreeMap::new();
    let mut body = Vec::with_capacity(vars.len());
    for (i, &line) in implicit.iter().enumerate() {
        body.push(Step {
            var: i,
            rhs: PolyRhs::Det(APoly::var(Atom::Cur(i))),
            line,
            iteration_local: false,
            implicit: true,
        });
    }
    for (k, a) in body_assigns.iter().enumerate() {
        let own = n_implicit + k;
        let scope = Scope::Body { own };
        let rhs = convert_rhs(&ctx, &a.rhs, &scope, &mut draws, a.line)?;
        for p in rhs.values() {
            let by_power = p.coefficients_in(&Atom::Cur(own));
            if by_power.keys().any(|&e| e > 1) {
                return Err(ModelError::NonlinearSelf { var: a.var.clone(), line: a.line });
            }
            if let Some(coeff) = by_power.get(&1) {
                for atom in coeff.variables() {
                    if let Atom::Next(j) = atom {
                        if !iteration_local[j] {
                            return Err(ModelError::StatefulSelfCoefficient {
                                var: a.var.clone(),
                                referenced: vars[j].clone(),
                                line: a.line,
                            });
                        }
                    }
                }
            }
        }
        body.push(Step {
            var: own,
            rhs,
            line: a.line,
            iteration_local: iteration_local[own],
            implicit: false,
        });
    }

    let mut inits = Vec::with_capacity(program.inits.len());
    for a in &program.inits {
        let rhs = convert_rhs(&ctx, &a.rhs, &Scope::Init, &mut draws, a.line)?;
        inits.push(Step {
            var: ctx.index[a.var.as_str()],
            rhs,
            line: a.line,
            iteration_local: false,
            implicit: false,
        });
    }
    for a in program.assignments() {
        for e in a.rhs.exprs() {
            let mut found = Vec::new();
            e.visit_draws(&mut |d| found.push(d.id));
            for id in found {
                if let Some(spec) = draws.get(&id) {
                    check_spec(spec, a.line)?;
                }
            }
        }
    }

    let synthetic = vars.iter().map(|v| !source_vars.contains(v)).collect();
    Ok(ValidatedProgram {
        source: source.clone(),
        program,
        vars,
        synthetic,
        params: params.iter().map(|p| ParamSymbol::new(p)).collect(),
        inits,
        body,
        draws,
    })
}

impl From<AlgebraError> for ModelError {
    fn from(e: AlgebraError) -> Self {
        ModelError::InvalidDistribution { message: e.to_string(), line: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn check(src: &str) -> Result<ValidatedProgram, ModelError> {
        validate(&parse(src).unwrap())
    }

    #[test]
    fn coupon_is_accepted() {
        let vp = check(
            "f := 0\nc := 0\nd := 0\nwhile true:\n   f := 1 [1/2] 0\n   c := 1 - f + c*f\n   d := d + f - d*f\n",
        )
        .unwrap();
        assert_eq!(vp.vars, vec!["f", "c", "d"]);
        assert!(vp.body[0].iteration_local);
        let coeffs = vp.self_coefficients(1);
        assert_eq!(coeffs[0], APoly::var(Atom::Next(0)));
    }

    #[test]
    fn rejections() {
        let nonlinear = check("x := 0\nwhile true:\n    x := x*x + 1\n").unwrap_err();
        assert!(matches!(nonlinear, ModelError::NonlinearSelf { line: 3, .. }));
        let forward = check("x := 0\ny := 0\nwhile true:\n    x := x + y\n    y := y + 1\n").unwrap_err();
        assert!(matches!(forward, ModelError::ForwardReference { .. }));
        let stateful = check("x := 0\ny := 1\nwhile true:\n    y := y + 1\n    x := x*y\n").unwrap_err();
        assert!(matches!(stateful, ModelError::StatefulSelfCoefficient { .. }));
        let in_dist = check("x := 0\nwhile true:\n    x := x + u(0, x)\n").unwrap_err();
        assert!(matches!(in_dist, ModelError::VariableInDistribution { .. }));
        let in_prob = check("x := 0\nwhile true:\n    x := x + 1 [x] x\n").unwrap_err();
        assert!(matches!(in_prob, ModelError::VariableInProbability { .. }));
        let range = check("x := 0\nwhile true:\n    x := x + 1 [3/2] x\n").unwrap_err();
        assert!(matches!(range, ModelError::ProbabilityOutOfRange { .. }));
        let dup = check("x := 0\nwhile true:\n    x := x + 1\n    x := x\n").unwrap_err();
        assert!(matches!(dup, ModelError::DuplicateAssignment { .. }));
        let uninit = check("x := 0\nwhile true:\n    y := x\n").unwrap_err();
        assert!(matches!(uninit, ModelError::Uninitialized { .. }));
        let reserved = check("x := 0\nwhile true:\n    x := x + n\n").unwrap_err();
        assert!(matches!(reserved, ModelError::ReservedName { .. }));
        let sum = check("d := 0\nwhile true:\n    d := d + b(1/2) + d(1:1/2, 2:1/4)\n").unwrap_err();
        assert!(matches!(sum, ModelError::InvalidDistribution { .. }));
    }

    #[test]
    fn implicit_identity_updates() {
        let vp = check("a := 1\nx := 0\nwhile true:\n    x := x + a\n").unwrap();
        assert_eq!(vp.vars, vec!["a", "x"]);
        assert!(vp.body[0].implicit);
        assert_eq!(vp.nonself_degree(1), 1);
    }

    #[test]
    fn counter_named_variable_is_fine() {
        let vp = check("n := 0\nx := 0\nwhile true:\n    n := n + 1\n    x := x + n [1/2] x\n").unwrap();
        assert!(vp.params.is_empty());
    }

    #[test]
    fn multipath_validates() {
        let vp = check(
            "x := 0\ny := 0\nwhile true:\n    if flip(1/2):\n        x := x + 1 [3/4] x\n        y := y + x\n    else:\n        x := x - 1 [1/4] x\n",
        )
        .unwrap();
        assert_eq!(vp.source_vars().count(), 2);
        assert!(vp.synthetic.iter().filter(|s| **s).count() == 3);
    }
}
