use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_traits::Signed;

use crate::algebra::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistKind {
    Uniform,
    Normal,
    Bernoulli,
    Discrete,
}

/// One syntactic draw occurrence. `args` holds the distribution arguments;
/// for `Discrete` they alternate value, probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub id: usize,
    pub kind: DistKind,
    pub surface: String,
    pub args: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Ident(String),
    Draw(Box<Draw>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by a nonzero numeric constant.
    Div(Box<Expr>, Rational),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.to_string())
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    /// Calls `f` on every identifier in the expression, draw arguments included.
    pub fn visit_idents<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Num(_) => {}
            Expr::Ident(name) => f(name),
            Expr::Draw(d) => d.args.iter().for_each(|a| a.visit_idents(f)),
            Expr::Neg(a) | Expr::Div(a, _) | Expr::Pow(a, _) => a.visit_idents(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.visit_idents(f);
                b.visit_idents(f);
            }
        }
    }

    pub fn visit_draws<'a>(&'a self, f: &mut impl FnMut(&'a Draw)) {
        match self {
            Expr::Num(_) | Expr::Ident(_) => {}
            Expr::Draw(d) => {
                f(d);
                d.args.iter().for_each(|a| a.visit_draws(f));
            }
            Expr::Neg(a) | Expr::Div(a, _) | Expr::Pow(a, _) => a.visit_draws(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.visit_draws(f);
                b.visit_draws(f);
            }
        }
    }

    pub fn visit_draws_mut(&mut self, f: &mut impl FnMut(&mut Draw)) {
        match self {
            Expr::Num(_) | Expr::Ident(_) => {}
            Expr::Draw(d) => {
                f(d);
                d.args.iter_mut().for_each(|a| a.visit_draws_mut(f));
            }
            Expr::Neg(a) | Expr::Div(a, _) | Expr::Pow(a, _) => a.visit_draws_mut(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.visit_draws_mut(f);
                b.visit_draws_mut(f);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        let mut hit = false;
        self.visit_idents(&mut |n| hit |= n == name);
        hit
    }

    /// Numeric value of an expression built only from literals.
    pub fn as_constant(&self) -> Option<Rational> {
        Some(match self {
            Expr::Num(r) => r.clone(),
            Expr::Ident(_) | Expr::Draw(_) => return None,
            Expr::Neg(a) => -a.as_constant()?,
            Expr::Add(a, b) => a.as_constant()? + b.as_constant()?,
            Expr::Sub(a, b) => a.as_constant()? - b.as_constant()?,
            Expr::Mul(a, b) => a.as_constant()? * b.as_constant()?,
            Expr::Div(a, d) => a.as_constant()? / d,
            Expr::Pow(a, e) => crate::algebra::rational::pow(&a.as_constant()?, *e),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(r) if r.is_negative() || !r.is_integer() => 2,
            Expr::Num(_) | Expr::Ident(_) | Expr::Draw(_) => 5,
        }
    }
}

fn write_child(out: &mut String, e: &Expr, min_prec: u8) {
    if e.precedence() < min_prec {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_rational(out: &mut String, r: &Rational) {
    if r.is_integer() {
        write!(out, "{}", r.numer()).unwrap();
    } else {
        write!(out, "{}/{}", r.numer(), r.denom()).unwrap();
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Num(r) => write_rational(out, r),
        Expr::Ident(n) => out.push_str(n),
        Expr::Draw(d) => {
            out.push_str(&d.surface);
            out.push('(');
            if d.kind == DistKind::Discrete {
                for (i, pair) in d.args.chunks(2).enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_expr(out, &pair[0]);
                    out.push(':');
                    write_expr(out, &pair[1]);
                }
            } else {
                for (i, a) in d.args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_expr(out, a);
                }
            }
            out.push(')');
        }
        Expr::Neg(a) => {
            out.push('-');
            write_child(out, a, 3);
        }
        Expr::Add(a, b) => {
            write_child(out, a, 1);
            out.push_str(" + ");
            write_child(out, b, 2);
        }
        Expr::Sub(a, b) => {
            write_child(out, a, 1);
            out.push_str(" - ");
            write_child(out, b, 2);
        }
        Expr::Mul(a, b) => {
            write_child(out, a, 2);
            out.push('*');
            write_child(out, b, 3);
        }
        Expr::Div(a, d) => {
            write_child(out, a, 2);
            out.push('/');
            if d.is_integer() && !d.is_negative() {
                write_rational(out, d);
            } else {
                out.push('(');
                write_rational(out, d);
                out.push(')');
            }
        }
        Expr::Pow(a, k) => {
            write_child(out, a, 5);
            write!(out, "^{k}").unwrap();
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    Det(Expr),
    Branch { prob: Expr, then: Expr, otherwise: Expr },
}

impl Rhs {
    pub fn exprs(&self) -> Vec<&Expr> {
        match self {
            Rhs::Det(e) => vec![e],
            Rhs::Branch { prob, then, otherwise } => vec![prob, then, otherwise],
        }
    }

    pub fn exprs_mut(&mut self) -> Vec<&mut Expr> {
        match self {
            Rhs::Det(e) => vec![e],
            Rhs::Branch { prob, then, otherwise } => vec![prob, then, otherwise],
        }
    }

    /// The value expressions, excluding a branch probability.
    pub fn values(&self) -> Vec<&Expr> {
        match self {
            Rhs::Det(e) => vec![e],
            Rhs::Branch { then, otherwise, .. } => vec![then, otherwise],
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Det(e) => write!(f, "{e}"),
            Rhs::Branch { prob, then, otherwise } => write!(f, "{then} [{prob}] {otherwise}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assign {
    pub var: String,
    pub rhs: Rhs,
    pub line: usize,
}

impl Assign {
    pub fn new(var: &str, rhs: Rhs, line: usize) -> Self {
        Assign {
            var: var.to_string(),
            rhs,
            line,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cond {
    Flip(Expr),
    Var(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IfBlock {
    pub cond: Cond,
    pub then_body: Vec<Assign>,
    pub else_body: Vec<Assign>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Assign(Assign),
    If(IfBlock),
}

impl Stmt {
    pub fn line(&self) -> usize {
        match self {
            Stmt::Assign(a) => a.line,
            Stmt::If(b) => b.line,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub inits: Vec<Assign>,
    pub body: Vec<Stmt>,
}

impl Program {
    /// Every assigned variable, in order of first assignment (inits first).
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |v: &str| {
            if seen.insert(v.to_string()) {
                out.push(v.to_string());
            }
        };
        for a in &self.inits {
            push(&a.var);
        }
        for s in &self.body {
            match s {
                Stmt::Assign(a) => push(&a.var),
                Stmt::If(b) => {
                    for a in b.then_body.iter().chain(&b.else_body) {
                        push(&a.var);
                    }
                }
            }
        }
        out
    }

    pub fn assignments(&self) -> Vec<&Assign> {
        let mut out: Vec<&Assign> = self.inits.iter().collect();
        for s in &self.body {
            match s {
                Stmt::Assign(a) => out.push(a),
                Stmt::If(b) => out.extend(b.then_body.iter().chain(&b.else_body)),
            }
        }
        out
    }

    fn all_exprs(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for a in self.assignments() {
            out.extend(a.rhs.exprs());
        }
        for s in &self.body {
            if let Stmt::If(IfBlock { cond: Cond::Flip(e), .. }) = s {
                out.push(e);
            }
        }
        out
    }

    /// Identifiers that are never assigned, sorted by name.
    pub fn params(&self) -> Vec<String> {
        let vars: BTreeSet<String> = self.variables().into_iter().collect();
        let mut params = BTreeSet::new();
        for e in self.all_exprs() {
            e.visit_idents(&mut |n| {
                if !vars.contains(n) {
                    params.insert(n.to_string());
                }
            });
        }
        for s in &self.body {
            if let Stmt::If(IfBlock { cond: Cond::Var(v), .. }) = s {
                if !vars.contains(v) {
                    params.insert(v.clone());
                }
            }
        }
        params.into_iter().collect()
    }

    pub fn has_multipath(&self) -> bool {
        self.body.iter().any(|s| matches!(s, Stmt::If(_)))
    }

    pub fn draws(&self) -> Vec<&Draw> {
        let mut out = Vec::new();
        for e in self.all_exprs() {
            e.visit_draws(&mut |d| out.push(d));
        }
        out
    }

    /// Canonical source text; parsing it yields this program back.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for a in &self.inits {
            writeln!(out, "{} := {}", a.var, a.rhs).unwrap();
        }
        out.push_str("while true:\n");
        for s in &self.body {
            match s {
                Stmt::Assign(a) => writeln!(out, "    {} := {}", a.var, a.rhs).unwrap(),
                Stmt::If(b) => {
                    match &b.cond {
                        Cond::Flip(e) => writeln!(out, "    if flip({e}):").unwrap(),
                        Cond::Var(v) => writeln!(out, "    if {v}:").unwrap(),
                    }
                    for a in &b.then_body {
                        writeln!(out, "        {} := {}", a.var, a.rhs).unwrap();
                    }
                    out.push_str("    else:\n");
                    for a in &b.else_body {
                        writeln!(out, "        {} := {}", a.var, a.rhs).unwrap();
                    }
                }
            }
        }
        out
    }
}
