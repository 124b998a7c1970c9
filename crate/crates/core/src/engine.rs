//! Moment-based recurrences over E-variables.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::algebra::RatFunc;
use crate::frontend::{APoly, Atom, ValidatedProgram};

/// Monomial over program variables, exponents indexed by body order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EMonomial(Vec<u32>);

impl EMonomial {
    pub fn one(m: usize) -> Self {
        EMonomial(vec![0; m])
    }

    pub fn var(m: usize, i: usize, exp: u32) -> Self {
        let mut v = vec![0; m];
        v[i] = exp;
        EMonomial(v)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        EMonomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        EMonomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `x^2*y` style, variables in body order; `1` for the empty monomial.
    pub fn render(&self, vars: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, &e)| if e == 1 { vars[i].clone() } else { format!("{}^{e}", vars[i]) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Exponents listed from the last-assigned variable to the first.
pub fn sigma_ord(m: &EMonomial) -> Vec<u32> {
    m.0.iter().rev().copied().collect()
}

impl Ord for EMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.0.len().max(other.0.len());
        for i in (0..len).rev() {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = other.0.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for EMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `E[M(n+1)] = self_coeff·E[M(n)] + Σ lin[N]·E[N(n)] + constant`.
#[derive(Clone, Debug)]
pub struct MomentRecurrence {
    pub target: EMonomial,
    pub self_coeff: RatFunc,
    pub lin: BTreeMap<EMonomial, RatFunc>,
    pub constant: RatFunc,
}

#[derive(Clone, Debug)]
pub struct RecurrenceSystem {
    pub vars: Vec<String>,
    /// Ascending in `sigma_ord`.
    pub recurrences: Vec<MomentRecurrence>,
    pub initials: BTreeMap<EMonomial, RatFunc>,
    pub processed: usize,
    pub bound: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("processed {processed} monomials, more than the termination bound {bound}")]
    BoundExceeded { processed: usize, bound: u128 },
    #[error("recurrence for E[{target}] refers to E[{offending}], which is not smaller")]
    OrderingViolation { target: String, offending: String },
}

/// Replaces draw powers by raw moments and groups step-n monomials.
fn expectation_of(vp: &ValidatedProgram, poly: &APoly) -> BTreeMap<EMonomial, RatFunc> {
    let m = vp.vars.len();
    let mut out: BTreeMap<EMonomial, RatFunc> = BTreeMap::new();
    for (mono, coeff) in poly.terms() {
        let mut c = coeff.clone();
        let mut exps = vec![0; m];
        for &(atom, e) in mono.factors() {
            match atom {
                Atom::Draw(id) => c = c.mul(&vp.draws[&id].raw_moment(e)),
                Atom::Cur(i) => exps[i] += e,
                Atom::Next(i) => unreachable!("step-(n+1) atom {i} survived substitution"),
            }
        }
        let key = EMonomial(exps);
        let slot = out.entry(key).or_insert_with(RatFunc::zero);
        *slot = slot.add(&c);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn monomial_poly(m: &EMonomial, atom: fn(usize) -> Atom) -> APoly {
    let mut p = APoly::one();
    for (i, &e) in m.0.iter().enumerate() {
        if e > 0 {
            p = p.mul(&APoly::var(atom(i)).pow(e));
        }
    }
    p
}

/// One-step expectation of `M`, expressed over step-n E-variables.
pub fn step_expectation(vp: &ValidatedProgram, target: &EMonomial) -> MomentRecurrence {
    let mut poly = monomial_poly(target, Atom::Next);
    for i in (0..vp.vars.len()).rev() {
        let atom = Atom::Next(i);
        if poly.contains_var(|a| *a == atom) {
            let rhs = &vp.body[i].rhs;
            poly = poly.substitute(&atom, |e| rhs.power_image(e));
        }
    }
    let mut grouped = expectation_of(vp, &poly);
    let self_coeff = grouped.remove(target).unwrap_or_else(RatFunc::zero);
    let constant = grouped
        .remove(&EMonomial::one(vp.vars.len()))
        .unwrap_or_else(RatFunc::zero);
    MomentRecurrence {
        target: target.clone(),
        self_coeff,
        lin: grouped,
        constant,
    }
}

/// `E[M(0)]` from the initializations.
pub fn initial_expectation(vp: &ValidatedProgram, target: &EMonomial) -> RatFunc {
    let mut poly = monomial_poly(target, Atom::Cur);
    for step in vp.inits.iter().rev() {
        let atom = Atom::Cur(step.var);
        if poly.contains_var(|a| *a == atom) {
            poly = poly.substitute(&atom, |e| step.rhs.power_image(e));
        }
    }
    let grouped = expectation_of(vp, &poly);
    debug_assert!(grouped.keys().all(EMonomial::is_one));
    grouped
        .into_values()
        .fold(RatFunc::zero(), |a, c| a.add(&c))
}

/// `(k+1)^m · Π_{i=2..m} d_i^(i−1) − 1`, saturating. Every reachable
/// monomial has `x_i` exponent at most `k·Π_{j>i} d_j`.
pub fn termination_bound(vp: &ValidatedProgram, k: u32) -> u128 {
    let m = vp.vars.len();
    let mut b = (k as u128 + 1).saturating_pow(m as u32);
    for i in 1..m {
        let d = vp.nonself_degree(i) as u128;
        b = b.saturating_mul(d.saturating_pow(i as u32));
    }
    b.saturating_sub(1)
}

/// Closes the targets under `step_expectation`, largest monomial first.
pub fn build_system(
    vp: &ValidatedProgram,
    targets: &BTreeSet<EMonomial>,
) -> Result<RecurrenceSystem, EngineError> {
    let k = targets.iter().map(EMonomial::degree).max().unwrap_or(0);
    let bound = termination_bound(vp, k);
    let mut pending: BTreeSet<EMonomial> = targets.iter().filter(|t| !t.is_one()).cloned().collect();
    let mut done: BTreeMap<EMonomial, MomentRecurrence> = BTreeMap::new();
    let mut processed = 0usize;
    while let Some(m) = pending.pop_last() {
        processed += 1;
        if processed as u128 > bound {
            return Err(EngineError::BoundExceeded { processed, bound });
        }
        let rec = step_expectation(vp, &m);
        for key in rec.lin.keys() {
            if key >= &m {
                return Err(EngineError::OrderingViolation {
                    target: m.render(&vp.vars),
                    offending: key.render(&vp.vars),
                });
            }
            if !done.contains_key(key) {
                pending.insert(key.clone());
            }
        }
        done.insert(m, rec);
    }
    let initials = done
        .keys()
        .map(|m| (m.clone(), initial_expectation(vp, m)))
        .collect();
    Ok(RecurrenceSystem {
        vars: vp.vars.clone(),
        recurrences: done.into_values().collect(),
        initials,
        processed,
        bound,
    })
}

fn coeff_text(c: &RatFunc) -> String {
    let s = c.to_string();
    if c.num().len() <= 1 && c.den_is_one() {
        s
    } else {
        format!("({s})")
    }
}

impl RecurrenceSystem {
    pub fn get(&self, m: &EMonomial) -> Option<&MomentRecurrence> {
        self.recurrences
            .binary_search_by(|r| r.target.cmp(m))
            .ok()
            .map(|i| &self.recurrences[i])
    }

    /// One line per recurrence: `E[M][n+1] = c*E[M][n] + ... + const`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.recurrences {
            let name = r.target.render(&self.vars);
            write!(out, "E[{name}][n+1] = {}*E[{name}][n]", coeff_text(&r.self_coeff)).unwrap();
            for (n, c) in r.lin.iter().rev() {
                write!(out, " + {}*E[{}][n]", coeff_text(c), n.render(&self.vars)).unwrap();
            }
            if !r.constant.is_zero() {
                write!(out, " + {}", coeff_text(&r.constant)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for RecurrenceSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
