//! Polynomials in the loop counter `n` and C-finite expressions
//! `Σ P_j(n)·θ_j^n` with an explicit validity threshold.

use std::fmt;

use num_traits::{One, Zero};

use super::ratfunc::{Bindings, RatFunc};
use super::rational::{self, Rational};
use super::AlgebraError;

/// Polynomial in `n` with coefficients listed by ascending power.
#[derive(Clone, Debug, Default)]
pub struct NPoly {
    coeffs: Vec<RatFunc>,
}

impl PartialEq for NPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.sem_eq(b))
    }
}

impl NPoly {
    pub fn new(coeffs: Vec<RatFunc>) -> Self {
        let mut p = NPoly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        NPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: RatFunc) -> Self {
        NPoly::new(vec![c])
    }

    /// The polynomial `n`.
    pub fn n() -> Self {
        NPoly::new(vec![RatFunc::zero(), RatFunc::one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(RatFunc::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        NPoly::new((0..len).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        NPoly::new(self.coeffs.iter().map(RatFunc::neg).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return NPoly::zero();
        }
        let mut out = vec![RatFunc::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        NPoly::new(out)
    }

    pub fn scale(&self, s: &RatFunc) -> Self {
        NPoly::new(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    /// `p(n + s)` for any integer shift.
    pub fn shift(&self, s: i64) -> Self {
        if s == 0 {
            return self.clone();
        }
        let d = self.coeffs.len();
        let mut out = vec![RatFunc::zero(); d];
        let s_r = rational::int(s);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // (n + s)^j = Σ_i C(j, i) s^(j-i) n^i
            for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
                let factor = Rational::from_integer(rational::binomial(j as u32, i as u32))
                    * rational::pow(&s_r, (j - i) as u32);
                *slot = slot.add(&c.scale(&factor));
            }
        }
        NPoly::new(out)
    }

    pub fn value_at(&self, n: u64) -> RatFunc {
        let n = rational::int(n as i64);
        let mut acc = RatFunc::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(&n).add(c);
        }
        acc
    }

    pub fn eval(&self, n: u64, bindings: &Bindings) -> Result<Rational, AlgebraError> {
        let n = rational::int(n as i64);
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &n + c.eval(bindings)?;
        }
        Ok(acc)
    }

    /// Dense rendering in descending powers of `n`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let npow = match i {
                0 => String::new(),
                1 => "n".into(),
                _ => format!("n^{i}"),
            };
            let s = match c.as_rational() {
                Some(r) => {
                    if i == 0 {
                        r.to_string()
                    } else if r.is_one() {
                        npow
                    } else if r == -Rational::one() {
                        format!("-{npow}")
                    } else {
                        format!("{r}*{npow}")
                    }
                }
                None => {
                    let cs = c.to_string();
                    let simple = c.num().len() == 1 && c.den_is_one();
                    if i == 0 {
                        cs
                    } else if simple {
                        format!("{cs}*{npow}")
                    } else {
                        format!("({cs})*{npow}")
                    }
                }
            };
            parts.push(s);
        }
        join_signed(&parts)
    }
}

fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CTerm {
    pub base: RatFunc,
    pub poly: NPoly,
}

/// `Σ poly_j(n)·base_j^n` for `n ≥ validity_start`, explicit values before.
#[derive(Clone, Debug)]
pub struct CFinite {
    terms: Vec<CTerm>,
    validity_start: usize,
    prefix: Vec<RatFunc>,
}

impl CFinite {
    /// Normalizing constructor: merges semantically equal bases, drops zero
    /// terms, folds zero bases into the prefix and lowers the validity
    /// threshold while the term sum already agrees with the prefix.
    pub fn new(terms: Vec<CTerm>, validity_start: usize, prefix: Vec<RatFunc>) -> Self {
        assert_eq!(prefix.len(), validity_start, "prefix length must equal validity_start");
        let mut merged: Vec<CTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.poly.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|m| m.base.sem_eq(&t.base)) {
                Some(m) => m.poly = m.poly.add(&t.poly),
                None => merged.push(t),
            }
        }
        let mut validity_start = validity_start;
        let mut prefix = prefix;
        if let Some(pos) = merged.iter().position(|t| t.base.is_zero()) {
            let zero_term = merged.remove(pos);
            // 0^n contributes poly(0) at n = 0 only.
            if validity_start == 0 {
                let rest = CFinite {
                    terms: merged.clone(),
                    validity_start: 0,
                    prefix: Vec::new(),
                };
                prefix.push(rest.value_at(0).add(&zero_term.poly.coeff(0)));
                validity_start = 1;
            }
        }
        merged.retain(|t| !t.poly.is_zero());
        merged.sort_by_cached_key(|t| (!t.base.is_one(), t.base.to_string()));
        let mut out = CFinite {
            terms: merged,
            validity_start,
            prefix,
        };
        while out.validity_start > 0 {
            let i = out.validity_start - 1;
            if out.term_sum_at(i as u64).sem_eq(&out.prefix[i]) {
                out.prefix.pop();
                out.validity_start -= 1;
            } else {
                break;
            }
        }
        out
    }

    pub fn from_terms(terms: Vec<CTerm>) -> Self {
        CFinite::new(terms, 0, Vec::new())
    }

    pub fn zero() -> Self {
        CFinite::from_terms(Vec::new())
    }

    pub fn constant(c: RatFunc) -> Self {
        CFinite::poly(NPoly::constant(c))
    }

    pub fn poly(p: NPoly) -> Self {
        CFinite::from_terms(vec![CTerm {
            base: RatFunc::one(),
            poly: p,
        }])
    }

    /// `coeff · base^n`.
    pub fn geometric(coeff: RatFunc, base: RatFunc) -> Self {
        CFinite::from_terms(vec![CTerm {
            base,
            poly: NPoly::constant(coeff),
        }])
    }

    pub fn terms(&self) -> &[CTerm] {
        &self.terms
    }

    pub fn validity_start(&self) -> usize {
        self.validity_start
    }

    pub fn prefix(&self) -> &[RatFunc] {
        &self.prefix
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.prefix.iter().all(RatFunc::is_zero)
    }

    /// Term-sum value at `n`, ignoring the prefix.
    pub fn term_sum_at(&self, n: u64) -> RatFunc {
        let mut acc = RatFunc::zero();
        for t in &self.terms {
            acc = acc.add(&t.poly.value_at(n).mul(&t.base.pow(n as u32)));
        }
        acc
    }

    /// Symbolic value at `n`.
    pub fn value_at(&self, n: u64) -> RatFunc {
        if (n as usize) < self.validity_start {
            self.prefix[n as usize].clone()
        } else {
            self.term_sum_at(n)
        }
    }

    pub fn eval(&self, n: u64, bindings: &Bindings) -> Result<Rational, AlgebraError> {
        if (n as usize) < self.validity_start {
            return self.prefix[n as usize].eval(bindings);
        }
        let mut acc = Rational::zero();
        for t in &self.terms {
            let base = t.base.eval(bindings)?;
            acc += t.poly.eval(n, bindings)? * rational::pow(&base, n as u32);
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let vs = self.validity_start.max(other.validity_start);
        let prefix = (0..vs as u64)
            .map(|n| self.value_at(n).add(&other.value_at(n)))
            .collect();
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        CFinite::new(terms, vs, prefix)
    }

    pub fn neg(&self) -> Self {
        self.scale(&RatFunc::from(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let vs = self.validity_start.max(other.validity_start);
        let prefix = (0..vs as u64)
            .map(|n| self.value_at(n).mul(&other.value_at(n)))
            .collect();
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(CTerm {
                    base: a.base.mul(&b.base),
                    poly: a.poly.mul(&b.poly),
                });
            }
        }
        CFinite::new(terms, vs, prefix)
    }

    pub fn scale(&self, s: &RatFunc) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| CTerm {
                base: t.base.clone(),
                poly: t.poly.scale(s),
            })
            .collect();
        let prefix = self.prefix.iter().map(|v| v.mul(s)).collect();
        CFinite::new(terms, self.validity_start, prefix)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = CFinite::constant(RatFunc::one());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// `result(n) = self(n + s)`.
    pub fn shift(&self, s: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| CTerm {
                base: t.base.clone(),
                poly: t.poly.shift(s as i64).scale(&t.base.pow(s as u32)),
            })
            .collect();
        let vs = self.validity_start.saturating_sub(s);
        let prefix = (0..vs as u64).map(|n| self.value_at(n + s as u64)).collect();
        CFinite::new(terms, vs, prefix)
    }

    /// `result(0) = first`, `result(n) = self(n - 1)` for `n ≥ 1`.
    pub fn delay(&self, first: RatFunc) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let inv = t.base.inv().expect("C-finite bases are nonzero");
                CTerm {
                    base: t.base.clone(),
                    poly: t.poly.shift(-1).scale(&inv),
                }
            })
            .collect();
        let vs = self.validity_start + 1;
        let mut prefix = Vec::with_capacity(vs);
        prefix.push(first);
        prefix.extend((0..self.validity_start as u64).map(|n| self.value_at(n)));
        CFinite::new(terms, vs, prefix)
    }

    /// Semantic equality of the represented sequences.
    pub fn sem_eq(&self, other: &Self) -> bool {
        if self.validity_start != other.validity_start
            || self.terms.len() != other.terms.len()
            || !self.prefix.iter().zip(&other.prefix).all(|(a, b)| a.sem_eq(b))
        {
            return false;
        }
        self.terms.iter().all(|t| {
            other
                .terms
                .iter()
                .any(|u| u.base.sem_eq(&t.base) && u.poly == t.poly)
        })
    }

    /// Canonical rendering of the term sum.
    pub fn render_terms(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(render_term).collect();
        join_signed(&parts)
    }

    /// Canonical rendering including the validity threshold.
    pub fn render(&self) -> String {
        let body = self.render_terms();
        if self.validity_start == 0 {
            return body;
        }
        let pre: Vec<String> = self
            .prefix
            .iter()
            .enumerate()
            .map(|(i, v)| format!("n={i}: {v}"))
            .collect();
        format!("{body}  [n >= {}; {}]", self.validity_start, pre.join(", "))
    }
}

impl fmt::Display for CFinite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn render_base(base: &RatFunc) -> String {
    match base.as_rational() {
        Some(r) if r.is_integer() && r >= Rational::zero() => format!("{r}^n"),
        _ => format!("({base})^n"),
    }
}

fn render_term(t: &CTerm) -> String {
    if t.base.is_one() {
        return t.poly.render();
    }
    let base = render_base(&t.base);
    if t.poly.degree() == 0 {
        let c = t.poly.coeff(0);
        if let Some(r) = c.as_rational() {
            if r.is_one() {
                return base;
            }
            if r == -Rational::one() {
                return format!("-{base}");
            }
            return format!("{r}*{base}");
        }
        return format!("({c})*{base}");
    }
    format!("({})*{base}", t.poly.render())
}

pub fn cf_add(a: &CFinite, b: &CFinite) -> CFinite {
    a.add(b)
}

pub fn cf_mul(a: &CFinite, b: &CFinite) -> CFinite {
    a.mul(b)
}

pub fn cf_scale(a: &CFinite, s: &RatFunc) -> CFinite {
    a.scale(s)
}

pub fn cf_eval(a: &CFinite, n: u64, bindings: &Bindings) -> Result<Rational, AlgebraError> {
    a.eval(n, bindings)
}

pub fn cf_shift(a: &CFinite, s: usize) -> CFinite {
    a.shift(s)
}
