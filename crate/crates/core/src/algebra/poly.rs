//! Sparse multivariate polynomials generic over the variable type and the
//! coefficient ring.
//!
//! A monomial is a vector of `(variable, exponent)` pairs sorted by variable
//! with no zero exponents, so structural equality of monomials coincides with
//! mathematical equality.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::Rational;

pub trait Coeff: Clone + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono<V: Ord>(Vec<(V, u32)>);

impl<V: Ord + Clone> Mono<V> {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: V, exp: u32) -> Self {
        if exp == 0 {
            Mono(Vec::new())
        } else {
            Mono(vec![(v, exp)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging duplicates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut map: BTreeMap<V, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Mono(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(V, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &V) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// Returns `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == *v {
                let oe = other.0[j].1;
                if oe > *e {
                    return None;
                }
                if oe < *e {
                    out.push((v.clone(), e - oe));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *v {
                return None;
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Splits off the power of `v`: returns `(exponent, rest)`.
    pub fn split(&self, v: &V) -> (u32, Self) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for (w, e) in &self.0 {
            if w == v {
                exp = *e;
            } else {
                rest.push((w.clone(), *e));
            }
        }
        (exp, Mono(rest))
    }

    /// Lexicographic monomial order: compares exponent vectors with variables
    /// taken in ascending order.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Equal,
                (Some(_), None) => return Greater,
                (None, Some(_)) => return Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // `a` has a variable `b` lacks, and it is the earliest one.
                    Less => return Greater,
                    Greater => return Less,
                    Equal => match ea.cmp(eb) {
                        Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }

    /// Graded lexicographic order, used for rendering.
    pub fn grlex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }

    /// Greatest common divisor of two monomials.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            let oe = other.exponent(v);
            if oe > 0 {
                out.push((v.clone(), (*e).min(oe)));
            }
        }
        Mono(out)
    }
}

#[derive(Clone, PartialEq)]
pub struct Poly<V: Ord, C> {
    terms: BTreeMap<Mono<V>, C>,
}

impl<V: Ord + fmt::Debug, C: fmt::Debug> fmt::Debug for Poly<V, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<V: Ord + Clone, C: Coeff> Default for Poly<V, C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Ord + Clone, C: Coeff> Poly<V, C> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(Mono::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(v: V) -> Self {
        let mut p = Self::zero();
        p.add_term(Mono::var(v, 1), C::one());
        p
    }

    pub fn term(mono: Mono<V>, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(mono, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono<V>, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono<V>, C)> {
        self.terms.into_iter()
    }

    /// Constant term value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> C {
        self.terms.get(&Mono::one()).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, mono: Mono<V>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    pub fn mul_term(&self, mono: &Mono<V>, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_term(m.mul(mono), a.mul(c));
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn degree_in(&self, v: &V) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<V> {
        let mut vars: Vec<V> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn contains_var(&self, pred: impl Fn(&V) -> bool) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|(v, _)| pred(v)))
    }

    /// Writes `self` as `Σ_e coeff_e · v^e` and returns the `coeff_e`.
    pub fn coefficients_in(&self, v: &V) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            out.entry(e).or_insert_with(Self::zero).add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Replaces every power `v^e` by `image(e)`.
    pub fn substitute(&self, v: &V, mut image: impl FnMut(u32) -> Self) -> Self {
        let mut cache: BTreeMap<u32, Self> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let img = cache.entry(e).or_insert_with(|| image(e));
            for (mi, ci) in &img.terms {
                out.add_term(rest.mul(mi), c.mul(ci));
            }
        }
        out
    }

    /// Rewrites each monomial with `f`, which returns a replacement monomial
    /// in a new variable type and a scalar factor.
    pub fn map_monomials<W: Ord + Clone>(
        &self,
        mut f: impl FnMut(&Mono<V>) -> (Mono<W>, C),
    ) -> Poly<W, C> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (nm, factor) = f(m);
            out.add_term(nm, c.mul(&factor));
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> Poly<V, D> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Leading monomial under the lexicographic order.
    pub fn leading(&self) -> Option<(&Mono<V>, &C)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    /// Terms in descending graded-lex order.
    pub fn sorted_terms_desc(&self) -> Vec<(&Mono<V>, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }

    /// Common monomial factor of all terms.
    pub fn monomial_content(&self) -> Mono<V> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Mono::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    pub fn div_monomial(&self, mono: &Mono<V>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let q = m.div(mono).expect("monomial does not divide polynomial");
            out.add_term(q, c.clone());
        }
        out
    }
}

impl<V: Ord + Clone> Poly<V, Rational> {
    /// Evaluates with every variable bound by `value`.
    pub fn eval_with(&self, mut value: impl FnMut(&V) -> Option<Rational>) -> Option<Rational> {
        let mut acc = <Rational as Zero>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                t *= super::rational::pow(&value(v)?, *e);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Multivariate division by a single divisor in the lexicographic order.
    /// Returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let (lm, lc) = divisor.leading().expect("division by zero polynomial");
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut p = self.clone();
        let mut q = Self::zero();
        let mut r = Self::zero();
        while let Some((pm, pc)) = p.leading() {
            let (pm, pc) = (pm.clone(), pc.clone());
            match pm.div(&lm) {
                Some(qm) => {
                    let qc = &pc / &lc;
                    p = p.sub(&divisor.mul_term(&qm, &qc));
                    q.add_term(qm, qc);
                }
                None => {
                    p.add_term(pm.clone(), -pc.clone());
                    r.add_term(pm, pc);
                }
            }
        }
        (q, r)
    }
}
