//! Polynomials and rational functions in the symbolic parameters of a program.
//!
//! `RatFunc` is the scalar field for the whole analysis. Equality is decided
//! by cross-multiplication, so it is exact regardless of how far a value has
//! been reduced. Reduction is best effort: integer content, common monomial
//! factors, exact polynomial division and univariate gcd.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::poly::{Coeff, Mono, Poly};
use super::rational::{self, Rational};
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamSymbol(Arc<str>);

impl ParamSymbol {
    pub fn new(name: &str) -> Self {
        ParamSymbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type ParamPoly = Poly<ParamSymbol, Rational>;

/// Numeric values for parameters.
pub type Bindings = BTreeMap<ParamSymbol, Rational>;

pub fn param(name: &str) -> ParamPoly {
    ParamPoly::var(ParamSymbol::new(name))
}

pub fn eval_param_poly(p: &ParamPoly, bindings: &Bindings) -> Result<Rational, AlgebraError> {
    p.eval_with(|s| bindings.get(s).cloned()).ok_or_else(|| {
        let missing = p
            .variables()
            .into_iter()
            .find(|s| !bindings.contains_key(s))
            .map(|s| s.name().to_string())
            .unwrap_or_default();
        AlgebraError::UnboundParameter(missing)
    })
}

/// Renders a parameter polynomial: descending graded-lex, parameters
/// alphabetical inside each monomial, coefficients as reduced rationals.
pub fn render_param_poly(p: &ParamPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (mono, c)) in p.sorted_terms_desc().into_iter().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let factors: Vec<String> = mono
            .factors()
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    v.to_string()
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect();
        if factors.is_empty() {
            out.push_str(&abs.to_string());
        } else {
            if !abs.is_one() {
                out.push_str(&abs.to_string());
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

#[derive(Clone)]
pub struct RatFunc {
    num: ParamPoly,
    den: ParamPoly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = render_param_poly(&self.num);
        if self.den_is_one() {
            return f.write_str(&num);
        }
        let num = if self.num.len() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = render_param_poly(&self.den);
        if self.den.len() > 1 || den.contains('*') {
            write!(f, "{num}/({den})")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.sem_eq(other)
    }
}

impl From<Rational> for RatFunc {
    fn from(r: Rational) -> Self {
        RatFunc {
            num: ParamPoly::constant(r),
            den: ParamPoly::one(),
        }
    }
}

impl From<ParamPoly> for RatFunc {
    fn from(p: ParamPoly) -> Self {
        RatFunc {
            num: p,
            den: ParamPoly::one(),
        }
    }
}

impl From<i64> for RatFunc {
    fn from(v: i64) -> Self {
        RatFunc::from(rational::int(v))
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::from(<Rational as Zero>::zero())
    }

    pub fn one() -> Self {
        RatFunc::from(<Rational as One>::one())
    }

    pub fn rational(n: i64, d: i64) -> Self {
        RatFunc::from(rational::rat(n, d))
    }

    pub fn param(name: &str) -> Self {
        RatFunc::from(param(name))
    }

    /// Builds `num / den`, reducing as far as cheaply possible.
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn num(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den(&self) -> &ParamPoly {
        &self.den
    }

    pub fn den_is_one(&self) -> bool {
        self.den.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn as_poly(&self) -> Option<ParamPoly> {
        let d = self.den.as_constant()?;
        Some(self.num.scale(&(<Rational as One>::one() / d)))
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn params(&self) -> Vec<ParamSymbol> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v.sort();
        v.dedup();
        v
    }

    /// Semantic equality: `a.num * b.den - b.num * a.den == 0`.
    pub fn sem_eq(&self, other: &Self) -> bool {
        if self.den_is_one() && other.den_is_one() {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den_is_one() && other.den_is_one() {
            return RatFunc {
                num: self.num.add(&other.num),
                den: ParamPoly::one(),
            };
        }
        if self.den == other.den {
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        Self::reduce(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den_is_one() && other.den_is_one() {
            return RatFunc {
                num: self.num.mul(&other.num),
                den: ParamPoly::one(),
            };
        }
        Self::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        if self.den_is_one() {
            return RatFunc {
                num: self.num.pow(exp),
                den: ParamPoly::one(),
            };
        }
        RatFunc {
            num: self.num.pow(exp),
            den: self.den.pow(exp),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        RatFunc {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<Rational, AlgebraError> {
        let den = eval_param_poly(&self.den, bindings)?;
        if Zero::is_zero(&den) {
            return Err(AlgebraError::DenominatorZero);
        }
        Ok(eval_param_poly(&self.num, bindings)? / den)
    }

    /// Denominator factors worth reporting as non-degeneracy conditions.
    pub fn nonconstant_den(&self) -> Option<&ParamPoly> {
        if self.den.as_constant().is_some() {
            None
        } else {
            Some(&self.den)
        }
    }

    fn reduce(mut num: ParamPoly, mut den: ParamPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(d) = den.as_constant() {
            let inv = <Rational as One>::one() / d;
            return RatFunc {
                num: num.scale(&inv),
                den: ParamPoly::one(),
            };
        }
        // Common monomial factor.
        let common = num.monomial_content().gcd(&den.monomial_content());
        if !common.is_one() {
            num = num.div_monomial(&common);
            den = den.div_monomial(&common);
        }
        // Exact division.
        let (q, r) = num.div_rem(&den);
        if r.is_zero() {
            return RatFunc {
                num: q,
                den: ParamPoly::one(),
            };
        }
        // Univariate gcd.
        let mut vars = num.variables();
        vars.extend(den.variables());
        vars.sort();
        vars.dedup();
        if vars.len() == 1 {
            let g = univariate_gcd(&num, &den);
            if g.total_degree() > 0 {
                num = num.div_rem(&g).0;
                den = den.div_rem(&g).0;
            }
        }
        if let Some(d) = den.as_constant() {
            let inv = <Rational as One>::one() / d;
            return RatFunc {
                num: num.scale(&inv),
                den: ParamPoly::one(),
            };
        }
        // Normalize the leading coefficient of the denominator to one.
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = <Rational as One>::one() / lc;
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }
}

fn univariate_gcd(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    let lc = a.leading().map(|(_, c)| c.clone()).unwrap_or_else(<Rational as One>::one);
    a.scale(&(<Rational as One>::one() / lc))
}

impl Coeff for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFunc::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFunc::mul(self, other)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
}

/// Semantic equality of two rational functions.
pub fn ratfunc_eq(a: &RatFunc, b: &RatFunc) -> bool {
    a.sem_eq(b)
}

pub fn ratfunc_eval(a: &RatFunc, bindings: &Bindings) -> Result<Rational, AlgebraError> {
    a.eval(bindings)
}

/// Monomials in parameters, exposed for building bindings in tests and tools.
pub fn param_mono(name: &str, exp: u32) -> Mono<ParamSymbol> {
    Mono::var(ParamSymbol::new(name), exp)
}
