//! Raw moments and sampling for the supported draw distributions.

use num_traits::{One, Signed, Zero};
use rand::distr::{Bernoulli, Distribution, Uniform};
use rand::Rng;
use rand_distr::Normal;

use crate::algebra::rational::{self, Rational};
use crate::algebra::{AlgebraError, Bindings, RatFunc};

#[derive(Clone, Debug, PartialEq)]
pub enum DistSpec {
    Uniform { a: RatFunc, b: RatFunc },
    /// Mean and variance.
    Normal { mu: RatFunc, sigma2: RatFunc },
    Bernoulli { p: RatFunc },
    /// `(value, probability)` pairs.
    Discrete(Vec<(RatFunc, RatFunc)>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl DistSpec {
    /// `E[D^k]` as an exact rational function of the arguments.
    pub fn raw_moment(&self, k: u32) -> RatFunc {
        if k == 0 {
            return RatFunc::one();
        }
        match self {
            DistSpec::Uniform { a, b } => {
                let mut acc = RatFunc::zero();
                for i in 0..=k {
                    acc = acc.add(&a.pow(i).mul(&b.pow(k - i)));
                }
                acc.scale(&rational::rat(1, k as i64 + 1))
            }
            DistSpec::Normal { mu, sigma2 } => {
                let mut prev = RatFunc::one();
                let mut cur = mu.clone();
                for j in 2..=k {
                    let next = mu
                        .mul(&cur)
                        .add(&sigma2.mul(&prev).scale(&rational::int(j as i64 - 1)));
                    prev = cur;
                    cur = next;
                }
                cur
            }
            DistSpec::Bernoulli { p } => p.clone(),
            DistSpec::Discrete(pairs) => pairs.iter().fold(RatFunc::zero(), |acc, (v, p)| {
                acc.add(&p.mul(&v.pow(k)))
            }),
        }
    }

    pub fn is_finite_support(&self) -> bool {
        matches!(self, DistSpec::Bernoulli { .. } | DistSpec::Discrete(_))
    }

    pub fn args(&self) -> Vec<&RatFunc> {
        match self {
            DistSpec::Uniform { a, b } => vec![a, b],
            DistSpec::Normal { mu, sigma2 } => vec![mu, sigma2],
            DistSpec::Bernoulli { p } => vec![p],
            DistSpec::Discrete(pairs) => pairs.iter().flat_map(|(v, p)| [v, p]).collect(),
        }
    }

    /// Exact finite support under numeric bindings, zero-mass points dropped.
    pub fn support(&self, bindings: &Bindings) -> Result<Option<Vec<(Rational, Rational)>>, DistError> {
        match self {
            DistSpec::Bernoulli { p } => {
                let p = check_prob(p.eval(bindings)?)?;
                let q = Rational::one() - &p;
                let pts = [(Rational::one(), p), (Rational::zero(), q)];
                Ok(Some(pts.into_iter().filter(|(_, w)| !w.is_zero()).collect()))
            }
            DistSpec::Discrete(pairs) => {
                let mut out = Vec::new();
                let mut total = Rational::zero();
                for (v, p) in pairs {
                    let p = check_prob(p.eval(bindings)?)?;
                    total += &p;
                    if !p.is_zero() {
                        out.push((v.eval(bindings)?, p));
                    }
                }
                if !total.is_one() {
                    return Err(DistError::InvalidSupport(format!(
                        "discrete probabilities sum to {total}"
                    )));
                }
                Ok(Some(out))
            }
            _ => Ok(None),
        }
    }

    /// Prepares a sampler under numeric bindings.
    pub fn sampler(&self, bindings: &Bindings) -> Result<Sampler, DistError> {
        let num = |r: &RatFunc| -> Result<f64, DistError> { Ok(rational::to_f64(&r.eval(bindings)?)) };
        Ok(match self {
            DistSpec::Uniform { a, b } => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(DistError::InvalidSupport(format!("uniform bounds {a} > {b}")));
                }
                Sampler::Uniform(Uniform::new_inclusive(a, b).map_err(|e| {
                    DistError::InvalidSupport(e.to_string())
                })?)
            }
            DistSpec::Normal { mu, sigma2 } => {
                let (mu, s2) = (num(mu)?, num(sigma2)?);
                if s2 < 0.0 {
                    return Err(DistError::InvalidSupport(format!("negative variance {s2}")));
                }
                Sampler::Normal(
                    Normal::new(mu, s2.sqrt())
                        .map_err(|e| DistError::InvalidSupport(e.to_string()))?,
                )
            }
            DistSpec::Bernoulli { p } => {
                let p = check_prob(p.eval(bindings)?)?;
                Sampler::Bernoulli(
                    Bernoulli::new(rational::to_f64(&p))
                        .map_err(|e| DistError::InvalidSupport(e.to_string()))?,
                )
            }
            DistSpec::Discrete(_) => {
                let pts = self.support(bindings)?.unwrap_or_default();
                let mut acc = 0.0;
                let mut cumulative = Vec::with_capacity(pts.len());
                for (v, p) in &pts {
                    acc += rational::to_f64(p);
                    cumulative.push((acc, rational::to_f64(v)));
                }
                Sampler::Discrete(cumulative)
            }
        })
    }
}

fn check_prob(p: Rational) -> Result<Rational, DistError> {
    if p.is_negative() || p > Rational::one() {
        return Err(DistError::InvalidSupport(format!("probability {p} outside [0, 1]")));
    }
    Ok(p)
}

/// A distribution with numeric arguments, ready to draw from.
#[derive(Clone, Debug)]
pub enum Sampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
    Bernoulli(Bernoulli),
    /// Cumulative probability paired with the value it ends at.
    Discrete(Vec<(f64, f64)>),
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Uniform(u) => u.sample(rng),
            Sampler::Normal(n) => n.sample(rng),
            Sampler::Bernoulli(b) => {
                if b.sample(rng) {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::Discrete(cum) => {
                let r: f64 = rng.random();
                cum.iter()
                    .find(|(c, _)| r < *c)
                    .or(cum.last())
                    .map(|(_, v)| *v)
                    .unwrap_or(0.0)
            }
        }
    }
}

/// Raw moment `E[D^k]`.
pub fn raw_moment(d: &DistSpec, k: u32) -> RatFunc {
    d.raw_moment(k)
}

/// One draw from `d` under numeric bindings.
pub fn sample<R: Rng + ?Sized>(d: &DistSpec, bindings: &Bindings, rng: &mut R) -> Result<f64, DistError> {
    Ok(d.sampler(bindings)?.draw(rng))
}
