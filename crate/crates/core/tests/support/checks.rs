//! Whole-corpus property checks shared by the test suites and the
//! acceptance report. Each returns a count of comparisons made.

use moment_invariants::algebra::rational::{binomial, to_f64};
use moment_invariants::algebra::{Bindings, CFinite, CTerm, NPoly, RatFunc, Rational};
use moment_invariants::corpus::corpus;
use moment_invariants::distributions::DistSpec;
use moment_invariants::invariants::{analyze, analyze_with, central_moment, variance, AnalysisRequest, MomentKind};
use moment_invariants::engine::sigma_ord;
use moment_invariants::solver::solve_first_order;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub fn random_bindings(params: &[String], rng: &mut ChaCha8Rng) -> Bindings {
    let pairs: Vec<(&str, Rational)> = params
        .iter()
        .map(|p| (p.as_str(), r(rng.random_range(1..12), 13)))
        .collect();
    bind(&pairs)
}

/// Solved forms satisfy their recurrences exactly for `n ≤ n_max`, and
/// match the initial values.
pub fn recurrence_residuals(seed: u64, sets: usize, n_max: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for p in corpus() {
        let vp = p.load().map_err(|e| e.to_string())?;
        let rep = analyze(&vp, p.name, 3).map_err(|e| e.to_string())?;
        for _ in 0..sets {
            let b = random_bindings(&rep.params, &mut rng);
            let at = |f: &CFinite, n| f.eval(n, &b).unwrap();
            for rec in &rep.system.recurrences {
                let name = rec.target.render(&rep.vars);
                let form = &rep.forms.forms[&rec.target];
                if at(form, 0) != rep.system.initials[&rec.target].eval(&b).unwrap() {
                    return Err(format!("{} initial {name}", p.name));
                }
                let c = rec.self_coeff.eval(&b).unwrap();
                for n in 0..=n_max {
                    let mut rhs = &c * at(form, n) + rec.constant.eval(&b).unwrap();
                    for (m, coeff) in &rec.lin {
                        rhs += coeff.eval(&b).unwrap() * at(&rep.forms.forms[m], n);
                    }
                    if at(form, n + 1) != rhs {
                        return Err(format!("{} {name} n={n}", p.name));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Unrolls `x(n+1) = c·x(n) + gamma(n)` directly.
pub fn unroll(c: &Rational, gamma: &CFinite, x0: &Rational, n: u64) -> Rational {
    let none = Bindings::new();
    (0..n).fold(x0.clone(), |x, i| c * x + gamma.eval(i, &none).unwrap())
}

/// A first-order recurrence whose inhomogeneous part has a term with the
/// self-coefficient as base, solved and compared with unrolling.
pub fn resonance_case(c: (i64, i64), q: &[i64], other: i64, x0: i64) -> Result<(), String> {
    let cf = RatFunc::rational(c.0, c.1);
    let gamma = CFinite::from_terms(vec![
        CTerm { base: cf.clone(), poly: NPoly::new(q.iter().map(|v| RatFunc::rational(*v, 1)).collect()) },
        CTerm { base: RatFunc::one(), poly: NPoly::constant(RatFunc::rational(other, 1)) },
    ]);
    let form = solve_first_order(&cf, &gamma, &RatFunc::rational(x0, 1));
    let cr = r(c.0, c.1);
    for n in 0..=10 {
        let want = unroll(&cr, &gamma, &r(x0, 1), n);
        if form.eval(n, &Bindings::new()).unwrap() != want {
            return Err(format!("c={cr} q={q:?} other={other} x0={x0} n={n}"));
        }
    }
    Ok(())
}

pub fn resonance_random(instances: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let mut cn = rng.random_range(-4i64..5);
        if cn == 0 || cn == 1 {
            cn += 2;
        }
        let cd = rng.random_range(1i64..4);
        let len = rng.random_range(1..4);
        let q: Vec<i64> = (0..len).map(|_| rng.random_range(-6..7)).collect();
        resonance_case((cn, cd), &q, rng.random_range(-3..4), rng.random_range(-5..6))?;
    }
    Ok(instances)
}

pub fn test_distributions() -> Vec<DistSpec> {
    vec![
        DistSpec::Uniform { a: RatFunc::rational(-1, 2), b: RatFunc::rational(3, 1) },
        DistSpec::Normal { mu: RatFunc::rational(1, 1), sigma2: RatFunc::rational(9, 4) },
        DistSpec::Bernoulli { p: RatFunc::rational(3, 10) },
        DistSpec::Discrete(vec![
            (RatFunc::rational(-2, 1), RatFunc::rational(1, 5)),
            (RatFunc::rational(1, 1), RatFunc::rational(1, 2)),
            (RatFunc::rational(5, 2), RatFunc::rational(3, 10)),
        ]),
    ]
}

/// Sample means of `X^k`, `k ≤ 4`, within `z` standard errors of the
/// exact raw moments.
pub fn distribution_moments(samples: usize, z: f64, seed: u64) -> Result<usize, String> {
    let b = Bindings::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for spec in &test_distributions() {
        let sampler = spec.sampler(&b).map_err(|e| e.to_string())?;
        let xs: Vec<f64> = (0..samples).map(|_| sampler.draw(&mut rng)).collect();
        for k in 1..=4 {
            let v: Vec<f64> = xs.iter().map(|x| x.powi(k)).collect();
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            let se = (v.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (n - 1.0) / n).sqrt();
            let want = to_f64(&spec.raw_moment(k as u32).eval(&b).unwrap());
            if (m - want).abs() > z * se {
                return Err(format!("{spec:?} k={k}: {m} vs {want} (se {se})"));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// `central_moment(2)` equals `variance` symbolically for every variable,
/// and every reported form equals its defining raw-moment combination.
pub fn central_is_variance(seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for p in corpus() {
        let vp = p.load().map_err(|e| e.to_string())?;
        let req = AnalysisRequest { central: true, variance: true, ..AnalysisRequest::moments(3) };
        let rep = analyze_with(&vp, p.name, &req).map_err(|e| e.to_string())?;
        for (i, v) in vp.source_vars() {
            let c2 = central_moment(&rep.forms, &rep.vars, i, 2).map_err(|e| e.to_string())?;
            if !c2.sem_eq(&variance(&rep.forms, &rep.vars, i).map_err(|e| e.to_string())?) {
                return Err(format!("{} {v}", p.name));
            }
            count += 1;
        }
        for _ in 0..3 {
            let b = random_bindings(&rep.params, &mut rng);
            for m in &rep.moments {
                for n in 0..8 {
                    let raw = |j: u32| rep.raw(&m.variable, j).map_or(r(1, 1), |f| f.eval(n, &b).unwrap());
                    let mu = raw(1);
                    let want = match m.kind {
                        MomentKind::Raw => raw(m.order),
                        MomentKind::Variance => raw(2) - &mu * &mu,
                        MomentKind::Central => (0..=m.order).fold(r(0, 1), |acc, i| {
                            let c = Rational::from_integer(binomial(m.order, i));
                            acc + c * raw(i) * pow(&-&mu, m.order - i)
                        }),
                        MomentKind::Covariance => continue,
                    };
                    if m.form.eval(n, &b).unwrap() != want {
                        return Err(format!("{} {} n={n}", p.name, m.label()));
                    }
                }
            }
        }
    }
    Ok(count)
}

pub struct BoundRun {
    pub program: &'static str,
    pub k: u32,
    pub processed: usize,
    /// Guard enforced by the engine.
    pub bound: u128,
    /// `k^m · Π_{i=2..m} d_i^(i−1)`.
    pub literal: u128,
}

/// Analyzes every corpus program for `k = 1..=3`, failing if a recurrence
/// references a monomial that is not strictly smaller in `sigma_ord`.
pub fn bound_runs() -> Result<Vec<BoundRun>, String> {
    let mut runs = Vec::new();
    for p in corpus() {
        let vp = p.load().map_err(|e| e.to_string())?;
        for k in 1..=3 {
            let rep = analyze(&vp, p.name, k).map_err(|e| format!("{} k={k}: {e}", p.name))?;
            let sys = &rep.system;
            for rec in &sys.recurrences {
                for n in rec.lin.keys() {
                    if sigma_ord(n) >= sigma_ord(&rec.target) {
                        return Err(format!(
                            "{} k={k}: {} does not descend to {}",
                            p.name,
                            rec.target.render(&rep.vars),
                            n.render(&rep.vars)
                        ));
                    }
                }
            }
            let m = vp.vars.len();
            let mut literal = (k as u128).saturating_pow(m as u32);
            for i in 1..m {
                literal = literal.saturating_mul((vp.nonself_degree(i) as u128).saturating_pow(i as u32));
            }
            runs.push(BoundRun { program: p.name, k, processed: sys.processed, bound: sys.bound, literal });
        }
    }
    Ok(runs)
}
