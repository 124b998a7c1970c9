//! Closed forms for triangular systems of first-order recurrences.

use std::collections::BTreeMap;

use crate::algebra::rational::{self, Rational};
use crate::algebra::{CFinite, CTerm, NPoly, RatFunc};
use crate::engine::{EMonomial, MomentRecurrence, RecurrenceSystem};

#[derive(Clone, Debug, Default)]
pub struct ClosedFormSet {
    pub forms: BTreeMap<EMonomial, CFinite>,
}

impl ClosedFormSet {
    pub fn get(&self, m: &EMonomial) -> Option<&CFinite> {
        self.forms.get(m)
    }
}

fn binom(n: usize, k: usize) -> Rational {
    Rational::from_integer(rational::binomial(n as u32, k as u32))
}

/// Particular solution `R(n)·θ^n` of `x(n+1) = c·x(n) + Q(n)·θ^n`.
fn particular(c: &RatFunc, theta: &RatFunc, q: &NPoly) -> NPoly {
    let d = q.degree();
    if theta.sem_eq(c) {
        // c·(R(n+1) − R(n)) = Q(n), deg R = d + 1, R(0) = 0
        let mut r = vec![RatFunc::zero(); d + 2];
        let c_inv = c.inv().expect("resonant base is nonzero");
        for i in (0..=d).rev() {
            let mut acc = q.coeff(i).mul(&c_inv);
            for (j, rj) in r.iter().enumerate().skip(i + 2) {
                acc = acc.sub(&rj.scale(&binom(j, i)));
            }
            r[i + 1] = acc.scale(&rational::rat(1, i as i64 + 1));
        }
        NPoly::new(r)
    } else {
        // (θ − c)·r_i + θ·Σ_{j>i} C(j,i)·r_j = q_i
        let denom_inv = theta.sub(c).inv().expect("non-resonant");
        let mut r = vec![RatFunc::zero(); d + 1];
        for i in (0..=d).rev() {
            let mut acc = q.coeff(i);
            for (j, rj) in r.iter().enumerate().skip(i + 1) {
                acc = acc.sub(&theta.mul(&rj.scale(&binom(j, i))));
            }
            r[i] = acc.mul(&denom_inv);
        }
        NPoly::new(r)
    }
}

/// The sequence with `x(0) = x0` and `x(n+1) = c·x(n) + gamma(n)`.
pub fn solve_first_order(c: &RatFunc, gamma: &CFinite, x0: &RatFunc) -> CFinite {
    if c.is_zero() {
        return gamma.delay(x0.clone());
    }
    let g0 = gamma.validity_start();
    let mut values = Vec::with_capacity(g0 + 1);
    values.push(x0.clone());
    for i in 0..g0 {
        let next = c.mul(&values[i]).add(&gamma.value_at(i as u64));
        values.push(next);
    }
    let mut terms: Vec<CTerm> = gamma
        .terms()
        .iter()
        .map(|t| CTerm {
            base: t.base.clone(),
            poly: particular(c, &t.base, &t.poly),
        })
        .collect();
    let particular_sum = CFinite::from_terms(terms.clone());
    // x(n) = A·c^n + P(n) for n ≥ g0
    let a = values[g0]
        .sub(&particular_sum.value_at(g0 as u64))
        .mul(&c.pow(g0 as u32).inv().expect("c is nonzero"));
    terms.push(CTerm {
        base: c.clone(),
        poly: NPoly::constant(a),
    });
    values.truncate(g0);
    CFinite::new(terms, g0, values)
}

/// `Σ lin[N]·forms[N] + constant` for one recurrence.
pub fn assemble_gamma(rec: &MomentRecurrence, forms: &ClosedFormSet) -> CFinite {
    let mut gamma = CFinite::constant(rec.constant.clone());
    for (n, coeff) in &rec.lin {
        let form = forms
            .forms
            .get(n)
            .expect("system is topologically sorted");
        gamma = gamma.add(&form.scale(coeff));
    }
    gamma
}

/// Solves every recurrence in ascending order.
pub fn solve_system(sys: &RecurrenceSystem) -> ClosedFormSet {
    let mut out = ClosedFormSet::default();
    for rec in &sys.recurrences {
        let gamma = assemble_gamma(rec, &out);
        let x0 = &sys.initials[&rec.target];
        let form = solve_first_order(&rec.self_coeff, &gamma, x0);
        out.forms.insert(rec.target.clone(), form);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::algebra::Bindings;

    fn r(n: i64, d: i64) -> RatFunc {
        RatFunc::rational(n, d)
    }

    fn unroll(c: &Rational, gamma: &CFinite, x0: &Rational, n: u64) -> Rational {
        let none = Bindings::new();
        let mut x = x0.clone();
        for i in 0..n {
            x = c * &x + gamma.eval(i, &none).unwrap();
        }
        x
    }

    #[test]
    fn linear_growth() {
        let f = solve_first_order(&r(1, 1), &CFinite::constant(r(9, 4)), &r(0, 1));
        assert_eq!(f.render(), "9/4*n");
    }

    #[test]
    fn coupon_form() {
        let f = solve_first_order(&r(1, 2), &CFinite::constant(r(1, 2)), &r(0, 1));
        assert_eq!(f.render(), "1 - (1/2)^n");
    }

    #[test]
    fn resonance() {
        let gamma = CFinite::geometric(r(3, 1), r(2, 1));
        let f = solve_first_order(&r(2, 1), &gamma, &r(1, 1));
        let none = Bindings::new();
        let expected = [1, 5, 16, 44, 112];
        for (n, want) in expected.iter().enumerate() {
            assert_eq!(f.eval(n as u64, &none).unwrap(), int(*want));
        }
        assert_eq!(f.render(), "(3/2*n + 1)*2^n");
    }

    #[test]
    fn symbolic_quadratic() {
        let d = RatFunc::param("d");
        let ex = CFinite::poly(NPoly::new(vec![r(-1, 1), r(3, 4)]));
        let gamma = ex
            .scale(&r(3, 2))
            .add(&CFinite::constant(d.pow(2).add(&r(3, 1)).scale(&rat(1, 4))));
        let f = solve_first_order(&r(1, 1), &gamma, &r(1, 1));
        let lin = d.pow(2).scale(&int(4)).sub(&r(21, 1)).scale(&rat(1, 16));
        let expected = CFinite::poly(NPoly::new(vec![r(1, 1), lin, r(9, 16)]));
        assert!(f.sem_eq(&expected), "{f}");
    }

    #[test]
    fn zero_coefficient_shifts() {
        // x(n+1) = n^2 with x(0) = 5
        let gamma = CFinite::poly(NPoly::new(vec![r(0, 1), r(0, 1), r(1, 1)]));
        let f = solve_first_order(&RatFunc::zero(), &gamma, &r(5, 1));
        let none = Bindings::new();
        assert_eq!(f.eval(0, &none).unwrap(), int(5));
        for n in 1..10u64 {
            assert_eq!(f.eval(n, &none).unwrap(), int(((n - 1) * (n - 1)) as i64));
        }
        assert_eq!(f.validity_start(), 1);
    }

    #[test]
    fn gamma_with_prefix() {
        // gamma(0) = 7, gamma(n) = n for n >= 1
        let gamma = CFinite::new(
            vec![CTerm { base: r(1, 1), poly: NPoly::n() }],
            1,
            vec![r(7, 1)],
        );
        for c in [r(1, 1), r(3, 1), r(1, 3)] {
            let f = solve_first_order(&c, &gamma, &r(2, 1));
            let cr = c.as_rational().unwrap();
            for n in 0..12 {
                assert_eq!(f.eval(n, &Bindings::new()).unwrap(), unroll(&cr, &gamma, &int(2), n));
            }
        }
    }
}
