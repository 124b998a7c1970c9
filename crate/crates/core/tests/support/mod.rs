#![allow(dead_code)]

pub mod checks;
pub mod rows;

use moment_invariants::algebra::{Bindings, CFinite, ParamSymbol, Rational};
use moment_invariants::corpus;
use moment_invariants::frontend::ValidatedProgram;
use moment_invariants::invariants::{analyze, InvariantReport};
use num_traits::{One, Zero};

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn bind(pairs: &[(&str, Rational)]) -> Bindings {
    pairs.iter().map(|(k, v)| (ParamSymbol::new(k), v.clone())).collect()
}

pub fn par(b: &Bindings, name: &str) -> Rational {
    b[&ParamSymbol::new(name)].clone()
}

/// One binding set per value of a single parameter.
pub fn sweep(name: &str, values: &[Rational]) -> Vec<Bindings> {
    values.iter().map(|v| bind(&[(name, v.clone())])).collect()
}

pub fn probs() -> Vec<Rational> {
    vec![r(0, 1), r(1, 4), r(1, 3), r(1, 2), r(5, 7), r(1, 1)]
}

pub fn horner(n: &Rational, coeffs: &[Rational]) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * n + c)
}

pub fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

pub fn load(name: &str) -> ValidatedProgram {
    corpus::find(name).unwrap().load().unwrap()
}

pub fn report(name: &str, k: u32) -> (ValidatedProgram, InvariantReport) {
    let vp = load(name);
    let rep = analyze(&vp, name, k).unwrap();
    (vp, rep)
}

/// Compares `form(n)` with `expected(n, b)` for `n = from..=from + 14` under
/// every binding set. Closed forms here have degree at most 9 in `n` and at
/// most 3 in each parameter, so agreement on these points is an identity.
pub fn agrees(
    form: &CFinite,
    from: u64,
    sets: &[Bindings],
    expected: impl Fn(&Rational, &Bindings) -> Rational,
) -> Result<(), String> {
    for b in sets {
        for n in from..=from + 14 {
            let got = form.eval(n, b).map_err(|e| e.to_string())?;
            let want = expected(&Rational::from_integer(n.into()), b);
            if got != want {
                return Err(format!("n={n} {b:?}: got {got}, expected {want} (form {form})"));
            }
        }
    }
    Ok(())
}

pub fn no_params() -> Vec<Bindings> {
    vec![Bindings::new()]
}
