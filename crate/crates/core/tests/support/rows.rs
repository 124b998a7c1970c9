//! Published closed forms, one row per (program, moment).

use moment_invariants::algebra::{Bindings, Rational};
use moment_invariants::invariants::{analyze_with, AnalysisRequest, InvariantReport, MomentKind};

use super::*;

type Expected = Box<dyn Fn(&Rational, &Bindings) -> Rational>;

pub struct Row {
    pub program: &'static str,
    pub label: &'static str,
    /// First iteration from which the published formula holds.
    pub from: u64,
    pub sets: Vec<Bindings>,
    pub pick: fn(&InvariantReport) -> Option<&moment_invariants::algebra::CFinite>,
    pub expected: Expected,
}

fn poly(coeffs: &[(i64, i64)]) -> Expected {
    let c: Vec<Rational> = coeffs.iter().map(|(n, d)| r(*n, *d)).collect();
    Box::new(move |n, _| horner(n, &c))
}

/// `1 - 2^-n`; `c` is an indicator, so every power shares it.
fn coupon() -> Expected {
    Box::new(|n, _| {
        let two_n = pow(&r(2, 1), n.to_integer().try_into().unwrap());
        (&two_n - r(1, 1)) / two_n
    })
}

fn d2(b: &Bindings) -> Rational {
    pow(&par(b, "d"), 2)
}

fn ds() -> Vec<Bindings> {
    sweep("d", &[r(0, 1), r(1, 1), r(2, 1), r(1, 2), r(3, 1)])
}

macro_rules! row {
    ($prog:expr, $label:expr, $from:expr, $sets:expr, $pick:expr, $exp:expr) => {
        Row { program: $prog, label: $label, from: $from, sets: $sets, pick: $pick, expected: $exp }
    };
}

pub fn rows() -> Vec<Row> {
    let np = no_params;
    vec![
        row!("Coupon", "E[c]", 0, np(), |r| r.raw("c", 1), coupon()),
        row!("Coupon", "E[c^2]", 0, np(), |r| r.raw("c", 2), coupon()),
        row!("Random_walk_1D_cts", "E[x]", 0, np(), |r| r.raw("x", 1), poly(&[(0, 1), (1, 5)])),
        row!("Random_walk_1D_cts", "E[x^2]", 0, np(), |r| r.raw("x", 2), poly(&[(0, 1), (22, 75), (1, 25)])),
        row!("Random_walk_1D_cts", "E[x^3]", 0, np(), |r| r.raw("x", 3),
            poly(&[(0, 1), (-21, 250), (22, 125), (1, 125)])),
        row!("Sum_rnd_series", "E[x]", 0, np(), |r| r.raw("x", 1), poly(&[(0, 1), (1, 4), (1, 4)])),
        row!("Sum_rnd_series", "E[x^2]", 0, np(), |r| r.raw("x", 2),
            poly(&[(0, 1), (1, 24), (3, 16), (5, 24), (1, 16)])),
        row!("Sum_rnd_series", "E[x^3]", 0, np(), |r| r.raw("x", 3),
            poly(&[(0, 1), (0, 1), (1, 32), (9, 64), (13, 64), (7, 64), (1, 64)])),
        row!("Product_dep_var", "E[p]", 0, np(), |r| r.raw("p", 1), poly(&[(0, 1), (-1, 4), (1, 4)])),
        row!("Product_dep_var", "E[p^2]", 0, np(), |r| r.raw("p", 2),
            poly(&[(0, 1), (-1, 8), (3, 16), (-1, 8), (1, 16)])),
        row!("Product_dep_var", "E[p^3]", 0, np(), |r| r.raw("p", 3),
            poly(&[(0, 1), (-1, 4), (15, 32), (-21, 64), (9, 64), (-3, 64), (1, 64)])),
        row!("Random_walk_2D", "E[x]", 0, np(), |r| r.raw("x", 1), poly(&[])),
        row!("Random_walk_2D", "E[x^2]", 0, np(), |r| r.raw("x", 2), poly(&[(0, 1), (1, 2)])),
        row!("Random_walk_2D", "E[x^3]", 0, np(), |r| r.raw("x", 3), poly(&[])),
        row!("Binomial", "E[x]", 0, sweep("p", &probs()), |r| r.raw("x", 1), Box::new(|n, b| n * par(b, "p"))),
        row!("Binomial", "E[x^2]", 0, sweep("p", &probs()), |r| r.raw("x", 2), Box::new(|n, b| {
            let p = par(b, "p");
            n * n * &p * &p + n * &p * (r(1, 1) - &p)
        })),
        row!("Binomial", "E[x^3]", 0, sweep("p", &probs()), |r| r.raw("x", 3), Box::new(|n, b| {
            let p = par(b, "p");
            let (p2, p3) = (pow(&p, 2), pow(&p, 3));
            let (n2, n3) = (pow(n, 2), pow(n, 3));
            &n3 * &p3 - r(3, 1) * &n2 * &p3 + r(3, 1) * &n2 * &p2 + r(2, 1) * n * &p3 - r(3, 1) * n * &p2 + n * &p
        })),
        row!("Square", "E[y]", 1, np(), |r| r.raw("y", 1), poly(&[(0, 1), (1, 1), (1, 1)])),
        row!("Square", "E[y^2]", 1, np(), |r| r.raw("y", 2), poly(&[(0, 1), (-2, 1), (3, 1), (6, 1), (1, 1)])),
        row!("Square", "E[y^3]", 1, np(), |r| r.raw("y", 3),
            poly(&[(0, 1), (16, 1), (-30, 1), (-15, 1), (45, 1), (15, 1), (1, 1)])),
        row!("StutteringP", "E[s]", 0, sweep("p", &probs()), |r| r.raw("s", 1),
            Box::new(|n, b| r(3, 1) * n * par(b, "p"))),
        row!("StutteringA", "E[s]", 0, ds(), |r| r.raw("s", 1), poly(&[(0, 1), (9, 4)])),
        row!("StutteringA", "E[s^2]", 0, ds(), |r| r.raw("s", 2), Box::new(|n, b| {
            r(81, 16) * n * n + (r(20, 1) * d2(b) + r(27, 1)) / r(16, 1) * n
        })),
        row!("StutteringA", "E[s^3]", 0, ds(), |r| r.raw("s", 3), Box::new(|n, b| {
            let d2 = d2(b);
            let (n2, n3) = (pow(n, 2), pow(n, 3));
            r(81, 16) * &d2 * &n2 + r(63, 16) * &d2 * n + r(729, 64) * &n3
                + r(9, 32) * &n2 * (r(4, 1) * &d2 - r(9, 1))
                + r(9, 16) * &n2 * (r(4, 1) * &d2 + r(9, 1))
                + r(567, 64) * &n2
                + r(3, 8) * n * (r(-6, 1) * &d2 - r(21, 1))
                + r(3, 16) * n * (r(6, 1) * &d2 - r(12, 1))
                + r(243, 32) * n
        })),
        row!("StutteringA", "Var[s]", 0, ds(), |r| r.find("s", MomentKind::Variance, 2).map(|m| &m.form),
            Box::new(|n, b| (r(20, 1) * d2(b) + r(27, 1)) / r(16, 1) * n)),
        row!("StutteringA", "E[x]", 0, ds(), |r| r.raw("x", 1), poly(&[(-1, 1), (3, 4)])),
        row!("StutteringA", "E[y]", 0, ds(), |r| r.raw("y", 1), poly(&[(1, 1), (3, 2)])),
        row!("StutteringA", "E[x^2]", 0, ds(), |r| r.raw("x", 2), Box::new(|n, b| {
            r(9, 16) * n * n + (r(4, 1) * d2(b) - r(21, 1)) / r(16, 1) * n + r(1, 1)
        })),
        row!("StutteringA", "E[y^2]", 0, ds(), |r| r.raw("y", 2), Box::new(|n, b| {
            r(9, 4) * n * n + (r(4, 1) * d2(b) + r(15, 1)) / r(4, 1) * n + r(1, 1)
        })),
        row!("StutteringA", "E[xy]", 0, ds(), |r| r.monomial(&[("x", 1), ("y", 1)]),
            poly(&[(-1, 1), (-3, 8), (9, 8)])),
    ]
}

/// Analyzes at k = 3 with the variance requested and checks one row.
pub fn check_row(row: &Row) -> Result<(), String> {
    let vp = load(row.program);
    let req = AnalysisRequest { variance: true, ..AnalysisRequest::moments(3) };
    let rep = analyze_with(&vp, row.program, &req).map_err(|e| e.to_string())?;
    let form = (row.pick)(&rep).ok_or_else(|| format!("{} {} not computed", row.program, row.label))?;
    agrees(form, row.from, &row.sets, &row.expected).map_err(|e| format!("{} {}: {e}", row.program, row.label))
}
