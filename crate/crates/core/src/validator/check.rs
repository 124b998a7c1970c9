//! Comparison of closed forms against the enumerator or the simulator.

use serde::{Deserialize, Serialize};

use crate::algebra::rational::{self, Rational};
use crate::algebra::{Bindings, CFinite};
use crate::engine::EMonomial;
use crate::frontend::ValidatedProgram;
use crate::invariants::{InvariantReport, MomentInvariant, MomentKind};

use super::enumerate::{enumerate_exact, StateDist};
use super::simulate::{simulate, Samples};
use super::ValidationError;

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub checkpoints: Vec<u64>,
    /// Last iteration checked by the exact enumerator.
    pub n_max: u64,
    pub runs: usize,
    pub seed: u64,
    pub z_max: f64,
    pub abs_floor: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            checkpoints: vec![1, 2, 5, 10, 25, 50],
            n_max: 8,
            runs: 100_000,
            seed: 2024,
            z_max: 4.0,
            abs_floor: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRow {
    pub label: String,
    pub n: u64,
    pub empirical: f64,
    pub stderr: f64,
    pub exact: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MCReport {
    pub program: String,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub z_max: f64,
    pub abs_floor: f64,
    pub rows: Vec<CheckRow>,
    pub pass: bool,
    /// Set when checking could not run at all.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl MCReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let method = match self.method {
            Method::Exact => "exact enumeration".to_string(),
            Method::MonteCarlo => format!(
                "monte carlo, {} runs, seed {}",
                self.runs.unwrap_or(0),
                self.seed.unwrap_or(0)
            ),
        };
        out.push_str(&format!("{} ({method})\n", self.program));
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for r in &self.rows {
            let flag = if r.pass { "ok  " } else { "FAIL" };
            match self.method {
                Method::Exact => out.push_str(&format!(
                    "  {flag} {} n={}: enumerated {} closed form {}\n",
                    r.label, r.n, r.empirical, r.exact
                )),
                Method::MonteCarlo => out.push_str(&format!(
                    "  {flag} {} n={}: empirical {:.6} ± {:.6} closed form {:.6} z={:.2}\n",
                    r.label, r.n, r.empirical, r.stderr, r.exact, r.z
                )),
            }
        }
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out
    }
}

fn source_factors(m: &EMonomial, report: &InvariantReport, source: &[String]) -> Option<Vec<(usize, u32)>> {
    let mut out = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e > 0 {
            let j = source.iter().position(|v| *v == report.vars[i])?;
            out.push((j, e));
        }
    }
    Some(out)
}

fn exact_value(m: &MomentInvariant, d: &StateDist) -> Rational {
    let i = d.vars.iter().position(|v| *v == m.variable).expect("source variable");
    let mean = d.moment(&[(i, 1)]);
    let centered = |s: &[Rational], k: usize| -> Rational {
        if k == i {
            &s[i] - &mean
        } else {
            let mk = d.moment(&[(k, 1)]);
            &s[k] - mk
        }
    };
    let mut acc = Rational::from_integer(0.into());
    match m.kind {
        MomentKind::Raw => return d.moment(&[(i, m.order)]),
        MomentKind::Central | MomentKind::Variance => {
            for (s, p) in &d.states {
                acc += p * rational::pow(&centered(s, i), m.order);
            }
        }
        MomentKind::Covariance => {
            let w = m.with.as_deref().unwrap_or(&m.variable);
            let k = d.vars.iter().position(|v| v == w).expect("source variable");
            for (s, p) in &d.states {
                acc += p * centered(s, i) * centered(s, k);
            }
        }
    }
    acc
}

/// Estimate and standard error. Central moments use the influence function
/// `(x−μ)^j − m_j − j·m_{j−1}·(x−μ)`.
fn estimate(m: &MomentInvariant, s: &Samples, c: usize) -> (f64, f64) {
    let i = s.var_index(&m.variable).expect("source variable");
    let xs = &s.values[c][i];
    let len = xs.len() as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let se = |v: &[f64]| {
        let mu = mean(v);
        let var = v.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (len - 1.0).max(1.0);
        (var / len).sqrt()
    };
    match m.kind {
        MomentKind::Raw => {
            let v = s.products(c, &[(i, m.order)]);
            (mean(&v), se(&v))
        }
        MomentKind::Central | MomentKind::Variance => {
            let mu = mean(xs);
            let j = m.order as i32;
            let mj = mean(&xs.iter().map(|x| (x - mu).powi(j)).collect::<Vec<_>>());
            let mj1 = mean(&xs.iter().map(|x| (x - mu).powi(j - 1)).collect::<Vec<_>>());
            let infl: Vec<f64> = xs
                .iter()
                .map(|x| (x - mu).powi(j) - j as f64 * mj1 * (x - mu))
                .collect();
            (mj, se(&infl))
        }
        MomentKind::Covariance => {
            let w = m.with.as_deref().unwrap_or(&m.variable);
            let ys = &s.values[c][s.var_index(w).expect("source variable")];
            let (mx, my) = (mean(xs), mean(ys));
            let prod: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
            (mean(&prod), se(&prod))
        }
    }
}

fn eval_form(form: &CFinite, n: u64, bindings: &Bindings) -> Result<Rational, ValidationError> {
    form.eval(n, bindings).map_err(|e| match e {
        crate::algebra::AlgebraError::UnboundParameter(p) => ValidationError::UnboundParameter(p),
        other => ValidationError::Algebra(other),
    })
}

fn failed(report: &InvariantReport, method: Method, cfg: &CheckConfig, e: ValidationError) -> MCReport {
    MCReport {
        program: report.program.clone(),
        method,
        runs: None,
        seed: None,
        z_max: cfg.z_max,
        abs_floor: cfg.abs_floor,
        rows: Vec::new(),
        pass: false,
        error: Some(e.to_string()),
    }
}

/// Checks every reported moment. Finite-support programs are compared
/// exactly against the enumerator for `n = 0..=n_max`; all others against
/// Monte Carlo estimates at the configured checkpoints.
pub fn check(report: &InvariantReport, vp: &ValidatedProgram, bindings: &Bindings, cfg: &CheckConfig) -> MCReport {
    if vp.is_finite_support() {
        match check_exact(report, vp, bindings, cfg) {
            Ok(r) => r,
            Err(e) => failed(report, Method::Exact, cfg, e),
        }
    } else {
        match check_mc(report, vp, bindings, cfg) {
            Ok(r) => r,
            Err(e) => failed(report, Method::MonteCarlo, cfg, e),
        }
    }
}

fn check_exact(
    report: &InvariantReport,
    vp: &ValidatedProgram,
    bindings: &Bindings,
    cfg: &CheckConfig,
) -> Result<MCReport, ValidationError> {
    let dists = enumerate_exact(vp, bindings, cfg.n_max)?;
    let mut rows = Vec::new();
    for m in &report.moments {
        for d in &dists {
            let got = exact_value(m, d);
            let want = eval_form(&m.form, d.n, bindings)?;
            let pass = got == want;
            rows.push(CheckRow {
                label: m.label(),
                n: d.n,
                empirical: rational::to_f64(&got),
                stderr: 0.0,
                exact: rational::to_f64(&want),
                z: if pass { 0.0 } else { f64::INFINITY },
                pass,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(MCReport {
        program: report.program.clone(),
        method: Method::Exact,
        runs: None,
        seed: None,
        z_max: cfg.z_max,
        abs_floor: cfg.abs_floor,
        rows,
        pass,
        error: None,
    })
}

fn check_mc(
    report: &InvariantReport,
    vp: &ValidatedProgram,
    bindings: &Bindings,
    cfg: &CheckConfig,
) -> Result<MCReport, ValidationError> {
    let samples = simulate(vp, bindings, &cfg.checkpoints, cfg.runs, cfg.seed)?;
    let mut rows = Vec::new();
    for m in &report.moments {
        for (c, &n) in samples.checkpoints.iter().enumerate() {
            let (emp, se) = estimate(m, &samples, c);
            let exact = rational::to_f64(&eval_form(&m.form, n, bindings)?);
            let diff = (emp - exact).abs();
            let z = if se > 0.0 {
                (emp - exact) / se
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            rows.push(CheckRow {
                label: m.label(),
                n,
                empirical: emp,
                stderr: se,
                exact,
                z,
                pass: diff <= cfg.z_max * se + cfg.abs_floor,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(MCReport {
        program: report.program.clone(),
        method: Method::MonteCarlo,
        runs: Some(cfg.runs),
        seed: Some(cfg.seed),
        z_max: cfg.z_max,
        abs_floor: cfg.abs_floor,
        rows,
        pass,
        error: None,
    })
}

/// Solved E-variables over source variables whose closed form disagrees
/// with the enumerator at some `n ≤ n_max`, as `(monomial, n)` pairs.
pub fn exact_monomial_mismatches(
    report: &InvariantReport,
    vp: &ValidatedProgram,
    bindings: &Bindings,
    n_max: u64,
) -> Result<Vec<(String, u64)>, ValidationError> {
    let dists = enumerate_exact(vp, bindings, n_max)?;
    let source = vp.source.variables();
    let mut out = Vec::new();
    for (m, form) in &report.forms.forms {
        let Some(factors) = source_factors(m, report, &source) else {
            continue;
        };
        for d in &dists {
            if d.moment(&factors) != eval_form(form, d.n, bindings)? {
                out.push((m.render(&report.vars), d.n));
            }
        }
    }
    Ok(out)
}
