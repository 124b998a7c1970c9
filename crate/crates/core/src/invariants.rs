//! User-facing moment invariants assembled from solved raw moments.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::rational::{self, Rational};
use crate::algebra::{render_param_poly, AlgebraError, Bindings, CFinite, RatFunc};
use crate::engine::{build_system, EMonomial, EngineError, RecurrenceSystem};
use crate::frontend::ValidatedProgram;
use crate::solver::{solve_system, ClosedFormSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("moment E[{0}] was not computed")]
    MissingMoment(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("moment order must be at least 1")]
    InvalidOrder,
    #[error("variance is zero at n = {0}")]
    ZeroVariance(u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKind {
    Raw,
    Central,
    Variance,
    Covariance,
}

#[derive(Clone, Debug)]
pub struct MomentInvariant {
    pub variable: String,
    pub order: u32,
    pub kind: MomentKind,
    pub with: Option<String>,
    pub form: CFinite,
    pub side_conditions: Vec<String>,
}

impl MomentInvariant {
    pub fn label(&self) -> String {
        let v = &self.variable;
        match self.kind {
            MomentKind::Raw if self.order == 1 => format!("E[{v}(n)]"),
            MomentKind::Raw => format!("E[{v}^{}(n)]", self.order),
            MomentKind::Central => format!("E[({v}-E[{v}])^{}(n)]", self.order),
            MomentKind::Variance => format!("Var[{v}(n)]"),
            MomentKind::Covariance => {
                format!("Cov[{v},{}](n)", self.with.as_deref().unwrap_or(v))
            }
        }
    }

    pub fn line(&self) -> String {
        format!("{} = {}", self.label(), self.form.render())
    }
}

/// What to report beyond the raw moments `1..=k`.
#[derive(Clone, Debug, Default)]
pub struct AnalysisRequest {
    pub k: u32,
    pub central: bool,
    pub variance: bool,
    pub covariances: Vec<(String, String)>,
}

impl AnalysisRequest {
    pub fn moments(k: u32) -> Self {
        AnalysisRequest {
            k,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub program: String,
    pub params: Vec<String>,
    pub vars: Vec<String>,
    pub moments: Vec<MomentInvariant>,
    pub system: RecurrenceSystem,
    pub forms: ClosedFormSet,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TermJson {
    pub base: String,
    pub poly: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MomentJson {
    pub variable: String,
    pub order: u32,
    pub kind: MomentKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub with: Option<String>,
    pub validity_start: usize,
    pub prefix: Vec<String>,
    pub terms: Vec<TermJson>,
    pub side_conditions: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportJson {
    pub program: String,
    pub params: Vec<String>,
    pub moments: Vec<MomentJson>,
}

/// Nonzero requirements on parameter denominators appearing in `form`.
pub fn side_conditions(form: &CFinite) -> Vec<String> {
    let mut out = BTreeSet::new();
    let mut visit = |r: &RatFunc| {
        if let Some(den) = r.nonconstant_den() {
            out.insert(format!("{} != 0", render_param_poly(den)));
        }
    };
    for t in form.terms() {
        visit(&t.base);
        t.poly.coeffs().iter().for_each(&mut visit);
    }
    form.prefix().iter().for_each(visit);
    out.into_iter().collect()
}

fn raw_form(
    forms: &ClosedFormSet,
    m: usize,
    var: usize,
    j: u32,
    vars: &[String],
) -> Result<CFinite, AnalysisError> {
    if j == 0 {
        return Ok(CFinite::constant(RatFunc::one()));
    }
    let key = EMonomial::var(m, var, j);
    forms
        .get(&key)
        .cloned()
        .ok_or_else(|| AnalysisError::MissingMoment(key.render(vars)))
}

/// `E[(x − E[x])^j]` by the binomial transformation of center.
pub fn central_moment(
    forms: &ClosedFormSet,
    vars: &[String],
    var: usize,
    j: u32,
) -> Result<CFinite, AnalysisError> {
    let m = vars.len();
    let neg_mean = raw_form(forms, m, var, 1, vars)?.neg();
    let mut acc = CFinite::zero();
    for i in 0..=j {
        let coeff = Rational::from_integer(rational::binomial(j, i));
        let term = raw_form(forms, m, var, i, vars)?.mul(&neg_mean.pow(j - i));
        acc = acc.add(&term.scale(&RatFunc::from(coeff)));
    }
    Ok(acc)
}

/// `E[x^2] − E[x]^2`.
pub fn variance(forms: &ClosedFormSet, vars: &[String], var: usize) -> Result<CFinite, AnalysisError> {
    let m = vars.len();
    let mean = raw_form(forms, m, var, 1, vars)?;
    Ok(raw_form(forms, m, var, 2, vars)?.sub(&mean.mul(&mean)))
}

/// `E[x·y] − E[x]·E[y]`.
pub fn covariance(
    forms: &ClosedFormSet,
    vars: &[String],
    x: usize,
    y: usize,
) -> Result<CFinite, AnalysisError> {
    let m = vars.len();
    let key = EMonomial::var(m, x, 1).mul(&EMonomial::var(m, y, 1));
    let xy = forms
        .get(&key)
        .cloned()
        .ok_or_else(|| AnalysisError::MissingMoment(key.render(vars)))?;
    let ex = raw_form(forms, m, x, 1, vars)?;
    let ey = raw_form(forms, m, y, 1, vars)?;
    Ok(xy.sub(&ex.mul(&ey)))
}

/// Normalized third central moment at a numeric point.
pub fn skewness_at(
    forms: &ClosedFormSet,
    vars: &[String],
    var: usize,
    n: u64,
    bindings: &Bindings,
) -> Result<f64, AnalysisError> {
    let var_n = variance(forms, vars, var)?.eval(n, bindings)?;
    if num_traits::Zero::is_zero(&var_n) {
        return Err(AnalysisError::ZeroVariance(n));
    }
    let mu3 = central_moment(forms, vars, var, 3)?.eval(n, bindings)?;
    Ok(rational::to_f64(&mu3) / rational::to_f64(&var_n).powf(1.5))
}

fn lookup(vp: &ValidatedProgram, name: &str) -> Result<usize, AnalysisError> {
    vp.source_vars()
        .find(|(_, v)| *v == name)
        .map(|(i, _)| i)
        .ok_or_else(|| AnalysisError::UnknownVariable(name.to_string()))
}

/// Raw moments `1..=k` of every program variable.
pub fn analyze(vp: &ValidatedProgram, name: &str, k: u32) -> Result<InvariantReport, AnalysisError> {
    analyze_with(vp, name, &AnalysisRequest::moments(k))
}

pub fn analyze_with(
    vp: &ValidatedProgram,
    name: &str,
    req: &AnalysisRequest,
) -> Result<InvariantReport, AnalysisError> {
    if req.k == 0 {
        return Err(AnalysisError::InvalidOrder);
    }
    let m = vp.vars.len();
    let sources: Vec<usize> = vp.source_vars().map(|(i, _)| i).collect();
    let cov_pairs = req
        .covariances
        .iter()
        .map(|(a, b)| Ok((lookup(vp, a)?, lookup(vp, b)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let top = if req.variance { req.k.max(2) } else { req.k };
    let mut targets = BTreeSet::new();
    for &i in &sources {
        for j in 1..=top {
            targets.insert(EMonomial::var(m, i, j));
        }
    }
    for &(x, y) in &cov_pairs {
        targets.insert(EMonomial::var(m, x, 1).mul(&EMonomial::var(m, y, 1)));
    }
    let system = build_system(vp, &targets)?;
    let forms = solve_system(&system);

    let mut moments = Vec::new();
    let mut push = |variable: &str, order, kind, with: Option<String>, form: CFinite| {
        moments.push(MomentInvariant {
            variable: variable.to_string(),
            order,
            kind,
            with,
            side_conditions: side_conditions(&form),
            form,
        });
    };
    for &i in &sources {
        let name = &vp.vars[i];
        for j in 1..=req.k {
            push(name, j, MomentKind::Raw, None, raw_form(&forms, m, i, j, &vp.vars)?);
        }
        if req.central {
            for j in 2..=req.k {
                push(name, j, MomentKind::Central, None, central_moment(&forms, &vp.vars, i, j)?);
            }
        }
        if req.variance {
            push(name, 2, MomentKind::Variance, None, variance(&forms, &vp.vars, i)?);
        }
    }
    for &(x, y) in &cov_pairs {
        let form = covariance(&forms, &vp.vars, x, y)?;
        push(&vp.vars[x], 2, MomentKind::Covariance, Some(vp.vars[y].clone()), form);
    }
    Ok(InvariantReport {
        program: name.to_string(),
        params: vp.params.iter().map(|p| p.name().to_string()).collect(),
        vars: vp.vars.clone(),
        moments,
        system,
        forms,
    })
}

impl InvariantReport {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Raw moment form `E[var^j]`, if solved.
    pub fn raw(&self, var: &str, j: u32) -> Option<&CFinite> {
        let i = self.var_index(var)?;
        self.forms.get(&EMonomial::var(self.vars.len(), i, j))
    }

    /// Closed form of an arbitrary solved monomial given as `(variable, exponent)` pairs.
    pub fn monomial(&self, factors: &[(&str, u32)]) -> Option<&CFinite> {
        let mut exps = vec![0; self.vars.len()];
        for (v, e) in factors {
            exps[self.var_index(v)?] += e;
        }
        self.forms.get(&EMonomial::from_exponents(exps))
    }

    pub fn find(&self, var: &str, kind: MomentKind, order: u32) -> Option<&MomentInvariant> {
        self.moments
            .iter()
            .find(|m| m.variable == var && m.kind == kind && m.order == order)
    }

    /// Canonical text, one invariant per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.moments {
            writeln!(out, "{}", m.line()).unwrap();
        }
        let conditions: BTreeSet<&String> =
            self.moments.iter().flat_map(|m| &m.side_conditions).collect();
        if !conditions.is_empty() {
            let list: Vec<&str> = conditions.into_iter().map(String::as_str).collect();
            writeln!(out, "valid when: {}", list.join(", ")).unwrap();
        }
        out
    }

    pub fn to_json_value(&self) -> ReportJson {
        ReportJson {
            program: self.program.clone(),
            params: self.params.clone(),
            moments: self
                .moments
                .iter()
                .map(|m| MomentJson {
                    variable: m.variable.clone(),
                    order: m.order,
                    kind: m.kind,
                    with: m.with.clone(),
                    validity_start: m.form.validity_start(),
                    prefix: m.form.prefix().iter().map(ToString::to_string).collect(),
                    terms: m
                        .form
                        .terms()
                        .iter()
                        .map(|t| TermJson {
                            base: t.base.to_string(),
                            poly: t.poly.coeffs().iter().map(ToString::to_string).collect(),
                        })
                        .collect(),
                    side_conditions: m.side_conditions.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }
}
