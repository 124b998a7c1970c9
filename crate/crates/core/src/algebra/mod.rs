//! Exact scalar and sequence arithmetic.

pub mod cfinite;
pub mod poly;
pub mod ratfunc;
pub mod rational;

pub use cfinite::{cf_add, cf_eval, cf_mul, cf_scale, cf_shift, CFinite, CTerm, NPoly};
pub use poly::{Coeff, Mono, Poly};
pub use ratfunc::{
    eval_param_poly, param, ratfunc_eq, ratfunc_eval, render_param_poly, Bindings, ParamPoly,
    ParamSymbol, RatFunc,
};
pub use rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("denominator evaluates to zero under the given bindings")]
    DenominatorZero,
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("parameter `{0}` has no binding")]
    UnboundParameter(String),
}
