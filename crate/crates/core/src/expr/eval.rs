//! Numeric evaluation: exact rational when possible, floating otherwise.

use super::{Builtin, Expr, Opaque};
use num::{BigRational, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Rational(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }
}

/// Map from symbol name to exact rational or floating value.
#[derive(Debug, Clone, Default)]
pub struct Bindings(pub BTreeMap<String, Value>);

impl Bindings {
    pub fn new() -> Self {
        Bindings(BTreeMap::new())
    }

    pub fn set_rational(&mut self, name: impl Into<String>, v: BigRational) -> &mut Self {
        self.0.insert(name.into(), Value::Rational(v));
        self
    }

    pub fn set_int(&mut self, name: impl Into<String>, v: i64) -> &mut Self {
        self.set_rational(name, BigRational::from_integer(v.into()))
    }

    pub fn set_float(&mut self, name: impl Into<String>, v: f64) -> &mut Self {
        self.0.insert(name.into(), Value::Float(v));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("unbound symbol '{0}'")]
    UnboundSymbol(String),
    #[error("division by zero at the binding point (while raising to {0})")]
    DivisionByZero(String),
    #[error("opaque function '{0}' has no numeric body")]
    OpaqueFunction(String),
    #[error("domain error evaluating {0} (e.g. ln of a nonpositive value)")]
    DomainError(String),
}

/// How to evaluate opaque function applications numerically.
#[derive(Debug, Clone, Copy, Default)]
pub enum OpaqueEval {
    /// Report an error on any opaque application.
    #[default]
    Error,
    /// Instantiate every opaque function as a generic exponential
    /// `f(a1..am) = c * exp(Σ λ_i a_i)` with coefficients derived
    /// deterministically from the function name. Formal derivative orders
    /// then contribute exact factors `Π λ_i^{k_i}`, so the instantiation has
    /// consistent derivatives of all orders. Identities that hold for every
    /// smooth f remain true; generic nonzero expressions stay nonzero.
    Generic,
}

/// Evaluates with exact rational arithmetic where possible. A transcendental
/// node or a float binding switches the subtree to floating point.
pub fn eval_at(e: &Expr, b: &Bindings) -> Result<Value, EvalError> {
    eval_value(e, b, OpaqueEval::Error)
}

/// Floating-point evaluation, with a pluggable opaque-function policy.
pub fn eval_f64(e: &Expr, b: &Bindings, opaque: OpaqueEval) -> Result<f64, EvalError> {
    Ok(eval_value(e, b, opaque)?.to_f64())
}

fn eval_value(e: &Expr, b: &Bindings, opaque: OpaqueEval) -> Result<Value, EvalError> {
    match e {
        Expr::Num(r) => Ok(Value::Rational(r.clone())),
        Expr::Sym(s) => b
            .get(s)
            .cloned()
            .ok_or_else(|| EvalError::UnboundSymbol(s.clone())),
        Expr::Sum(ts) => {
            let mut acc = Value::Rational(BigRational::zero());
            for t in ts {
                acc = add_values(acc, eval_value(t, b, opaque)?);
            }
            Ok(acc)
        }
        Expr::Prod(fs) => {
            let mut acc = Value::Rational(BigRational::from_integer(1.into()));
            for f in fs {
                acc = mul_values(acc, eval_value(f, b, opaque)?);
            }
            Ok(acc)
        }
        Expr::Pow(base, exp) => {
            let bv = eval_value(base, b, opaque)?;
            if exp.is_integer() {
                let k: Option<i64> = exp.numer().try_into().ok();
                if let (Value::Rational(r), Some(k)) = (&bv, k) {
                    if r.is_zero() && k <= 0 {
                        return Err(EvalError::DivisionByZero(base.to_string()));
                    }
                    if k.unsigned_abs() <= 512 {
                        let n = num::traits::Pow::pow(r.numer(), k.unsigned_abs() as u32);
                        let d = num::traits::Pow::pow(r.denom(), k.unsigned_abs() as u32);
                        let v = BigRational::new(n, d);
                        return Ok(Value::Rational(if k >= 0 { v } else { v.recip() }));
                    }
                }
            }
            let x = bv.to_f64();
            let p = exp.to_f64().unwrap_or(f64::NAN);
            if x == 0.0 && p < 0.0 {
                return Err(EvalError::DivisionByZero(base.to_string()));
            }
            let v = x.powf(p);
            if v.is_nan() && !x.is_nan() {
                return Err(EvalError::DomainError(e.to_string()));
            }
            Ok(Value::Float(v))
        }
        Expr::Call(f, a) => {
            let x = eval_value(a, b, opaque)?.to_f64();
            let v = match f {
                Builtin::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::DomainError(e.to_string()));
                    }
                    x.ln()
                }
                Builtin::Exp => x.exp(),
                Builtin::Sin => x.sin(),
                Builtin::Cos => x.cos(),
            };
            Ok(Value::Float(v))
        }
        Expr::Opaque(op) => match opaque {
            OpaqueEval::Error => Err(EvalError::OpaqueFunction(op.name.clone())),
            OpaqueEval::Generic => {
                let v = eval_generic_opaque(op, b, opaque)?;
                Ok(Value::Float(v))
            }
        },
    }
}

fn add_values(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Rational(x), Value::Rational(y)) => Value::Rational(x + y),
        (x, y) => Value::Float(x.to_f64() + y.to_f64()),
    }
}

fn mul_values(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Rational(x), Value::Rational(y)) => Value::Rational(x * y),
        (x, y) => Value::Float(x.to_f64() * y.to_f64()),
    }
}

/// FNV-1a, for stable per-name coefficients of the generic instantiation.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// λ coefficient for argument slot `i` of opaque function `name`, in
/// [0.55, 1.55] so powers stay tame on unit-scale boxes.
fn generic_lambda(name: &str, i: usize) -> f64 {
    let h = fnv1a(format!("{name}#{i}").as_bytes());
    0.55 + (h % 10_000) as f64 / 10_000.0
}

fn generic_scale(name: &str) -> f64 {
    let h = fnv1a(format!("{name}!scale").as_bytes());
    0.6 + (h % 10_000) as f64 / 12_500.0
}

fn eval_generic_opaque(op: &Opaque, b: &Bindings, mode: OpaqueEval) -> Result<f64, EvalError> {
    let mut exponent = 0.0;
    let mut factor = generic_scale(&op.name);
    for (i, arg) in op.args.iter().enumerate() {
        let lam = generic_lambda(&op.name, i);
        let x = eval_value(arg, b, mode)?.to_f64();
        exponent += lam * x;
        factor *= lam.powi(op.orders[i] as i32);
    }
    Ok(factor * exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn exact_rational_arithmetic() {
        let e = parse_expr("R*T/V").unwrap();
        let mut b = Bindings::new();
        b.set_int("R", 8).set_int("T", 2).set_int("V", 4);
        assert_eq!(
            eval_at(&e, &b).unwrap(),
            Value::Rational(BigRational::from_integer(4.into()))
        );
    }

    #[test]
    fn transcendental_is_float() {
        let e = parse_expr("ln(V)").unwrap();
        let mut b = Bindings::new();
        b.set_int("V", 1);
        match eval_at(&e, &b).unwrap() {
            Value::Float(x) => assert_eq!(x, 0.0),
            v => panic!("expected float, got {v:?}"),
        }
    }

    #[test]
    fn division_by_zero_at_binding() {
        let e = parse_expr("1/x").unwrap();
        let mut b = Bindings::new();
        b.set_int("x", 0);
        assert!(matches!(
            eval_at(&e, &b),
            Err(EvalError::DivisionByZero(_))
        ));
    }

    #[test]
    fn unbound_symbol() {
        let e = parse_expr("x + y").unwrap();
        let mut b = Bindings::new();
        b.set_int("x", 1);
        assert_eq!(eval_at(&e, &b), Err(EvalError::UnboundSymbol("y".into())));
    }

    #[test]
    fn generic_opaque_derivative_consistency() {
        // numeric derivative of the generic instantiation matches the
        // instantiated symbolic derivative
        let f = parse_expr("f(x)").unwrap();
        let df = crate::expr::diff(&f, "x");
        let mut b = Bindings::new();
        b.set_float("x", 0.7);
        let h = 1e-6;
        let mut bp = Bindings::new();
        bp.set_float("x", 0.7 + h);
        let mut bm = Bindings::new();
        bm.set_float("x", 0.7 - h);
        let fd = (eval_f64(&f, &bp, OpaqueEval::Generic).unwrap()
            - eval_f64(&f, &bm, OpaqueEval::Generic).unwrap())
            / (2.0 * h);
        let sym = eval_f64(&df, &b, OpaqueEval::Generic).unwrap();
        assert!((fd - sym).abs() < 1e-6 * sym.abs().max(1.0));
    }
}
