//! Limited definite integration over [0, 1] in one variable.
//!
//! Handles exactly the integrands the radial homotopy operator produces for
//! polynomial and simple rational coefficients: sums of terms of the form
//! `C * t^k` and `C * t^k * (A + B*t)^(-m)` with `C`, `A`, `B` free of `t`
//! and `B` structurally nonzero. Anything else is rejected rather than
//! integrated approximately.

use super::{simplify, Builtin, Expr};
use num::{BigInt, BigRational, One};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IntegrateError {
    #[error("integrand not expressible: {0}")]
    NotExpressible(String),
}

/// Computes `∫₀¹ e dt` symbolically, where `t = var`.
pub fn integrate_unit_interval(e: &Expr, var: &str) -> Result<Expr, IntegrateError> {
    let s = simplify(e);
    let terms: Vec<Expr> = match s {
        Expr::Sum(ts) => ts,
        other => vec![other],
    };
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        out.push(integrate_term(&t, var)?);
    }
    Ok(simplify(&Expr::Sum(out)))
}

/// Linear polynomial `A + B*t` split out of an expression; `B` may be zero.
fn split_linear(e: &Expr, var: &str) -> Option<(Expr, Expr)> {
    // A = e|_{t=0}, B = de/dt; valid iff e is (at most) linear in t
    let at_zero = {
        let mut m = std::collections::HashMap::new();
        m.insert(var.to_string(), Expr::zero());
        e.subst(&m)
    };
    let slope = super::diff(e, var);
    if slope.free_symbols().contains(var) {
        return None;
    }
    let rebuilt = simplify(&Expr::add(
        at_zero.clone(),
        Expr::mul(slope.clone(), Expr::sym(var)),
    ));
    if rebuilt == simplify(e) {
        Some((at_zero, slope))
    } else {
        None
    }
}

fn integrate_term(term: &Expr, var: &str) -> Result<Expr, IntegrateError> {
    let factors: Vec<Expr> = match term {
        Expr::Prod(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let mut constant: Vec<Expr> = Vec::new();
    let mut t_power: i64 = 0;
    // (A, B, multiplicity) of a linear denominator (A + B t)^-m
    let mut denom: Option<(Expr, Expr, i64)> = None;
    for f in factors {
        if !f.free_symbols().contains(var) {
            constant.push(f);
            continue;
        }
        match &f {
            Expr::Sym(s) if s == var => t_power += 1,
            Expr::Pow(base, exp) if exp.is_integer() => {
                let k: i64 = exp
                    .numer()
                    .try_into()
                    .map_err(|_| IntegrateError::NotExpressible(term.to_string()))?;
                if let Expr::Sym(s) = base.as_ref() {
                    if s == var && k > 0 {
                        t_power += k;
                        continue;
                    }
                }
                if k < 0 {
                    let (a, b) = split_linear(base, var).ok_or_else(|| {
                        IntegrateError::NotExpressible(term.to_string())
                    })?;
                    if denom.is_some() {
                        return Err(IntegrateError::NotExpressible(term.to_string()));
                    }
                    denom = Some((a, b, -k));
                } else {
                    return Err(IntegrateError::NotExpressible(term.to_string()));
                }
            }
            _ => return Err(IntegrateError::NotExpressible(term.to_string())),
        }
    }
    let c = simplify(&Expr::Prod(constant));
    match denom {
        None => {
            // ∫ t^k = 1/(k+1)
            let k = BigRational::from_integer(BigInt::from(t_power));
            let inv = (k + BigRational::one()).recip();
            Ok(simplify(&Expr::mul(Expr::Num(inv), c)))
        }
        Some((a, b, m)) => {
            let a = simplify(&a);
            if a.is_zero() && t_power < m {
                // singular at the lower endpoint
                return Err(IntegrateError::NotExpressible(term.to_string()));
            }
            // substitute u = A + B t: t^k = B^-k Σ_j C(k,j) (-A)^(k-j) u^j,
            // then ∫₀¹ t^k (A+Bt)^-m dt = Σ_j coeff_j ∫_{A}^{A+B} u^(j-m) du / B
            let k = t_power;
            let mut pieces = Vec::new();
            for j in 0..=k {
                let binom = binomial(k, j);
                let neg_a_pow = pow_expr(&Expr::neg(a.clone()), k - j);
                let e = j - m;
                let antideriv_diff = if e == -1 {
                    // ln(A+B) - ln(A)
                    Expr::sub(
                        Expr::call(Builtin::Ln, Expr::add(a.clone(), b.clone())),
                        Expr::call(Builtin::Ln, a.clone()),
                    )
                } else {
                    let p = e + 1;
                    let coeff = BigRational::from_integer(BigInt::from(p)).recip();
                    Expr::mul(
                        Expr::Num(coeff),
                        Expr::sub(
                            pow_expr(&Expr::add(a.clone(), b.clone()), p),
                            pow_expr(&a, p),
                        ),
                    )
                };
                pieces.push(Expr::Prod(vec![
                    Expr::Num(BigRational::from_integer(binom)),
                    neg_a_pow,
                    antideriv_diff,
                ]));
            }
            // overall factor: C * B^(-k) / B  (dt = du / B)
            let b_pow = pow_expr(&b, -(k + 1));
            Ok(simplify(&Expr::Prod(vec![c, b_pow, Expr::Sum(pieces)])))
        }
    }
}

fn binomial(n: i64, k: i64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn pow_expr(base: &Expr, exp: i64) -> Expr {
    if exp == 0 {
        Expr::one()
    } else {
        Expr::Pow(
            Box::new(base.clone()),
            BigRational::from_integer(BigInt::from(exp)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn integ(text: &str) -> Result<Expr, IntegrateError> {
        integrate_unit_interval(&parse_expr(text).unwrap(), "t")
    }

    fn s(text: &str) -> Expr {
        simplify(&parse_expr(text).unwrap())
    }

    #[test]
    fn polynomial_terms() {
        assert_eq!(integ("3*t^2*x^2*y").unwrap(), s("x^2*y"));
        assert_eq!(integ("t + 1").unwrap(), s("3/2"));
    }

    #[test]
    fn thermo_log_integral() {
        // ∫₀¹ c_v (T-1) / (1 + t (T-1)) dt = c_v ln T
        let got = integ("c_v*(T - 1) / (1 + t*(T - 1))").unwrap();
        assert_eq!(got, s("c_v*ln(T)"));
    }

    #[test]
    fn linear_over_linear() {
        // ∫₀¹ t/(1+t) dt = 1 - ln 2
        let got = integ("t/(1 + t)").unwrap();
        assert_eq!(got, s("1 - ln(2)"));
    }

    #[test]
    fn quadratic_denominator_rejected() {
        assert!(integ("1/(1 + t^2)").is_err());
    }

    #[test]
    fn transcendental_in_t_rejected() {
        assert!(integ("sin(t)").is_err());
    }
}
