//! Exact partial differentiation. Symbols other than the differentiation
//! variable are treated as independent constants; opaque functions only
//! accumulate formal derivative orders.

use super::{simplify, Builtin, Expr, Opaque};
use num::{BigRational, One};

/// Exact partial derivative `∂e/∂x`, canonicalized.
pub fn diff(e: &Expr, x: &str) -> Expr {
    simplify(&diff_raw(e, x))
}

fn diff_raw(e: &Expr, x: &str) -> Expr {
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == x {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| diff_raw(t, x)).collect()),
        Expr::Prod(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                factors.push(diff_raw(f, x));
                for (j, g) in fs.iter().enumerate() {
                    if i != j {
                        factors.push(g.clone());
                    }
                }
                terms.push(Expr::Prod(factors));
            }
            Expr::Sum(terms)
        }
        Expr::Pow(b, exp) => {
            // d(u^r) = r u^(r-1) u'
            let lowered = Expr::Pow(b.clone(), exp.clone() - BigRational::one());
            Expr::Prod(vec![Expr::Num(exp.clone()), lowered, diff_raw(b, x)])
        }
        Expr::Call(f, a) => {
            let inner = diff_raw(a, x);
            let outer = match f {
                Builtin::Ln => Expr::Pow(a.clone(), BigRational::from_integer((-1).into())),
                Builtin::Exp => Expr::Call(Builtin::Exp, a.clone()),
                Builtin::Sin => Expr::Call(Builtin::Cos, a.clone()),
                Builtin::Cos => Expr::neg(Expr::Call(Builtin::Sin, a.clone())),
            };
            Expr::Prod(vec![outer, inner])
        }
        Expr::Opaque(op) => {
            let mut terms = Vec::new();
            for (i, a) in op.args.iter().enumerate() {
                let mut orders = op.orders.clone();
                orders[i] += 1;
                let bumped = Expr::Opaque(Opaque {
                    name: op.name.clone(),
                    args: op.args.clone(),
                    orders,
                });
                terms.push(Expr::Prod(vec![bumped, diff_raw(a, x)]));
            }
            Expr::Sum(terms)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn d(text: &str, x: &str) -> Expr {
        diff(&parse_expr(text).unwrap(), x)
    }

    fn s(text: &str) -> Expr {
        simplify(&parse_expr(text).unwrap())
    }

    #[test]
    fn linearity() {
        assert_eq!(d("c_v*T", "T"), s("c_v"));
    }

    #[test]
    fn power_rule_quotient() {
        assert_eq!(d("R*T/V", "V"), s("-R*T/V^2"));
    }

    #[test]
    fn chain_rule_opaque() {
        // d/dt f(x - c*t) = -c * f'(x - c*t)
        let got = d("f(x - c*t)", "t");
        let expected = simplify(&Expr::Prod(vec![
            Expr::neg(Expr::sym("c")),
            Expr::Opaque(crate::expr::Opaque {
                name: "f".into(),
                args: vec![s("x - c*t")],
                orders: vec![1],
            }),
        ]));
        assert_eq!(got, expected);
    }

    #[test]
    fn builtin_rules() {
        assert_eq!(d("ln(V)", "V"), s("1/V"));
        assert_eq!(d("sin(x^2)", "x"), s("2*x*cos(x^2)"));
        assert_eq!(d("cos(x)", "x"), s("-sin(x)"));
        assert_eq!(d("exp(2*x)", "x"), s("2*exp(2*x)"));
    }

    #[test]
    fn mixed_partials_commute() {
        let e = parse_expr("x^3*y^2 + sin(x*y) + f(x*y)").unwrap();
        let dxy = diff(&diff(&e, "x"), "y");
        let dyx = diff(&diff(&e, "y"), "x");
        assert_eq!(dxy, dyx);
    }
}
