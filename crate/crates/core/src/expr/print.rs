//! Pretty-printer emitting the expression grammar. `parse(print(e)) == e`
//! holds for canonical expressions.

use super::Expr;
use num::{BigRational, One, Signed};

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Sum(ts) => {
            let mut out = String::new();
            for (i, t) in ts.iter().enumerate() {
                let (neg, body) = strip_sign(t);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                out.push_str(&print_term(&body));
            }
            out
        }
        _ => {
            let (neg, body) = strip_sign(e);
            if neg {
                format!("-{}", print_term(&body))
            } else {
                print_term(&body)
            }
        }
    }
}

/// Splits off a leading minus sign from a term for sum rendering.
fn strip_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Num(r) if r.is_negative() => (true, Expr::Num(-r.clone())),
        Expr::Prod(fs) => {
            if let Some(Expr::Num(r)) = fs.first() {
                if r.is_negative() {
                    let mut rest = fs.clone();
                    let flipped = -r.clone();
                    if flipped.is_one() && rest.len() > 1 {
                        rest.remove(0);
                    } else {
                        rest[0] = Expr::Num(flipped);
                    }
                    let body = if rest.len() == 1 {
                        rest.pop().unwrap()
                    } else {
                        Expr::Prod(rest)
                    };
                    return (true, body);
                }
            }
            (false, e.clone())
        }
        _ => (false, e.clone()),
    }
}

fn print_term(e: &Expr) -> String {
    match e {
        Expr::Prod(fs) => {
            let mut num_parts: Vec<String> = Vec::new();
            let mut den_parts: Vec<String> = Vec::new();
            for f in fs {
                match f {
                    Expr::Pow(b, exp) if exp.is_integer() && exp.is_negative() => {
                        let flipped = -exp.clone();
                        if flipped.is_one() {
                            den_parts.push(print_factor_base(b));
                        } else {
                            den_parts.push(format!(
                                "{}^{}",
                                print_factor_base(b),
                                flipped.numer()
                            ));
                        }
                    }
                    _ => num_parts.push(print_factor(f)),
                }
            }
            let num = if num_parts.is_empty() {
                "1".to_string()
            } else {
                num_parts.join("*")
            };
            if den_parts.is_empty() {
                num
            } else {
                format!("{}/{}", num, den_parts.join("/"))
            }
        }
        _ => print_factor(e),
    }
}

fn print_factor(e: &Expr) -> String {
    match e {
        Expr::Pow(b, exp) => {
            if exp.is_integer() {
                if exp.is_negative() {
                    let flipped = -exp.clone();
                    if flipped.is_one() {
                        format!("1/{}", print_factor_base(b))
                    } else {
                        format!("1/{}^{}", print_factor_base(b), flipped.numer())
                    }
                } else {
                    format!("{}^{}", print_factor_base(b), exp.numer())
                }
            } else {
                format!("{}^({}/{})", print_factor_base(b), exp.numer(), exp.denom())
            }
        }
        _ => print_base(e),
    }
}

fn print_factor_base(e: &Expr) -> String {
    print_base(e)
}

fn print_base(e: &Expr) -> String {
    match e {
        Expr::Num(r) => print_rational(r),
        Expr::Sym(s) => s.clone(),
        Expr::Call(f, a) => format!("{}({})", f.name(), print_expr(a)),
        Expr::Opaque(op) => {
            let args: Vec<String> = op.args.iter().map(print_expr).collect();
            if op.orders.iter().all(|&k| k == 0) {
                format!("{}({})", op.name, args.join(", "))
            } else {
                let orders: Vec<String> = op.orders.iter().map(|k| k.to_string()).collect();
                format!("D({}, {})({})", op.name, orders.join(", "), args.join(", "))
            }
        }
        Expr::Sum(_) | Expr::Prod(_) | Expr::Pow(_, _) => format!("({})", print_expr(e)),
    }
}

fn print_rational(r: &BigRational) -> String {
    if r.is_integer() {
        let s = r.numer().to_string();
        if r.is_negative() {
            format!("({s})")
        } else {
            s
        }
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse_expr, simplify};

    fn round_trip(text: &str) {
        let e = parse_expr(text).unwrap();
        let printed = e.to_string();
        let back = parse_expr(&printed).unwrap();
        assert_eq!(back, e, "round trip failed: {text} -> {printed}");
        assert_eq!(simplify(&e), e);
    }

    #[test]
    fn print_parse_round_trips() {
        for t in [
            "c_v*T",
            "(R*T)/V",
            "x^2*y - 3/4*z + sin(x)",
            "-x - y",
            "f(x - c*t)",
            "D(f, 2)(x)",
            "1/(x^2 + y^2)",
            "x^(1/2)",
            "2^(1/2)*x",
            "-(3/4)",
            "ln(T)*c_v + R*ln(V)",
        ] {
            round_trip(t);
        }
    }
}
